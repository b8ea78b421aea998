"""
Closed forms against brute-force chains
=======================================

Every closed-form average in :mod:`semvia.analytic` has an independent
counterpart in :mod:`semvia.oracle`, built only from the slot rules and
solved numerically.  This script lines them up for one parameter point.
"""

from semvia import analytic as an
from semvia import oracle
from semvia.model import ChannelParams, SourceParams
from semvia.policies import MRS, RS, ChangeAware, SemanticsAware

src, ch = SourceParams(0.3, 0.6), ChannelParams(0.7)
policies = [RS(0.5), MRS(0.4, 0.9), ChangeAware(), SemanticsAware()]

# %%
# AoII, reconstruction error and sampling cost exist in closed form for
# all four policies.
print(f"{'policy':28s} {'AoII':>10s} {'oracle':>10s} {'P_E':>8s} {'cost':>8s}")
for pol in policies:
    print(f"{pol!r:28s} {an.aoii_average(pol, src, ch):10.6f} "
          f"{oracle.aoii_average_oracle(pol, src, ch):10.6f} "
          f"{an.reconstruction_error(pol, src, ch):8.5f} {an.sampling_cost_rate(pol, src, ch):8.5f}")

# %%
# VIA is unbounded, so its chain is truncated where the geometric tail
# falls below 1e-12.  Only random and change-aware sampling keep (X, VIA)
# Markov, which is why only they have a VIA closed form.
for pol in (RS(0.5), ChangeAware()):
    pi, chain = oracle.via_distribution(pol, src, ch)
    print(f"{pol!r}: closed form {an.via_average(pol, src, ch):.10f}, "
          f"chain {oracle.via_average_oracle(pol, src, ch):.10f} (truncated at {chain.truncation})")

# %%
# The AoII pmf decays geometrically; the first few terms agree to machine
# precision.
pmf = oracle.aoii_pmf_oracle(MRS(0.4, 0.9), src, ch, 5)
for i, v in enumerate(pmf):
    print(i, f"{an.aoii_pmf(MRS(0.4, 0.9), src, ch, i):.12f}", f"{v:.12f}")
