"""
When the fixed policies break the budget
========================================

Change-aware and semantics-aware sampling have no tuning knob, so their
sampling rate is set by the source.  For fast sources it exceeds a budget
that the tunable policies respect by construction.
"""

from semvia.model import ChannelParams, SourceParams
from semvia.optimizer import CostBudget, classify_fixed_policies, solve_mrsc

budget = CostBudget.from_eta(0.5)
ch = ChannelParams(0.9)

# %%
# Sampling rate of each fixed policy and whether it fits the budget,
# alongside the AoIV reached by tuned modified random sampling.
print("   p   CA rate  fits   SA rate  fits   MRSC AoIV")
for p in (0.1, 0.3, 0.5, 0.7, 0.9):
    src = SourceParams(p, 0.8)
    fx = classify_fixed_policies(src, ch, budget)
    ca, sa = fx["change_aware"], fx["semantics_aware"]
    m = solve_mrsc("aoiv", src, ch, budget)
    print(f" {p:.1f}  {ca.cost_rate:7.4f}  {str(ca.feasible):5s}  {sa.cost_rate:7.4f}  {str(sa.feasible):5s}  {m.objective_value:9.4f}")

# %%
# The same comparison is available from the command line as a sweep:
#
#     semvia sweep --config sweep.json --out results/
