"""Closed-form stationary quantities for the four sampling policies.

Naming: ``a`` is the per-slot probability of a successful update under RS,
``a = p_a * p_s``.  Most RS expressions depend on the policy only through
``a``, and the semantics-aware forms are the RS forms evaluated at
``a = p_s``.

The array forms (``rs_*``, ``mrs_*``, ``F``, ``G``, ``H``, ``K``) accept
numpy arrays and broadcast, which is what the optimizer's grid search uses.
The policy-level functions below them validate inputs and dispatch.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DivergentSeries, DomainError
from .model import ChannelParams, SourceParams
from .policies import MRS, RS, ChangeAware, Policy, SemanticsAware

# ---------------------------------------------------------------------------
# auxiliary functions


def phi(x, a):
    """``x + (1 - x) a``: Phi with ``a = p_a p_s``, Psi with ``a = p_s``."""
    return x + (1 - x) * a


def via_exponents(i: int) -> tuple[int, int]:
    """The (k, w) exponents of the RS VIA pmf; ``k + w == i + 1``."""
    if i % 2 == 0:
        return i // 2, (i + 2) // 2
    return (i + 1) // 2, (i + 1) // 2


def F(p, q, ps, q1, q2):
    return (1 - p) * (1 - q) * ps * q2**2 + (p + q - 2 * p * q) * q2 + p * q * (2 - ps * q1) * q1


def _lead0(p, q1, q2):
    # q2 + p (q1 - q2)
    return q2 + p * (q1 - q2)


def G(p, q, ps, q1, q2):
    return q * _lead0(p, q1, q2) * phi(q, q2 * ps) + p * _lead0(q, q1, q2) * phi(p, q2 * ps)


def H(p, q, ps, q1, q2, i):
    """Numerator of the MRS AoII pmf at ``i >= 1``."""
    return (
        p * q * (1 - q1 * ps) * (1 - q2 * ps) ** (i - 1)
        * (_lead0(p, q1, q2) * phi(q, q2 * ps) * (1 - q) ** (i - 1)
           + _lead0(q, q1, q2) * phi(p, q2 * ps) * (1 - p) ** (i - 1))
    )


def K(p, q, ps, q1, q2):
    return p * q * (1 - q1 * ps) * (
        p**2 * (q1 - q2) * (1 - q2 * ps)
        + p * q2 * (1 + q1 * ps - 2 * q2 * ps)
        + q**2 * q1
        + q * (1 - q) * q2 * (1 + q1 * ps)
        + (2 - 2 * q + q**2) * ps * q2**2
    )


def _rs_den(p, q, a):
    return p + q + (1 - p - q) * a


# ---------------------------------------------------------------------------
# array forms


def rs_via_average(p, q, a):
    return 2 * p * q * (1 - a) / ((p + q) * a)


def rs_reconstruction_error(p, q, a):
    return 2 * p * q * (1 - a) / ((p + q) * _rs_den(p, q, a))


# for a binary source the mean AoIV is the probability of the erroneous state
rs_aoiv_average = rs_reconstruction_error


def rs_aoii_average(p, q, a):
    return p * q * (1 - a) * (p + q + (2 - p - q) * a) / (
        (p + q) * phi(p, a) * phi(q, a) * _rs_den(p, q, a)
    )


def mrs_aoiv_average(p, q, ps, q1, q2):
    return p * q * (1 - q1 * ps) * ((p + q) * q1 + (2 - p - q) * q2) / ((p + q) * F(p, q, ps, q1, q2))


def mrs_aoii_average(p, q, ps, q1, q2):
    return K(p, q, ps, q1, q2) / (
        (p + q) * phi(q, q2 * ps) * phi(p, q2 * ps) * F(p, q, ps, q1, q2)
    )


def mrs_cost_rate(p, q, ps, q1, q2, delta=1.0):
    return 2 * p * q * delta * _lead0(p, q1, q2) * _lead0(q, q1, q2) / ((p + q) * F(p, q, ps, q1, q2))


def mrs_equal_cost_rate(p, q, ps, qa, delta=1.0):
    """MRS sampling cost when both sampling probabilities equal ``qa``."""
    return 2 * p * q * delta * qa / ((p + q) * _rs_den(p, q, qa * ps))


# ---------------------------------------------------------------------------
# policy-level API


def _unpack(source: SourceParams, channel: ChannelParams):
    return source.p, source.q, channel.p_s


def _rs_a(policy: RS, channel: ChannelParams) -> float:
    return policy.p_a * channel.p_s


def _check_mrs(policy: MRS, source, channel) -> float:
    f = F(source.p, source.q, channel.p_s, policy.q1, policy.q2)
    if not f > 0:
        raise DomainError("MRS with q1 = q2 = 0 never samples; the chain is not irreducible")
    return f


def via_convergence_ratio(source: SourceParams, a: float) -> float:
    """Per-level geometric decay of the RS VIA pmf (must be < 1)."""
    p, q = source.p, source.q
    return math.sqrt(p * q) * (1 - a) / math.sqrt(phi(p, a) * phi(q, a))


def _rs_via_checks(policy, source, channel) -> float:
    a = _rs_a(policy, channel)
    if a <= 0:
        raise DomainError("average VIA diverges when p_a * p_s = 0")
    if not via_convergence_ratio(source, a) < 1:
        raise DivergentSeries("RS VIA series does not converge")
    return a


def via_pmf(policy: Policy, source: SourceParams, channel: ChannelParams, i: int) -> tuple[float, float, float]:
    """``(Pr[X=0, VIA=i], Pr[X=1, VIA=i], Pr[VIA=i])`` for RS or change-aware."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        a = _rs_via_checks(policy, source, channel)
        k, w = via_exponents(i)
        A, B = phi(p, a), phi(q, a)
        common = a * (1 - a) ** i / (p + q)
        pi0 = p**k * q**w * common / (A**w * B**k)
        pi1 = p**w * q**k * common / (A**k * B**w)
    elif isinstance(policy, ChangeAware):
        g = ps * (1 - ps) ** i / (p + q)
        pi0, pi1 = q * g, p * g
    else:
        raise DomainError("closed-form VIA is only available for RS and change-aware")
    return pi0, pi1, pi0 + pi1


def via_average(policy: Policy, source: SourceParams, channel: ChannelParams) -> float:
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        return rs_via_average(p, q, _rs_via_checks(policy, source, channel))
    if isinstance(policy, ChangeAware):
        return (1 - ps) / ps
    raise DomainError("closed-form VIA is only available for RS and change-aware")


def sync_stationary(policy: Policy, source: SourceParams, channel: ChannelParams) -> dict:
    """Stationary law of ``(X, Xhat)`` keyed by ``(x, xhat)``."""
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, (RS, SemanticsAware)):
        a = _rs_a(policy, channel) if isinstance(policy, RS) else ps
        den = (p + q) * _rs_den(p, q, a)
        err = p * q * (1 - a) / den
        return {(0, 0): q * phi(q, a) / den, (0, 1): err, (1, 0): err, (1, 1): p * phi(p, a) / den}
    if isinstance(policy, MRS):
        q1, q2 = policy.q1, policy.q2
        den = (p + q) * _check_mrs(policy, source, channel)
        return {
            (0, 0): q * _lead0(p, q1, q2) * phi(q, q2 * ps) / den,
            (0, 1): p * q * (1 - q1 * ps) * _lead0(q, q1, q2) / den,
            (1, 0): p * q * (1 - q1 * ps) * _lead0(p, q1, q2) / den,
            (1, 1): p * _lead0(q, q1, q2) * phi(p, q2 * ps) / den,
        }
    if isinstance(policy, ChangeAware):
        den = (p + q) * (2 - ps)
        return {(0, 0): q / den, (0, 1): q * (1 - ps) / den, (1, 0): p * (1 - ps) / den, (1, 1): p / den}
    raise TypeError(f"unknown policy {policy!r}")


def reconstruction_error(policy: Policy, source: SourceParams, channel: ChannelParams) -> float:
    """Stationary probability that ``X(t) != Xhat(t)``."""
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        return rs_reconstruction_error(p, q, _rs_a(policy, channel))
    if isinstance(policy, ChangeAware):
        return (1 - ps) / (2 - ps)
    pi = sync_stationary(policy, source, channel)
    return pi[(0, 1)] + pi[(1, 0)]


def via_from_pe(policy: Policy, source: SourceParams, channel: ChannelParams, p_e: float) -> float:
    """Average VIA rewritten as a function of the reconstruction error."""
    if not 0.0 <= p_e <= 1.0:
        raise DomainError("p_e must lie in [0, 1]")
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        a = _rs_a(policy, channel)
        if a <= 0:
            raise DomainError("undefined for p_a * p_s = 0")
        return _rs_den(p, q, a) * p_e / a
    if isinstance(policy, ChangeAware):
        return (2 / ps - 1) * p_e
    raise DomainError("only defined for RS and change-aware")


def via_rs_ca_threshold(source: SourceParams, channel: ChannelParams) -> float:
    """Sampling probability above which RS has a lower average VIA than change-aware."""
    p, q, ps = _unpack(source, channel)
    return 2 * p * q / (p + q + (2 * p * q - p - q) * ps)


def aoiv_stationary(policy: Policy, source: SourceParams, channel: ChannelParams) -> dict:
    """Stationary law of ``(X, Xhat, AoIV)`` keyed by ``(i, j, k)``.

    AoIV is 1 exactly on the erroneous states, so the four combinations that
    contradict this are structurally zero.
    """
    sync = sync_stationary(policy, source, channel)
    out = {}
    for (x, xh), v in sync.items():
        k = int(x != xh)
        out[(x, xh, k)] = v
        out[(x, xh, 1 - k)] = 0.0
    return out


def aoiv_average(policy: Policy, source: SourceParams, channel: ChannelParams) -> float:
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        return rs_aoiv_average(p, q, _rs_a(policy, channel))
    if isinstance(policy, MRS):
        _check_mrs(policy, source, channel)
        return mrs_aoiv_average(p, q, ps, policy.q1, policy.q2)
    if isinstance(policy, ChangeAware):
        return (1 - ps) / (2 - ps)
    if isinstance(policy, SemanticsAware):
        return rs_aoiv_average(p, q, ps)
    raise TypeError(f"unknown policy {policy!r}")


def aoii_pmf(policy: Policy, source: SourceParams, channel: ChannelParams, i: int) -> float:
    """``Pr[AoII(t) = i]`` in stationarity."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, (RS, SemanticsAware)):
        a = _rs_a(policy, channel) if isinstance(policy, RS) else ps
        den = (p + q) * _rs_den(p, q, a)
        if i == 0:
            return (p**2 + q**2 + (p + q - p**2 - q**2) * a) / den
        return p * q * (1 - a) ** i * ((1 - q) ** (i - 1) * phi(q, a) + (1 - p) ** (i - 1) * phi(p, a)) / den
    if isinstance(policy, MRS):
        den = (p + q) * _check_mrs(policy, source, channel)
        if i == 0:
            return G(p, q, ps, policy.q1, policy.q2) / den
        return H(p, q, ps, policy.q1, policy.q2, i) / den
    if isinstance(policy, ChangeAware):
        if i == 0:
            return 1 / (2 - ps)
        # an error run started from sync (0,0) ends when X leaves 1, and vice versa
        return p * q * (1 - ps) * ((1 - q) ** (i - 1) + (1 - p) ** (i - 1)) / ((p + q) * (2 - ps))
    raise TypeError(f"unknown policy {policy!r}")


def aoii_average(policy: Policy, source: SourceParams, channel: ChannelParams) -> float:
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        return rs_aoii_average(p, q, _rs_a(policy, channel))
    if isinstance(policy, MRS):
        _check_mrs(policy, source, channel)
        return mrs_aoii_average(p, q, ps, policy.q1, policy.q2)
    if isinstance(policy, ChangeAware):
        return (p**2 + q**2) * (1 - ps) / (p * q * (p + q) * (2 - ps))
    if isinstance(policy, SemanticsAware):
        return rs_aoii_average(p, q, ps)
    raise TypeError(f"unknown policy {policy!r}")


def sampling_cost_rate(policy: Policy, source: SourceParams, channel: ChannelParams, delta: float = 1.0) -> float:
    """Time-averaged sampling cost with ``delta`` per sample."""
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        return delta * policy.p_a
    if isinstance(policy, MRS):
        _check_mrs(policy, source, channel)
        return mrs_cost_rate(p, q, ps, policy.q1, policy.q2, delta)
    if isinstance(policy, ChangeAware):
        return 2 * p * q * delta / (p + q)
    if isinstance(policy, SemanticsAware):
        return 2 * p * q * delta / ((p + q) * _rs_den(p, q, ps))
    raise TypeError(f"unknown policy {policy!r}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticReport:
    """Closed-form stationary metrics for one policy and parameter point.

    ``None`` marks a quantity with no closed form (simulation only);
    ``math.inf`` marks a divergent average.
    """

    avg_via: Optional[float]
    avg_aoiv: float
    avg_aoii: float
    p_e: float
    cost_rate: float

    def as_dict(self) -> dict:
        return asdict(self)


def analytic_report(policy: Policy, source: SourceParams, channel: ChannelParams, delta: float = 1.0) -> AnalyticReport:
    if isinstance(policy, (RS, ChangeAware)):
        try:
            avg_via = via_average(policy, source, channel)
        except DomainError:
            avg_via = math.inf
    else:
        avg_via = None
    return AnalyticReport(
        avg_via=avg_via,
        avg_aoiv=aoiv_average(policy, source, channel),
        avg_aoii=aoii_average(policy, source, channel),
        p_e=reconstruction_error(policy, source, channel),
        cost_rate=sampling_cost_rate(policy, source, channel, delta),
    )


def aoii_pmf_tail_index(policy: Policy, source: SourceParams, channel: ChannelParams, tol: float = 1e-12) -> int:
    """Smallest ``n`` such that the AoII pmf mass beyond ``n`` is below ``tol``."""
    p, q, ps = _unpack(source, channel)
    if isinstance(policy, RS):
        s = 1 - _rs_a(policy, channel)
    elif isinstance(policy, MRS):
        s = 1 - policy.q2 * ps
    elif isinstance(policy, SemanticsAware):
        s = 1 - ps
    else:
        s = 1.0
    r = s * max(1 - p, 1 - q)
    if r <= 0:
        return 1
    # pmf(i) <= 2 r^(i-1), so the tail beyond n is at most 2 r^n / (r (1 - r))
    return max(1, int(np.ceil(math.log(tol * r * (1 - r) / 2) / math.log(r))))
