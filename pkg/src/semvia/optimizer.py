"""Cost-constrained choice of sampling probabilities.

Three problems: minimise the average VIA under a cost and an error
constraint (RS family only), and minimise the average AoIV or AoII under a
cost constraint (RS, MRS and the equal-probability MRS family).  The fixed
change-aware and semantics-aware rules are classified as feasible or not.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import analytic as an
from .errors import DegenerateOptimum, DomainError
from .model import ChannelParams, SourceParams
from .policies import MRS, RS, ChangeAware, SemanticsAware

COST_SLACK = 1e-9
TIE_TOL = 1e-12
OBJECTIVES = ("via", "aoiv", "aoii")
FAMILIES = ("rsc", "mrsc", "mrsc_equal", "change_aware", "semantics_aware")


@dataclass(frozen=True)
class CostBudget:
    """Per-sample cost ``delta`` and per-slot budget ``delta_max``."""

    delta: float
    delta_max: float

    def __post_init__(self):
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if not 0 < self.eta <= 1:
            raise DomainError("eta = delta_max / delta must lie in (0, 1]")

    @property
    def eta(self) -> float:
        return self.delta_max / self.delta

    @classmethod
    def from_eta(cls, eta: float, delta: float = 1.0) -> "CostBudget":
        return cls(delta, eta * delta)


@dataclass(frozen=True)
class OptProblem:
    objective: str
    family: str
    budget: CostBudget
    e_max: Optional[float] = None

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if (self.e_max is not None) != (self.objective == "via"):
            raise ValueError("e_max is required for, and only for, the VIA objective")
        if self.e_max is not None and not 0 < self.e_max <= 1:
            raise DomainError("e_max must lie in (0, 1]")


@dataclass(frozen=True)
class OptResult:
    family: str
    objective: str
    feasible: bool
    params: dict = field(default_factory=dict)
    objective_value: Optional[float] = None
    cost_rate: Optional[float] = None
    binding: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _metric(objective: str):
    return {"via": an.via_average, "aoiv": an.aoiv_average, "aoii": an.aoii_average}[objective]


def via_feasibility_bound(source: SourceParams, channel: ChannelParams, e_max: float) -> float:
    """Smallest RS sampling probability meeting the reconstruction-error ceiling."""
    p, q, ps = source.p, source.q, channel.p_s
    num = 2 * p * q - e_max * (p + q) ** 2
    den = 2 * p * q * ps + e_max * (p + q) * (1 - p - q) * ps
    if den <= 0:
        return np.inf if num > 0 else 0.0
    return max(0.0, num / den)


def solve_via_rsc(source: SourceParams, channel: ChannelParams, budget: CostBudget, e_max: float) -> OptResult:
    """The VIA objective decreases in ``p_a``, so the optimum is the budget cap."""
    OptProblem("via", "rsc", budget, e_max)
    eta = budget.eta
    lower = via_feasibility_bound(source, channel, e_max)
    if not lower <= eta:
        return OptResult("rsc", "via", False, binding={"cost": False, "error": True, "lower_bound": lower})
    pol = RS(eta)
    p_e = an.reconstruction_error(pol, source, channel)
    return OptResult(
        "rsc", "via", True,
        params={"p_a": eta},
        objective_value=an.via_average(pol, source, channel),
        cost_rate=an.sampling_cost_rate(pol, source, channel, budget.delta),
        binding={"cost": True, "error": bool(abs(p_e - e_max) <= COST_SLACK), "lower_bound": lower, "p_e": p_e},
    )


def solve_rsc(objective: str, source: SourceParams, channel: ChannelParams, budget: CostBudget) -> OptResult:
    if objective not in ("aoiv", "aoii"):
        raise ValueError("solve_rsc handles the AoIV and AoII objectives")
    pol = RS(budget.eta)
    return OptResult(
        "rsc", objective, True,
        params={"p_a": budget.eta},
        objective_value=_metric(objective)(pol, source, channel),
        cost_rate=an.sampling_cost_rate(pol, source, channel, budget.delta),
        binding={"cost": True},
    )


def q_star_equal(source: SourceParams, channel: ChannelParams, eta: float) -> float:
    """Optimal common MRS sampling probability under the normalized budget ``eta``."""
    if not 0 < eta <= 1:
        raise DomainError("eta must lie in (0, 1]")
    p, q, ps = source.p, source.q, channel.p_s
    lhs = eta * (p + q) * (1 - p - q) * ps
    if lhs >= 2 * p * q:
        return 1.0
    return min(1.0, eta * (p + q) ** 2 / (2 * p * q - lhs))


def solve_mrsc_equal(objective: str, source: SourceParams, channel: ChannelParams, budget: CostBudget) -> OptResult:
    if objective not in ("aoiv", "aoii"):
        raise ValueError("the MRS families handle the AoIV and AoII objectives")
    qa = q_star_equal(source, channel, budget.eta)
    pol = MRS(qa, qa)
    cost = an.sampling_cost_rate(pol, source, channel, budget.delta)
    return OptResult(
        "mrsc_equal", objective, True,
        params={"q1": qa, "q2": qa},
        objective_value=_metric(objective)(pol, source, channel),
        cost_rate=cost,
        binding={"cost": bool(abs(cost - budget.delta_max) <= 1e-6 * budget.delta)},
    )


def _mrs_surface(objective, p, q, ps, Q1, Q2):
    if objective == "aoiv":
        return an.mrs_aoiv_average(p, q, ps, Q1, Q2)
    return an.mrs_aoii_average(p, q, ps, Q1, Q2)


def _argmin_points(objective, source, channel, budget, q1, q2):
    """Best feasible candidate with the tie-break rule (smaller q1, then smaller q2)."""
    p, q, ps = source.p, source.q, channel.p_s
    q1, q2 = np.ravel(q1), np.ravel(q2)
    order = np.lexsort((q2, q1))
    q1, q2 = q1[order], q2[order]
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = an.mrs_cost_rate(p, q, ps, q1, q2, budget.delta)
        val = _mrs_surface(objective, p, q, ps, q1, q2)
    ok = (cost <= budget.delta_max + COST_SLACK) & ~((q1 == 0) & (q2 == 0)) & np.isfinite(val)
    if not ok.any():
        return None
    val = np.where(ok, val, np.inf)
    best = val.min()
    k = int(np.argmax(val <= best + TIE_TOL))
    return float(q1[k]), float(q2[k]), float(best)


def _boundary_points(source, channel, budget, moving, fixed, along_q1, iters=60):
    """Points where the cost crosses the budget on lines through the grid.

    ``moving`` is the fine axis sampled along each line; ``fixed`` holds one
    coordinate per line.  Each bracketed crossing is bisected, keeping the
    feasible end.
    """
    p, q, ps = source.p, source.q, channel.p_s

    def excess(m, f):
        a, b = (m, f) if along_q1 else (f, m)
        with np.errstate(divide="ignore", invalid="ignore"):
            return an.mrs_cost_rate(p, q, ps, a, b, budget.delta) - budget.delta_max

    M, Fx = np.meshgrid(moving, fixed, indexing="xy")
    E = excess(M, Fx)
    cross = np.isfinite(E[:, :-1]) & np.isfinite(E[:, 1:]) & ((E[:, :-1] <= 0) != (E[:, 1:] <= 0))
    r, c = np.nonzero(cross)
    if r.size == 0:
        return np.empty(0), np.empty(0)
    f = fixed[r]
    lo_is_ok = E[r, c] <= 0
    ok_end = np.where(lo_is_ok, moving[c], moving[c + 1])
    bad_end = np.where(lo_is_ok, moving[c + 1], moving[c])
    for _ in range(iters):
        mid = 0.5 * (ok_end + bad_end)
        good = excess(mid, f) <= 0
        ok_end = np.where(good, mid, ok_end)
        bad_end = np.where(good, bad_end, mid)
    return (ok_end, f) if along_q1 else (f, ok_end)


def _axis(lo, hi, step):
    n = int(round((hi - lo) / step))
    return np.clip(lo + step * np.arange(n + 1), 0.0, 1.0)


def _window(center, half, step):
    return np.unique(np.clip(np.round(np.arange(center - half, center + half + step / 2, step), 12), 0.0, 1.0))


def solve_mrsc(
    objective: str,
    source: SourceParams,
    channel: ChannelParams,
    budget: CostBudget,
    grid_step: float = 0.005,
    diagonal: bool = False,
    boundary: bool = True,
) -> OptResult:
    """Grid search over ``(q1, q2)`` followed by one refinement pass at ``grid_step / 10``.

    With ``boundary=True`` the candidates also include the exact points where
    the cost meets the budget on every grid line.  The objectives are nearly
    flat along that curve, so without them the coarse pass is decided by how
    close each grid point happens to sit to the curve rather than by where the
    optimum lies.  ``diagonal=True`` restricts the search to ``q1 == q2``.
    """
    if objective not in ("aoiv", "aoii"):
        raise ValueError("the MRS families handle the AoIV and AoII objectives")
    if not 0 < grid_step <= 0.1:
        raise ValueError("grid_step must lie in (0, 0.1]")
    fine = grid_step / 10

    def candidates(a1, a2, f1, f2):
        if diagonal:
            pts = [(a1, a1)]
            if boundary:
                pts.append(_diagonal_boundary(source, channel, budget, f1))
        else:
            Q1, Q2 = np.meshgrid(a1, a2, indexing="ij")
            pts = [(Q1, Q2)]
            if boundary:
                pts.append(_boundary_points(source, channel, budget, f1, a2, along_q1=True))
                pts.append(_boundary_points(source, channel, budget, f2, a1, along_q1=False))
        q1 = np.concatenate([np.ravel(x) for x, _ in pts])
        q2 = np.concatenate([np.ravel(y) for _, y in pts])
        return q1, q2

    coarse = _axis(0.0, 1.0, grid_step)
    dense = _axis(0.0, 1.0, fine)
    best = _argmin_points(objective, source, channel, budget, *candidates(coarse, coarse, dense, dense))
    if best is None:
        raise DegenerateOptimum("no feasible sampling pair other than q1 = q2 = 0")
    w1, w2 = _window(best[0], grid_step, fine), _window(best[1], grid_step, fine)
    refined = _argmin_points(objective, source, channel, budget, *candidates(w1, w2, w1, w2))
    if refined is not None and refined[2] < best[2] - TIE_TOL:
        best = refined
    q1, q2, value = best
    if q1 == 0 and q2 == 0:
        raise DegenerateOptimum("search collapsed to q1 = q2 = 0")
    cost = float(an.mrs_cost_rate(source.p, source.q, channel.p_s, q1, q2, budget.delta))
    return OptResult(
        "mrsc_equal" if diagonal else "mrsc", objective, True,
        params={"q1": q1, "q2": q2},
        objective_value=value,
        cost_rate=cost,
        binding={"cost": bool(abs(cost - budget.delta_max) <= 1e-6 * budget.delta)},
    )


def _diagonal_boundary(source, channel, budget, axis):
    p, q, ps = source.p, source.q, channel.p_s
    with np.errstate(divide="ignore", invalid="ignore"):
        e = an.mrs_equal_cost_rate(p, q, ps, axis, budget.delta) - budget.delta_max
    k = np.nonzero((e[:-1] <= 0) != (e[1:] <= 0))[0]
    lo, hi = axis[k].copy(), axis[k + 1].copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        good = an.mrs_equal_cost_rate(p, q, ps, mid, budget.delta) <= budget.delta_max
        lo, hi = np.where(good, mid, lo), np.where(good, hi, mid)
    return lo, lo


def classify_fixed_policies(
    source: SourceParams, channel: ChannelParams, budget: CostBudget, objective: Optional[str] = None
) -> dict:
    """Feasibility of the change-aware and semantics-aware rules under ``budget``."""
    out = {}
    for name, pol in (("change_aware", ChangeAware()), ("semantics_aware", SemanticsAware())):
        cost = an.sampling_cost_rate(pol, source, channel, budget.delta)
        feasible = cost <= budget.delta_max + COST_SLACK
        values = {}
        if feasible:
            for obj in (OBJECTIVES if objective is None else (objective,)):
                if obj == "via" and name != "change_aware":
                    continue
                values[obj] = _metric(obj)(pol, source, channel)
        out[name] = OptResult(
            name, objective or "all", feasible,
            objective_value=values.get(objective) if objective else None,
            cost_rate=cost,
            binding={"values": values},
        )
    return out


def solve(problem: OptProblem, source: SourceParams, channel: ChannelParams, grid_step: float = 0.005) -> OptResult:
    """Dispatch one (objective, family) problem."""
    fam, obj, budget = problem.family, problem.objective, problem.budget
    if obj == "via":
        if fam == "rsc":
            return solve_via_rsc(source, channel, budget, problem.e_max)
        if fam == "change_aware":
            res = classify_fixed_policies(source, channel, budget, "via")["change_aware"]
            if res.feasible:
                p_e = an.reconstruction_error(ChangeAware(), source, channel)
                if p_e > problem.e_max + COST_SLACK:
                    return OptResult("change_aware", "via", False, cost_rate=res.cost_rate, binding={"error": True, "p_e": p_e})
            return res
        raise ValueError(f"the VIA problem is not posed for family {fam!r}")
    if fam == "rsc":
        return solve_rsc(obj, source, channel, budget)
    if fam == "mrsc":
        return solve_mrsc(obj, source, channel, budget, grid_step)
    if fam == "mrsc_equal":
        return solve_mrsc_equal(obj, source, channel, budget)
    return classify_fixed_policies(source, channel, budget, obj)[fam]
