"""Seeded Monte Carlo of the slot loop.

The hot loop is a numba kernel that inlines the counter-based SplitMix64
stream of :mod:`semvia.rng` and the recursions of :mod:`semvia.metrics`.
:func:`trace` runs the same loop through the pure-Python functions and is
used both for per-slot dumps and to cross-check the kernel.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numba
import numpy as np

from . import rng
from .analytic import AnalyticReport
from .metrics import SystemState, step_slot
from .model import ChannelParams, SourceParams
from .policies import MRS, RS, ChangeAware, Policy, SemanticsAware

N_BATCHES = 100
METRICS = ("avg_via", "avg_aoiv", "avg_aoii", "p_e_hat", "cost_rate_hat")


@dataclass(frozen=True)
class SimConfig:
    source: SourceParams
    channel: ChannelParams
    policy: Policy
    horizon: int = 1_000_000
    seed: int = 0
    burn_in: int = 0
    delta: float = 1.0

    def __post_init__(self):
        if self.horizon < 1000:
            raise ValueError("horizon must be at least 1000 slots")
        if not 0 <= self.burn_in < self.horizon:
            raise ValueError("burn_in must satisfy 0 <= burn_in < horizon")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class MetricsSummary:
    """Time averages over the slots after burn-in.

    ``stderr`` holds batch-means standard errors for a single run, or the
    across-replication standard errors for :func:`run_many`.
    """

    avg_via: float
    avg_aoiv: float
    avg_aoii: float
    p_e_hat: float
    cost_rate_hat: float
    sample_rate: float
    slots: int
    stderr: dict = field(default_factory=dict)
    violations: int = 0
    reps: int = 1

    def as_dict(self) -> dict:
        return asdict(self)


_GOLDEN = np.uint64(rng.GOLDEN)
_MUL1 = np.uint64(rng.MUL1)
_MUL2 = np.uint64(rng.MUL2)


@numba.njit(cache=True, inline="always")
def _u(seed, counter):
    z = seed + np.uint64(counter + 1) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    z = z ^ (z >> np.uint64(31))
    return np.float64(z >> np.uint64(11)) * rng.INV_2_53


@numba.njit(cache=True, nogil=True)
def _kernel(p, q, ps, kind, a1, a2, seed, horizon, burn_in, n_batches):
    """Returns (batch_sums[n_batches, 5], violations).

    Columns: VIA, AoIV, AoII, error indicator, sample indicator.
    kind: 0 RS(a1), 1 MRS(a1, a2), 2 change-aware, 3 semantics-aware.
    """
    sums = np.zeros((n_batches, 5), dtype=np.int64)
    n = horizon - burn_in
    x = 0
    xh = 0
    via = 0
    aoiv = 0
    aoii = 0
    violations = 0
    for t in range(1, horizon + 1):
        sampled = False
        if t >= 2:
            base = 3 * (t - 2)
            u_src = _u(seed, base)
            u_smp = _u(seed, base + 1)
            u_ch = _u(seed, base + 2)
            if x == 0:
                xn = 1 if u_src < p else 0
            else:
                xn = 0 if u_src < q else 1
            if kind == 0:
                prob = a1
            elif kind == 1:
                if xn == xh:
                    prob = 0.0
                elif x == xh:
                    prob = a1
                else:
                    prob = a2
            elif kind == 2:
                prob = 1.0 if xn != x else 0.0
            else:
                prob = 1.0 if xn != xh else 0.0
            sampled = u_smp < prob
            delivered = sampled and u_ch < ps
            xhn = xn if delivered else xh
            if delivered:
                via = 0
            elif xn != x:
                via += 1
            if xn == xhn:
                aoiv = 0
            elif xn != x:
                aoiv += 1
            if xn != xhn:
                aoii += 1
            else:
                aoii = 0
            x = xn
            xh = xhn
        if aoiv > via or aoiv > aoii or aoiv > 1 or (aoii == 0) != (x == xh):
            violations += 1
        if t > burn_in:
            b = ((t - burn_in - 1) * n_batches) // n
            sums[b, 0] += via
            sums[b, 1] += aoiv
            sums[b, 2] += aoii
            sums[b, 3] += 1 if x != xh else 0
            sums[b, 4] += 1 if sampled else 0
    return sums, violations


def _encode(policy: Policy):
    match policy:
        case RS(p_a=p_a):
            return 0, p_a, 0.0
        case MRS(q1=q1, q2=q2):
            return 1, q1, q2
        case ChangeAware():
            return 2, 0.0, 0.0
        case SemanticsAware():
            return 3, 0.0, 0.0
    raise TypeError(f"unknown policy {policy!r}")


def _batch_sizes(n: int, n_batches: int) -> np.ndarray:
    edges = (np.arange(n_batches + 1) * n) // n_batches
    return np.diff(edges)


def run(config: SimConfig, n_batches: int = N_BATCHES) -> MetricsSummary:
    """Simulate one replication from ``X(1) = Xhat(1) = 0`` with all metrics 0."""
    kind, a1, a2 = _encode(config.policy)
    sums, violations = _kernel(
        config.source.p, config.source.q, config.channel.p_s, kind, a1, a2,
        np.uint64(config.seed), config.horizon, config.burn_in, n_batches,
    )
    n = config.horizon - config.burn_in
    totals = sums.sum(axis=0)
    means = totals / n
    sizes = _batch_sizes(n, n_batches)
    bm = sums / sizes[:, None]
    se = bm.std(axis=0, ddof=1) / math.sqrt(n_batches)
    scale = np.array([1.0, 1.0, 1.0, 1.0, config.delta])
    values = means * scale
    ses = se * scale
    return MetricsSummary(
        avg_via=float(values[0]),
        avg_aoiv=float(values[1]),
        avg_aoii=float(values[2]),
        p_e_hat=float(values[3]),
        cost_rate_hat=float(values[4]),
        sample_rate=float(means[4]),
        slots=n,
        stderr={m: float(s) for m, s in zip(METRICS, ses)},
        violations=int(violations),
    )


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SEMVIA_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def map_ordered(fn, items, threads: Optional[int] = None) -> list:
    """``[fn(x) for x in items]`` on a thread pool; results stay in input order."""
    items = list(items)
    threads = _threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def run_many(config: SimConfig, n_reps: int, order=None) -> MetricsSummary:
    """Independent replications with seeds ``rng.derive_seed(seed, r)``.

    The aggregate is the mean across replications with the across-replication
    standard error; with one replication it is :func:`run` itself.  ``order``
    permutes execution order only; aggregation is always in index order.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be at least 1")
    if n_reps == 1:
        return run(config)
    order = list(range(n_reps)) if order is None else list(order)
    if sorted(order) != list(range(n_reps)):
        raise ValueError("order must be a permutation of the replication indices")
    done = map_ordered(lambda r: (r, run(replace(config, seed=rng.derive_seed(config.seed, r)))), order)
    results = [s for _, s in sorted(done, key=lambda rs: rs[0])]
    agg = {}
    stderr = {}
    for m in METRICS + ("sample_rate",):
        vals = np.array([getattr(s, m) for s in results])
        agg[m] = float(vals.mean())
        if m in METRICS:
            stderr[m] = float(vals.std(ddof=1) / math.sqrt(n_reps))
    return MetricsSummary(
        **agg,
        slots=sum(s.slots for s in results),
        stderr=stderr,
        violations=sum(s.violations for s in results),
        reps=n_reps,
    )


_ANALYTIC_FIELD = {
    "avg_via": "avg_via",
    "avg_aoiv": "avg_aoiv",
    "avg_aoii": "avg_aoii",
    "p_e_hat": "p_e",
    "cost_rate_hat": "cost_rate",
}


@dataclass(frozen=True)
class MetricCheck:
    metric: str
    simulated: float
    analytic: Optional[float]
    stderr: Optional[float]
    status: str  # "pass", "fail" or "simulation-only"


def compare(sim: MetricsSummary, analytic: AnalyticReport, z: float = 4.0) -> list[MetricCheck]:
    """Per-metric check ``|sim - analytic| <= z * stderr``.

    Without a standard error the check falls back to a 2% relative band.
    """
    out = []
    for m, a_field in _ANALYTIC_FIELD.items():
        s = getattr(sim, m)
        a = getattr(analytic, a_field)
        se = sim.stderr.get(m)
        if a is None or (isinstance(a, float) and math.isinf(a)):
            out.append(MetricCheck(m, s, None, se, "simulation-only"))
            continue
        if se is None:
            ok = abs(s - a) <= 0.02 * abs(a)
        else:
            ok = abs(s - a) <= z * se + 1e-12
        out.append(MetricCheck(m, s, a, se, "pass" if ok else "fail"))
    return out


TRACE_COLUMNS = ("t", "x", "xhat", "sampled", "delivered", "via", "aoiv", "aoii")


def trace(config: SimConfig, slots: Optional[int] = None) -> list[tuple]:
    """Per-slot rows ``(t, x, xhat, sampled, delivered, via, aoiv, aoii)``.

    Pure-Python replay of the kernel's loop using the same random stream.
    """
    horizon = config.horizon if slots is None else slots
    state = SystemState()
    rows = [(1, 0, 0, 0, 0, 0, 0, 0)]
    for t in range(2, horizon + 1):
        state, out = step_slot(state, config.source, config.channel, config.policy, rng.slot_draws(config.seed, t))
        rows.append((t, state.x, state.xhat, int(out.sampled), int(out.delivered), state.via, state.aoiv, state.aoii))
    return rows
