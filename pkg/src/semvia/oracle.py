"""Brute-force chain oracle.

Every chain here is assembled from the slot rules alone (source law,
sampling rule, channel, reconstruction and metric recursions) and solved
numerically.  Nothing is imported from :mod:`semvia.analytic`, so agreement
between the two modules is independent evidence.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, NoConvergence, NotIrreducible, TruncationTooSmall
from .metrics import update_aoiv, update_via
from .model import ChannelParams, SourceParams
from .policies import RS, ChangeAware, Policy, sampling_probability

DEFAULT_TAIL = 1e-12
MAX_TAIL = 1e-9
N_MIN, N_MAX = 50, 5000


@dataclass
class ExplicitChain:
    states: list
    transition_matrix: object  # (n, n) ndarray or scipy sparse matrix, row-stochastic
    truncation: Optional[int] = None
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        return self.states.index(state)


def _source_step(source: SourceParams, x: int, xn: int) -> float:
    if x == 0:
        return source.p if xn == 1 else 1 - source.p
    return source.q if xn == 0 else 1 - source.q


def _slot_branches(policy, source, channel, x, xh):
    """Yield ``(prob, xn, sampled, delivered)`` for one slot from ``(x, xh)``."""
    for xn in (0, 1):
        pt = _source_step(source, x, xn)
        if pt == 0:
            continue
        s = sampling_probability(policy, xn, x, xh)
        for sampled, ps_ in ((True, s), (False, 1 - s)):
            if ps_ == 0:
                continue
            if sampled:
                yield pt * ps_ * channel.p_s, xn, True, True
                if channel.p_s < 1:
                    yield pt * ps_ * (1 - channel.p_s), xn, True, False
            else:
                yield pt * ps_, xn, False, False


def recurrent_classes(P) -> int:
    """Number of closed communicating classes of a transition matrix."""
    A = sp.csr_matrix(P)
    A.eliminate_zeros()
    ncomp, labels = connected_components(A, directed=True, connection="strong")
    coo = A.tocoo()
    has_exit = np.zeros(ncomp, dtype=bool)
    has_exit[labels[coo.row[labels[coo.row] != labels[coo.col]]]] = True
    return int(np.count_nonzero(~has_exit))


def _require_irreducible(chain: ExplicitChain) -> ExplicitChain:
    if recurrent_classes(chain.transition_matrix) != 1:
        raise NotIrreducible("chain has more than one recurrent class")
    return chain


def source_chain(source: SourceParams) -> ExplicitChain:
    p, q = source.p, source.q
    return ExplicitChain([0, 1], np.array([[1 - p, p], [q, 1 - q]]))


def build_joint_sync_chain(policy: Policy, source: SourceParams, channel: ChannelParams) -> ExplicitChain:
    """Four-state chain over ``(X, Xhat)``."""
    states = [(0, 0), (0, 1), (1, 0), (1, 1)]
    P = np.zeros((4, 4))
    for a, (x, xh) in enumerate(states):
        for pr, xn, sampled, delivered in _slot_branches(policy, source, channel, x, xh):
            xhn = xn if delivered else xh
            P[a, states.index((xn, xhn))] += pr
    return _require_irreducible(ExplicitChain(states, P))


def build_aoiv_chain(policy: Policy, source: SourceParams, channel: ChannelParams) -> ExplicitChain:
    """Eight-state chain over ``(X, Xhat, AoIV)`` with AoIV in {0, 1}."""
    def successors(state):
        x, xh, k = state
        for pr, xn, sampled, delivered in _slot_branches(policy, source, channel, x, xh):
            xhn = xn if delivered else xh
            yield pr, (xn, xhn, update_aoiv(k, xn, x, xhn))

    reachable, frontier = {(0, 0, 0)}, [(0, 0, 0)]
    while frontier:
        for _, nxt in successors(frontier.pop()):
            if nxt[2] > 1:
                raise AssertionError("AoIV left {0, 1} for a binary source")
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)

    states = list(itertools.product((0, 1), repeat=3))
    P = np.zeros((8, 8))
    for a, state in enumerate(states):
        for pr, (xn, xhn, kn) in successors(state):
            # only the unreachable states can push the general recursion to 2
            P[a, states.index((xn, xhn, min(kn, 1)))] += pr
    chain = ExplicitChain(states, P, info={"reachable": sorted(reachable)})
    return _require_irreducible(chain)


def via_decay_ratio(policy: Policy, source: SourceParams, channel: ChannelParams) -> float:
    """Geometric decay per VIA level, used only to pick the truncation level."""
    p, q, ps = source.p, source.q, channel.p_s
    if isinstance(policy, RS):
        a = policy.p_a * ps
        return math.sqrt(p * q) * (1 - a) / math.sqrt((p + (1 - p) * a) * (q + (1 - q) * a))
    if isinstance(policy, ChangeAware):
        return 1 - ps
    raise DomainError("the (X, VIA) chain is only Markov for RS and change-aware")


def default_truncation(ratio: float, tail: float = DEFAULT_TAIL) -> int:
    if ratio <= 0:
        return N_MIN
    if ratio >= 1:
        raise DomainError("VIA chain has no stationary regime (decay ratio >= 1)")
    n = math.ceil(math.log(tail) / math.log(ratio))
    return min(max(n, N_MIN), N_MAX)


def build_via_chain(
    policy: Policy, source: SourceParams, channel: ChannelParams, n_max: Optional[int] = None
) -> ExplicitChain:
    """Chain over ``(X, VIA)`` truncated at level ``n_max``.

    Increments past ``n_max`` stay at ``n_max``, so rows remain stochastic.
    """
    r = via_decay_ratio(policy, source, channel)
    if r >= 1:
        raise DomainError("VIA chain has no stationary regime when nothing is ever delivered")
    N = default_truncation(r) if n_max is None else n_max
    if N < 10:
        raise ValueError("truncation level must be at least 10")
    tail_bound = r ** (N + 1) / (1 - r) if r > 0 else 0.0
    if tail_bound > MAX_TAIL:
        raise TruncationTooSmall(f"tail bound {tail_bound:.3g} at N={N} exceeds {MAX_TAIL:g}")

    def idx(x, j):
        return x * (N + 1) + j

    rows, cols, vals = [], [], []
    for x in (0, 1):
        for j in range(N + 1):
            for pr, xn, sampled, delivered in _slot_branches(policy, source, channel, x, 0):
                # VIA does not depend on Xhat for these two policies; xh is a placeholder
                jn = min(update_via(j, xn, x, sampled, delivered), N)
                rows.append(idx(x, j))
                cols.append(idx(xn, jn))
                vals.append(pr)
    n = 2 * (N + 1)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    states = [(x, j) for x in (0, 1) for j in range(N + 1)]
    return ExplicitChain(states, P, truncation=N, info={"decay_ratio": r, "tail_bound": tail_bound})


def stationary_solve(chain: ExplicitChain, tol: float = 1e-12, method: str = "auto", max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary vector ``v`` with ``v P = v`` and ``sum(v) = 1``.

    ``method="auto"`` uses power iteration for truncated chains and a dense
    linear solve otherwise.
    """
    P = chain.transition_matrix
    if method == "auto":
        method = "power" if chain.truncation is not None else "dense"
    if method == "dense":
        M = P.toarray() if sp.issparse(P) else np.asarray(P, dtype=float)
        n = M.shape[0]
        A = M.T - np.eye(n)
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            v = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise NotIrreducible("singular stationary system") from exc
        resid = np.max(np.abs(v @ M - v))
        if resid >= tol:
            raise NoConvergence(tol, 1)
        return v
    if method == "power":
        PT = sp.csr_matrix(P).T.tocsr()
        n = PT.shape[0]
        v = np.full(n, 1.0 / n)
        for it in range(1, max_iter + 1):
            w = PT @ v
            w /= w.sum()
            if it % 8 == 0 and np.max(np.abs(w - v)) < tol:
                return w
            v = w
        raise NoConvergence(tol, max_iter)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# derived quantities


_SYNC = [(0, 0), (1, 1)]
_ERR = [(0, 1), (1, 0)]


def sync_distribution(policy, source, channel) -> dict:
    chain = build_joint_sync_chain(policy, source, channel)
    return dict(zip(chain.states, stationary_solve(chain)))


def aoiv_distribution(policy, source, channel) -> dict:
    chain = build_aoiv_chain(policy, source, channel)
    return dict(zip(chain.states, stationary_solve(chain)))


def via_distribution(policy, source, channel, n_max: Optional[int] = None):
    """``(pi, chain)`` where ``pi[x, j] = Pr[X = x, VIA = j]`` for ``j <= N``."""
    chain = build_via_chain(policy, source, channel, n_max)
    v = stationary_solve(chain, tol=1e-14)
    pi = v.reshape(2, chain.truncation + 1)
    chain.info["tail_mass"] = float(pi[:, -1].sum())
    return pi, chain


def _split(policy, source, channel):
    chain = build_joint_sync_chain(policy, source, channel)
    v = stationary_solve(chain)
    P = chain.transition_matrix
    s = [chain.index(st) for st in _SYNC]
    e = [chain.index(st) for st in _ERR]
    return v[s], P[np.ix_(s, e)], P[np.ix_(e, e)]


def aoii_pmf_oracle(policy, source, channel, i_max: int) -> np.ndarray:
    """Pr[AoII = i], i = 0..i_max: a sync slot followed by exactly i erroneous slots."""
    if i_max < 1:
        raise ValueError("i_max must be at least 1")
    v_s, P_se, P_ee = _split(policy, source, channel)
    out = np.empty(i_max + 1)
    out[0] = v_s.sum()
    w = v_s @ P_se
    for i in range(1, i_max + 1):
        out[i] = w.sum()
        w = w @ P_ee
    return out


def aoii_average_oracle(policy, source, channel) -> float:
    # sum_i i w P_ee^(i-1) 1 = w (I - P_ee)^-2 1
    v_s, P_se, P_ee = _split(policy, source, channel)
    w = v_s @ P_se
    R = np.linalg.inv(np.eye(2) - P_ee)
    return float(w @ R @ R @ np.ones(2))


def reconstruction_error_oracle(policy, source, channel) -> float:
    pi = sync_distribution(policy, source, channel)
    return pi[(0, 1)] + pi[(1, 0)]


def cost_rate_oracle(policy, source, channel, delta: float = 1.0) -> float:
    """Expected per-slot sampling cost in stationarity."""
    pi = sync_distribution(policy, source, channel)
    total = 0.0
    for (x, xh), w in pi.items():
        for xn in (0, 1):
            total += w * _source_step(source, x, xn) * sampling_probability(policy, xn, x, xh)
    return delta * total


def via_average_oracle(policy, source, channel, n_max: Optional[int] = None) -> float:
    pi, chain = via_distribution(policy, source, channel, n_max)
    return float(pi.sum(axis=0) @ np.arange(chain.truncation + 1))
