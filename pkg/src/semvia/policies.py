"""The four sampling rules and their config encoding."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import DomainError


def _check_prob(name, v):
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class RS:
    """Randomized stationary: sample every slot with probability ``p_a``."""

    p_a: float

    def __post_init__(self):
        _check_prob("p_a", self.p_a)


@dataclass(frozen=True)
class MRS:
    """Modified randomized stationary.

    Only samples when ``X(t) != Xhat(t-1)``; with probability ``q1`` if the
    system was in sync at ``t-1`` and ``q2`` otherwise.
    """

    q1: float
    q2: float

    def __post_init__(self):
        _check_prob("q1", self.q1)
        _check_prob("q2", self.q2)


@dataclass(frozen=True)
class ChangeAware:
    pass


@dataclass(frozen=True)
class SemanticsAware:
    pass


Policy = Union[RS, MRS, ChangeAware, SemanticsAware]


@dataclass(frozen=True)
class DecisionContext:
    x_t: int
    x_prev: int
    xhat_prev: int

    def __post_init__(self):
        for name in ("x_t", "x_prev", "xhat_prev"):
            if getattr(self, name) not in (0, 1):
                raise DomainError(f"{name} must be 0 or 1")


def sampling_probability(policy: Policy, x_t: int, x_prev: int, xhat_prev: int) -> float:
    """Probability that ``policy`` samples in the given context."""
    match policy:
        case RS(p_a=p_a):
            return p_a
        case MRS(q1=q1, q2=q2):
            if x_t == xhat_prev:
                return 0.0
            return q1 if x_prev == xhat_prev else q2
        case ChangeAware():
            return 1.0 if x_t != x_prev else 0.0
        case SemanticsAware():
            return 1.0 if x_t != xhat_prev else 0.0
    raise TypeError(f"unknown policy {policy!r}")


def decide_sample(policy: Policy, ctx: DecisionContext, u: float) -> bool:
    # deterministic rules ignore u; the caller still consumes it
    return u < sampling_probability(policy, ctx.x_t, ctx.x_prev, ctx.xhat_prev)


def policy_name(policy: Policy) -> str:
    return {RS: "rs", MRS: "mrs", ChangeAware: "change_aware", SemanticsAware: "semantics_aware"}[type(policy)]


def policy_to_dict(policy: Policy) -> dict:
    d = {"policy": policy_name(policy)}
    if isinstance(policy, RS):
        d["p_a"] = policy.p_a
    elif isinstance(policy, MRS):
        d["q1"] = policy.q1
        d["q2"] = policy.q2
    return d


_FIELDS = {"rs": {"p_a"}, "mrs": {"q1", "q2"}, "change_aware": set(), "semantics_aware": set()}


def policy_from_dict(d: dict) -> Policy:
    """Parse ``{"policy": "rs", "p_a": 0.5}`` and friends; unknown keys are rejected."""
    if not isinstance(d, dict) or "policy" not in d:
        raise ValueError("policy object needs a 'policy' key")
    kind = d["policy"]
    if kind not in _FIELDS:
        raise ValueError(f"unknown policy {kind!r}")
    keys = set(d) - {"policy"}
    if keys != _FIELDS[kind]:
        raise ValueError(f"policy {kind!r} expects fields {sorted(_FIELDS[kind])}, got {sorted(keys)}")
    for k in keys:
        if isinstance(d[k], bool) or not isinstance(d[k], (int, float)):
            raise ValueError(f"policy field {k!r} must be a number")
    if kind == "rs":
        return RS(float(d["p_a"]))
    if kind == "mrs":
        return MRS(float(d["q1"]), float(d["q2"]))
    if kind == "change_aware":
        return ChangeAware()
    return SemanticsAware()
