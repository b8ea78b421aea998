"""Two-state Markov source and erasure channel."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class SourceParams:
    """Binary DTMC with ``p = Pr[0 -> 1]`` and ``q = Pr[1 -> 0]`` per slot.

    Boundary values are rejected: an absorbing source has no stationary
    regime worth analysing and every closed form divides by ``p + q``.
    """

    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}")


@dataclass(frozen=True)
class ChannelParams:
    """Erasure channel; a transmitted sample is decoded with probability ``p_s``."""

    p_s: float

    def __post_init__(self):
        if not 0.0 < self.p_s <= 1.0:
            raise DomainError(f"p_s must lie in (0, 1], got {self.p_s!r}")


@dataclass(frozen=True)
class SlotDraws:
    """The three uniforms consumed by one slot, always in this order."""

    u_source: float
    u_sample: float
    u_channel: float


def step_source(params: SourceParams, x_prev: int, u: float) -> int:
    if x_prev == 0:
        return 1 if u < params.p else 0
    return 0 if u < params.q else 1


def transmit(channel: ChannelParams, u: float) -> bool:
    return u < channel.p_s


def source_stationary(params: SourceParams) -> tuple[float, float]:
    s = params.p + params.q
    return params.q / s, params.p / s
