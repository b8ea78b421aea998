"""Per-slot reconstruction and age-metric recursions.

Slot ordering used throughout the package:

1. the source moves to ``X(t)``;
2. the sampler decides from ``X(t)``, ``X(t-1)`` and ``Xhat(t-1)``;
3. the channel resolves;
4. ``Xhat(t)`` updates;
5. VIA, AoIV and AoII update;
6. the error and cost accumulators update.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import ChannelParams, SourceParams, step_source, transmit
from .policies import DecisionContext, Policy, decide_sample


@dataclass(frozen=True)
class SystemState:
    x: int = 0
    xhat: int = 0
    via: int = 0
    aoiv: int = 0
    aoii: int = 0


@dataclass(frozen=True)
class SlotOutcome:
    sampled: bool
    delivered: bool
    source_changed: bool
    synced: bool


def update_reconstruction(xhat_prev: int, x_t: int, sampled: bool, delivered: bool) -> int:
    return x_t if (sampled and delivered) else xhat_prev


def update_via(via_prev: int, x_t: int, x_prev: int, sampled: bool, delivered: bool) -> int:
    if sampled and delivered:
        return 0
    return via_prev + 1 if x_t != x_prev else via_prev


def update_aoiv(aoiv_prev: int, x_t: int, x_prev: int, xhat_t: int) -> int:
    # general form; the {0, 1} cap for a binary source is a property, not a clamp
    if x_t == xhat_t:
        return 0
    return aoiv_prev + 1 if x_t != x_prev else aoiv_prev


def update_aoii(aoii_prev: int, x_t: int, xhat_t: int) -> int:
    return aoii_prev + 1 if x_t != xhat_t else 0


def advance(state: SystemState, x_t: int, sampled: bool, delivered: bool) -> tuple[SystemState, SlotOutcome]:
    """Apply steps 4-5 of a slot given the new source state and channel outcome."""
    if delivered and not sampled:
        raise ValueError("a sample cannot be delivered without being taken")
    xhat = update_reconstruction(state.xhat, x_t, sampled, delivered)
    new = SystemState(
        x=x_t,
        xhat=xhat,
        via=update_via(state.via, x_t, state.x, sampled, delivered),
        aoiv=update_aoiv(state.aoiv, x_t, state.x, xhat),
        aoii=update_aoii(state.aoii, x_t, xhat),
    )
    return new, SlotOutcome(sampled, delivered, x_t != state.x, x_t == xhat)


def step_slot(
    state: SystemState,
    source: SourceParams,
    channel: ChannelParams,
    policy: Policy,
    draws: tuple[float, float, float],
) -> tuple[SystemState, SlotOutcome]:
    """One full slot driven by three uniforms (source, sample, channel)."""
    u_src, u_smp, u_ch = draws
    x_t = step_source(source, state.x, u_src)
    sampled = decide_sample(policy, DecisionContext(x_t, state.x, state.xhat), u_smp)
    delivered = sampled and transmit(channel, u_ch)
    return advance(state, x_t, sampled, delivered)


# (x_t, sampled, delivered) for t = 2..6 of the worked example, X(1) = Xhat(1) = 0
WORKED_OUTCOMES = (
    (0, False, False),
    (1, True, False),
    (1, False, False),
    (0, True, False),
    (0, True, True),
)

_WORKED_TABLE = ((1, 0, 0, 0), (2, 0, 0, 0), (3, 1, 1, 1), (4, 1, 1, 2), (5, 2, 0, 0), (6, 0, 0, 0))


def reference_trace() -> list[tuple[int, int, int, int]]:
    """(t, VIA, AoIV, AoII) for t = 1..6 of the worked example.

    Later slots are only given graphically, so the table stops at t = 6.
    """
    return list(_WORKED_TABLE)


def replay(outcomes, initial: SystemState = SystemState()) -> list[SystemState]:
    """States after replaying ``(x_t, sampled, delivered)`` triples from ``initial``."""
    states = [initial]
    for x_t, sampled, delivered in outcomes:
        states.append(advance(states[-1], x_t, sampled, delivered)[0])
    return states
