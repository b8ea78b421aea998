"""JSON run configuration.

Schema (every section except ``source`` and ``channel`` is optional)::

    {
      "source":      {"p": 0.5, "q": 0.2},
      "channel":     {"p_s": 0.9},
      "policy":      {"policy": "mrs", "q1": 0.7, "q2": 1.0},
      "sim":         {"horizon": 1000000, "seed": 0, "reps": 1, "burn_in": 0},
      "budget":      {"delta": 1.0, "delta_max": 0.5},
      "constraints": {"e_max": 0.3},
      "sweep":       {"variable": "p", "from": 0.1, "to": 0.9, "step": 0.1, "simulate": false}
    }

Unknown keys are rejected at every level.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

from .model import ChannelParams, SourceParams
from .optimizer import CostBudget
from .policies import Policy, policy_from_dict, policy_to_dict

SWEEP_VARIABLES = ("p", "q", "p_s", "eta", "p_a", "q1", "q2", "e_max")


class ConfigError(ValueError):
    """Malformed or out-of-domain configuration."""


def _section(d, name, required, optional=()):
    if not isinstance(d, dict):
        raise ConfigError(f"{name!r} must be a JSON object")
    keys = set(d)
    missing = set(required) - keys
    extra = keys - set(required) - set(optional)
    if missing:
        raise ConfigError(f"{name!r} is missing {sorted(missing)}")
    if extra:
        raise ConfigError(f"{name!r} has unknown keys {sorted(extra)}")
    return d


def _num(d, key, where):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number")
    return float(v)


def _int(d, key, where):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key} must be an integer")
    return v


@dataclass(frozen=True)
class SimSettings:
    horizon: int = 1_000_000
    seed: int = 0
    reps: int = 1
    burn_in: int = 0

    def __post_init__(self):
        if self.horizon < 1000:
            raise ConfigError("sim.horizon must be at least 1000")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("sim.seed must be a 64-bit unsigned integer")
        if self.reps < 1:
            raise ConfigError("sim.reps must be at least 1")
        if not 0 <= self.burn_in < self.horizon:
            raise ConfigError("sim.burn_in must satisfy 0 <= burn_in < horizon")


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    step: float
    simulate: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}")
        if not self.step > 0 or self.stop < self.start:
            raise ConfigError("sweep range is empty")

    def values(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(n)]


@dataclass(frozen=True)
class RunConfig:
    source: SourceParams
    channel: ChannelParams
    policy: Optional[Policy] = None
    sim: Optional[SimSettings] = None
    budget: Optional[CostBudget] = None
    e_max: Optional[float] = None
    sweep: Optional[Sweep] = None

    @property
    def sim_settings(self) -> SimSettings:
        return self.sim or SimSettings()

    def to_dict(self) -> dict:
        d = {
            "source": {"p": self.source.p, "q": self.source.q},
            "channel": {"p_s": self.channel.p_s},
        }
        if self.policy is not None:
            d["policy"] = policy_to_dict(self.policy)
        if self.sim is not None:
            s = self.sim
            d["sim"] = {"horizon": s.horizon, "seed": s.seed, "reps": s.reps, "burn_in": s.burn_in}
        if self.budget is not None:
            d["budget"] = {"delta": self.budget.delta, "delta_max": self.budget.delta_max}
        if self.e_max is not None:
            d["constraints"] = {"e_max": self.e_max}
        if self.sweep is not None:
            w = self.sweep
            d["sweep"] = {"variable": w.variable, "from": w.start, "to": w.stop, "step": w.step, "simulate": w.simulate}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def with_value(self, variable: str, value: float) -> "RunConfig":
        """Copy with one swept quantity replaced."""
        if variable == "p":
            return replace(self, source=SourceParams(value, self.source.q))
        if variable == "q":
            return replace(self, source=SourceParams(self.source.p, value))
        if variable == "p_s":
            return replace(self, channel=ChannelParams(value))
        if variable == "eta":
            if self.budget is None:
                raise ConfigError("sweeping eta needs a budget section")
            return replace(self, budget=CostBudget.from_eta(value, self.budget.delta))
        if variable == "e_max":
            if not 0 < value <= 1:
                raise ConfigError("e_max must lie in (0, 1]")
            return replace(self, e_max=value)
        pol = policy_to_dict(self.policy) if self.policy is not None else {}
        if variable not in pol:
            raise ConfigError(f"sweeping {variable!r} needs a policy with that field")
        pol[variable] = value
        return replace(self, policy=policy_from_dict(pol))


def parse_config(data: dict) -> RunConfig:
    """Build a :class:`RunConfig` from decoded JSON, validating every field."""
    try:
        return _parse(data)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def _parse(data) -> RunConfig:
    _section(data, "config", ("source", "channel"), ("policy", "sim", "budget", "constraints", "sweep"))
    src = _section(data["source"], "source", ("p", "q"))
    ch = _section(data["channel"], "channel", ("p_s",))
    cfg = dict(
        source=SourceParams(_num(src, "p", "source"), _num(src, "q", "source")),
        channel=ChannelParams(_num(ch, "p_s", "channel")),
    )
    if "policy" in data:
        cfg["policy"] = policy_from_dict(data["policy"])
    if "sim" in data:
        s = _section(data["sim"], "sim", (), ("horizon", "seed", "reps", "burn_in"))
        cfg["sim"] = SimSettings(**{k: _int(s, k, "sim") for k in s})
    if "budget" in data:
        b = _section(data["budget"], "budget", ("delta", "delta_max"))
        cfg["budget"] = CostBudget(_num(b, "delta", "budget"), _num(b, "delta_max", "budget"))
    if "constraints" in data:
        c = _section(data["constraints"], "constraints", ("e_max",))
        e_max = _num(c, "e_max", "constraints")
        if not 0 < e_max <= 1:
            raise ConfigError("constraints.e_max must lie in (0, 1]")
        cfg["e_max"] = e_max
    if "sweep" in data:
        w = _section(data["sweep"], "sweep", ("variable", "from", "to", "step"), ("simulate",))
        simulate = w.get("simulate", False)
        if not isinstance(simulate, bool):
            raise ConfigError("sweep.simulate must be a boolean")
        cfg["sweep"] = Sweep(str(w["variable"]), _num(w, "from", "sweep"), _num(w, "to", "sweep"), _num(w, "step", "sweep"), simulate)
    return RunConfig(**cfg)


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(data)


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return loads(text)
