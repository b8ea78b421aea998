import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semvia.config import ConfigError, loads, parse_config
from semvia.policies import MRS

FULL = {
    "source": {"p": 0.5, "q": 0.2},
    "channel": {"p_s": 0.9},
    "policy": {"policy": "mrs", "q1": 0.7, "q2": 1.0},
    "sim": {"horizon": 100000, "seed": 7, "reps": 2, "burn_in": 10},
    "budget": {"delta": 2.0, "delta_max": 1.0},
    "constraints": {"e_max": 0.3},
    "sweep": {"variable": "p", "from": 0.1, "to": 0.9, "step": 0.2, "simulate": False},
}


def test_full_config_parses():
    cfg = parse_config(FULL)
    assert cfg.policy == MRS(0.7, 1.0)
    assert cfg.budget.eta == 0.5
    assert cfg.sweep.values() == [0.1, 0.3, 0.5, 0.7, 0.9]


def test_round_trip():
    cfg = parse_config(FULL)
    assert loads(cfg.to_json()) == cfg
    assert json.loads(cfg.to_json()) == FULL


@given(
    st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 1.0),
    st.sampled_from([{"policy": "rs", "p_a": 0.25}, {"policy": "change_aware"}, {"policy": "semantics_aware"}]),
    st.integers(0, 2**64 - 1),
)
def test_round_trip_property(p, q, ps, pol, seed):
    cfg = parse_config({"source": {"p": p, "q": q}, "channel": {"p_s": ps}, "policy": pol, "sim": {"seed": seed}})
    assert loads(cfg.to_json()) == cfg


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(extra=1),
        lambda d: d["source"].update(r=0.1),
        lambda d: d["source"].update(p=1.0),
        lambda d: d["channel"].update(p_s=0.0),
        lambda d: d["sim"].update(horizon=10),
        lambda d: d["sim"].update(seed=1.5),
        lambda d: d["budget"].update(delta_max=3.0),
        lambda d: d["constraints"].update(e_max=0.0),
        lambda d: d["sweep"].update(step=0.0),
        lambda d: d["sweep"].update(to=0.0),
        lambda d: d["sweep"].update(variable="r"),
        lambda d: d["policy"].update(policy="rs"),
        lambda d: d.pop("channel"),
        lambda d: d["source"].update(p=True),
    ],
)
def test_rejects(mutate):
    d = json.loads(json.dumps(FULL))
    mutate(d)
    with pytest.raises(ConfigError):
        parse_config(d)


def test_bad_json():
    with pytest.raises(ConfigError):
        loads("{not json")


def test_with_value():
    cfg = parse_config(FULL)
    assert cfg.with_value("eta", 0.25).budget.delta_max == 0.5
    assert cfg.with_value("q1", 0.1).policy == MRS(0.1, 1.0)
    with pytest.raises(ConfigError):
        cfg.with_value("p_a", 0.5)
