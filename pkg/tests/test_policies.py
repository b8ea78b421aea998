import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semvia.errors import DomainError
from semvia.policies import (
    MRS,
    RS,
    ChangeAware,
    DecisionContext,
    SemanticsAware,
    decide_sample,
    policy_from_dict,
    policy_to_dict,
    sampling_probability,
)

CONTEXTS = list(itertools.product((0, 1), repeat=3))
prob = st.floats(0.0, 1.0)


def test_mrs_skips_sync_state():
    for u in (0.0, 0.5, 0.999):
        assert not decide_sample(MRS(1.0, 1.0), DecisionContext(0, 0, 0), u)


def test_mrs_probability_one_branch():
    assert decide_sample(MRS(1.0, 1.0), DecisionContext(1, 0, 0), 0.99)


def test_change_vs_semantics_aware():
    ctx = DecisionContext(1, 1, 0)
    assert not decide_sample(ChangeAware(), ctx, 0.0)
    assert decide_sample(SemanticsAware(), ctx, 0.0)


def test_rs_zero_never_samples():
    assert not any(decide_sample(RS(0.0), DecisionContext(*c), 0.0) for c in CONTEXTS)


def test_mrs_branches():
    pol = MRS(0.3, 0.8)
    assert sampling_probability(pol, 1, 0, 0) == 0.3  # was in sync, source moved
    assert sampling_probability(pol, 0, 1, 1) == 0.3
    assert sampling_probability(pol, 1, 1, 0) == 0.8  # still erroneous
    assert sampling_probability(pol, 0, 0, 1) == 0.8
    assert sampling_probability(pol, 1, 0, 1) == 0.0  # source moved back to Xhat


@given(st.sampled_from(CONTEXTS), st.floats(0.0, 0.999999))
def test_mrs_one_one_is_semantics_aware(ctx, u):
    c = DecisionContext(*ctx)
    assert decide_sample(MRS(1.0, 1.0), c, u) == decide_sample(SemanticsAware(), c, u)


@given(prob, st.floats(0.0, 0.999999))
def test_rs_ignores_context(p_a, u):
    assert len({decide_sample(RS(p_a), DecisionContext(*c), u) for c in CONTEXTS}) == 1


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_probability_validation(bad):
    with pytest.raises(DomainError):
        RS(bad)
    with pytest.raises(DomainError):
        MRS(0.5, bad)


def test_context_validation():
    with pytest.raises(ValueError):
        DecisionContext(2, 0, 0)


@pytest.mark.parametrize("pol", [RS(0.5), MRS(0.7, 1.0), ChangeAware(), SemanticsAware()])
def test_dict_round_trip(pol):
    assert policy_from_dict(policy_to_dict(pol)) == pol


@pytest.mark.parametrize(
    "d",
    [
        {"policy": "rs"},
        {"policy": "rs", "p_a": 0.5, "extra": 1},
        {"policy": "mrs", "q1": 0.5},
        {"policy": "magic"},
        {"policy": "rs", "p_a": "0.5"},
        {"policy": "change_aware", "p_a": 1.0},
        {"p_a": 0.5},
    ],
)
def test_dict_rejects(d):
    with pytest.raises(ValueError):
        policy_from_dict(d)
