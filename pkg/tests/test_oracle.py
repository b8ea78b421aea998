import numpy as np
import pytest
import scipy.sparse as sp

from semvia import analytic as an
from semvia import oracle
from semvia.errors import DomainError, NotIrreducible, TruncationTooSmall
from semvia.model import ChannelParams, SourceParams
from semvia.policies import MRS, RS, ChangeAware, SemanticsAware

HALF = SourceParams(0.5, 0.5)


def _dense(P):
    return P.toarray() if sp.issparse(P) else P


def test_via_chain_perfect_delivery():
    pi, _ = oracle.via_distribution(RS(1.0), HALF, ChannelParams(1.0), n_max=10)
    assert pi[:, 0].sum() == pytest.approx(1.0, abs=1e-12)


def test_via_chain_matches_pmf():
    src, ch, pol = HALF, ChannelParams(0.8), RS(0.5)
    pi, _ = oracle.via_distribution(pol, src, ch, n_max=200)
    for i in range(30):
        pi0, pi1, _ = an.via_pmf(pol, src, ch, i)
        assert abs(pi[0, i] - pi0) < 1e-10 and abs(pi[1, i] - pi1) < 1e-10


@pytest.mark.parametrize(
    "build",
    [
        lambda: oracle.build_via_chain(RS(0.4), SourceParams(0.3, 0.6), ChannelParams(0.5)),
        lambda: oracle.build_joint_sync_chain(MRS(0.4, 0.9), SourceParams(0.3, 0.6), ChannelParams(0.7)),
        lambda: oracle.build_aoiv_chain(ChangeAware(), SourceParams(0.3, 0.6), ChannelParams(0.7)),
    ],
)
def test_rows_stochastic(build):
    P = _dense(build().transition_matrix)
    assert np.max(np.abs(P.sum(axis=1) - 1)) < 1e-12


def test_truncation_guards():
    with pytest.raises(ValueError):
        oracle.build_via_chain(RS(0.5), HALF, ChannelParams(0.8), n_max=5)
    with pytest.raises(TruncationTooSmall):
        oracle.build_via_chain(RS(0.1), SourceParams(0.9, 0.9), ChannelParams(0.1), n_max=10)
    with pytest.raises(DomainError):
        oracle.build_via_chain(SemanticsAware(), HALF, ChannelParams(0.5))


def test_truncation_sensitivity():
    src, ch, pol = SourceParams(0.3, 0.6), ChannelParams(0.4), RS(0.5)
    pi, chain = oracle.via_distribution(pol, src, ch)
    pi2, _ = oracle.via_distribution(pol, src, ch, n_max=2 * chain.truncation)
    n = chain.truncation
    assert np.max(np.abs(pi[:, : n - 1] - pi2[:, : n - 1])) < 1e-10


def test_sync_chain_examples():
    src = HALF
    v = oracle.sync_distribution(RS(0.5), src, ChannelParams(0.8))
    a = an.sync_stationary(RS(0.5), src, ChannelParams(0.8))
    assert all(abs(v[k] - a[k]) < 1e-10 for k in a)
    v = oracle.sync_distribution(RS(1.0), src, ChannelParams(1.0))
    assert v[(0, 1)] == pytest.approx(0, abs=1e-14) and v[(1, 0)] == pytest.approx(0, abs=1e-14)
    m = oracle.sync_distribution(MRS(1.0, 1.0), SourceParams(0.3, 0.7), ChannelParams(0.6))
    s = oracle.sync_distribution(SemanticsAware(), SourceParams(0.3, 0.7), ChannelParams(0.6))
    assert all(abs(m[k] - s[k]) < 1e-14 for k in m)


def test_sync_chain_not_irreducible():
    with pytest.raises(NotIrreducible):
        oracle.build_joint_sync_chain(MRS(0.0, 0.0), HALF, ChannelParams(0.5))


def test_aoiv_chain_examples():
    d = oracle.aoiv_distribution(RS(1.0), HALF, ChannelParams(0.5))
    assert d[(0, 1, 1)] == pytest.approx(0.125, abs=1e-12)
    for s in ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)):
        assert abs(d[s]) < 1e-14
    src, ch, pol = SourceParams(0.3, 0.6), ChannelParams(0.7), MRS(0.4, 0.9)
    d = oracle.aoiv_distribution(pol, src, ch)
    a = an.aoiv_stationary(pol, src, ch)
    assert all(abs(d[k] - a[k]) < 1e-10 for k in a)


def test_aoiv_chain_reachable_set():
    chain = oracle.build_aoiv_chain(RS(0.5), SourceParams(0.3, 0.6), ChannelParams(0.7))
    assert chain.info["reachable"] == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def test_stationary_solve_small_chains():
    v = oracle.stationary_solve(oracle.source_chain(SourceParams(0.2, 0.6)))
    assert v == pytest.approx([0.75, 0.25], abs=1e-14)
    one = oracle.ExplicitChain([0], np.eye(1))
    assert oracle.stationary_solve(one) == pytest.approx([1.0])


def test_stationary_residual():
    chain = oracle.build_via_chain(ChangeAware(), SourceParams(0.3, 0.6), ChannelParams(0.3))
    v = oracle.stationary_solve(chain, tol=1e-13)
    assert np.max(np.abs(chain.transition_matrix.T @ v - v)) < 1e-12
    assert chain.info["tail_bound"] < 1e-9


def test_recurrent_classes():
    assert oracle.recurrent_classes(np.eye(3)) == 3
    assert oracle.recurrent_classes(np.array([[0.5, 0.5], [0.0, 1.0]])) == 1


def test_aoii_pmf_oracle_examples():
    pmf = oracle.aoii_pmf_oracle(RS(1.0), HALF, ChannelParams(1.0), 5)
    assert pmf[0] == pytest.approx(1.0) and np.allclose(pmf[1:], 0)
    # first-step analysis on the 4-state chain: a sync slot followed by one error slot
    pmf = oracle.aoii_pmf_oracle(ChangeAware(), HALF, ChannelParams(0.5), 3)
    assert pmf[1] == pytest.approx(1 / 6, abs=1e-14)
    src, ch, pol = SourceParams(0.2, 0.7), ChannelParams(0.5), RS(0.6)
    pmf = oracle.aoii_pmf_oracle(pol, src, ch, 60)
    assert np.max(np.abs(pmf - [an.aoii_pmf(pol, src, ch, i) for i in range(61)])) < 1e-10


def test_cost_oracle_semantics_aware():
    v = oracle.cost_rate_oracle(SemanticsAware(), SourceParams(0.9, 0.8), ChannelParams(0.9))
    assert v == pytest.approx(1.44 / (1.7 * 1.07), abs=1e-12)
