"""Transition-matrix plumbing: lazification, ergodicity checks, the
interpolated family, its stationary vector and discriminant."""

import numpy as np
import pytest

from conftest import two_state_uniform
from qwmix.chains import (
    MarkedSet,
    StationaryDistribution,
    StochasticMatrix,
    check_ergodic_reversible,
    critical_interpolation,
    discriminant,
    discriminant_of,
    interpolate,
    make_lazy,
    stationary_distribution,
    stationary_of_interpolated,
    time_reversal,
    u_m_split,
)
from qwmix.errors import ChainStructureError, ValidationError
from qwmix.generators import lazy_complete_graph, random_reversible_chain, two_block_chain

import _oracles as oracles


def test_stochastic_matrix_rejects_bad_rows():
    with pytest.raises(ValidationError):
        StochasticMatrix(np.array([[0.5, 0.6], [0.5, 0.5]]))
    with pytest.raises(ValidationError):
        StochasticMatrix(np.array([[1.2, -0.2], [0.5, 0.5]]))
    with pytest.raises(ValidationError):
        StochasticMatrix(np.ones((2, 3)) / 3.0)


def test_marked_set_validation():
    with pytest.raises(ValidationError):
        MarkedSet((2, 1))
    with pytest.raises(ValidationError):
        MarkedSet(())
    M = MarkedSet((0, 3))
    with pytest.raises(ValidationError):
        M.validate_against(3)
    # marking every state is fine for absorption, not for interpolation
    full = MarkedSet((0, 1, 2))
    full.validate_against(3, proper=False)
    with pytest.raises(ValidationError):
        full.validate_against(3, proper=True)
    assert np.array_equal(M.mask(5), [True, False, False, True, False])


def test_make_lazy_swap_chain():
    P = StochasticMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.array_equal(make_lazy(P).rows, [[0.5, 0.5], [0.5, 0.5]])


def test_make_lazy_identity_fixed_point():
    P = StochasticMatrix(np.eye(4))
    assert np.array_equal(make_lazy(P).rows, np.eye(4))


@pytest.mark.parametrize("n,seed", [(3, 0), (6, 1), (12, 2), (25, 3)])
def test_make_lazy_spectrum_in_unit_interval(n, seed):
    P = random_reversible_chain(n, seed=seed, lazy=False)
    vals = oracles.general_eigenvalues(make_lazy(P).rows)
    assert vals[0] >= -1e-12 and vals[-1] <= 1.0 + 1e-12


def test_two_block_chain_not_ergodic():
    rep = check_ergodic_reversible(two_block_chain(6))
    assert not rep.strongly_connected
    assert not rep.ergodic
    assert rep.pi is None


def test_two_state_uniform_ergodic():
    rep = check_ergodic_reversible(two_state_uniform())
    assert rep.ergodic and rep.reversible and rep.aperiodic
    assert np.allclose(rep.pi.pi, [0.5, 0.5], atol=1e-14)


def test_periodic_chain_flagged():
    swap = StochasticMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    rep = check_ergodic_reversible(swap)
    assert rep.strongly_connected and not rep.aperiodic and not rep.ergodic


@pytest.mark.parametrize("n,seed", [(4, 0), (9, 5), (20, 9)])
def test_stationary_matches_power_iteration(n, seed):
    P = random_reversible_chain(n, seed=seed)
    pi = stationary_distribution(P).pi
    ref = oracles.stationary_power_iteration(P.rows)
    assert np.abs(pi - ref).max() < 1e-10


def test_time_reversal_of_reversible_chain_is_itself():
    P = random_reversible_chain(8, seed=11)
    pi = stationary_distribution(P)
    assert np.abs(time_reversal(P, pi) - P.rows).max() < 1e-12


def test_interpolate_endpoints_and_midpoint():
    P = two_state_uniform()
    M = MarkedSet((0,))
    assert np.array_equal(interpolate(P, M, 0.0).result.rows, P.rows)
    absorbed = interpolate(P, M, 1.0).result.rows
    assert np.array_equal(absorbed, [[1.0, 0.0], [0.5, 0.5]])
    half = interpolate(P, M, 0.5).result.rows
    assert np.array_equal(half, 0.5 * (P.rows + absorbed))


def test_interpolate_only_touches_marked_rows():
    P = random_reversible_chain(7, seed=4)
    M = MarkedSet((2, 5))
    out = interpolate(P, M, 0.8).result.rows
    free = ~M.mask(7)
    assert np.array_equal(out[free], P.rows[free])
    assert np.allclose(out[2], 0.2 * P.rows[2] + 0.8 * np.eye(7)[2])


def test_interpolate_rejects_improper_arguments():
    P = two_state_uniform()
    with pytest.raises(ValidationError):
        interpolate(P, MarkedSet((0, 1)), 0.5)
    with pytest.raises(ValidationError):
        interpolate(P, MarkedSet((0,)), 1.5)


def test_stationary_of_interpolated_endpoint():
    P = random_reversible_chain(6, seed=2)
    pi = stationary_distribution(P)
    M = MarkedSet((1, 4))
    out = stationary_of_interpolated(pi, M, 0.0)
    assert np.abs(out.pi - pi.pi).max() < 1e-14
    assert out.p_M == pytest.approx(pi.marked_mass(M))


def test_stationary_of_interpolated_matches_eigensolve():
    P = random_reversible_chain(9, seed=7)
    pi = stationary_distribution(P)
    M = MarkedSet((0, 3))
    s = 0.7
    closed = stationary_of_interpolated(pi, M, s).pi
    ref = oracles.stationary_power_iteration(interpolate(P, M, s).result.rows)
    assert np.abs(closed - ref).max() < 1e-10


def test_stationary_of_interpolated_concentrates_near_one():
    P = random_reversible_chain(10, seed=13)
    pi = stationary_distribution(P)
    M = MarkedSet((2,))
    assert pi.marked_mass(M) >= 0.01, "generator should not starve a node this badly"
    out = stationary_of_interpolated(pi, M, 1.0 - 1e-6)
    assert out.marked_mass(M) >= 1.0 - 1e-4


def test_stationary_of_interpolated_rejects_s_one():
    pi = StationaryDistribution(np.array([0.5, 0.5]))
    with pytest.raises(ValidationError):
        stationary_of_interpolated(pi, MarkedSet((0,)), 1.0)


def test_discriminant_of_symmetric_chain_is_the_chain():
    P = lazy_complete_graph(5)
    D = discriminant_of(P)
    assert np.abs(D.matrix - P.rows).max() < 1e-14


@pytest.mark.parametrize("n,seed,s", [(5, 0, 0.3), (8, 1, 0.0), (11, 2, 0.85)])
def test_discriminant_top_vector_is_sqrt_pi(n, seed, s):
    P = random_reversible_chain(n, seed=seed)
    M = MarkedSet((seed % n,))
    D = discriminant(interpolate(P, M, s))
    root = np.sqrt(D.pi_s.pi)
    assert np.abs(D.matrix @ root - root).max() < 1e-8
    assert np.abs(D.top_vector - root).max() < 1e-8
    # stored decomposition must carry the same sign convention
    assert np.abs(D.spectrum.vectors[:, -1] - root).max() < 1e-8


@pytest.mark.parametrize("n,seed,s", [(4, 3, 0.5), (7, 8, 0.25), (10, 1, 0.9)])
def test_discriminant_shares_spectrum_with_chain(n, seed, s):
    P = random_reversible_chain(n, seed=seed)
    chain = interpolate(P, MarkedSet((0,)), s)
    D = discriminant(chain)
    ref = oracles.general_eigenvalues(chain.result.rows)
    assert np.abs(D.spectrum.eigenvalues - ref).max() < 1e-9


def test_discriminant_rejects_non_reversible_base():
    rows = np.array([[0.1, 0.6, 0.3], [0.3, 0.5, 0.2], [0.5, 0.2, 0.3]])
    P = StochasticMatrix(rows)
    rep = check_ergodic_reversible(P)
    assert not rep.reversible
    with pytest.raises(ChainStructureError):
        discriminant_of(P)


def test_u_m_split_balances_at_critical_s():
    P = random_reversible_chain(8, seed=6)
    pi = stationary_distribution(P)
    M = MarkedSet((1, 5))
    p_M = pi.marked_mass(M)
    split = u_m_split(pi, M, critical_interpolation(p_M))
    assert split.coeff_U == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert split.coeff_M == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_u_m_split_at_zero_recovers_sqrt_pi():
    P = random_reversible_chain(6, seed=15)
    pi = stationary_distribution(P)
    split = u_m_split(pi, MarkedSet((2,)), 0.0)
    assert np.abs(split.v_n_s - np.sqrt(pi.pi)).max() < 1e-12


@pytest.mark.parametrize("n", [4, 9, 16])
def test_complete_graph_critical_point(n):
    P = lazy_complete_graph(n)
    pi = stationary_distribution(P)
    M = MarkedSet((n // 2,))
    p_M = pi.marked_mass(M)
    assert p_M == pytest.approx(1.0 / n, abs=1e-14)
    assert critical_interpolation(p_M) == pytest.approx(1.0 - 1.0 / (n - 1.0), abs=1e-12)


def test_critical_interpolation_domain():
    with pytest.raises(ValidationError):
        critical_interpolation(0.0)
    with pytest.raises(ValidationError):
        critical_interpolation(0.5)
    assert critical_interpolation(0.25) == pytest.approx(1.0 - 0.25 / 0.75)


@pytest.mark.parametrize("n,seed", [(3, 0), (8, 4), (17, 2), (33, 6), (64, 1)])
def test_interpolated_stationary_invariant(n, seed):
    P = random_reversible_chain(n, seed=seed)
    pi = stationary_distribution(P)
    M = MarkedSet(tuple(sorted({0, n // 3})))
    for s in (0.0, 0.3, 0.9):
        rows = interpolate(P, M, s).result.rows
        pis = stationary_of_interpolated(pi, M, s).pi
        assert np.abs(pis @ rows - pis).max() < 1e-10


@pytest.mark.parametrize("s", [0.0, 0.4, 0.95])
def test_u_m_split_coefficients_are_a_unit_vector(s):
    P = random_reversible_chain(12, seed=21)
    pi = stationary_distribution(P)
    split = u_m_split(pi, MarkedSet((0, 7)), s)
    assert split.coeff_U ** 2 + split.coeff_M ** 2 == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(split.v_n_s) == pytest.approx(1.0, abs=1e-12)
