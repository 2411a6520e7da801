"""Classical quantities: hitting times (spectral, Monte Carlo, interpolated),
the extended hitting time's s-invariance, and TV mixing times."""

import numpy as np
import pytest

from conftest import two_state_uniform
from qwmix.chains import (
    MarkedSet,
    discriminant,
    interpolate,
    stationary_distribution,
)
from qwmix.errors import IllConditionedError, ValidationError
from qwmix.generators import lazy_complete_graph, lazy_cycle, random_reversible_chain
from qwmix.hitting import (
    classical_mixing_time,
    extended_hitting_time,
    hitting_time_montecarlo,
    hitting_time_spectral,
    interpolated_hitting_time,
    tv_trace,
)

import _oracles as oracles


def test_two_state_uniform_worked_values():
    # from either state the marked one is found in one expected step
    P = two_state_uniform()
    pi = stationary_distribution(P)
    M = MarkedSet((1,))
    assert hitting_time_spectral(P, pi, M).ht == pytest.approx(1.0, abs=1e-12)
    assert interpolated_hitting_time(P, pi, M, 0.0) == pytest.approx(0.25, abs=1e-12)
    assert extended_hitting_time(P, pi, M).ht_plus == pytest.approx(1.0, abs=1e-10)


def test_complete_graph_all_but_one_marked():
    P = lazy_complete_graph(3)
    pi = stationary_distribution(P)
    M = MarkedSet((0, 1))
    got = hitting_time_spectral(P, pi, M).ht
    ref = oracles.hitting_time_fundamental(P.rows, pi.pi, M.mask(3))
    assert got == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("n,seed,marked", [(8, 0, (3,)), (8, 5, (0, 6)), (14, 2, (1,))])
def test_spectral_matches_fundamental_matrix(n, seed, marked):
    P = random_reversible_chain(n, seed=seed)
    pi = stationary_distribution(P)
    M = MarkedSet(marked)
    got = hitting_time_spectral(P, pi, M).ht
    ref = oracles.hitting_time_fundamental(P.rows, pi.pi, M.mask(n))
    assert got == pytest.approx(ref, rel=1e-9)


def test_lazy_complete_graph_spectral_vs_fundamental():
    P = lazy_complete_graph(8)
    pi = stationary_distribution(P)
    M = MarkedSet((2,))
    got = hitting_time_spectral(P, pi, M).ht
    ref = oracles.hitting_time_fundamental(P.rows, pi.pi, M.mask(8))
    assert got == pytest.approx(ref, rel=1e-9)


def test_montecarlo_two_state_within_three_sigma():
    P = two_state_uniform()
    rep = hitting_time_montecarlo(P, MarkedSet((1,)), trials=40_000, seed=3)
    assert rep.trials == 40_000 and rep.stderr > 0.0
    assert abs(rep.ht - 1.0) <= 3.0 * rep.stderr


def test_montecarlo_everything_marked_is_zero():
    P = two_state_uniform()
    rep = hitting_time_montecarlo(P, MarkedSet((0, 1)), trials=100, seed=0)
    assert rep.ht == 0.0 and rep.stderr == 0.0


def test_montecarlo_reproducible():
    P = random_reversible_chain(6, seed=9)
    a = hitting_time_montecarlo(P, MarkedSet((4,)), trials=5_000, seed=11)
    b = hitting_time_montecarlo(P, MarkedSet((4,)), trials=5_000, seed=11)
    assert a.ht == b.ht


def test_montecarlo_agrees_with_spectral(chain12, chain12_pi):
    M = MarkedSet((3,))
    exact = hitting_time_spectral(chain12, chain12_pi, M).ht
    mc = hitting_time_montecarlo(chain12, M, trials=60_000, seed=1)
    assert abs(mc.ht - exact) <= 3.0 * mc.stderr


def test_extended_single_marked_equals_plain():
    P = random_reversible_chain(9, seed=17)
    pi = stationary_distribution(P)
    M = MarkedSet((5,))
    plain = hitting_time_spectral(P, pi, M).ht
    ext = extended_hitting_time(P, pi, M)
    assert ext.ht_plus == pytest.approx(plain, rel=1e-9)
    assert ext.warning is None


def test_extended_closed_form_at_zero():
    P = random_reversible_chain(7, seed=23)
    pi = stationary_distribution(P)
    M = MarkedSet((0, 2))
    p_M = pi.marked_mass(M)
    ext = extended_hitting_time(P, pi, M)
    at_zero = interpolated_hitting_time(P, pi, M, 0.0)
    assert ext.ht_plus == pytest.approx(at_zero / p_M ** 2, rel=1e-9)


def test_extended_invariance_on_bundled_chain(chain12, chain12_pi):
    ext = extended_hitting_time(chain12, chain12_pi, MarkedSet((3,)),
                                s_grid=(0.0, 0.3, 0.6, 0.9))
    assert ext.invariance_residual <= 1e-8
    assert len(ext.per_s_values) == 4


def test_interpolated_rejects_s_too_close_to_one():
    P = two_state_uniform()
    pi = stationary_distribution(P)
    with pytest.raises((ValidationError, IllConditionedError)):
        extended_hitting_time(P, pi, MarkedSet((0,)), s_grid=(0.0, 1.0))


def test_spectral_sum_bounded_by_gap():
    # HT(s) <= (sum of sub-top overlaps^2) / Delta(s), since every 1 - lambda_j
    # below the top is at least the top gap
    P = random_reversible_chain(10, seed=3)
    pi = stationary_distribution(P)
    M = MarkedSet((4,))
    u_full = np.sqrt(pi.pi) * (~M.mask(10))
    for s in (0.0, 0.5):
        D = discriminant(interpolate(P, M, s))
        overlaps = D.spectrum.vectors.T @ u_full
        bound = float(np.sum(overlaps[:-1] ** 2)) / D.spectral_gap
        assert interpolated_hitting_time(P, pi, M, s) <= bound + 1e-12


def test_tv_trace_matches_matrix_powers():
    P = random_reversible_chain(6, seed=8)
    pi = stationary_distribution(P)
    rows = tv_trace(P, pi, [1, 2, 5, 9])
    for t, d in rows:
        assert d == pytest.approx(oracles.worst_tv_direct(P.rows, pi.pi, t), abs=1e-12)


def test_two_state_uniform_mixes_in_one_step():
    P = two_state_uniform()
    pi = stationary_distribution(P)
    rep = classical_mixing_time(P, pi, 0.01)
    assert rep.t_mix_empirical == 1


@pytest.mark.parametrize("P_factory,eps", [
    (lambda: lazy_complete_graph(16), 0.01),
    (lambda: lazy_cycle(16), 0.1),
])
def test_empirical_mixing_below_bound(P_factory, eps):
    P = P_factory()
    pi = stationary_distribution(P)
    rep = classical_mixing_time(P, pi, eps)
    assert rep.t_mix_empirical <= rep.t_mix_bound
    assert rep.t_mix_empirical == oracles.mixing_time_scan(P.rows, pi.pi, eps)


def test_mixing_time_monotone_in_epsilon():
    P = random_reversible_chain(12, seed=5)
    pi = stationary_distribution(P)
    loose = classical_mixing_time(P, pi, 0.2).t_mix_empirical
    tight = classical_mixing_time(P, pi, 0.05).t_mix_empirical
    assert loose <= tight
