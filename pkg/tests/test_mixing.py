"""Time-averaged outcome distributions, their T -> infinity limits, gap
statistics and the mixing-time bound built from them."""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from qwmix.chains import MarkedSet, discriminant, discriminant_of, interpolate
from qwmix.errors import IllConditionedError, ValidationError
from qwmix.generators import lazy_complete_graph, random_reversible_chain
from qwmix.gnp import sample_gnp
from qwmix.hamiltonian import build_effective
from qwmix.mixing import (
    edge_walk_gap_map,
    edge_walk_limiting_distribution,
    gap_statistics,
    limiting_distribution,
    mixing_time_bound,
    mixing_trace,
    phase_average_kernel,
    time_averaged_distribution,
)
from qwmix.spectral import SpectralDecomposition

import _oracles as oracles


def random_spec(dim, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(dim, dim))
    return SpectralDecomposition.from_symmetric(scale * (A + A.T) / (2.0 * np.sqrt(dim)))


def test_kernel_endpoints_and_bound():
    assert phase_average_kernel(np.array([0.0]), 3.0)[0] == pytest.approx(1.0)
    deltas = np.linspace(-8.0, 8.0, 401)
    for T in (0.5, 4.0, 300.0):
        assert np.abs(phase_average_kernel(deltas, T)).max() <= 1.0 + 1e-12


def test_kernel_is_the_average_of_a_phase():
    t = np.linspace(0.0, 7.0, 200_001)
    for delta in (0.3, 2.2, -1.7):
        ref = trapezoid(np.exp(-1j * delta * t), t) / 7.0
        assert abs(phase_average_kernel(np.array([delta]), 7.0)[0] - ref) < 1e-9


def test_eigenstate_average_is_stationary():
    spec = random_spec(7, seed=1)
    psi0 = spec.vectors[:, 3]
    probs = time_averaged_distribution(spec, psi0, T=17.0).probs
    assert np.abs(probs - psi0 ** 2).max() < 1e-12
    lim = limiting_distribution(spec, psi0).probs
    assert np.abs(lim - psi0 ** 2).max() < 1e-12
    assert mixing_time_bound(spec, psi0, 0.1) == pytest.approx(0.0, abs=1e-12)
    trace = mixing_trace(spec, psi0, 0.1, [1.0, 2.0])
    assert trace.t_mix == 1.0 and trace.distances.max() < 1e-12


@pytest.mark.parametrize("dim,seed", [(6, 2), (6, 11)])
def test_finite_average_matches_quadrature(dim, seed):
    spec = random_spec(dim, seed)
    psi0 = np.zeros(dim)
    psi0[0] = 1.0
    probs = time_averaged_distribution(spec, psi0, T=50.0).probs
    ref = oracles.time_average_quadrature(spec.eigenvalues, spec.vectors, psi0, 50.0,
                                          npts=100_001)
    assert np.abs(probs - ref).max() < 1e-4


def test_trace_distances_match_quadrature():
    spec = random_spec(5, seed=7)
    psi0 = np.full(5, 1.0 / np.sqrt(5.0))
    lim = limiting_distribution(spec, psi0).probs
    trace = mixing_trace(spec, psi0, 0.05, [20.0, 60.0, 180.0])
    for T, d in zip(trace.times, trace.distances):
        ref = oracles.time_average_quadrature(spec.eigenvalues, spec.vectors, psi0,
                                              float(T), npts=200_001)
        assert abs(d - np.abs(ref - lim).sum()) < 1e-4


def test_degenerate_average_has_a_limit():
    # heavily degenerate spectrum: the limit keeps whole-group coherences
    P = lazy_complete_graph(8)
    spec = discriminant_of(P).spectrum
    psi0 = np.zeros(8)
    psi0[2] = 1.0
    lim = limiting_distribution(spec, psi0).probs
    avg = time_averaged_distribution(spec, psi0, T=1e4).probs
    assert np.abs(avg - lim).sum() < 1e-3
    assert lim.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("dim,seed", [(6, 3), (11, 4), (16, 5)])
def test_limit_agrees_with_long_horizon_average(dim, seed):
    spec = random_spec(dim, seed)
    assert gap_statistics(spec.eigenvalues).simple_spectrum
    psi0 = np.zeros(dim)
    psi0[dim // 2] = 1.0
    lim = limiting_distribution(spec, psi0).probs
    avg = time_averaged_distribution(spec, psi0, T=1e6).probs
    assert np.abs(avg - lim).sum() < 2e-3


def test_partial_outcome_set_is_supported():
    spec = random_spec(6, seed=9)
    psi0 = np.zeros(6)
    psi0[1] = 1.0
    full = time_averaged_distribution(spec, psi0, T=40.0).probs
    some = time_averaged_distribution(spec, psi0, T=40.0, outcomes=[0, 2, 5]).probs
    assert np.abs(some - full[[0, 2, 5]]).max() < 1e-14


def test_gap_statistics_two_point_spectrum():
    stats = gap_statistics(np.array([0.0, 1.0]))
    assert stats.sigma == 1.0
    assert stats.delta_min == 1.0 and stats.delta == 1.0
    assert stats.simple_spectrum
    assert np.array_equal(stats.sigma_r, [1.0])


def test_gap_statistics_equally_spaced_two_ways():
    n, h = 9, 0.125
    w = np.arange(n) * h
    stats = gap_statistics(w)
    direct, dmin = oracles.sigma_double_loop(w)
    assert stats.sigma == pytest.approx(direct, rel=1e-13)
    assert stats.sigma == pytest.approx(oracles.sigma_equally_spaced(n, h), rel=1e-13)
    assert stats.delta_min == pytest.approx(dmin)
    assert stats.avg_gap == pytest.approx(h)
    assert stats.sigma_r.sum() == pytest.approx(stats.sigma, rel=1e-13)


def test_gap_statistics_skips_degenerate_pairs():
    stats = gap_statistics(np.array([0.0, 0.0, 1.0]), tol=1e-12)
    assert stats.sigma == pytest.approx(2.0)
    assert not stats.simple_spectrum


@pytest.mark.parametrize("dim,seed", [(5, 0), (9, 1), (14, 2)])
def test_sigma_sandwich_on_random_spectra(dim, seed):
    spec = random_spec(dim, seed)
    stats = gap_statistics(spec.eigenvalues, tol=0.0)
    n = dim
    assert 1.0 / stats.delta_min <= stats.sigma <= n * np.log(n) / stats.delta_min


def test_gap_statistics_rejects_unsorted():
    with pytest.raises(ValidationError):
        gap_statistics(np.array([1.0, 0.0]))
    with pytest.raises(IllConditionedError):
        gap_statistics(np.array([0.5, 0.5]), tol=1e-12)


def test_mixing_bound_with_uniform_overlaps():
    w = np.linspace(0.0, 1.0, 8)
    spec = SpectralDecomposition(w, np.eye(8))
    psi0 = np.full(8, 1.0 / np.sqrt(8.0))
    eps = 0.05
    sigma = gap_statistics(w).sigma
    assert mixing_time_bound(spec, psi0, eps) == pytest.approx(sigma / (8.0 * eps), rel=1e-12)


def test_mixing_bound_dominates_the_crossing():
    spec = discriminant_of(lazy_complete_graph(8)).spectrum
    psi0 = np.zeros(8)
    psi0[0] = 1.0
    eps = 0.1
    bound = mixing_time_bound(spec, psi0, eps)
    grid = np.geomspace(0.1, max(bound, 10.0), 60)
    trace = mixing_trace(spec, psi0, eps, grid)
    assert trace.crossed and trace.t_mix <= bound


@pytest.mark.parametrize("builder,psi_index,eps", [
    (lambda: discriminant_of(random_reversible_chain(12, seed=31)).spectrum, 0, 0.1),
    (lambda: discriminant_of(random_reversible_chain(33, seed=32)).spectrum, 5, 0.05),
    (lambda: SpectralDecomposition.from_symmetric(sample_gnp(64, 0.5, seed=33).normalized), 7, 0.1),
])
def test_average_is_mixed_at_the_bound(builder, psi_index, eps):
    # the advertised bound is sufficient: at T = bound the averaged
    # distribution is within eps of its limit
    spec = builder()
    psi0 = np.zeros(spec.n)
    psi0[psi_index] = 1.0
    T = mixing_time_bound(spec, psi0, eps)
    avg = time_averaged_distribution(spec, psi0, T).probs
    lim = limiting_distribution(spec, psi0).probs
    assert np.abs(avg - lim).sum() <= eps


def test_uniform_limit_on_dense_random_graph():
    sample = sample_gnp(50, 0.5, seed=0)
    spec = SpectralDecomposition.from_symmetric(sample.normalized)
    psi0 = np.zeros(50)
    psi0[0] = 1.0
    lim = limiting_distribution(spec, psi0).probs
    assert np.abs(lim - 1.0 / 50.0).max() <= 5.0 / 50.0


def test_dense_random_graph_crossing_time():
    sample = sample_gnp(50, 0.5, seed=0)
    spec = SpectralDecomposition.from_symmetric(sample.normalized)
    psi0 = np.zeros(50)
    psi0[0] = 1.0
    trace = mixing_trace(spec, psi0, 0.1, np.geomspace(1.0, 1e4, 50))
    assert trace.crossed and trace.t_mix <= 1e4


def test_gap_map_matches_direct_differencing():
    for n, seed in ((5, 3), (9, 6)):
        D = discriminant_of(random_reversible_chain(n, seed=seed))
        report = edge_walk_gap_map(D)
        H = build_effective(D)
        ladder = np.sort(np.concatenate([[0.0], H.mode_energies]))
        direct = np.sort(np.diff(ladder))
        mapped = np.sort([row[3] for row in report.per_gap_map])
        assert np.abs(mapped - direct).max() < 1e-12
        assert report.delta_min_H == pytest.approx(min(mapped), abs=1e-15)
        assert report.delta_min_P == pytest.approx(np.diff(D.spectrum.eigenvalues).min())


def three_state_spectrum(mu):
    # symmetric stochastic matrix with eigenvalues {0, mu, 1}
    from qwmix.chains import StochasticMatrix
    v = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
    rows = np.full((3, 3), 1.0 / 3.0) + mu * np.outer(v, v)
    return StochasticMatrix(rows)


def test_gap_map_shrinks_quadratically_near_zero():
    delta = 1e-3
    D = discriminant_of(three_state_spectrum(delta))
    report = edge_walk_gap_map(D)
    lo_row = report.per_gap_map[0]
    assert lo_row[0] == pytest.approx(0.0, abs=1e-12)
    assert lo_row[3] == pytest.approx(delta ** 2 / 2.0, rel=1e-5)


def test_gap_map_amplifies_to_sqrt_near_one():
    delta = 1e-3
    D = discriminant_of(three_state_spectrum(1.0 - delta))
    report = edge_walk_gap_map(D)
    top_row = report.per_gap_map[-1]
    assert top_row[1] == pytest.approx(1.0, abs=1e-12)
    assert top_row[3] == pytest.approx(np.sqrt(2.0 * delta), rel=1e-3)


def test_gap_map_refuses_degenerate_spectrum():
    with pytest.raises(IllConditionedError):
        edge_walk_gap_map(discriminant_of(lazy_complete_graph(5)))


def test_edge_walk_limit_against_direct_dynamics():
    P = random_reversible_chain(7, seed=3)
    H = build_effective(discriminant_of(P))
    psi0 = np.zeros(7)
    psi0[0] = 1.0
    lim = edge_walk_limiting_distribution(H, psi0)
    ref = oracles.node_average_direct(H.lambdas, H.vectors, H.mode_energies, psi0,
                                      T=2e5, npts=400_001)
    assert np.abs(lim - ref).max() < 1e-3
    cond = edge_walk_limiting_distribution(H, psi0, conditional=True)
    assert cond.sum() == pytest.approx(1.0, abs=1e-12)
    assert lim.sum() < 1.0


def test_edge_walk_limit_groups_degenerate_modes():
    # complete graph: all sub-top modes share one energy, so their block
    # keeps coherence and the kept weight is larger than mode-by-mode
    P = lazy_complete_graph(6)
    H = build_effective(discriminant_of(P))
    psi0 = np.zeros(6)
    psi0[1] = 1.0
    lim = edge_walk_limiting_distribution(H, psi0)
    ref = oracles.node_average_direct(H.lambdas, H.vectors, H.mode_energies, psi0,
                                      T=2e5, npts=400_001)
    assert np.abs(lim - ref).max() < 1e-3
