"""Edge-walk generator: the effective spectral form against the dense
n^2-register build, plane algebra, and closed-form dynamics."""

import numpy as np
import pytest
import scipy.linalg

from conftest import two_state_uniform
from qwmix.chains import (
    MarkedSet,
    StochasticMatrix,
    discriminant,
    discriminant_of,
    interpolate,
)
from qwmix.errors import IllConditionedError, ValidationError
from qwmix.generators import lazy_complete_graph, random_reversible_chain
from qwmix.hamiltonian import build_effective, build_full, node_embedding

import _oracles as oracles


def effective_of(P, marked=None, s=0.0):
    if marked is None:
        return build_effective(discriminant_of(P))
    return build_effective(discriminant(interpolate(P, marked, s)))


def test_zero_eigenvalue_maps_to_unit_energy():
    H = effective_of(two_state_uniform())
    assert np.array_equal(H.lambdas, [0.0, 1.0])
    assert H.mode_energies[0] == pytest.approx(1.0, abs=1e-15)


def test_top_eigenvalue_maps_to_zero_energy():
    H = effective_of(random_reversible_chain(5, seed=0))
    assert H.lambdas[-1] == pytest.approx(1.0, abs=1e-10)
    assert 0.0 in H.energies


def test_two_state_chain_has_two_nonzero_energies():
    H = effective_of(two_state_uniform())
    nonzero = H.energies[np.abs(H.energies) > 1e-12]
    assert nonzero.shape == (2,)
    assert np.allclose(nonzero, [-1.0, 1.0])


@pytest.mark.parametrize("n,seed,s", [(3, 1, 0.0), (5, 4, 0.4), (8, 2, 0.7)])
def test_full_build_matches_effective_spectrum(n, seed, s):
    P = random_reversible_chain(n, seed=seed)
    chain = interpolate(P, MarkedSet((0,)), s)
    H = build_effective(discriminant(chain))
    full = build_full(chain)
    vals = np.linalg.eigvalsh(full.matrix)
    pos = np.sort(vals[vals > 1e-8])
    assert pos.size == n - 1
    assert np.abs(pos - np.sort(H.mode_energies)).max() < 1e-8
    neg = np.sort(-vals[vals < -1e-8])
    assert np.abs(neg - pos).max() < 1e-8


def test_lazy_complete_graph_full_vs_effective():
    P = lazy_complete_graph(4)
    chain = interpolate(P, MarkedSet((1,)), 0.5)
    H = build_effective(discriminant(chain))
    vals = np.linalg.eigvalsh(build_full(chain).matrix)
    pos = np.sort(vals[vals > 1e-8])
    assert np.abs(pos - np.sort(H.mode_energies)).max() < 1e-8


@pytest.mark.parametrize("n", [3, 4, 6])
def test_zero_energy_multiplicity(n):
    P = lazy_complete_graph(n)
    vals = np.linalg.eigvalsh(build_full(interpolate(P, MarkedSet((0,)), 0.3)).matrix)
    assert int(np.sum(np.abs(vals) < 1e-8)) == (n - 1) ** 2 + 1


def test_top_vector_is_annihilated():
    P = random_reversible_chain(5, seed=7)
    chain = interpolate(P, MarkedSet((2,)), 0.6)
    D = discriminant(chain)
    full = build_full(chain)
    embedded = node_embedding(D.top_vector, 5)
    assert np.abs(full.matrix @ embedded).max() < 1e-10


def test_plane_eigenvectors_and_their_node_shadow():
    # Psi_k^{+-} = (|v_k,0> +- i|perp_k>)/sqrt(2) should be eigenvectors of the
    # dense build at +-e_k, and the node-sector projection of either is
    # |v_k,0>/sqrt(2)
    n = 5
    P = random_reversible_chain(n, seed=12)
    chain = interpolate(P, MarkedSet((1,)), 0.35)
    D = discriminant(chain)
    H = build_effective(D)
    full = build_full(chain)
    idx = np.arange(n * n)
    swap = (idx % n) * n + idx // n
    W = full.isometry.T @ full.isometry[swap]
    for k in range(n - 1):
        v_emb = node_embedding(H.vectors[:, k], n)
        e_k = H.mode_energies[k]
        perp = (W @ v_emb - H.lambdas[k] * v_emb) / e_k
        assert np.linalg.norm(perp) == pytest.approx(1.0, abs=1e-10)
        for sign in (+1.0, -1.0):
            psi = (v_emb + sign * 1j * perp) / np.sqrt(2.0)
            assert np.abs(full.matrix @ psi - sign * e_k * psi).max() < 1e-10
            shadow = np.zeros(n * n, dtype=complex)
            shadow[np.arange(n) * n] = psi[np.arange(n) * n]
            assert np.abs(shadow - v_emb / np.sqrt(2.0)).max() < 1e-10


@pytest.mark.parametrize("n,seed", [(3, 3), (5, 9), (6, 14)])
def test_dynamics_closure_against_dense_expm(n, seed):
    P = random_reversible_chain(n, seed=seed)
    chain = interpolate(P, MarkedSet((0,)), 0.25)
    H = build_effective(discriminant(chain))
    full = build_full(chain)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=n)
    psi = psi / np.linalg.norm(psi)
    for t in (0.7, 3.1):
        ref = scipy.linalg.expm(-1j * full.matrix * t) @ node_embedding(psi, n)
        node, perp = H.evolve_node_state(psi, t)
        node_coords = np.arange(n) * n
        assert np.abs(ref[node_coords] - node).max() < 1e-10
        off = np.delete(ref, node_coords)
        assert abs(np.linalg.norm(off) ** 2 - np.linalg.norm(perp) ** 2) < 1e-10
        assert abs(np.linalg.norm(node) ** 2 + np.linalg.norm(perp) ** 2 - 1.0) < 1e-12


def test_mode_roundtrip_and_norm_split():
    P = random_reversible_chain(7, seed=20)
    H = effective_of(P)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=7) + 1j * rng.normal(size=7)
    psi = psi / np.linalg.norm(psi)
    c_plus, c_minus, c_zero = H.modes_from_node_state(psi)
    assert np.sum(np.abs(c_plus) ** 2 + np.abs(c_minus) ** 2) + abs(c_zero) ** 2 == \
        pytest.approx(1.0, abs=1e-12)
    node, perp = H.node_state_from_modes(c_plus, c_minus, c_zero)
    assert np.abs(node - psi).max() < 1e-12
    assert np.abs(perp).max() < 1e-12


def test_evolution_at_zero_time_is_identity():
    P = random_reversible_chain(4, seed=2)
    H = effective_of(P)
    psi = np.sqrt(np.full(4, 0.25))
    node, perp = H.evolve_node_state(psi, 0.0)
    assert np.abs(node - psi).max() < 1e-14
    assert np.abs(perp).max() == 0.0


@pytest.mark.parametrize("n,seed", [(4, 0), (8, 3), (16, 6), (16, 7)])
def test_gap_sandwich_for_lazy_chains(n, seed):
    P = random_reversible_chain(n, seed=seed)
    D = discriminant_of(P)
    H = build_effective(D)
    delta = D.spectral_gap
    assert np.sqrt(delta) - 1e-12 <= H.gap <= np.sqrt(2.0 * delta) + 1e-12


def test_negative_spectrum_closing_the_gap_is_rejected():
    # eigenvalues {-0.5, 0.2, 1}: the energy of the negative mode (0.866)
    # undercuts the nominal gap energy (0.980)
    v2 = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    v3 = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
    rows = np.full((3, 3), 1.0 / 3.0) + 0.2 * np.outer(v2, v2) - 0.5 * np.outer(v3, v3)
    P = StochasticMatrix(rows)
    with pytest.raises(IllConditionedError):
        build_effective(discriminant_of(P))


def test_full_build_size_limit():
    P = random_reversible_chain(14, seed=0)
    with pytest.raises(ValidationError):
        build_full(interpolate(P, MarkedSet((0,)), 0.0))


def test_full_build_isometry_is_orthogonal():
    P = random_reversible_chain(4, seed=5)
    full = build_full(interpolate(P, MarkedSet((3,)), 0.5))
    V = full.isometry
    assert np.abs(V.T @ V - np.eye(16)).max() < 1e-10
