"""Edge-walk Hamiltonian in an exact effective spectral representation.

The walk Hamiltonian on the doubled (edge) register block-diagonalizes over
the discriminant eigenvectors: each v_k with eigenvalue lambda_k < 1 spans an
invariant plane {|v_k,0>, |perp_k>} on which the generator acts as
sqrt(1-lambda_k^2) sigma_y, and |v_n,0> (top eigenvector) is annihilated.
Everything the algorithms need lives in these 2n-1 modes, so the effective
form is exact while costing one n x n eigensolve. The n^2-dimensional build
from the explicit isometry and swap exists as a cross-check oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .chains import Discriminant, InterpolatedChain
from .errors import IllConditionedError, ValidationError
from .policy import POLICY


@dataclass(frozen=True)
class EdgeWalkHamiltonian:
    """Spectral form of the walk generator.

    lambdas: discriminant eigenvalues ascending, lambdas[-1] == 1.
    vectors: matching eigenvector columns (node basis).
    mode_energies: e_k = sqrt(1 - lambda_k^2) for each k below the top, in
    lambda order (so the values descend and mode_energies[-1] is the gap).

    Mode amplitudes use the convention Psi_k^{+-} = (|v_k,0> +- i|perp_k>)/sqrt(2)
    with energies +-e_k; the perp partners are never materialized, only their
    amplitudes are tracked.
    """

    lambdas: np.ndarray
    vectors: np.ndarray
    mode_energies: np.ndarray

    @property
    def n(self) -> int:
        return int(self.lambdas.size)

    @property
    def gap(self) -> float:
        return float(self.mode_energies[-1])

    @property
    def energies(self) -> np.ndarray:
        """Full effective energy multiset {0} U {+-e_k}, sorted ascending."""
        return np.sort(np.concatenate([-self.mode_energies, [0.0], self.mode_energies]))

    def modes_from_node_state(self, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray, complex]:
        """Decompose |psi,0> into (c_plus, c_minus, c_zero) mode amplitudes."""
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (self.n,):
            raise ValidationError(f"state must have shape ({self.n},), got {psi.shape}")
        a = self.vectors.T @ psi
        c = a[:-1] / np.sqrt(2.0)
        return c.copy(), c.copy(), complex(a[-1])

    def node_state_from_modes(self, c_plus: np.ndarray, c_minus: np.ndarray,
                              c_zero: complex) -> tuple[np.ndarray, np.ndarray]:
        """Map mode amplitudes back to (node-sector vector, perp amplitudes).

        The perp amplitudes live outside the node sector; their squared norm
        is the probability lost to the swap register.
        """
        c_plus = np.asarray(c_plus, dtype=complex)
        c_minus = np.asarray(c_minus, dtype=complex)
        if c_plus.shape != (self.n - 1,) or c_minus.shape != (self.n - 1,):
            raise ValidationError("mode arrays must have length n-1")
        node_coeffs = (c_plus + c_minus) / np.sqrt(2.0)
        perp = 1j * (c_plus - c_minus) / np.sqrt(2.0)
        node = self.vectors[:, :-1] @ node_coeffs + c_zero * self.vectors[:, -1]
        return node, perp

    def evolve_node_state(self, psi: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Evolve |psi,0> for time t; return the node-sector part and perp amps.

        Within each invariant plane e^{-iHt} rotates (node, perp) by angle
        e_k t, so an initially node-sector state stays real in that plane.
        """
        psi = np.asarray(psi, dtype=complex)
        a = self.vectors.T @ psi
        phase = self.mode_energies * float(t)
        node = self.vectors[:, :-1] @ (a[:-1] * np.cos(phase)) + a[-1] * self.vectors[:, -1]
        perp = a[:-1] * np.sin(phase)
        return node, perp


def build_effective(D: Discriminant) -> EdgeWalkHamiltonian:
    """Effective Hamiltonian from a validated discriminant decomposition."""
    w = D.spectrum.eigenvalues.copy()
    excess = w - 1.0
    worst = float(excess.max())
    if worst > POLICY.lambda_clamp_tol:
        raise IllConditionedError(
            f"discriminant eigenvalue exceeds 1 by {worst:.3e}, beyond the clamp tolerance")
    if worst > 0.0:
        warnings.warn(f"clamping eigenvalue excess {worst:.3e} above 1 to 1",
                      RuntimeWarning, stacklevel=2)
        np.minimum(w, 1.0, out=w)
    if w[-2] >= 1.0 - POLICY.eigenvalue_one_guard:
        raise ValidationError(
            f"second eigenvalue {w[-2]!r} leaves no spectral gap; top eigenvalue must be simple")
    energies = np.sqrt((1.0 - w[:-1]) * (1.0 + w[:-1]))
    if w[0] < 0.0 and energies.min() < energies[-1]:
        raise IllConditionedError(
            f"negative eigenvalue {w[0]!r} closes the energy gap below sqrt(1-lambda_(n-1)^2); "
            "use a lazy chain")
    lam = w.copy()
    lam.setflags(write=False)
    energies.setflags(write=False)
    vec = D.spectrum.vectors
    return EdgeWalkHamiltonian(lam, vec, energies)


@dataclass(frozen=True)
class FullHamiltonian:
    """Dense n^2-dimensional build, for cross-checks on small chains."""

    matrix: np.ndarray
    isometry: np.ndarray   # the completed block unitary V

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def node_embedding(psi: np.ndarray, n: int) -> np.ndarray:
    """Embed a node vector as |psi, 0> in the n^2 edge register."""
    psi = np.asarray(psi, dtype=complex)
    out = np.zeros(n * n, dtype=complex)
    out[np.arange(n) * n] = psi
    return out


def _complete_column(c: np.ndarray) -> np.ndarray:
    """Real orthogonal matrix with first column c (unit norm), via Householder."""
    n = c.size
    w = c - np.eye(n)[:, 0]
    nw = np.linalg.norm(w)
    if nw < 1e-14:
        return np.eye(n)
    w = w / nw
    return np.eye(n) - 2.0 * np.outer(w, w)


def build_full(chain: InterpolatedChain, max_n: int | None = None) -> FullHamiltonian:
    """Dense H = i[V^T S V, Pi0] on the n^2 edge register."""
    rows = chain.result.rows
    n = rows.shape[0]
    limit = POLICY.full_build_max_n if max_n is None else int(max_n)
    if n > limit:
        raise ValidationError(f"full build limited to n <= {limit} (got n={n})")
    V = np.zeros((n * n, n * n))
    for x in range(n):
        block = _complete_column(np.sqrt(rows[x]))
        resid = np.abs(block.T @ block - np.eye(n)).max()
        if resid > POLICY.unitary_completion_tol:
            raise IllConditionedError(
                f"unitary completion residual {resid:.3e} at row {x}")
        V[x * n:(x + 1) * n, x * n:(x + 1) * n] = block
    # S permutes |x,y> -> |y,x>
    idx = np.arange(n * n)
    perm = (idx % n) * n + idx // n
    W = V.T @ V[perm]
    pi0_cols = np.arange(n) * n
    comm = np.zeros((n * n, n * n))
    comm[:, pi0_cols] = W[:, pi0_cols]
    comm[pi0_cols, :] -= W[pi0_cols, :]
    H = 1j * comm
    herm = np.abs(H - H.conj().T).max()
    if herm > POLICY.hermiticity_tol:
        raise IllConditionedError(f"full Hamiltonian hermiticity residual {herm:.3e}")
    return FullHamiltonian(H, V)
