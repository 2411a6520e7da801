"""Spectral decompositions of real symmetric operators.

Eigenvalues are always stored in ascending order with orthonormal eigenvector
columns, so the top eigenpair of a stochastic-similar operator is the last one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition H = V diag(w) V^T of a real symmetric matrix."""

    eigenvalues: np.ndarray  # ascending, shape (n,)
    vectors: np.ndarray      # orthonormal columns, shape (n, n)

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        v = np.asarray(self.vectors, dtype=float)
        if w.ndim != 1 or v.shape != (w.size, w.size):
            raise ValidationError("eigenvalue/eigenvector shape mismatch")
        if np.any(np.diff(w) < 0):
            raise ValidationError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", _frozen(w))
        object.__setattr__(self, "vectors", _frozen(v))

    @classmethod
    def from_symmetric(cls, matrix: np.ndarray, *, symmetry_tol: float | None = None
                       ) -> "SpectralDecomposition":
        matrix = np.asarray(matrix, dtype=float)
        if symmetry_tol is not None:
            asym = np.abs(matrix - matrix.T).max()
            if asym > symmetry_tol:
                raise ValidationError(f"matrix asymmetry {asym:.3e} above {symmetry_tol:.1e}")
        w, v = np.linalg.eigh(0.5 * (matrix + matrix.T))
        return cls(w, v)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def overlaps(self, state: np.ndarray) -> np.ndarray:
        """Amplitudes <v_j|state> for a state given in the computational basis."""
        return self.vectors.T @ np.asarray(state)

    def reconstruct(self, amplitudes: np.ndarray) -> np.ndarray:
        """Computational-basis state from eigenbasis amplitudes."""
        return self.vectors @ np.asarray(amplitudes)
