"""Von Neumann pointer coupling, block evolution and post-selection.

A register of l qubits holds 2^l momentum levels q/2^l. Coupling a system
Hamiltonian to the pointer momentum for time tau and reading the pointer in
the position basis multiplies each system eigenmode of energy E by

    gamma(E) = (1/2^l) sum_q exp(-i E tau q / 2^l)

on the position-0 branch. gamma(0) = 1 exactly, and with tau = 2pi/gap and
2^l gap >= 2 every mode with |E| >= gap has |gamma| < 1/2, so repeating the
block k times suppresses excited modes by 2^-k. The repeated map is applied
as a per-mode diagonal contraction; the composite system x pointer space is
only materialized by evolve_block for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import PostSelectionError, ValidationError
from .hamiltonian import EdgeWalkHamiltonian
from .policy import POLICY
from .spectral import SpectralDecomposition


@dataclass(frozen=True)
class PointerConfig:
    l: int            # qubits per block
    blocks: int
    tau: float
    eps_prime: float

    def __post_init__(self):
        if self.l < 1 or self.blocks < 1:
            raise ValidationError("l and blocks must be >= 1")
        if not self.tau > 0.0:
            raise ValidationError("tau must be positive")

    @property
    def levels(self) -> int:
        return 1 << self.l

    @property
    def total_qubits(self) -> int:
        return self.l * self.blocks

    @property
    def total_time(self) -> float:
        return self.tau * self.blocks

    @classmethod
    def from_gap(cls, gap: float, eps_prime: float) -> "PointerConfig":
        """Size the pointer for an energy gap: tau = 2pi/gap, 2^l gap >= 2."""
        if not 0.0 < gap <= 1.0:
            raise ValidationError(f"gap must lie in (0, 1], got {gap!r}")
        if not 0.0 < eps_prime < 1.0:
            raise ValidationError(f"eps_prime must lie in (0, 1), got {eps_prime!r}")
        l = math.ceil(math.log2(1.0 / gap)) + 1
        blocks = max(1, math.ceil(math.log2(1.0 / eps_prime)))
        return cls(l, blocks, 2.0 * math.pi / gap, eps_prime)


def pointer_zero_amplitude(E: float, tau: float, l: int) -> complex:
    """Position-0 pointer amplitude for a mode of energy E after one block."""
    if l < 1:
        raise ValidationError("l must be >= 1")
    if not tau > 0.0:
        raise ValidationError("tau must be positive")
    N = 1 << l
    theta = E * tau / N
    # phases at integer q only see theta mod 2pi, so wrap to (-pi, pi]
    delta = math.remainder(theta, 2.0 * math.pi)
    if abs(delta) < POLICY.phase_fallback_tol and abs(delta) * N < 1e-2:
        # geometric denominator cancels catastrophically; 4-term series in delta
        s1 = N * (N - 1) / 2.0
        s2 = (N - 1) * N * (2 * N - 1) / 6.0
        s3 = s1 * s1
        return complex(N - 0.5 * delta * delta * s2,
                       -delta * s1 + delta ** 3 * s3 / 6.0) / N
    # half-angle rewrite of (1 - e^{-i N delta}) / (N (1 - e^{-i delta})):
    # no cancellation, since sin near 0 keeps full relative precision
    half = 0.5 * delta
    kernel = math.sin(N * half) / (N * math.sin(half))
    return complex(np.exp(-1j * (N - 1) * half) * kernel)


@dataclass(frozen=True)
class CompositeState:
    """System (x) one pointer block, amplitudes[j*levels + q], unit norm."""

    system_dim: int
    levels: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if a.shape != (self.system_dim * self.levels,):
            raise ValidationError("amplitude length must be system_dim * levels")
        nrm = np.linalg.norm(a)
        if abs(nrm - 1.0) > POLICY.norm_preservation_tol:
            raise ValidationError(f"composite state norm {nrm!r} is not 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def grid(self) -> np.ndarray:
        view = self.amplitudes.reshape(self.system_dim, self.levels)
        return view


def uniform_momentum_state(system_amplitudes: np.ndarray, l: int) -> CompositeState:
    """|psi> tensor the delocalized pointer (all momentum levels equal)."""
    psi = np.asarray(system_amplitudes, dtype=complex)
    N = 1 << l
    amps = np.repeat(psi, N) / math.sqrt(N)
    return CompositeState(psi.size, N, amps)


HamiltonianLike = Union[EdgeWalkHamiltonian, SpectralDecomposition, tuple]


def _system_modes(H: HamiltonianLike):
    """Return (energies, to_modes, from_modes) for the supported inputs.

    EdgeWalkHamiltonian works in its packed mode order [+e_k | -e_k | 0];
    to_modes accepts a node-sector state, from_modes returns packed modes
    unchanged (node projection is the caller's concern).
    """
    if isinstance(H, EdgeWalkHamiltonian):
        e = H.mode_energies
        energies = np.concatenate([e, -e, [0.0]])

        def to_modes(psi):
            cp, cm, c0 = H.modes_from_node_state(psi)
            return np.concatenate([cp, cm, [c0]])

        return energies, to_modes, None
    if isinstance(H, SpectralDecomposition):
        V = H.vectors

        def to_modes(psi):
            return V.conj().T @ np.asarray(psi, dtype=complex)

        def from_modes(a):
            return V @ a

        return H.eigenvalues, to_modes, from_modes
    if isinstance(H, tuple) and len(H) == 2:
        energies, V = H
        energies = np.asarray(energies, dtype=float)
        if V is None:
            return energies, (lambda psi: np.asarray(psi, dtype=complex)), None
        V = np.asarray(V, dtype=complex)

        def to_modes(psi):
            return V.conj().T @ np.asarray(psi, dtype=complex)

        def from_modes(a):
            return V @ a

        return energies, to_modes, from_modes
    raise ValidationError(f"unsupported Hamiltonian description: {type(H).__name__}")


def evolve_block(H: HamiltonianLike, state: CompositeState, cfg: PointerConfig
                 ) -> CompositeState:
    """One block: e^{-i H (x) p_hat tau}, then pointer momentum -> position.

    Convention (single source of truth): position amplitude at x is
    (1/sqrt(N)) sum_q e^{+i 2 pi x q / N} (amplitude at momentum q after the
    energy phases e^{-i E tau q / N}). E = 0 therefore concentrates on x = 0.
    """
    energies, to_modes, from_modes = _system_modes(H)
    d = energies.size
    if state.system_dim != d or state.levels != cfg.levels:
        raise ValidationError(
            f"state is {state.system_dim}x{state.levels}, expected {d}x{cfg.levels}")
    N = cfg.levels
    grid = state.grid().copy()
    q = np.arange(N)
    if from_modes is not None:
        modes = np.stack([to_modes(grid[:, k]) for k in range(N)], axis=1)
    else:
        modes = grid
    phases = np.exp(-1j * np.outer(energies, q) * (cfg.tau / N))
    modes = modes * phases
    out = np.fft.ifft(modes, axis=1) * math.sqrt(N)
    if from_modes is not None:
        out = np.stack([from_modes(out[:, k]) for k in range(N)], axis=1)
    flat = out.reshape(-1)
    nrm = np.linalg.norm(flat)
    if abs(nrm - 1.0) > POLICY.norm_preservation_tol:
        raise ValidationError(f"block evolution broke normalization: {nrm!r}")
    return CompositeState(d, N, flat / nrm)


def project_pointer_zero(state: CompositeState) -> tuple[np.ndarray, float]:
    """Condition on pointer position 0: unnormalized branch and its probability."""
    branch = state.grid()[:, 0].copy()
    return branch, float(np.vdot(branch, branch).real)


@dataclass(frozen=True)
class PostSelection:
    """Outcome of blocks x (evolve, read pointer, keep position 0)."""

    system_state: np.ndarray        # renormalized; node sector only for edge walks
    perp_amplitudes: np.ndarray | None
    success_prob: float
    gammas: np.ndarray
    config: PointerConfig


def run_blocks_postselect(H: HamiltonianLike, psi0: np.ndarray, cfg: PointerConfig
                          ) -> PostSelection:
    """Apply the pointer-zero branch cfg.blocks times as a mode contraction."""
    energies, to_modes, from_modes = _system_modes(H)
    amps = to_modes(np.asarray(psi0, dtype=complex))
    gammas = np.array([pointer_zero_amplitude(float(E), cfg.tau, cfg.l)
                       for E in energies])
    conditioned = amps * gammas ** cfg.blocks
    success = float(np.vdot(conditioned, conditioned).real)
    if success < POLICY.postselect_floor:
        raise PostSelectionError(
            f"post-selection probability {success:.3e} below "
            f"{POLICY.postselect_floor:.0e}; no zero-energy component to keep")
    conditioned = conditioned / math.sqrt(success)
    if isinstance(H, EdgeWalkHamiltonian):
        m = H.n - 1
        node, perp = H.node_state_from_modes(conditioned[:m], conditioned[m:2 * m],
                                             complex(conditioned[-1]))
        return PostSelection(node, perp, success, gammas, cfg)
    out = from_modes(conditioned) if from_modes is not None else conditioned
    return PostSelection(out, None, success, gammas, cfg)


def gamma_diagnostics(H: HamiltonianLike, cfg: PointerConfig) -> list[tuple[float, float, int]]:
    """Rows (energy, |gamma|, blocks) for the diagnostic CSV dump."""
    energies, _, _ = _system_modes(H)
    rows = []
    for E in np.asarray(energies, dtype=float):
        g = pointer_zero_amplitude(float(E), cfg.tau, cfg.l)
        rows.append((float(E), float(abs(g)), cfg.blocks))
    return rows
