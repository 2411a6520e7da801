"""Ergodic reversible Markov chains, marked-state interpolation, discriminants.

A chain is a row-stochastic matrix P. Marking a set M of states and
interpolating with parameter s yields P(s) = (1-s)P + sP', where P' redirects
every marked row into a self-loop. The discriminant D(P(s)), with entries
sqrt(p_xy(s) p_yx(s)), is symmetric and similar to P(s) for reversible input,
so its spectrum is real and its top eigenvector is the entrywise square root
of the interpolated stationary distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ChainStructureError, ValidationError
from .policy import POLICY
from .spectral import SpectralDecomposition


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StochasticMatrix:
    """Row-stochastic n x n matrix of transition probabilities."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise ValidationError(f"transition matrix must be square, got {rows.shape}")
        if rows.shape[0] < 2:
            raise ValidationError("need at least 2 states")
        if np.any(rows < -POLICY.entry_tol) or np.any(rows > 1 + POLICY.entry_tol):
            raise ValidationError("entries must lie in [0, 1]")
        sums = rows.sum(axis=1)
        worst = np.abs(sums - 1.0).max()
        if worst > POLICY.row_sum_tol:
            bad = int(np.abs(sums - 1.0).argmax())
            raise ValidationError(
                f"row {bad} sums to {sums[bad]!r}, off by {worst:.3e} (> {POLICY.row_sum_tol:.1e})")
        object.__setattr__(self, "rows", _frozen(np.clip(rows, 0.0, 1.0)))

    @property
    def n(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class MarkedSet:
    """Strictly increasing state indices; a proper nonempty subset when interpolating."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0:
            raise ValidationError("marked set must be nonempty")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError("indices must be strictly increasing (no duplicates)")
        if idx[0] < 0:
            raise ValidationError("indices must be nonnegative")
        object.__setattr__(self, "indices", idx)

    def validate_against(self, n: int, *, proper: bool = True) -> None:
        if self.indices[-1] >= n:
            raise ValidationError(f"marked index {self.indices[-1]} out of range for n={n}")
        if proper and len(self.indices) >= n:
            raise ValidationError("marked set must be a proper subset of the state space")

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[list(self.indices)] = True
        return m

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary vector pi, optionally annotated with the marked-set mass p_M."""

    pi: np.ndarray
    p_M: Optional[float] = None

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        if pi.ndim != 1:
            raise ValidationError("pi must be a vector")
        if np.any(pi < 0):
            raise ValidationError("pi must be nonnegative")
        s = pi.sum()
        if abs(s - 1.0) > 1e-9:
            raise ValidationError(f"pi sums to {s!r}, not 1")
        object.__setattr__(self, "pi", _frozen(pi / s))

    @property
    def n(self) -> int:
        return self.pi.size

    @property
    def pi_min(self) -> float:
        return float(self.pi.min())

    def marked_mass(self, marked: MarkedSet) -> float:
        marked.validate_against(self.n, proper=False)
        return float(self.pi[list(marked.indices)].sum())

    def with_marked(self, marked: MarkedSet) -> "StationaryDistribution":
        return StationaryDistribution(self.pi, p_M=self.marked_mass(marked))


@dataclass(frozen=True)
class InterpolatedChain:
    """P(s) = (1-s)P + sP' together with its ingredients."""

    base: StochasticMatrix
    marked: MarkedSet
    s: float
    result: StochasticMatrix


@dataclass(frozen=True)
class ErgodicityReport:
    ergodic: bool
    reversible: bool
    strongly_connected: bool
    aperiodic: bool
    pi: Optional[StationaryDistribution]
    detailed_balance_residual: Optional[float]


@dataclass(frozen=True)
class Discriminant:
    """Symmetrized discriminant of an interpolated chain with its spectrum."""

    matrix: np.ndarray
    spectrum: SpectralDecomposition
    chain: InterpolatedChain
    pi_s: StationaryDistribution

    @property
    def n(self) -> int:
        return self.spectrum.n

    @property
    def spectral_gap(self) -> float:
        w = self.spectrum.eigenvalues
        return float(w[-1] - w[-2])

    @property
    def top_vector(self) -> np.ndarray:
        v = self.spectrum.vectors[:, -1]
        # fix the global sign so the top vector is entrywise nonnegative
        return v if v.sum() >= 0 else -v


def make_lazy(P: StochasticMatrix) -> StochasticMatrix:
    """Return (I + P)/2, whose spectrum lies in [0, 1] for reversible P."""
    return StochasticMatrix(0.5 * (np.eye(P.n) + P.rows))


def stationary_distribution(P: StochasticMatrix) -> StationaryDistribution:
    """Left 1-eigenvector of P by direct linear solve.

    Solves (P^T - I) pi = 0 with the last equation replaced by the
    normalization sum(pi) = 1. Unique for ergodic chains.
    """
    n = P.n
    A = P.rows.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise ChainStructureError("stationary distribution undefined (singular system)") from exc
    if np.any(pi < -1e-12):
        raise ChainStructureError("stationary solve produced negative mass (chain reducible?)")
    pi = np.clip(pi, 0.0, None)
    residual = np.abs(pi @ P.rows - pi).max()
    if residual > POLICY.stationary_residual_tol:
        raise ChainStructureError(
            f"stationary residual {residual:.3e} above {POLICY.stationary_residual_tol:.1e}")
    return StationaryDistribution(pi)


def time_reversal(P: StochasticMatrix, pi: StationaryDistribution) -> np.ndarray:
    """Time-reversed kernel p*_xy = pi_y p_yx / pi_x (equal to P iff reversible)."""
    return (P.rows.T * pi.pi[None, :]).T / pi.pi[:, None]


def _strongly_connected(support: np.ndarray) -> bool:
    ncomp, _ = connected_components(csr_matrix(support), directed=True, connection="strong")
    return ncomp == 1


def _primitive(support: np.ndarray, n: int) -> bool:
    # Boolean squaring: if P^k is entrywise positive for some k, it stays so
    # for larger k on a strongly connected support (no zero column). The
    # Wielandt index is below n^2, so log2(n^2) squarings suffice.
    B = support.astype(np.int64)
    steps = max(1, int(np.ceil(2 * np.log2(max(n, 2)))))
    for _ in range(steps):
        if B.all():
            return True
        B = ((B @ B) > 0).astype(np.int64)
    return bool(B.all())


def check_ergodic_reversible(P: StochasticMatrix) -> ErgodicityReport:
    """Classify a chain: strong connectivity, aperiodicity, reversibility.

    pi is computed by linear solve whenever the chain is strongly connected.
    Reversibility is the symmetry of diag(pi) P, checked entrywise.
    """
    support = P.rows > 0
    strong = _strongly_connected(support)
    if not strong:
        return ErgodicityReport(False, False, False, False, None, None)
    aperiodic = _primitive(support, P.n)
    pi = stationary_distribution(P)
    flux = pi.pi[:, None] * P.rows
    residual = float(np.abs(flux - flux.T).max())
    reversible = residual <= POLICY.detailed_balance_tol
    return ErgodicityReport(strong and aperiodic, reversible, strong, aperiodic, pi, residual)


def require_ergodic_reversible(P: StochasticMatrix) -> StationaryDistribution:
    report = check_ergodic_reversible(P)
    if not report.ergodic:
        raise ChainStructureError(
            "chain is not ergodic (strongly_connected="
            f"{report.strongly_connected}, aperiodic={report.aperiodic})")
    if not report.reversible:
        raise ChainStructureError(
            f"chain is not reversible (detailed-balance residual {report.detailed_balance_residual:.3e})")
    return report.pi


def interpolate(P: StochasticMatrix, M: MarkedSet, s: float) -> InterpolatedChain:
    """P(s): marked rows become (1-s) * row + s * self-loop; s in [0, 1].

    s = 1 is allowed here (it produces the absorbing chain P') but is rejected
    by every downstream operation that needs ergodicity.
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValidationError(f"s must lie in [0, 1], got {s}")
    M.validate_against(P.n, proper=True)
    rows = P.rows.copy()
    for x in M.indices:
        rows[x, :] *= (1.0 - s)
        rows[x, x] += s
    # no renormalization: s=0 must reproduce P bit-for-bit, and the marked-row
    # sums stay within (1-s) of the base rows' validated tolerance anyway
    return InterpolatedChain(P, M, s, StochasticMatrix(rows))


def stationary_of_interpolated(pi: StationaryDistribution, M: MarkedSet, s: float
                               ) -> StationaryDistribution:
    """Closed-form pi(s) = ((1-s) pi_U, pi_M) / (1 - s(1 - p_M)), original order."""
    s = float(s)
    if s >= 1.0:
        raise ValidationError("s = 1 rejected: the fully absorbing chain is not ergodic")
    if s < 0.0:
        raise ValidationError(f"s must lie in [0, 1), got {s}")
    M.validate_against(pi.n, proper=False)
    mask = M.mask(pi.n)
    p_M = float(pi.pi[mask].sum())
    scale = np.where(mask, 1.0, 1.0 - s)
    vec = pi.pi * scale / (1.0 - s * (1.0 - p_M))
    return StationaryDistribution(vec, p_M=float(vec[mask].sum()))


def discriminant(chain: InterpolatedChain) -> Discriminant:
    """D(P(s)) with entries sqrt(p_xy(s) p_yx(s)), symmetrized and decomposed."""
    if chain.s >= 1.0:
        raise ValidationError("discriminant requires s < 1 (ergodic interpolated chain)")
    rows = chain.result.rows
    raw = np.sqrt(rows * rows.T)
    asym = float(np.abs(raw - raw.T).max())
    if asym > POLICY.symmetry_assert_tol:
        raise ValidationError(
            f"discriminant asymmetry {asym:.3e} above {POLICY.symmetry_assert_tol:.1e}")
    D = 0.5 * (raw + raw.T)
    spec = SpectralDecomposition.from_symmetric(D)
    base_pi = stationary_distribution(chain.base)
    pi_s = stationary_of_interpolated(base_pi, chain.marked, chain.s)
    w = spec.eigenvalues
    if abs(w[-1] - 1.0) > POLICY.top_eigenvalue_tol:
        raise ChainStructureError(
            f"top discriminant eigenvalue {w[-1]!r} differs from 1 by more than "
            f"{POLICY.top_eigenvalue_tol:.1e}; input chain not ergodic reversible?")
    if w[-1] > 1.0:
        # eigensolver rounding on a spectrum that is provably within [-1, 1];
        # pin the validated top to 1 so downstream sqrt(1 - w^2) stays real
        w = np.minimum(w, 1.0)
    # the solver's column signs are arbitrary; fix them so the top column is
    # entrywise nonnegative (it must match sqrt(pi(s))) and the rest follow a
    # deterministic largest-entry-positive rule
    V = np.array(spec.vectors)
    anchors = np.abs(V).argmax(axis=0)
    flip = V[anchors, np.arange(V.shape[1])] < 0
    V[:, flip] = -V[:, flip]
    if V[:, -1].sum() < 0:
        V[:, -1] = -V[:, -1]
    spec = SpectralDecomposition(w, V)
    top = spec.vectors[:, -1]
    dev = float(np.abs(top - np.sqrt(pi_s.pi)).max())
    if dev > POLICY.top_eigenvector_tol:
        raise ChainStructureError(
            f"top eigenvector deviates from sqrt(pi(s)) by {dev:.3e} "
            f"(> {POLICY.top_eigenvector_tol:.1e})")
    return Discriminant(_frozen(D), spec, chain, pi_s)


def discriminant_of(P: StochasticMatrix, *, validate: bool = True) -> Discriminant:
    """Discriminant of the plain (unmarked) chain, as the s=0 interpolation."""
    if validate:
        require_ergodic_reversible(P)
    return discriminant(interpolate(P, MarkedSet((0,)), 0.0))


@dataclass(frozen=True)
class UMSplit:
    """Unit vectors carrying the stationary mass of the unmarked/marked blocks."""

    U_state: np.ndarray
    M_state: np.ndarray
    v_n_s: np.ndarray
    coeff_U: float
    coeff_M: float


def u_m_split(pi: StationaryDistribution, M: MarkedSet, s: float) -> UMSplit:
    """Decompose the top interpolated eigenvector over marked/unmarked blocks.

    v_n(s) = sqrt((1-s)(1-p_M)/(1-s(1-p_M))) U + sqrt(p_M/(1-s(1-p_M))) M,
    where U and M are the unit-normalized restrictions of sqrt(pi).
    """
    s = float(s)
    if not 0.0 <= s < 1.0:
        raise ValidationError(f"s must lie in [0, 1), got {s}")
    M.validate_against(pi.n, proper=True)
    mask = M.mask(pi.n)
    p_M = float(pi.pi[mask].sum())
    if p_M <= 0.0 or p_M >= 1.0:
        raise ValidationError(f"p_M must lie strictly inside (0, 1), got {p_M}")
    root = np.sqrt(pi.pi)
    U = np.where(mask, 0.0, root) / np.sqrt(1.0 - p_M)
    Mv = np.where(mask, root, 0.0) / np.sqrt(p_M)
    denom = 1.0 - s * (1.0 - p_M)
    cu = np.sqrt((1.0 - s) * (1.0 - p_M) / denom)
    cm = np.sqrt(p_M / denom)
    v = cu * U + cm * Mv
    return UMSplit(_frozen(U), _frozen(Mv), _frozen(v), float(cu), float(cm))


def critical_interpolation(p_M: float) -> float:
    """s* = 1 - p_M/(1-p_M), the point where v_n(s*) splits evenly over U and M."""
    if not 0.0 < p_M < 0.5:
        raise ValidationError(f"s* requires p_M in (0, 1/2), got {p_M}")
    return 1.0 - p_M / (1.0 - p_M)
