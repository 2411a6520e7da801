"""Time-averaged mixing of continuous-time walks.

The Cesaro average of |<f|e^{-iHt}|psi0>|^2 over t in [0,T] has the closed
form sum_{i,l} <f|v_i><v_i|psi0><psi0|v_l><v_l|f> K(lambda_i - lambda_l, T)
with K(d,T) = (1 - e^{-idT})/(idT). As T grows only degenerate pairs survive,
giving the limiting distribution. Gap statistics quantify how fast: the double
sum Sigma counts every distinct eigenvalue pair once (the per-offset split
Sigma = sum_r Sigma_r and the 1/Delta_min <= Sigma <= n ln(n)/Delta_min
sandwich both fix that convention).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chains import Discriminant
from .errors import IllConditionedError, ValidationError
from .hamiltonian import EdgeWalkHamiltonian
from .policy import POLICY
from .spectral import SpectralDecomposition


def phase_average_kernel(delta: np.ndarray, T: float) -> np.ndarray:
    """K(delta, T), elementwise; exact at delta = 0 and stable for small delta*T."""
    x = np.asarray(delta, dtype=float) * (0.5 * T)
    # (1 - e^{-2ix})/(2ix) = e^{-ix} sin(x)/x, cancellation-free via sinc
    return np.exp(-1j * x) * np.sinc(x / np.pi)


def _overlap_table(spec: SpectralDecomposition, psi0: np.ndarray,
                   outcomes: Optional[Sequence[int]]) -> tuple[np.ndarray, bool]:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spec.n,):
        raise ValidationError(f"psi0 must have shape ({spec.n},)")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValidationError("psi0 must be unit norm")
    a = spec.vectors.T.conj() @ psi0
    if outcomes is None:
        rows = spec.vectors
        complete = True
    else:
        rows = spec.vectors[np.asarray(outcomes, dtype=int)]
        complete = False
    return rows * a[None, :], complete          # W[f, i] = <f|v_i><v_i|psi0>


@dataclass(frozen=True)
class TimeAveragedDistribution:
    probs: np.ndarray
    T: float
    psi0_id: str

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


def time_averaged_distribution(spec: SpectralDecomposition, psi0: np.ndarray, T: float,
                               outcomes: Optional[Sequence[int]] = None,
                               psi0_id: str = "") -> TimeAveragedDistribution:
    """Average measurement distribution over evolution times drawn from [0, T]."""
    if not T > 0.0:
        raise ValidationError("T must be positive")
    W, complete = _overlap_table(spec, psi0, outcomes)
    K = phase_average_kernel(spec.eigenvalues[:, None] - spec.eigenvalues[None, :], T)
    vals = np.einsum("fi,il,fl->f", W, K, W.conj())
    resid = float(np.abs(vals.imag).max(initial=0.0))
    if resid > POLICY.imaginary_residue_tol:
        raise IllConditionedError(f"imaginary residue {resid:.3e} in averaged probabilities")
    probs = vals.real
    if probs.min(initial=0.0) < POLICY.negative_probability_tol:
        raise IllConditionedError(f"negative averaged probability {probs.min():.3e}")
    np.clip(probs, 0.0, None, out=probs)
    if complete and abs(probs.sum() - 1.0) > 1e-10:
        raise IllConditionedError(f"complete-outcome probabilities sum to {probs.sum()!r}")
    return TimeAveragedDistribution(probs, float(T), psi0_id)


@dataclass(frozen=True)
class LimitingDistribution:
    probs: np.ndarray
    degeneracy_tol: float

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


def _degeneracy_groups(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Consecutive grouping of a sorted array: new group when the step exceeds tol."""
    boundaries = np.flatnonzero(np.diff(values) > tol) + 1
    return np.split(np.arange(values.size), boundaries)


def default_degeneracy_tol(values: np.ndarray) -> float:
    if not values.size:
        return 0.0
    # an all-degenerate block has zero spread; fall back to the magnitude
    # scale so solver noise cannot fragment it
    spread = float(values.max() - values.min())
    return POLICY.degeneracy_rel_tol * max(spread, float(np.abs(values).max()))


def limiting_distribution(spec: SpectralDecomposition, psi0: np.ndarray,
                          outcomes: Optional[Sequence[int]] = None,
                          degeneracy_tol: Optional[float] = None) -> LimitingDistribution:
    """T -> infinity limit: only intra-degenerate-group pairs survive the average."""
    W, complete = _overlap_table(spec, psi0, outcomes)
    tol = default_degeneracy_tol(spec.eigenvalues) if degeneracy_tol is None else degeneracy_tol
    probs = np.zeros(W.shape[0])
    for group in _degeneracy_groups(spec.eigenvalues, tol):
        block = W[:, group].sum(axis=1)
        probs += np.abs(block) ** 2
    if probs.min(initial=0.0) < POLICY.negative_probability_tol:
        raise IllConditionedError(
            f"negative limiting probability {probs.min():.3e}; raise degeneracy_tol")
    if complete and abs(probs.sum() - 1.0) > 1e-10:
        raise IllConditionedError(f"complete-outcome probabilities sum to {probs.sum()!r}")
    return LimitingDistribution(probs, tol)


@dataclass(frozen=True)
class GapStatistics:
    spectrum: np.ndarray
    delta: float          # gap under the top eigenvalue
    delta_min: float      # smallest gap over distinct pairs
    avg_gap: float        # mean consecutive distinct gap
    sigma: float          # sum of inverse gaps, each distinct pair once
    sigma_r: np.ndarray   # per-offset split, sigma = sigma_r.sum()
    simple_spectrum: bool

    def __post_init__(self):
        for name in ("spectrum", "sigma_r"):
            a = np.asarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def gap_statistics(spectrum: np.ndarray, tol: Optional[float] = None) -> GapStatistics:
    """Inverse-gap sums and extremal gaps of a sorted spectrum.

    Pairs whose eigenvalues agree within tol are treated as degenerate and
    skipped; every remaining unordered pair contributes one term to sigma.
    """
    w = np.asarray(spectrum, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ValidationError("spectrum must be a 1-d array with at least 2 entries")
    if np.any(np.diff(w) < 0.0):
        raise ValidationError("spectrum must be sorted ascending")
    if tol is None:
        tol = default_degeneracy_tol(w)
    n = w.size
    diffs = w[None, :] - w[:, None]            # diffs[i, l] = w_l - w_i
    iu = np.triu_indices(n, k=1)
    upper = diffs[iu]
    distinct = upper > tol
    if not distinct.any():
        raise IllConditionedError("fewer than 2 distinct eigenvalues")
    sigma = float((1.0 / upper[distinct]).sum())
    delta_min = float(upper[distinct].min())
    sigma_r = np.zeros(n - 1)
    for r in range(1, n):
        gaps_r = w[r:] - w[:-r]
        keep = gaps_r > tol
        sigma_r[r - 1] = (1.0 / gaps_r[keep]).sum()
    consecutive = np.diff(w)
    simple = bool((consecutive > tol).all())
    top_gaps = w[-1] - w[:-1]
    top_distinct = top_gaps[top_gaps > tol]
    delta = float(top_distinct.min()) if top_distinct.size else 0.0
    distinct_steps = consecutive[consecutive > tol]
    avg_gap = float(distinct_steps.mean()) if distinct_steps.size else 0.0
    return GapStatistics(w, delta, delta_min, avg_gap, sigma, sigma_r, simple)


def mixing_time_bound(spec: SpectralDecomposition, psi0: np.ndarray, epsilon: float,
                      degeneracy_tol: Optional[float] = None) -> float:
    """Overlap-weighted inverse-gap sum over distinct pairs, divided by epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise ValidationError("epsilon must lie in (0, 1)")
    psi0 = np.asarray(psi0, dtype=complex)
    a = np.abs(spec.vectors.T.conj() @ psi0)
    w = spec.eigenvalues
    tol = default_degeneracy_tol(w) if degeneracy_tol is None else degeneracy_tol
    iu = np.triu_indices(w.size, k=1)
    gaps = (w[None, :] - w[:, None])[iu]
    weights = (a[:, None] * a[None, :])[iu]
    keep = gaps > tol
    return float(np.sum(weights[keep] / gaps[keep]) / epsilon)


@dataclass(frozen=True)
class MixingTrace:
    times: np.ndarray
    distances: np.ndarray
    epsilon: float
    t_mix: Optional[float]

    def __post_init__(self):
        for name in ("times", "distances"):
            a = np.asarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def crossed(self) -> bool:
        return self.t_mix is not None


def mixing_trace(spec: SpectralDecomposition, psi0: np.ndarray, epsilon: float,
                 t_grid: Sequence[float],
                 outcomes: Optional[Sequence[int]] = None) -> MixingTrace:
    """1-norm distance between the T-average and its limit, per grid time."""
    t = np.asarray(list(t_grid), dtype=float)
    if t.size == 0 or np.any(np.diff(t) <= 0.0) or t[0] <= 0.0:
        raise ValidationError("t_grid must be positive and strictly increasing")
    limit = limiting_distribution(spec, psi0, outcomes).probs
    dists = np.empty(t.size)
    for k, T in enumerate(t):
        avg = time_averaged_distribution(spec, psi0, float(T), outcomes).probs
        dists[k] = np.abs(avg - limit).sum()
    below = np.flatnonzero(dists <= epsilon)
    t_mix = float(t[below[0]]) if below.size else None
    return MixingTrace(t, dists, float(epsilon), t_mix)


@dataclass(frozen=True)
class GapMapReport:
    delta_min_P: float
    delta_min_H: float
    per_gap_map: tuple    # rows (lambda_lo, lambda_hi, gap, mapped_gap)


def edge_walk_gap_map(D: Discriminant, tol: Optional[float] = None) -> GapMapReport:
    """How consecutive discriminant gaps map to walk-Hamiltonian energy gaps.

    Each consecutive pair (lambda_j, lambda_{j+1}) maps to
    |sqrt(1-lambda_{j+1}^2) - sqrt(1-lambda_j^2)|. Near 0 the map shrinks a
    gap quadratically, near 1 it amplifies to sqrt scale. Asserts the
    per-instance sandwich

        lambda_lo(j*) * delta_min_P <= delta_min_H <= 2 delta_min_P / sqrt(delta)

    where j* attains delta_min_H and delta is the gap under the top
    eigenvalue; both sides are exact algebra for spectra in [0, 1].
    """
    w = D.spectrum.eigenvalues
    if tol is None:
        tol = default_degeneracy_tol(w)
    if np.any(np.diff(w) <= tol):
        raise IllConditionedError("gap map needs a simple discriminant spectrum")
    if w[0] < -tol:
        raise ValidationError(
            f"negative eigenvalue {w[0]!r}: the gap-map bounds assume a lazy chain")
    energies = np.sqrt(np.clip(1.0 - w * w, 0.0, None))
    mapped = np.abs(np.diff(energies))
    gaps = np.diff(w)
    rows = tuple((float(w[j]), float(w[j + 1]), float(gaps[j]), float(mapped[j]))
                 for j in range(w.size - 1))
    delta_min_P = float(gaps.min())
    j_star = int(np.argmin(mapped))
    delta_min_H = float(mapped[j_star])
    delta = float(w[-1] - w[-2])
    lo = max(float(w[j_star]), 0.0)
    slack = 1e-12
    if delta_min_H < lo * delta_min_P - slack:
        raise IllConditionedError("gap-map lower sandwich violated")
    if delta_min_H > 2.0 * delta_min_P / np.sqrt(delta) + slack:
        raise IllConditionedError("gap-map upper sandwich violated")
    return GapMapReport(delta_min_P, delta_min_H, rows)


def edge_walk_limiting_distribution(H: EdgeWalkHamiltonian, psi0: np.ndarray,
                                    degeneracy_tol: Optional[float] = None,
                                    conditional: bool = False) -> np.ndarray:
    """Limiting node-and-reference outcome weights of the edge walk.

    The zero mode keeps its full weight while every rotating plane averages
    its node-sector component to half, so outcome f gets
    |a_n (v_n)_f|^2 + (1/2) sum_groups |sum_{k in g} a_k (v_k)_f|^2.
    The total is below 1 (the rest leaks outside the node sector); pass
    conditional=True to renormalize over the kept sector.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    a = H.vectors.T.conj() @ psi0
    e = H.mode_energies
    tol = default_degeneracy_tol(e) if degeneracy_tol is None else degeneracy_tol
    probs = np.abs(a[-1] * H.vectors[:, -1]) ** 2
    # mode_energies descend; the grouping helper wants them ascending
    order = np.argsort(e, kind="stable")
    for group in _degeneracy_groups(e[order], tol):
        idx = order[group]
        block = H.vectors[:, idx] @ a[idx]
        probs += 0.5 * np.abs(block) ** 2
    if conditional:
        probs = probs / probs.sum()
    return probs
