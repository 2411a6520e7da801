"""Dense random-graph spectra against semicircle-law predictions.

Works with the scaled adjacency matrix A/(np), whose bulk follows a
semicircle of radius 2 sqrt((1-p)/(np)) while the top eigenvalue sits near 1.
Classical locations (semicircle quantiles) anchor the rigidity comparison;
gap statistics feed the mixing-time experiments. Probabilistic claims carry
fixed slack exponents and are scored as pass rates over seeds, never asserted
per instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ValidationError
from .generators import rng_from
from .mixing import gap_statistics, mixing_trace
from .policy import POLICY
from .spectral import SpectralDecomposition

SeedLike = Union[int, Sequence[int]]


def _entropy(seed: SeedLike) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        return [int(seed)]
    return [int(x) for x in seed]


@dataclass(frozen=True)
class GnpSample:
    n: int
    p: float
    adjacency: np.ndarray
    normalized: np.ndarray
    spectrum: SpectralDecomposition
    seed: tuple
    edge_count: int

    @property
    def density_z(self) -> float:
        """Edge-count deviation from its binomial mean, in standard deviations."""
        m = self.n * (self.n - 1) / 2.0
        sd = math.sqrt(max(m * self.p * (1.0 - self.p), 1e-300))
        return (self.edge_count - m * self.p) / sd

    @property
    def connected(self) -> bool:
        return connected_components(self.adjacency, directed=False,
                                    return_labels=False) == 1


def sample_gnp(n: int, p: float, seed: SeedLike, max_n: int | None = None) -> GnpSample:
    """Symmetric 0/1 adjacency with i.i.d. upper-triangle edges, plus spectrum."""
    if n < 2:
        raise ValidationError("n must be >= 2")
    if not 0.0 < p < 1.0:
        raise ValidationError("p must lie in (0, 1)")
    limit = POLICY.eigensolve_max_n if max_n is None else int(max_n)
    if n > limit:
        raise ValidationError(f"n={n} exceeds the dense-eigensolve cap {limit}")
    entropy = _entropy(seed)
    rng = rng_from(*entropy) if len(entropy) > 1 else rng_from(entropy[0])
    iu = np.triu_indices(n, k=1)
    flips = rng.random(iu[0].size) < p
    A = np.zeros((n, n))
    A[iu] = flips
    A = A + A.T
    normalized = A / (n * p)
    spec = SpectralDecomposition.from_symmetric(normalized)
    A.setflags(write=False)
    normalized.setflags(write=False)
    return GnpSample(n, float(p), A, normalized, spec, tuple(entropy), int(flips.sum()))


def semicircle_cdf(x: np.ndarray, radius: float) -> np.ndarray:
    """CDF of the semicircle law on [-radius, radius]."""
    u = np.clip(np.asarray(x, dtype=float) / radius, -1.0, 1.0)
    return 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / np.pi


def semicircle_pdf(x: np.ndarray, radius: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = np.clip(radius * radius - x * x, 0.0, None)
    return 2.0 * np.sqrt(inside) / (np.pi * radius * radius)


@dataclass(frozen=True)
class SemicircleModel:
    n: int
    p: float
    radius: float              # for A itself: 2 sqrt(np(1-p))
    radius_normalized: float   # for A/(np): 2 sqrt((1-p)/(np))
    classical_locations: np.ndarray   # gamma_1 .. gamma_{n-1}

    def __post_init__(self):
        g = np.asarray(self.classical_locations, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "classical_locations", g)

    @property
    def phi(self) -> float:
        return math.log(self.p) / math.log(self.n)

    def rigidity_envelope(self, eps_exponent: float) -> np.ndarray:
        """Allowed |lambda_i - gamma_i| for bulk index i = 1 .. n-1."""
        n = self.n
        i = np.arange(1, n)
        alpha = np.maximum(i, n - i).astype(float)
        scale = n ** eps_exponent / math.sqrt(self.p * n)
        return scale * (n ** (-2.0 / 3.0) * alpha ** (-1.0 / 3.0)
                        + n ** (-1.0 - self.phi))


def classical_locations(n: int, p: float) -> SemicircleModel:
    """Semicircle quantiles gamma_i solving CDF(gamma_i) = i/n, i = 1 .. n-1."""
    if n < 4:
        raise ValidationError("n must be >= 4")
    if not 0.0 < p < 1.0:
        raise ValidationError("p must lie in (0, 1)")
    radius = 2.0 * math.sqrt(n * p * (1.0 - p))
    rbar = 2.0 * math.sqrt((1.0 - p) / (n * p))
    targets = np.arange(1, n) / n
    lo = np.full(n - 1, -rbar)
    hi = np.full(n - 1, rbar)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        too_low = semicircle_cdf(mid, rbar) < targets
        lo = np.where(too_low, mid, lo)
        hi = np.where(too_low, hi, mid)
        if np.abs(semicircle_cdf(mid, rbar) - targets).max() <= POLICY.bisection_tol:
            break
    gamma = 0.5 * (lo + hi)
    return SemicircleModel(n, float(p), radius, rbar, gamma)


@dataclass(frozen=True)
class RmtReport:
    lambda_top: float
    lambda_second: float
    delta_min: float
    avg_gap: float
    deloc_max: float
    rigidity_violations: int
    eps_exponent: float
    sigma1: float
    sigma: float
    simple_spectrum: bool
    connected: bool
    tail_hist: np.ndarray      # sorted gaps scaled by n^{3/2} sqrt(p)
    tail_fit_C: float

    def __post_init__(self):
        h = np.asarray(self.tail_hist, dtype=float)
        h.setflags(write=False)
        object.__setattr__(self, "tail_hist", h)


def rmt_report(sample: GnpSample, model: SemicircleModel,
               eps_exponent: float = 0.4) -> RmtReport:
    """Spectral statistics of one sample against the semicircle model."""
    if sample.n != model.n:
        raise ValidationError("sample and model sizes differ")
    w = sample.spectrum.eigenvalues
    n = sample.n
    bulk = w[:-1]
    envelope = model.rigidity_envelope(eps_exponent)
    violations = int(np.count_nonzero(np.abs(bulk - model.classical_locations) > envelope))
    deloc = float(np.abs(sample.spectrum.vectors).max())
    stats = gap_statistics(w, tol=0.0)
    scaled = np.sort(np.diff(w)) * n ** 1.5 * math.sqrt(sample.p)
    # fitted prefactor of the small-gap tail P(gap <= d) ~ C d log n,
    # least squares over the smallest decile
    k = max(2, scaled.size // 10)
    xs = scaled[:k] * math.log(n)
    ys = (np.arange(1, k + 1)) / scaled.size
    C = float((xs @ ys) / (xs @ xs)) if float(xs @ xs) > 0.0 else float("nan")
    return RmtReport(float(w[-1]), float(w[-2]), stats.delta_min, stats.avg_gap,
                     deloc, violations, float(eps_exponent), float(stats.sigma_r[0]),
                     stats.sigma, stats.simple_spectrum, sample.connected, scaled, C)


@dataclass(frozen=True)
class MixingExponentResult:
    rows: tuple               # (n, seed_index, t_mix, sigma, sigma1, delta_min, deloc_max)
    exponent_c: float
    intercept: float
    fit_residual: float
    uncrossed: int
    traces: tuple             # per size, seed 0: (n, times, distances)


def mixing_exponent_experiment(sizes: Sequence[int], p: float, epsilon: float,
                               seeds_per_size: int, t_max: float,
                               master_seed: int = 0, grid_points: int = 60
                               ) -> MixingExponentResult:
    """Fit log t_mix vs log n for walks on G(n, p) started from node 0.

    Cells without a crossing below t_max stay in the table as nan and are
    excluded from the per-size medians the fit runs on.
    """
    sizes = [int(n) for n in sizes]
    if sizes != sorted(sizes) or len(sizes) < 2 or sizes[0] < 10:
        raise ValidationError("sizes must be increasing with every n >= 10")
    if seeds_per_size < 1:
        raise ValidationError("seeds_per_size must be >= 1")
    t_grid = np.geomspace(1.0, float(t_max), int(grid_points))
    rows = []
    medians = []
    traces = []
    uncrossed = 0
    for n in sizes:
        cell_tmix = []
        for k in range(seeds_per_size):
            sample = sample_gnp(n, p, (master_seed, n, k))
            psi0 = np.zeros(n)
            psi0[0] = 1.0
            trace = mixing_trace(sample.spectrum, psi0, epsilon, t_grid)
            if k == 0:
                traces.append((n, trace.times, trace.distances))
            stats = gap_statistics(sample.spectrum.eigenvalues, tol=0.0)
            deloc = float(np.abs(sample.spectrum.vectors).max())
            t_mix = float("nan") if trace.t_mix is None else trace.t_mix
            if trace.t_mix is None:
                uncrossed += 1
            else:
                cell_tmix.append(trace.t_mix)
            rows.append((n, k, t_mix, stats.sigma, float(stats.sigma_r[0]),
                         stats.delta_min, deloc))
        if cell_tmix:
            medians.append((n, float(np.median(cell_tmix))))
    if len(medians) < 2:
        raise ValidationError("not enough crossings to fit an exponent")
    logn = np.log([m[0] for m in medians])
    logt = np.log([m[1] for m in medians])
    c, b = np.polyfit(logn, logt, 1)
    resid = float(np.sqrt(np.mean((logt - (c * logn + b)) ** 2)))
    return MixingExponentResult(tuple(rows), float(c), float(b), resid, uncrossed,
                                tuple(traces))


@dataclass(frozen=True)
class SigmaScalingResult:
    rows: tuple     # (n, seed_index, sigma1, sigma, delta_min, avg_gap, deloc_max)
    pass_rate_sigma1: float
    pass_rate_sigma: float
    pass_rate_delta_min: float
    slack: float


def sigma_scaling_experiment(sizes: Sequence[int], p: float, seeds_per_size: int,
                             master_seed: int = 0, slack: float = 0.2
                             ) -> SigmaScalingResult:
    """Score the inverse-gap-sum growth bounds over an (n, seed) grid.

    Checks per cell, with exponents 5/2 + slack:
      sigma_1 <= n^{2.5+slack} sqrt(p)
      sigma   <= n^{2.5+slack-phi} sqrt(p),  phi = log p / log n
      delta_min >= n^{-(2.5+slack)} / sqrt(p)
    """
    sizes = [int(n) for n in sizes]
    if sizes != sorted(sizes) or sizes[0] < 10:
        raise ValidationError("sizes must be increasing with every n >= 10")
    expo = 2.5 + slack
    rows = []
    hits = np.zeros(3, dtype=int)
    total = 0
    for n in sizes:
        phi = math.log(p) / math.log(n)
        for k in range(seeds_per_size):
            sample = sample_gnp(n, p, (master_seed, n, k))
            stats = gap_statistics(sample.spectrum.eigenvalues, tol=0.0)
            sigma1 = float(stats.sigma_r[0])
            deloc = float(np.abs(sample.spectrum.vectors).max())
            rows.append((n, k, sigma1, stats.sigma, stats.delta_min,
                         stats.avg_gap, deloc))
            hits[0] += sigma1 <= n ** expo * math.sqrt(p)
            hits[1] += stats.sigma <= n ** (expo - phi) * math.sqrt(p)
            hits[2] += stats.delta_min >= n ** (-expo) / math.sqrt(p)
            total += 1
    rates = hits / total
    return SigmaScalingResult(tuple(rows), float(rates[0]), float(rates[1]),
                              float(rates[2]), float(slack))


def ks_distance_to_semicircle(sample: GnpSample, model: SemicircleModel) -> float:
    """Kolmogorov distance between the bulk empirical CDF and the semicircle CDF."""
    bulk = np.sort(sample.spectrum.eigenvalues[:-1])
    m = bulk.size
    F = semicircle_cdf(bulk, model.radius_normalized)
    upper = np.abs(np.arange(1, m + 1) / m - F).max()
    lower = np.abs(np.arange(0, m) / m - F).max()
    return float(max(upper, lower))
