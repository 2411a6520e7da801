"""Classical hitting and mixing times.

Hitting times follow the from-pi convention: the walk starts from the
stationary distribution and a start inside the marked set counts zero steps.
Spectral values therefore use overlaps with the raw sqrt(pi) vector restricted
to the unmarked block (squared norm 1 - p_M, not renormalized), which makes the
spectral, fundamental-matrix and Monte Carlo routes estimate the same quantity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chains import (MarkedSet, StationaryDistribution, StochasticMatrix,
                     interpolate)
from .errors import IllConditionedError, StepBudgetExceeded, ValidationError
from .policy import POLICY
from .spectral import SpectralDecomposition


@dataclass(frozen=True)
class HittingTimeReport:
    ht: float
    method: str                  # "spectral" | "montecarlo"
    stderr: float = 0.0
    trials: int = 0
    degenerate_spectrum: bool = False


@dataclass(frozen=True)
class ExtendedHittingTimeReport:
    ht_plus: float
    per_s_values: tuple          # (s, HT(s)) pairs
    invariance_residual: float
    warning: Optional[str] = None


@dataclass(frozen=True)
class ClassicalMixingReport:
    t_mix_empirical: int
    t_mix_bound: float
    epsilon: float


def _unmarked_discriminant(P: StochasticMatrix, M: MarkedSet) -> np.ndarray:
    mask = ~M.mask(P.n)
    sub = P.rows[np.ix_(mask, mask)]
    return np.sqrt(sub * sub.T)


def hitting_time_spectral(P: StochasticMatrix, pi: StationaryDistribution,
                          M: MarkedSet) -> HittingTimeReport:
    """HT(P, M) from the unmarked block of the absorbing-chain discriminant.

    HT = sum_j |<v'_j|u>|^2 / (1 - lambda'_j) over the n-|M| eigenpairs of
    D(P') restricted to unmarked states, with u = sqrt(pi) on that block.
    """
    M.validate_against(P.n, proper=True)
    D = _unmarked_discriminant(P, M)
    w, V = np.linalg.eigh(0.5 * (D + D.T))
    guard = 1.0 - POLICY.eigenvalue_one_guard
    if w[-1] >= guard:
        j = int(np.argmax(w))
        raise IllConditionedError(
            f"unmarked-block eigenvalue {j} is {w[-1]!r}, too close to 1 "
            "(marked set unreachable or chain nearly reducible)")
    u = np.sqrt(pi.pi[~M.mask(P.n)])
    overlaps = V.T @ u
    ht = float(np.sum(overlaps ** 2 / (1.0 - w)))
    degenerate = bool(np.any(np.diff(w) < 1e-12))
    return HittingTimeReport(ht, "spectral", degenerate_spectrum=degenerate)


def hitting_time_montecarlo(P: StochasticMatrix, M: MarkedSet, trials: int = 100_000,
                            seed: int = 0) -> HittingTimeReport:
    """Monte Carlo hitting time: sample start from pi, walk until absorption.

    Trials are simulated in fixed-size blocks, each with its own derived seed,
    so the estimate is reproducible regardless of how blocks are scheduled.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    M.validate_against(P.n, proper=False)
    from .chains import stationary_distribution
    pi = stationary_distribution(P)
    marked = M.mask(P.n)
    cum = np.cumsum(P.rows, axis=1)
    cum[:, -1] = 1.0
    block_size = 10_000
    budget = POLICY.montecarlo_step_budget
    counts = np.empty(trials, dtype=np.int64)
    done = 0
    block = 0
    total_steps = 0
    pi_cum = np.cumsum(pi.pi)
    pi_cum[-1] = 1.0
    while done < trials:
        m = min(block_size, trials - done)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), block]))
        state = np.searchsorted(pi_cum, rng.random(m), side="right")
        steps = np.zeros(m, dtype=np.int64)
        active = ~marked[state]
        while active.any():
            idx = np.flatnonzero(active)
            total_steps += idx.size
            if total_steps > budget:
                raise StepBudgetExceeded(
                    f"exceeded {budget} total walk steps before absorbing all trials")
            r = rng.random(idx.size)
            state[idx] = (cum[state[idx]] < r[:, None]).sum(axis=1)
            steps[idx] += 1
            active[idx] = ~marked[state[idx]]
        counts[done:done + m] = steps
        done += m
        block += 1
    ht = float(counts.mean())
    stderr = float(counts.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return HittingTimeReport(ht, "montecarlo", stderr=stderr, trials=trials)


def interpolated_hitting_time(P: StochasticMatrix, pi: StationaryDistribution,
                              M: MarkedSet, s: float) -> float:
    """HT(s) = sum_{j<n} |<v_j(s)|u>|^2 / (1 - lambda_j(s)) on D(P(s))."""
    chain = interpolate(P, M, s)
    rows = chain.result.rows
    D = np.sqrt(rows * rows.T)
    w, V = np.linalg.eigh(0.5 * (D + D.T))
    u = np.sqrt(pi.pi) * (~M.mask(P.n))
    overlaps = V.T @ u
    denom = 1.0 - w[:-1]
    if denom.min() <= POLICY.eigenvalue_one_guard:
        raise IllConditionedError(
            f"lambda_{int(np.argmin(denom))}(s={s}) too close to 1 for the spectral sum")
    return float(np.sum(overlaps[:-1] ** 2 / denom))


def extended_hitting_time(P: StochasticMatrix, pi: StationaryDistribution, M: MarkedSet,
                          s_grid: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 0.9)
                          ) -> ExtendedHittingTimeReport:
    """HT+ via the closed identity HT+ = HT(s) (1 - s(1-p_M))^2 / p_M^2.

    The combination is s-independent, so it is evaluated on the whole grid and
    averaged; the relative spread across the grid is the invariance residual.
    """
    grid = [float(s) for s in s_grid]
    if not grid:
        raise ValidationError("s_grid must be nonempty")
    if any(not 0.0 <= s <= 1.0 - 1e-6 for s in grid):
        raise ValidationError("each s must lie in [0, 1 - 1e-6]")
    p_M = pi.marked_mass(M)
    per_s = []
    estimates = []
    for s in grid:
        ht_s = interpolated_hitting_time(P, pi, M, s)
        per_s.append((s, ht_s))
        estimates.append(ht_s * (1.0 - s * (1.0 - p_M)) ** 2 / p_M ** 2)
    estimates = np.asarray(estimates)
    ht_plus = float(estimates.mean())
    residual = float(np.abs(estimates - ht_plus).max() / max(abs(ht_plus), 1e-300))
    warning = None
    if residual > POLICY.invariance_warn_tol:
        warning = (f"invariance residual {residual:.3e} exceeds "
                   f"{POLICY.invariance_warn_tol:.1e}; per-s values attached")
    return ExtendedHittingTimeReport(ht_plus, tuple(per_s), residual, warning)


def tv_trace(P: StochasticMatrix, pi: StationaryDistribution, t_values: Sequence[int]
             ) -> list[tuple[int, float]]:
    """Worst-case total-variation distance max_x (1/2)||e_x P^t - pi||_1 per t."""
    out = []
    Pt = np.eye(P.n)
    t_prev = 0
    for t in sorted(int(t) for t in t_values):
        Pt = Pt @ np.linalg.matrix_power(P.rows, t - t_prev)
        t_prev = t
        dist = 0.5 * np.abs(Pt - pi.pi[None, :]).sum(axis=1).max()
        out.append((t, float(dist)))
    return out


def _tv_at(P_pows: dict, rows: np.ndarray, t: int, pi: np.ndarray) -> float:
    # binary exponentiation from the cached squarings
    n = rows.shape[0]
    acc = np.eye(n)
    bit = 0
    while (1 << bit) <= t:
        if t & (1 << bit):
            if bit not in P_pows:
                P_pows[bit] = P_pows[bit - 1] @ P_pows[bit - 1]
            acc = acc @ P_pows[bit]
        bit += 1
    return float(0.5 * np.abs(acc - pi[None, :]).sum(axis=1).max())


def classical_mixing_time(P: StochasticMatrix, pi: StationaryDistribution,
                          epsilon: float) -> ClassicalMixingReport:
    """Empirical worst-case mixing time and the spectral upper bound.

    Empirical: smallest integer t with worst-case TV distance <= epsilon,
    found by doubling then bisection (TV from point masses is nonincreasing
    in t). Bound: (1/Delta) log(1/(epsilon pi_min)).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError("epsilon must lie in (0, 1)")
    sym = np.sqrt(np.outer(pi.pi, 1.0 / pi.pi)) * P.rows  # diag(pi)^1/2 P diag(pi)^-1/2
    w = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    if w[0] < -1e-10:
        raise ValidationError(
            f"chain has negative eigenvalue {w[0]!r}; the mixing bound assumes a lazy chain")
    delta = 1.0 - w[-2]
    bound = float(np.log(1.0 / (epsilon * pi.pi.min())) / delta)
    P_pows = {0: P.rows.copy()}
    t = 1
    while _tv_at(P_pows, P.rows, t, pi.pi) > epsilon:
        t *= 2
        if t > 1 << 62:
            raise IllConditionedError("mixing search exceeded doubling budget")
    lo, hi = t // 2, t   # tv(lo) > eps (or lo == 0), tv(hi) <= eps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _tv_at(P_pows, P.rows, mid, pi.pi) <= epsilon:
            hi = mid
        else:
            lo = mid
    return ClassicalMixingReport(hi, bound, float(epsilon))
