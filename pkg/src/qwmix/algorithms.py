"""Search and stationary-state preparation on the interpolated walk.

Both routines follow the same pattern: pick an interpolation parameter whose
top discriminant eigenvector has constant overlap with the start state, couple
the walk Hamiltonian to a pointer, and post-select the pointer-zero branch to
filter out every excited mode. Search runs once at the critical s and
measures; preparation runs twice (critical s, then s = 0) to land on sqrt(pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import (MarkedSet, StationaryDistribution, StochasticMatrix,
                     critical_interpolation, discriminant, discriminant_of,
                     interpolate, require_ergodic_reversible)
from .errors import PostSelectionError, ValidationError
from .generators import rng_from
from .hamiltonian import build_effective
from .pointer import PointerConfig, run_blocks_postselect
from .policy import POLICY


@dataclass(frozen=True)
class SearchOutcome:
    sampled_node: int
    is_marked: bool
    success_prob: float
    total_time: float
    s_star: float
    select_prob: float
    start_overlap_sq: float
    node_distribution: tuple


@dataclass(frozen=True)
class QSSampOutcome:
    state: np.ndarray
    fidelity_to_pi: float
    stage_probs: tuple
    total_time: float


@dataclass(frozen=True)
class CostModel:
    """Abstract per-primitive costs: setup, walk update, marked check."""

    setup: float
    update: float
    check: float
    ht_plus: float

    def __post_init__(self):
        if min(self.setup, self.update, self.check) < 0.0 or self.ht_plus < 0.0:
            raise ValidationError("costs and ht_plus must be nonnegative")


def cost_total(costs: CostModel) -> float:
    return costs.setup + np.sqrt(costs.ht_plus) * (costs.update + costs.check)


def spatial_search(P: StochasticMatrix, pi: StationaryDistribution, M: MarkedSet,
                   epsilon: float, seed: int = 0) -> SearchOutcome:
    """Find a marked node by filtering the walk at the critical interpolation.

    The start state sqrt(pi) keeps squared overlap 1/2 + sqrt(p_M(1-p_M))
    with the top eigenvector at s* = 1 - p_M/(1-p_M), and that eigenvector
    puts half its weight on the marked set, so post-selection plus one node
    measurement succeeds with probability about 1/4.
    """
    if not 0.0 < epsilon < 0.25:
        raise ValidationError(f"epsilon must lie in (0, 1/4), got {epsilon!r}")
    M.validate_against(P.n, proper=True)
    p_M = pi.marked_mass(M)
    if p_M >= 0.5:
        raise ValidationError(
            f"marked mass p_M={p_M:.6g} >= 1/2 puts the critical s below 0; "
            "the walk already finds such a set by direct sampling")
    s_star = critical_interpolation(p_M)
    H = build_effective(discriminant(interpolate(P, M, s_star)))
    psi0 = np.sqrt(pi.pi)
    cfg = PointerConfig.from_gap(H.gap, epsilon / 2.0)
    run = run_blocks_postselect(H, psi0, cfg)
    node_probs = np.abs(run.system_state) ** 2
    mask = M.mask(P.n)
    success = float(run.success_prob * node_probs[mask].sum())
    # sample from the node distribution conditioned on the kept sector
    sector = node_probs.sum()
    rng = rng_from(seed)
    cum = np.cumsum(node_probs / sector)
    cum[-1] = 1.0
    sampled = int(np.searchsorted(cum, rng.random(), side="right"))
    overlap_sq = float((H.vectors[:, -1] @ psi0) ** 2)
    return SearchOutcome(sampled, bool(mask[sampled]), success, cfg.total_time,
                         s_star, float(run.success_prob), overlap_sq,
                         tuple(float(x) for x in node_probs))


def qssamp_prepare(P: StochasticMatrix, j: int, epsilon: float,
                   pi_hint: StationaryDistribution | None = None) -> QSSampOutcome:
    """Prepare sqrt(pi) from the basis state |j> in two filtered stages.

    Stage 1 marks {j} and filters at its critical s, landing near the top
    eigenvector (|j> + sqrt(pi)-on-others)/sqrt(2); stage 2 filters at s = 0,
    whose top eigenvector is sqrt(pi) itself. Each stage budgets eps/4, and
    between stages the kept state is projected back onto the node sector
    (the off-sector residue is completion-dependent and O(eps) in norm).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not 0 <= j < P.n:
        raise ValidationError(f"state index {j} out of range for n={P.n}")
    pi = pi_hint if pi_hint is not None else require_ergodic_reversible(P)
    pi_j = float(pi.pi[j])
    if pi_j >= 0.5:
        raise ValidationError(
            f"pi_j={pi_j:.6g} >= 1/2; |j> is already within constant fidelity of sqrt(pi)")
    M = MarkedSet((j,))
    s_star = critical_interpolation(pi_j)
    eps_prime = epsilon / 4.0

    H1 = build_effective(discriminant(interpolate(P, M, s_star)))
    psi0 = np.zeros(P.n)
    psi0[j] = 1.0
    cfg1 = PointerConfig.from_gap(H1.gap, eps_prime)
    run1 = run_blocks_postselect(H1, psi0, cfg1)
    if run1.success_prob < 1e-12:
        raise PostSelectionError(f"stage 1 post-selection probability {run1.success_prob:.3e}")
    node1 = run1.system_state
    psi1 = node1 / np.linalg.norm(node1)

    H2 = build_effective(discriminant_of(P))
    cfg2 = PointerConfig.from_gap(H2.gap, eps_prime)
    run2 = run_blocks_postselect(H2, psi1, cfg2)
    if run2.success_prob < 1e-12:
        raise PostSelectionError(f"stage 2 post-selection probability {run2.success_prob:.3e}")
    node2 = run2.system_state
    state = node2 / np.linalg.norm(node2)

    fid = float(np.abs(np.sqrt(pi.pi) @ state) ** 2)
    total_time = cfg1.total_time + cfg2.total_time
    state.setflags(write=False)
    return QSSampOutcome(state, fid, (float(run1.success_prob), float(run2.success_prob)),
                         float(total_time))
