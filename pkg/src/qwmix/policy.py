"""Global numeric policy.

All validation thresholds used across the library live in one mutable object so
a caller with noisier inputs can loosen them in one place instead of threading
tolerance arguments through every call.
"""

from dataclasses import dataclass


@dataclass
class NumericPolicy:
    # stochastic-matrix validation
    row_sum_tol: float = 1e-12
    entry_tol: float = 1e-15
    # stationary distribution and reversibility
    stationary_residual_tol: float = 1e-10
    detailed_balance_tol: float = 1e-10
    # discriminant checks
    symmetry_assert_tol: float = 1e-13
    top_eigenvalue_tol: float = 1e-10
    top_eigenvector_tol: float = 1e-8
    similarity_tol: float = 1e-9
    # interpolation: any path that needs an ergodic chain caps s here
    s_cap: float = 1.0 - 1e-9
    # spectral clamping and conditioning
    lambda_clamp_tol: float = 1e-10
    unit_eigenvalue_guard: float = 1e-12
    # edge-walk Hamiltonian
    unitary_completion_tol: float = 1e-10
    hermiticity_tol: float = 1e-13
    full_build_max_n: int = 12
    # pointer simulation
    phase_fallback_tol: float = 1e-8
    norm_preservation_tol: float = 1e-12
    postselect_floor: float = 1e-15
    # hitting times
    eigenvalue_one_guard: float = 1e-12
    invariance_error_tol: float = 1e-8
    invariance_warn_tol: float = 1e-6
    montecarlo_step_budget: int = 100_000_000
    # quantum mixing
    imaginary_residue_tol: float = 1e-10
    degeneracy_rel_tol: float = 1e-9
    negative_probability_tol: float = -1e-12
    # random graphs
    eigensolve_max_n: int = 2000
    bisection_tol: float = 1e-12


#: Shared instance consulted by every module. Mutate fields to retune globally.
POLICY = NumericPolicy()
