"""Reference chain constructions used by the verification suites and demos.

All random constructions are reversible by design: the walk on a symmetric
positive weight matrix W has p_xy = w_xy / sum_y w_xy and stationary weights
proportional to the row sums of W.
"""

from __future__ import annotations

import numpy as np

from .chains import StochasticMatrix, make_lazy


def rng_from(master_seed: int, *context: int) -> np.random.Generator:
    """Derived generator for one experiment cell; independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, context)]))


def random_reversible_chain(n: int, seed: int, *, lazy: bool = True,
                            sparsity: float = 0.0) -> StochasticMatrix:
    """Random walk on a random symmetric weighted graph.

    sparsity in [0, 1) zeroes that fraction of off-diagonal weight pairs,
    keeping a ring backbone so the support stays connected.
    """
    rng = rng_from(seed, n)
    W = rng.uniform(0.1, 1.0, size=(n, n))
    W = 0.5 * (W + W.T)
    if sparsity > 0.0:
        keep = rng.random((n, n)) >= sparsity
        keep = keep & keep.T
        for i in range(n):
            keep[i, (i + 1) % n] = keep[(i + 1) % n, i] = True
        W = W * keep
    np.fill_diagonal(W, rng.uniform(0.1, 1.0, size=n))
    P = StochasticMatrix(W / W.sum(axis=1, keepdims=True))
    return make_lazy(P) if lazy else P


def lazy_complete_graph(n: int) -> StochasticMatrix:
    """Lazy simple random walk on K_n (uniform stationary distribution)."""
    P = (np.ones((n, n)) - np.eye(n)) / (n - 1)
    return make_lazy(StochasticMatrix(P))


def lazy_cycle(n: int) -> StochasticMatrix:
    """Lazy simple random walk on the n-cycle."""
    P = np.zeros((n, n))
    for i in range(n):
        P[i, (i + 1) % n] = 0.5
        P[i, (i - 1) % n] = 0.5
    return make_lazy(StochasticMatrix(P))


def two_block_chain(n: int) -> StochasticMatrix:
    """Disconnected two-component chain (deliberately not ergodic)."""
    if n < 4 or n % 2:
        raise ValueError("need even n >= 4")
    half = n // 2
    block = np.full((half, half), 1.0 / half)
    P = np.zeros((n, n))
    P[:half, :half] = block
    P[half:, half:] = block
    return StochasticMatrix(P)
