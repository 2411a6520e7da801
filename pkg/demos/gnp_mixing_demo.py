"""Mixing on dense random graphs: limiting shape and the time exponent.

Two observations on G(n, 1/2) adjacency walks, no interpolation involved.
First, from a single node the infinite-time average is already nearly
uniform. Second, the epsilon-mixing time grows like n^c with c close to 1,
far below the n^2-ish general-purpose bound.
"""

import numpy as np

from qwmix.gnp import mixing_exponent_experiment, sample_gnp
from qwmix.mixing import limiting_distribution


def main():
    n = 50
    sample = sample_gnp(n, 0.5, seed=(8, n, 0))
    psi0 = np.zeros(n)
    psi0[0] = 1.0
    lim = limiting_distribution(sample.spectrum, psi0)
    dev = np.abs(lim.probs - 1.0 / n).max()
    print(f"G({n}, 1/2) from node 0: max |limit - 1/n| = {dev:.4f}  (1/n = {1 / n:.3f})")

    sizes = list(range(10, 71, 10))
    res = mixing_exponent_experiment(sizes, 0.5, 0.1, seeds_per_size=3,
                                     t_max=1e5, master_seed=0)
    print(f"\nfitted t_mix ~ n^c over n in {sizes}: c = {res.exponent_c:.3f}")
    print("   n   median t_mix")
    for size in sizes:
        med = np.median([row[2] for row in res.rows if row[0] == size])
        print(f"{size:4d}   {med:10.2f}")


if __name__ == "__main__":
    main()
