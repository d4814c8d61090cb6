"""Full walk versus the infinite-warp shift map on the light-cone fronts.

Prints the largest difference over the run of the per-site amplitudes
eps * chi, of their moduli, and of the per-site probabilities.
"""
import argparse

import numpy as np

from warpwalk.analysis import extract_fpd
from warpwalk.evolution import WalkEngine, step, step_high_kl_limit
from warpwalk.geometry import WarpGeometry
from warpwalk.lattice import CoinState, build_grid, localized_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kl", type=float, nargs="+", default=[20.0, 30.0, 40.0])
    ap.add_argument("--ny", type=int, nargs="+", default=[100, 200])
    ap.add_argument("--steps", type=int, default=50)
    args = ap.parse_args()
    c0 = CoinState.normalized(1, 1j)
    print(" n_y    kL   amplitude   modulus     probability  exp(-kL/2)")
    for n_y in args.ny:
        grid = build_grid(1.0, n_y)
        eps = grid.epsilon
        for kL in args.kl:
            engine = WalkEngine(WarpGeometry.from_kL(kL), grid)
            f = localized_state(grid, 0.5, c0)
            g = f.copy()
            worst = np.zeros(3)
            for _ in range(args.steps):
                f, g = step(engine, f), step_high_kl_limit(g)
                for side in ("right", "left"):
                    a, b = eps * extract_fpd(f, side).samples, eps * extract_fpd(g, side).samples
                    worst = np.maximum(worst, [np.abs(a - b).max(), np.abs(np.abs(a) - np.abs(b)).max(),
                                               np.abs(np.abs(a) ** 2 - np.abs(b) ** 2).max()])
            print(f"{n_y:4d} {kL:5g}   {worst[0]:.2e}    {worst[1]:.2e}    {worst[2]:.2e}     {np.exp(-kL / 2):.2e}")


if __name__ == "__main__":
    main()
