"""Finite-difference residual of the sampled stationary states under refinement.

Prints the residual for every (branch, eta, n) at several n_y together with
the ratio per grid doubling (4 means second order).
"""
import argparse

from warpwalk.eigenmodes import ModeIndex, eigenmode_profile, hamiltonian_residual
from warpwalk.geometry import WarpGeometry
from warpwalk.lattice import build_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kl", type=float, default=3.0)
    ap.add_argument("--q", type=float, default=10.0)
    ap.add_argument("--n-max", type=int, default=4)
    ap.add_argument("--ny", type=int, nargs="+", default=[100, 200, 400, 800])
    args = ap.parse_args()
    geom = WarpGeometry.from_kL(args.kl)
    print("branch eta  n  " + "  ".join(f"n_y={n:<6d}" for n in args.ny) + "  ratios")
    for branch in (1, -1):
        for eta in (1, -1):
            for n in range(args.n_max + 1):
                if n == 0 and branch != eta:
                    continue  # undefined at q > 0
                r = []
                for n_y in args.ny:
                    grid = build_grid(1.0, n_y)
                    p = eigenmode_profile(geom, grid, ModeIndex(n, branch, eta), args.q)
                    r.append(hamiltonian_residual(geom, grid, p))
                ratios = " ".join(f"{a / b:.2f}" for a, b in zip(r, r[1:]))
                print(f"{branch:+5d} {eta:+4d} {n:2d}  " + "  ".join(f"{x:.3e}" for x in r) + "  " + ratios)


if __name__ == "__main__":
    main()
