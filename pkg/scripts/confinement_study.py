"""Mean position of the right front versus warp strength.

For each n_y and kL prints the late-time mean of <y_R> (t >= 15L), the first
time <y_R> reaches 90% of it, and the relaxation time of the front's own
transfer matrix, eps / ln(|lambda_1| / |lambda_2|).
"""
import argparse

import numpy as np

from warpwalk.analysis import expected_y, fpd_from_column
from warpwalk.evolution import FrontTracker, WalkEngine
from warpwalk.geometry import WarpGeometry
from warpwalk.lattice import CoinState, build_grid, localized_state


def front_relaxation_time(engine, grid):
    c = engine.coeffs
    n = grid.n_y
    t = np.diag(c["uu0"]).astype(complex)
    for i in range(n):
        t[i, (i + 1) % n] += c["uup"][i]
        t[i, (i - 1) % n] += c["uum"][i]
    a = np.sort(np.abs(np.linalg.eigvals(t)))[::-1]
    return grid.epsilon / np.log(a[0] / a[1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kl", type=float, nargs="+", default=[1.0, 3.0, 5.0])
    ap.add_argument("--ny", type=int, nargs="+", default=[40, 100, 200])
    ap.add_argument("--t-max", type=float, default=20.0)
    args = ap.parse_args()
    c0 = CoinState.normalized(1, 1j)
    print(" n_y    kL   late<y_R>   t90     tau")
    for n_y in args.ny:
        grid = build_grid(1.0, n_y)
        for kL in args.kl:
            engine = WalkEngine(WarpGeometry.from_kL(kL), grid)
            tr = FrontTracker(engine, localized_state(grid, 0.5, c0))
            ts, ys = [], []
            for j in range(1, int(round(args.t_max / grid.epsilon)) + 1):
                tr.advance()
                ts.append(tr.time)
                ys.append(expected_y(fpd_from_column(tr.front("right"), "right", j, grid)))
            ts, ys = np.array(ts), np.array(ys)
            late = ys[ts >= 0.75 * args.t_max].mean()
            t90 = ts[np.argmax(ys >= 0.9 * late)]
            print(f"{n_y:4d} {kL:5g}   {late:.4f}   {t90:6.2f}  {front_relaxation_time(engine, grid):9.1f}")


if __name__ == "__main__":
    main()
