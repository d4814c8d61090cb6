"""Run the packaged figure presets and write their data files.

    python scripts/run_figures.py               # every preset into out/<id>
    python scripts/run_figures.py fig4 fig7 --out results
"""
import argparse
import sys
import time

from warpwalk.cli import list_presets, main


def cli():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("figures", nargs="*", help="preset ids (default: all)")
    ap.add_argument("--out", default="out", help="parent directory; each preset writes to <out>/<id>")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    names = args.figures or list_presets()
    for name in names:
        t0 = time.perf_counter()
        code = main(["preset", name, "--out", f"{args.out}/{name}", "--jobs", str(args.jobs)])
        if code:
            return code
        print(f"{name}: {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(cli())
