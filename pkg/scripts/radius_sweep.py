"""Monodromy and continuation effort against loop radius.

    python scripts/radius_sweep.py --radii 0.01 0.03 0.05 0.08 0.15
"""

import argparse
import time

from monodromy_lab import catalog
from monodromy_lab.errors import NumericalError
from monodromy_lab.lattice import LoopPath
from monodromy_lab.monodromy import monodromy_around


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--system", default="champagne")
    ap.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0))
    ap.add_argument("--radii", type=float, nargs="+", default=[0.01, 0.03, 0.05, 0.08, 0.15])
    ap.add_argument("--samples", type=int, default=64)
    args = ap.parse_args()

    system = catalog.builtin(args.system)
    print(f"{'radius':>8} {'matrix':>18} {'residual':>9} {'bisect':>6} {'time':>6}")
    for r in args.radii:
        t0 = time.perf_counter()
        try:
            M = monodromy_around(system, LoopPath.circle(args.center, r, args.samples))
        except NumericalError as exc:
            print(f"{r:8.3f}  failed: {type(exc).__name__}: {exc}")
            continue
        mat = str([list(x) for x in M.entries])
        print(f"{r:8.3f} {mat:>18} {M.residual:9.1e} {M.stats.bisections:6d} {time.perf_counter() - t0:6.1f}")


if __name__ == "__main__":
    main()
