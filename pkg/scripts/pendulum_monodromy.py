"""Spherical pendulum: classification of the two poles and monodromy around the top.

The pendulum lives on T*S^2 embedded in R^6; flows use Dirac-projected
vector fields and the S^1 action is rotation about the vertical axis.

    python scripts/pendulum_monodromy.py --radius 0.1
"""

import argparse
import time

import numpy as np

from monodromy_lab import catalog
from monodromy_lab.lattice import LoopPath
from monodromy_lab.monodromy import monodromy_around
from monodromy_lab.williamson import classify_equilibrium


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=float, default=0.1)
    ap.add_argument("--samples", type=int, default=64)
    args = ap.parse_args()

    s = catalog.builtin("spherical-pendulum")
    for label, q3 in (("bottom", -1.0), ("top", 1.0)):
        x = np.array([0, 0, 0, 0, q3, 0.0])
        print(f"{label:6s} {classify_equilibrium(s, x).type.value}")
    t0 = time.perf_counter()
    M = monodromy_around(s, LoopPath.circle((1.0, 0.0), args.radius, args.samples))
    print(f"M around (1, 0): {[list(r) for r in M.entries]}  residual {M.residual:.1e}  "
          f"({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
