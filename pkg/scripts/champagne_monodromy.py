"""Monodromy of the champagne bottle around its focus-focus value.

Prints the start and final period lattices, the integer matrix and how it
compares with the exact glued model.

    python scripts/champagne_monodromy.py --radius 0.05 --samples 64
"""

import argparse
import time

import numpy as np

from monodromy_lab import catalog
from monodromy_lab.bifurcation import count_pinch_points
from monodromy_lab.lattice import LoopPath
from monodromy_lab.model import model_monodromy
from monodromy_lab.monodromy import fixed_cycle, gl2z_conjugate, monodromy_around, unipotent_normal_form


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--system", default="champagne")
    ap.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0))
    ap.add_argument("--radius", type=float, default=0.05)
    ap.add_argument("--samples", type=int, default=64)
    args = ap.parse_args()

    system = catalog.builtin(args.system)
    loop = LoopPath.circle(args.center, args.radius, args.samples)
    t0 = time.perf_counter()
    M = monodromy_around(system, loop)
    elapsed = time.perf_counter() - t0
    np.set_printoptions(precision=6, suppress=True)
    print(f"system      {system.name}")
    print(f"start basis\n{M.start.basis}")
    print(f"final basis\n{M.final.basis}")
    print(f"M           {[list(r) for r in M.entries]}  (residual {M.residual:.1e}, {elapsed:.1f} s)")
    print(f"transport   {M.stats.steps} steps, {M.stats.bisections} bisections")
    if M.is_identity():
        return
    n = unipotent_normal_form(M)[1]
    k = count_pinch_points(system, args.center)
    print(f"twist n     {n}; focus-focus points over the center: {k}")
    print(f"fixed cycle {fixed_cycle(M)} in the (gamma, delta) basis")
    print(f"conjugate to model({k}): {gl2z_conjugate(M, model_monodromy(k))}")


if __name__ == "__main__":
    main()
