"""Bifurcation diagram of a catalog system as SVG plus a CSV table.

    python scripts/scan_diagram.py champagne --box -1.5 1.5 --grid 6 --out champagne
"""

import argparse

from monodromy_lab import catalog
from monodromy_lab.bifurcation import scan_bifurcation
from monodromy_lab.svg import diagram_svg, write_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("system")
    ap.add_argument("--box", type=float, nargs=2, default=(-1.5, 1.5))
    ap.add_argument("--grid", type=int, default=5)
    ap.add_argument("--out", default=None, help="prefix for .svg and .csv files")
    args = ap.parse_args()

    s = catalog.builtin(args.system)
    d = scan_bifurcation(s, tuple(args.box), args.grid)
    for cv in d.equilibria():
        print(f"({cv.value[0]: .6f}, {cv.value[1]: .6f})  {cv.tag}")
    print(f"{len(d.rank_one())} rank-1 values; diagnostics {d.diagnostics}")
    if args.out:
        write_svg(args.out + ".svg", diagram_svg([(cv.value, cv.tag) for cv in d.critical_values],
                                                 title=f"{s.name}: critical values"))
        with open(args.out + ".csv", "w", encoding="utf-8") as fh:
            fh.write("c1,c2,type\n")
            for cv in d.critical_values:
                fh.write(f"{cv.value[0]!r},{cv.value[1]!r},{cv.tag}\n")


if __name__ == "__main__":
    main()
