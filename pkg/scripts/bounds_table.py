"""Minimised ropelength bounds per quadrisecant class, with an optional
f, g, m sample grid for plotting."""
import argparse
import csv
import math
import sys

from quadrisecant.measures import BOUND_TYPES, bound_constants, bound_grid_rows, minimize_bound


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default=None, help="write the f, g, m grid CSV here")
    args = ap.parse_args(argv)
    closed = bound_constants()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["type", "minimum", "r", "s", "t", "closed_form"])
    for kind in BOUND_TYPES:
        val, arg = minimize_bound(kind)
        w.writerow([kind, f"{val:.9f}", f"{arg['r']:.6f}", f"{arg['s']:.6f}", f"{arg['t']:.6f}",
                    f"{closed[kind]:.9f}" if kind in closed else ""])
    print(f"# 10pi/3 + 2sqrt3 + 2 = {10 * math.pi / 3 + 2 * math.sqrt(3) + 2:.9f}", file=sys.stderr)
    if args.grid:
        with open(args.grid, "w", newline="") as fh:
            g = csv.writer(fh, lineterminator="\n")
            g.writerow(["function", "x", "y", "theta", "value"])
            g.writerows(bound_grid_rows())


if __name__ == "__main__":
    main()
