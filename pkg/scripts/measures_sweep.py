"""Curvature, thickness, ropelength, distortion and bridge estimates over
the knotted builtins, next to the floors they should respect."""
import argparse
import csv
import math
import sys

from quadrisecant.knot import builtin_knot
from quadrisecant.measures import distortion, ropelength, superbridge_estimate, thickness, total_curvature

from _inputs import KNOTTED, SIZES, label


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="*", default=list(SIZES))
    ap.add_argument("--dirs", type=int, default=300, help="directions for the superbridge estimate")
    args = ap.parse_args(argv)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["knot", "n", "curvature_over_pi", "thickness", "ropelength", "ropelength_floor",
                "distortion_lo", "distortion_hi", "distortion_floor", "superbridge"])
    for fam, params in KNOTTED + [("torus", (3, 7))]:
        for n in args.sizes:
            P = builtin_knot(fam, params, n).vertices
            iv = distortion(P, 1e-2)
            w.writerow([label(fam, params), n, f"{total_curvature(P) / math.pi:.4f}", f"{thickness(P):.5f}",
                        f"{ropelength(P):.4f}", "15.66", f"{iv.lo:.4f}", f"{iv.hi:.4f}",
                        f"{5 * math.pi / 3:.4f}", superbridge_estimate(P, args.dirs)])


if __name__ == "__main__":
    main()
