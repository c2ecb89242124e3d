"""Does the quadrisecant approximation keep the knot type and the
quadrisecant lines?  One JSON line per input; outcomes are data."""
import argparse
import json

from quadrisecant.approx import conjecture_report
from quadrisecant.errors import NoQuadrisecants
from quadrisecant.knot import builtin_knot

from _inputs import KNOTTED, generic, label


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="*", default=[24, 40, 48])
    ap.add_argument("--seeds", type=int, default=2)
    args = ap.parse_args(argv)
    cases = [("hexagonal_trefoil", 6, 0, builtin_knot("hexagonal_trefoil"))]
    for fam, params in KNOTTED:
        for n in args.sizes:
            for seed in range(args.seeds):
                cases.append((label(fam, params), n, seed, generic(fam, params, n, seed)))
    for name, n, seed, K in cases:
        try:
            rep = conjecture_report(K, seed=seed)
        except NoQuadrisecants:
            rep = {"error": "no quadrisecants"}
        print(json.dumps({**rep, "input": name, "n": n, "seed": seed}, sort_keys=True))


if __name__ == "__main__":
    main()
