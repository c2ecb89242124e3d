"""Shared input list for the experiment scripts."""
from quadrisecant.knot import builtin_knot, perturb_to_generic

KNOTTED = [("torus", (2, 3)), ("figure8_sampled", None), ("torus", (2, 5)), ("five_two_sampled", None)]
SIZES = (24, 32, 40, 48, 64)


def generic(family, params, n, seed=0, rel=1e-3):
    K = builtin_knot(family, params, n)
    return perturb_to_generic(K, rel * K.edge_lengths.min(), seed=seed)


def label(family, params):
    return family if params is None else f"{family}{params[0]}_{params[1]}"
