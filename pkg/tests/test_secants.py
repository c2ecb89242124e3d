import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadrisecant.errors import FiveSecantDetected, MissingMetadata, NotGeneric
from quadrisecant.knot import PolygonalKnot, builtin_knot
from quadrisecant.secants import (
    canonical_knot_order,
    classify_dihedral,
    csv_rows,
    CSV_HEADER,
    enumerate_quadrisecants,
    five_secants,
    pannwitz_lower_check,
    quadrisecant_upper_bound,
    required_secants,
    trisecant_coverage,
    trisecant_families,
)

from conftest import convex_polygon, generic_builtin, quads, random_rigid

SADDLE_HEXAGON = [(0, -0.5, 0), (0, 0.5, 0), (1, 1, 1), (1, -1, -1), (-1, -1, 1), (-1, 1, -1)]


def _five_secant_polygon():
    """Five skew edges through (k, 0, 0), k = 0..4, closed far from the x-axis."""
    rng = np.random.default_rng(3)
    pts = []
    for k in range(5):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        if abs(d[0]) > 0.8:
            d = np.array([0.1, 0.7, 0.7])
        p = np.array([k, 0.0, 0.0])
        pts += [p - 0.4 * d, p + 0.4 * d]
    pts.append([2, 5, 5])
    return PolygonalKnot(np.array(pts))


# ---------------------------------------------------------------- classification

@pytest.mark.parametrize("knot,line,cls", [
    ("abcd", "abcd", "simple"),
    ("abcd", "acbd", "alternating"),
    ("abcd", "dcba", "simple"),
    ("abcd", "abdc", "flipped"),
    ("abdc", "abcd", "flipped"),
    ("acbd", "abcd", "alternating"),
])
def test_classify_examples(knot, line, cls):
    assert classify_dihedral(knot, line) == cls


def _dihedral_images(word):
    w = list(word)
    out = []
    for k in range(4):
        r = w[k:] + w[:k]
        out += ["".join(r), "".join(r[::-1])]
    return out


@given(st.permutations("abcd"), st.permutations("abcd"))
def test_classification_is_dihedral_invariant(knot, line):
    c = classify_dihedral(knot, line)
    assert all(classify_dihedral(k, line) == c for k in _dihedral_images(knot))
    assert classify_dihedral(knot, line[::-1]) == c


def test_class_sizes():
    # eight knot orders per class once the line order is fixed
    counts = {}
    for p in itertools.permutations("abcd"):
        c = classify_dihedral(p, "abcd")
        counts[c] = counts.get(c, 0) + 1
    assert counts == {"simple": 8, "flipped": 8, "alternating": 8}


def test_canonical_knot_order():
    assert canonical_knot_order("cdab") == "abcd"
    assert canonical_knot_order("adcb") == "abcd"
    assert canonical_knot_order("bdac") == "acbd"


def test_classify_rejects_bad_labels():
    with pytest.raises(ValueError):
        classify_dihedral("aabc", "abcd")


# ---------------------------------------------------------------- enumeration

def test_hexagonal_trefoil_three_alternating(hex_quads):
    assert len(hex_quads) == 3 == quadrisecant_upper_bound(6)
    assert all(q.dihedral_class == "alternating" for q in hex_quads)
    assert all(required_secants(q) == [(1, 2)] for q in hex_quads)


def test_quadrisecant_points_are_collinear_and_ordered(hex_quads):
    for q in hex_quads:
        P = np.array([p.point for p in q.points])
        u = q.line.direction
        params = (P - q.line.base) @ u
        resid = P - q.line.base - params[:, None] * u
        assert np.abs(resid).max() < 1e-9
        assert np.all(np.diff(params) > 0)
        assert [q.r, q.s, q.t] == pytest.approx(np.diff(params).tolist(), rel=1e-12)


def test_sub_trisecants(hex_quads):
    for q in hex_quads:
        subs = q.sub_trisecants()
        assert len(subs) == 4
        for tri in subs:
            P = np.array([tri.a.point, tri.b.point, tri.c.point])
            assert np.linalg.norm(np.cross(P[1] - P[0], P[2] - P[0])) < 1e-9
        # in acbd order the two outer triples are reversed, the other two direct
        assert sorted(t.order_class for t in subs) == ["direct", "direct", "reversed", "reversed"]


def test_convex_octagon_empty():
    assert enumerate_quadrisecants(convex_polygon(8)) == []


def test_planar_hexagon_not_generic():
    a = 2 * np.pi * np.arange(6) / 6
    K = PolygonalKnot(np.stack([np.cos(a), np.sin(a), 0 * a], 1))
    with pytest.raises(NotGeneric):
        enumerate_quadrisecants(K)


def test_five_secant_detected():
    K = _five_secant_polygon()
    with pytest.raises(FiveSecantDetected):
        enumerate_quadrisecants(K, check=False)
    lines = five_secants(K)
    assert any(np.abs(np.array(pts)[:, 1:]).max() < 1e-9 and len(pts) >= 5 for pts in lines)


def test_upper_bound_formula():
    assert quadrisecant_upper_bound(6) == 3
    assert quadrisecant_upper_bound(7) == 14
    assert quadrisecant_upper_bound(5) == 0


def test_enumeration_is_repeatable():
    K = generic_builtin("figure8_sampled", None, 32)
    a = enumerate_quadrisecants(K)
    b = enumerate_quadrisecants(K)
    assert csv_rows(a) == csv_rows(b)


@pytest.mark.parametrize("case", [("torus", (2, 3), 24), ("figure8_sampled", None, 32),
                                  ("five_two_sampled", None, 24)])
def test_prefilter_is_conservative(case):
    K = generic_builtin(*case)
    a = enumerate_quadrisecants(K, prefilter=True)
    b = enumerate_quadrisecants(K, prefilter=False)
    assert csv_rows(a) == csv_rows(b)


def test_threads_do_not_change_output():
    K = generic_builtin("torus", (2, 5), 30)
    assert csv_rows(enumerate_quadrisecants(K, threads=4, chunk=500)) == csv_rows(enumerate_quadrisecants(K))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=8)
def test_rigid_motion_keeps_counts_and_classes(seed):
    K = generic_builtin("figure8_sampled", None, 24)
    R, t = random_rigid(np.random.default_rng(seed))
    a = sorted(q.dihedral_class for q in quads("figure8_sampled", None, 24))
    b = sorted(q.dihedral_class for q in enumerate_quadrisecants(K.transformed(R, t), check=False))
    assert a == b


def test_csv_rows_match_header(hex_quads):
    rows = csv_rows(hex_quads)
    assert all(len(r) == len(CSV_HEADER) for r in rows)


# ---------------------------------------------------------------- Pannwitz

def test_pannwitz(hex_trefoil, hex_quads):
    assert pannwitz_lower_check(hex_trefoil, hex_quads)
    assert pannwitz_lower_check(generic_builtin("torus", (2, 3), 32))
    assert pannwitz_lower_check(convex_polygon(9))


def test_pannwitz_needs_metadata():
    K = PolygonalKnot(builtin_knot("hexagonal_trefoil").vertices)
    with pytest.raises(MissingMetadata):
        pannwitz_lower_check(K)


# ---------------------------------------------------------------- trisecant families

def test_convex_polygon_has_no_trisecants():
    assert trisecant_families(convex_polygon(10)) == []
    assert trisecant_coverage(convex_polygon(10))["coverage"] == 0.0


def test_saddle_triple_family_is_closed_interval():
    K = PolygonalKnot(SADDLE_HEXAGON)
    fams = {f.edge_triple: f for f in trisecant_families(K, check=False)}
    f = fams[(0, 2, 4)]
    assert f.topology == "closed_interval"
    assert f.interval == pytest.approx((0.0, 1.0))
    P = f.points(K)
    # every sampled line is a y = const ruling of xy - z = 0
    assert np.abs(P[:, :, 1] - P[:, :1, 1]).max() < 1e-12


def test_family_samples_collinear(hex_trefoil):
    fams = trisecant_families(hex_trefoil)
    assert fams
    for f in fams:
        P = f.points(hex_trefoil)
        cr = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
        assert np.abs(cr).max() < 1e-9
        assert f.topology in {"closed_interval", "half_open", "point"}


@pytest.mark.parametrize("case", [("hexagonal_trefoil", None, None), ("torus", (2, 3), 40)])
def test_knotted_coverage_is_full(case):
    K = generic_builtin(*case) if case[2] else builtin_knot(case[0])
    rep = trisecant_coverage(K)
    assert rep["coverage"] == 1.0
