import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadrisecant.errors import DegenerateConfiguration, NotOnSurface
from quadrisecant.geom3 import (
    CONTAINED,
    HYPERBOLOID,
    INFINITE,
    PARABOLOID,
    OrientedLine,
    PluckerLine,
    Quadric,
    Segment,
    form_from_coefficients,
    line_quadric_intersection,
    quadric_through_lines,
    ruling_through_point,
    segment_distance,
    transversals_of_four_lines,
)
from quadrisecant.tolerances import DEFAULT_TOL

from conftest import random_rigid

L1 = OrientedLine.from_point_direction([0, 0, 0], [0, 1, 0])
L2 = OrientedLine.from_point_direction([1, 0, 0], [0, 1, 1])
L3 = OrientedLine.from_point_direction([-1, 0, 0], [0, 1, -1])
SADDLE = form_from_coefficients([0, 0, 0, 1, 0, 0, 0, 0, -1, 0])  # xy - z


def _same_form(A, B, tol=1e-9):
    A = A / np.linalg.norm(A)
    B = B / np.linalg.norm(B)
    return min(np.abs(A - B).max(), np.abs(A + B).max()) < tol


def _line(p, d):
    return OrientedLine.from_point_direction(p, d)


def _meets(l, m, tol=1e-9):
    return l.distance_to_line(m) < tol


# ---------------------------------------------------------------- primitives

def test_line_canonical_base_is_closest_point():
    l = _line([3, 4, 5], [1, 2, 2])
    assert abs(np.dot(l.base, l.direction)) < 1e-15
    assert abs(np.linalg.norm(l.direction) - 1) < DEFAULT_TOL.tol_unit


def test_line_equality_ignores_parametrisation():
    l = _line([1, 0, 0], [0, 1, 1])
    m = _line([1, 5, 5], [0, -2, -2])
    assert l.same_as(m)
    assert not l.same_as(m, oriented=True)
    assert l.canonical().same_as(m.canonical(), oriented=True)


def test_zero_length_segment_rejected():
    with pytest.raises(DegenerateConfiguration):
        Segment(np.zeros(3), np.zeros(3))


def test_plucker_identity_and_roundtrip():
    l = _line([0.3, -2, 1], [1, 1, -0.5])
    P = PluckerLine.from_line(l)
    assert abs(P.identity_residual()) < 1e-14
    assert P.to_line().same_as(l)
    assert abs(P.reciprocal(PluckerLine.from_line(_line(l.point(2.0), [0, 0, 1])))) < 1e-12


def test_segment_distance_skew_and_touching():
    assert segment_distance([0, 0, 0], [1, 0, 0], [0.5, -1, 1], [0.5, 1, 1]) == pytest.approx(1.0)
    assert segment_distance([0, 0, 0], [1, 0, 0], [1, 0, 0], [1, 1, 0]) == pytest.approx(0.0)


# ---------------------------------------------------------------- quadric through three lines

def test_quadric_through_saddle_generators():
    Q = quadric_through_lines(L1, L2, L3)
    assert _same_form(Q.Q, SADDLE)
    assert Q.kind == PARABOLOID
    assert abs(np.linalg.norm(Q.Q) - 1) < 1e-12


def test_quadric_rigid_motion_matches_transformed_form():
    rng = np.random.default_rng(7)
    R, t = random_rigid(rng)
    moved = [l.transformed(R, t) for l in (L1, L2, L3)]
    Q = quadric_through_lines(*moved)
    expected = Quadric(SADDLE).transformed(R, t)
    assert _same_form(Q.Q, expected.Q, 1e-8)


def test_intersecting_lines_rejected():
    meet = _line([0, 0, 0], [1, 0, 0])
    with pytest.raises(DegenerateConfiguration):
        quadric_through_lines(L1, meet, L2)


def test_hyperboloid_when_directions_span_space():
    Q = quadric_through_lines(_line([0, 0, 0], [1, 0, 0]), _line([0, 0, 1], [0, 1, 0]),
                              _line([1, 1, 0], [0, 0, 1]))
    assert Q.kind == HYPERBOLOID


@given(st.floats(min_value=1e-7, max_value=1e-2), st.integers(0, 10_000))
@settings(max_examples=40)
def test_kind_flips_off_a_common_plane(eps, seed):
    rng = np.random.default_rng(seed)
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    dirs = [v - np.dot(v, n) * n for v in rng.normal(size=(3, 3))]
    bases = rng.uniform(-1, 1, size=(3, 3))
    try:
        flat = quadric_through_lines(*[_line(b, d) for b, d in zip(bases, dirs)])
    except DegenerateConfiguration:
        return
    assert flat.kind == PARABOLOID
    tilted = list(dirs)
    tilted[2] = tilted[2] / np.linalg.norm(tilted[2]) + eps * n
    units = [d / np.linalg.norm(d) for d in tilted]
    bumped = quadric_through_lines(*[_line(b, d) for b, d in zip(bases, tilted)])
    if abs(np.linalg.det(np.stack(units))) > 10 * DEFAULT_TOL.tol_dir:
        assert bumped.kind == HYPERBOLOID


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=300)
def test_quadric_vanishes_on_generators(seed):
    rng = np.random.default_rng(seed)
    lines = [_line(rng.uniform(-1, 1, 3), rng.normal(size=3)) for _ in range(3)]
    try:
        Q = quadric_through_lines(*lines)
    except DegenerateConfiguration:
        return
    for l in lines:
        assert np.abs(Q(l.point(np.linspace(-2, 2, 5)))).max() < 1e-9


# ---------------------------------------------------------------- rulings and intersections

def test_ruling_through_origin():
    Q = quadric_through_lines(L1, L2, L3)
    r = ruling_through_point(Q, [0, 0, 0], (L1, L2, L3))
    assert r.same_as(_line([0, 0, 0], [1, 0, 0]))


def test_ruling_through_2_3_6_is_y_equals_3():
    Q = quadric_through_lines(L1, L2, L3)
    r = ruling_through_point(Q, [2, 3, 6], (L1, L2, L3))
    assert r.same_as(_line([0, 3, 0], [1, 0, 3]))
    assert all(_meets(r, g) for g in (L1, L2, L3))
    assert np.abs(Q(r.point(np.linspace(-3, 3, 7)))).max() < 1e-9


def test_ruling_off_surface():
    Q = quadric_through_lines(L1, L2, L3)
    with pytest.raises(NotOnSurface):
        ruling_through_point(Q, [1, 1, 5], (L1, L2, L3))


def test_line_meets_saddle_twice():
    Q = quadric_through_lines(L1, L2, L3)
    l = _line([0, 0, 3], [1, 1, 0])
    ts = line_quadric_intersection(Q, l)
    xs = sorted(float(l.point(t)[0]) for t in ts)
    assert xs == pytest.approx([-math.sqrt(3), math.sqrt(3)], abs=1e-12)


def test_vertical_line_meets_saddle_once():
    Q = quadric_through_lines(L1, L2, L3)
    l = _line([2, 3, 0], [0, 0, 1])
    ts = line_quadric_intersection(Q, l)
    assert len(ts) == 1
    assert l.point(ts[0]) == pytest.approx([2, 3, 6], abs=1e-12)


def test_generator_is_contained():
    Q = quadric_through_lines(L1, L2, L3)
    assert line_quadric_intersection(Q, _line([2, 0, 0], [0, 1, 2])) is CONTAINED


# ---------------------------------------------------------------- transversals

@pytest.mark.parametrize("method", ["quadric", "plucker"])
def test_two_transversals(method):
    l4 = _line([0, 0, 3], [1, 1, 0])
    out = transversals_of_four_lines(L1, L2, L3, l4, method=method)
    assert len(out) == 2
    for y0 in (math.sqrt(3), -math.sqrt(3)):
        want = _line([0, y0, 0], [1, 0, y0])
        assert any(o.same_as(want, 1e-9) for o in out)
    for o in out:
        assert all(_meets(o, g) for g in (L1, L2, L3, l4))


@pytest.mark.parametrize("method", ["quadric", "plucker"])
def test_one_transversal(method):
    out = transversals_of_four_lines(L1, L2, L3, _line([2, 3, 0], [0, 0, 1]), method=method)
    assert len(out) == 1
    assert out[0].same_as(_line([0, 3, 0], [1, 0, 3]), 1e-9)


@pytest.mark.parametrize("method", ["quadric", "plucker"])
def test_no_transversal(method):
    assert transversals_of_four_lines(L1, L2, L3, _line([0, 0, -3], [1, 1, 0]), method=method) == []


@pytest.mark.parametrize("method", ["quadric", "plucker"])
def test_fourth_line_on_quadric(method):
    out = transversals_of_four_lines(L1, L2, L3, _line([2, 0, 0], [0, 1, 2]), method=method)
    assert out is INFINITE


def _agree(a, b, tol=1e-7):
    return len(a) == len(b) and all(any(x.same_as(y, tol) for y in b) for x in a)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=200)
def test_solvers_agree(seed):
    rng = np.random.default_rng(seed)
    lines = [_line(rng.uniform(-1, 1, 3), rng.normal(size=3)) for _ in range(4)]
    try:
        a = transversals_of_four_lines(*lines, method="quadric")
    except DegenerateConfiguration:
        return
    b = transversals_of_four_lines(*lines, method="plucker")
    assert _agree(a, b)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_transversals_rigid_equivariance(seed):
    rng = np.random.default_rng(seed)
    lines = [_line(rng.uniform(-1, 1, 3), rng.normal(size=3)) for _ in range(4)]
    R, t = random_rigid(rng)
    try:
        a = transversals_of_four_lines(*lines)
        b = transversals_of_four_lines(*[l.transformed(R, t) for l in lines])
    except DegenerateConfiguration:
        return
    assert _agree([l.transformed(R, t) for l in a], b, 1e-6)
