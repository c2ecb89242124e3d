"""Acceptance criteria.  Each test prints one PASS or FAIL line."""
import math
import time

import numpy as np
import pytest

from quadrisecant.approx import quadrisecant_approximation
from quadrisecant.errors import DegenerateConfiguration, FiveSecantDetected
from quadrisecant.geom3 import OrientedLine, transversals_of_four_lines
from quadrisecant.knot import builtin_knot
from quadrisecant.measures import (
    distortion,
    minimize_bound,
    ropelength,
    second_hull_membership,
    thickness,
    total_curvature,
)
from quadrisecant.secants import (
    csv_rows,
    enumerate_quadrisecants,
    quadrisecant_upper_bound,
    trisecant_families,
)
from quadrisecant.topology import (
    ESSENTIAL,
    INESSENTIAL,
    certify_secant,
    essential_quadrisecant_check,
)

from conftest import convex_polygon, generic_builtin

PI = math.pi
SIZES = (24, 32, 40, 48, 64)
KNOTTED = [("torus", (2, 3)), ("figure8_sampled", None), ("torus", (2, 5)), ("five_two_sampled", None)]


@pytest.fixture
def report(request):
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}" + (f": {detail}" if detail else "")
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
        else:
            print(line)
        assert ok, line
    return emit


def _builtin_cases(n):
    """Every builtin family that admits ``n`` vertices, nudged into general position."""
    if n == 6:
        yield "hexagonal_trefoil", builtin_knot("hexagonal_trefoil")
        yield "round_circle", generic_builtin("round_circle", None, 6, 0, 1e-2)
        return
    yield "round_circle", generic_builtin("round_circle", None, n, 0, 1e-2)
    for fam, params in KNOTTED + [("torus", (3, 7))]:
        yield f"{fam}{params or ''}", generic_builtin(fam, params, n)


def test_1_bound_constants(report):
    t = time.perf_counter()
    simple, _ = minimize_bound("simple")
    flipped, _ = minimize_bound("flipped")
    alt, arg = minimize_bound("alternating")
    dt = time.perf_counter() - t
    ok = (abs(simple - (10 * PI / 3 + 2 * math.sqrt(3) + 2)) < 1e-4
          and abs(flipped - (10 * PI / 3 + 2 * math.sqrt(3))) < 1e-4
          and 15.66 <= alt <= 15.67 and dt < 1.0)
    report(1, "bound constants", ok,
           f"simple={simple:.6f} flipped={flipped:.6f} alternating={alt:.6f} (s*={arg['s']:.6f}) in {dt:.3f}s")


def test_2_hexagonal_trefoil(report):
    t = time.perf_counter()
    K = builtin_knot("hexagonal_trefoil")
    qs = enumerate_quadrisecants(K)
    A = quadrisecant_approximation(K, quadrisecants=qs)
    dt = time.perf_counter() - t
    ok = (len(qs) == 3 == quadrisecant_upper_bound(6)
          and all(q.dihedral_class == "alternating" for q in qs)
          and A.embedded and A.signature is not None and A.signature.determinant == 3
          and A.line_set_matches(1e-6) and dt < 5.0)
    report(2, "hexagonal trefoil", ok,
           f"{len(qs)} quadrisecants {sorted({q.dihedral_class for q in qs})}, approximation "
           f"embedded={A.embedded} det={A.signature.determinant if A.signature else None} "
           f"lines match={A.line_set_matches(1e-6)} in {dt:.2f}s")


def test_3_upper_bound(report):
    worst, fails = 0.0, []
    for n in (6, 24, 40, 64):
        for name, K in _builtin_cases(n):
            try:
                c = len(enumerate_quadrisecants(K, check=False))
            except FiveSecantDetected:
                fails.append(f"{name}/{n}: five-secant")
                continue
            worst = max(worst, c / quadrisecant_upper_bound(n))
            if c > quadrisecant_upper_bound(n):
                fails.append(f"{name}/{n}: {c}")
    report(3, "quadrisecant upper bound", not fails,
           f"max count/bound ratio {worst:.2e}" + (f"; failures {fails}" if fails else ""))


def _first_certified(K, qs):
    for q in qs:
        if q.dihedral_class == "alternating":
            if essential_quadrisecant_check(K, q).essential == "certified":
                return q
    return None


def test_4_existence(report):
    t = time.perf_counter()
    missing, total = [], 0
    for fam, params in KNOTTED:
        for n in SIZES:
            for seed in range(5):
                K = generic_builtin(fam, params, n, seed)
                qs = enumerate_quadrisecants(K, check=False)
                total += 1
                if _first_certified(K, qs) is None:
                    missing.append(f"{fam}{params or ''}/{n}/{seed}")
    dt = time.perf_counter() - t
    report(4, "existence of essential alternating quadrisecants", not missing and dt < 300,
           f"{total - len(missing)}/{total} inputs certified in {dt:.1f}s" + (f"; missing {missing}" if missing else ""))


def test_5_pannwitz(report):
    fails, total = [], 0
    for n in (24, 40, 64):
        for fam, params in KNOTTED + [("torus", (3, 7))]:
            K = generic_builtin(fam, params, n)
            u = K.unknotting_number
            c = len(enumerate_quadrisecants(K, check=False))
            total += 1
            if c < 2 * u * u:
                fails.append(f"{fam}{params or ''}/{n}: {c} < {2 * u * u}")
    K = builtin_knot("hexagonal_trefoil")
    total += 1
    if len(enumerate_quadrisecants(K)) < 2 * K.unknotting_number ** 2:
        fails.append("hexagonal_trefoil")
    report(5, "Pannwitz floor", not fails, f"{total - len(fails)}/{total} inputs" + (f"; {fails}" if fails else ""))


def test_6_unknot_emptiness(report):
    bad = []
    for n in (6, 8, 12, 24, 40, 64):
        for seed in range(3):
            K = convex_polygon(n, seed)
            if enumerate_quadrisecants(K) or trisecant_families(K):
                bad.append((n, seed))
    report(6, "convex unknots have no trisecants", not bad, f"18 polygons, n in 6..64" + (f"; {bad}" if bad else ""))


def test_7_fary_milnor(report):
    knotted = min(total_curvature(generic_builtin(f, p, n).vertices) for f, p in KNOTTED for n in SIZES)
    knotted = min(knotted, total_curvature(builtin_knot("hexagonal_trefoil").vertices))
    convex = [total_curvature(convex_polygon(n, s, nudge=0).vertices) for n in (8, 24, 64) for s in range(3)]
    quad = total_curvature(np.array([[0, 0, 0], [2, 0, 0], [1, 0, 0], [3, 0, 0]], dtype=float))
    ok = knotted > 4 * PI and all(2 * PI <= c <= 2 * PI + 0.01 for c in convex) and quad == 4 * PI
    report(7, "total curvature", ok,
           f"knotted min {knotted / PI:.4f}pi, convex in [{min(convex) / PI:.6f}, {max(convex) / PI:.6f}]pi, "
           f"degenerate quadrilateral {quad / PI}pi")


def test_8_distortion(report):
    circ = builtin_knot("round_circle", None, 512).vertices
    iv = distortion(circ, 1e-3)
    circle_ok = iv.lo <= PI / 2 <= iv.hi and iv.hi - iv.lo < 0.01
    his = [distortion(generic_builtin(f, p, n).vertices, 1e-2).hi for f, p in KNOTTED for n in SIZES]
    his.append(distortion(builtin_knot("hexagonal_trefoil").vertices, 1e-2).hi)
    t37 = distortion(builtin_knot("torus", (3, 7), 64).vertices, 1e-2)
    ok = circle_ok and min(his) >= 5 * PI / 3 and t37.hi >= max(5 * PI / 3, 3 / 160)
    report(8, "distortion", ok,
           f"circle [{iv.lo:.6f}, {iv.hi:.6f}] vs pi/2={PI / 2:.6f}; knotted min hi {min(his):.3f} "
           f"(5pi/3={5 * PI / 3:.3f}); T(3,7) hi {t37.hi:.3f}")


def test_9_ropelength(report):
    floor = 15.66 * 0.98
    vals = {f"{f}{p or ''}/{n}": ropelength(builtin_knot(f, p, n).vertices)
            for f, p in KNOTTED + [("torus", (3, 7))] for n in SIZES}
    low = min(vals, key=vals.get)
    report(9, "ropelength floor on sampled knots", vals[low] >= floor,
           f"minimum {vals[low]:.3f} at {low} (floor {floor:.3f})")


def _random_lines(rng):
    return [OrientedLine.from_point_direction(rng.uniform(-1, 1, 3), rng.normal(size=3)) for _ in range(4)]


def test_10_oracle_equivalence(report):
    rng = np.random.default_rng(0)
    agree = checked = 0
    for _ in range(1000):
        lines = _random_lines(rng)
        try:
            a = transversals_of_four_lines(*lines, method="quadric")
        except DegenerateConfiguration:
            continue
        b = transversals_of_four_lines(*lines, method="plucker")
        checked += 1
        agree += len(a) == len(b) and all(any(x.same_as(y, 1e-7) for y in b) for x in a)
    same = 0
    cases = [("hexagonal_trefoil", builtin_knot("hexagonal_trefoil"))]
    cases += [(f"{f}{p or ''}", generic_builtin(f, p, 24)) for f, p in KNOTTED + [("torus", (3, 7))]]
    cases += [("round_circle", generic_builtin("round_circle", None, 24, 0, 1e-2))]
    for _, K in cases:
        same += csv_rows(enumerate_quadrisecants(K, check=False, prefilter=True)) == \
            csv_rows(enumerate_quadrisecants(K, check=False, prefilter=False))
    ok = agree == checked and checked >= 990 and same == len(cases)
    report(10, "oracle equivalence", ok,
           f"solvers agree on {agree}/{checked} quadruples; prefilter identical on {same}/{len(cases)} knots")


def test_11_second_hull(report):
    K = builtin_knot("hexagonal_trefoil")
    members = []
    for q in enumerate_quadrisecants(K):
        q = essential_quadrisecant_check(K, q)
        if q.essential == "certified":
            mid = 0.5 * (q.points[1].point + q.points[2].point)
            members.append(second_hull_membership(K, mid, 2, mode="exact").status)
    circ = builtin_knot("round_circle", None, 64)
    v = second_hull_membership(circ, [0, 0, 0], 2, mode="exact")
    ok = members and all(s == "exact_member" for s in members) and v.status == "not_member" \
        and v.witness_normal is not None
    report(11, "second hull", bool(ok),
           f"trefoil midpoints {members}; circle centre {v.status} with {v.min_cuts} cuts, "
           f"witness normal {np.round(v.witness_normal, 3).tolist() if v.witness_normal else None}")


def test_12_essentiality_soundness(report):
    families = [("torus", (2, 3), 32), ("figure8_sampled", None, 32), ("torus", (2, 5), 30), (None, None, 12)]
    counts = {ESSENTIAL: 0, INESSENTIAL: 0, "inconclusive": 0}
    ball_bad, ball_total = [], 0
    for seed in range(50):
        fam, params, n = families[seed % len(families)]
        K = convex_polygon(n, seed) if fam is None else generic_builtin(fam, params, n, seed % 5)
        K = K.transformed(scale=1.0 / thickness(K.vertices))
        rng = np.random.default_rng(seed)
        L = K.total_length
        s0, s1 = rng.uniform(0, L, 2)
        short = s0 + rng.uniform(0.05, 0.95)
        pairs = [(s0, s1, False), (s0, short, True)]
        for u, w, is_short in pairs:
            a, b = K.point_at_arclength(u % L), K.point_at_arclength(w % L)
            if K.common_straight_subarc(a, b):
                continue
            v = certify_secant(K, a, b, thickness=1.0, seed=seed, exhaustive=True)
            for arc in (v.forward, v.backward):
                counts[arc.status] += 1
            if np.linalg.norm(a.point - b.point) < 1:
                ball_total += 1
                if v.status != INESSENTIAL:
                    ball_bad.append(seed)
    ok = not ball_bad and ball_total > 0
    report(12, "essentiality soundness", ok,
           f"no conflicting certificates over 50 seeds ({counts}); {ball_total - len(ball_bad)}/{ball_total} "
           f"secants with chord under 1 certified inessential" + (f"; failures at seeds {ball_bad}" if ball_bad else ""))
