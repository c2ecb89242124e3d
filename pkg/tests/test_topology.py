import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadrisecant import groups as grp
from quadrisecant.errors import NoneCertified, NotDisjoint, ValidationError
from quadrisecant.knot import PolygonalKnot, builtin_knot
from quadrisecant.measures import g, thickness
from quadrisecant.projection import Projection
from quadrisecant.secants import enumerate_quadrisecants
from quadrisecant.topology import (
    ESSENTIAL,
    INESSENTIAL,
    build_theta,
    certify_arc,
    certify_essential,
    certify_secant,
    essential_quadrisecant_check,
    knot_signature,
    linking_number,
    parallel_with_zero_linking,
    shortest_essential_arc,
    stick_count,
    wirtinger,
)

from conftest import convex_polygon, generic_builtin, quads, random_rigid


def _circle(n=64, center=(0, 0, 0), plane="xy", r=1.0):
    a = 2 * np.pi * np.arange(n) / n
    c, s = r * np.cos(a), r * np.sin(a)
    z = np.zeros(n)
    P = {"xy": (c, s, z), "xz": (c, z, s)}[plane]
    return np.stack(P, axis=1) + np.asarray(center, dtype=float)


def _torus_link_component(k, n=64):
    t = 2 * np.pi * np.arange(n) / n
    w = 2 * t + k * np.pi
    r = 2 + np.cos(w)
    return np.stack([r * np.cos(t), r * np.sin(t), np.sin(w)], axis=1)


def random_unknot(seed):
    """Rounded random 7-gon; seeds 1 and 16 are unknots with quadrisecants."""
    rng = np.random.default_rng(seed)
    return PolygonalKnot(np.round(rng.normal(size=(7, 3)), 2), f"unknot7-{seed}", 0)


# ---------------------------------------------------------------- linking numbers

def test_hopf_link():
    assert abs(linking_number(_circle(), _circle(center=(1, 0, 0), plane="xz"))) == 1


def test_far_circles_unlinked():
    assert linking_number(_circle(), _circle(center=(10, 0, 0), plane="xz")) == 0


def test_torus_link_2_4():
    assert abs(linking_number(_torus_link_component(0), _torus_link_component(1))) == 2


def test_linking_sign_flips_with_orientation():
    A, B = _circle(), _circle(center=(1, 0, 0), plane="xz")
    assert linking_number(A, B) == -linking_number(A[::-1], B)


def test_linking_projection_invariant():
    A, B = _torus_link_component(0), _torus_link_component(1)
    values = {linking_number(A, B, seed=s) for s in range(20)}
    assert len(values) == 1


def test_intersecting_curves_rejected():
    with pytest.raises(NotDisjoint):
        linking_number(_circle(), _circle(center=(1, 0, 0)))


# ---------------------------------------------------------------- Wirtinger and signatures

@given(st.sampled_from([("torus", (2, 3), 24), ("figure8_sampled", None, 32),
                        ("torus", (2, 5), 30), ("five_two_sampled", None, 40)]),
       st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_abelianization_is_z(case, seed):
    K = builtin_knot(*case)
    rng = np.random.default_rng(seed)
    pres = wirtinger(K.vertices, Projection.random(rng))
    assert pres.abelianization_is_z()
    assert len(pres.relations) == len(pres.under_positions)


@pytest.mark.parametrize("family,params,n,alex,det", [
    ("round_circle", None, 32, (1,), 1),
    ("torus", (2, 3), 40, (1, -1, 1), 3),
    ("torus", (2, 5), 40, (1, -1, 1, -1, 1), 5),
    ("figure8_sampled", None, 48, (-1, 3, -1), 5),
    ("five_two_sampled", None, 48, (2, -3, 2), 7),
])
def test_signatures(family, params, n, alex, det):
    sig = knot_signature(builtin_knot(family, params, n))
    assert sig.alexander == alex
    assert sig.determinant == det


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15)
def test_signature_rigid_invariance(seed):
    K = builtin_knot("figure8_sampled", None, 32)
    R, t = random_rigid(np.random.default_rng(seed))
    assert knot_signature(K.transformed(R, t), seed=seed % 1000) == knot_signature(K)


def test_mirror_has_same_signature():
    K = builtin_knot("torus", (2, 3), 30)
    M = K.transformed(np.diag([1.0, 1.0, -1.0]))
    assert knot_signature(M) == knot_signature(K)


def test_stick_count_merges_straight_runs():
    P = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]], dtype=float)
    assert stick_count(P) == 4


# ---------------------------------------------------------------- groups

def test_group_orders():
    assert grp.symmetric(4).order == 24
    assert grp.alternating(5).order == 60
    assert grp.dihedral(7).order == 14


def test_trefoil_group_maps_onto_s3():
    K = builtin_knot("torus", (2, 3), 24)
    pres = wirtinger(K.vertices, Projection.along([0.1, 0.2, 1.0]))
    homs = list(grp.homomorphisms(pres.n_generators, pres.relations, grp.symmetric(3)))
    assert any(len({h for h in images}) > 1 for images in homs)
    for images in homs:
        for word in pres.relator_words():
            assert grp.is_identity(grp.evaluate(word, images))


def test_unknot_group_has_only_cyclic_images():
    K = convex_polygon(10)
    pres = wirtinger(K.vertices, Projection.along([0.3, 0.1, 1.0]))
    for images in grp.homomorphisms(pres.n_generators, pres.relations, grp.symmetric(3)):
        assert len(set(images)) == 1


# ---------------------------------------------------------------- Theta-graphs and parallels

def test_convex_theta_has_straight_beta():
    K = convex_polygon(12)
    th = build_theta(K, K.knot_point(0, 0.5), K.knot_point(6, 0.5))
    assert th.beta_straight
    assert len(th.knot) == K.n + 2


def test_theta_rejects_same_edge():
    K = convex_polygon(12)
    with pytest.raises(ValidationError):
        build_theta(K, K.knot_point(3, 0.2), K.knot_point(3, 0.8))


def test_middle_secant_theta_is_embedded(hex_trefoil, hex_quads):
    q = hex_quads[0]
    th = build_theta(hex_trefoil, q.b, q.c)
    assert np.allclose(th.beta[0], q.b.point) and np.allclose(th.beta[-1], q.c.point)
    loop = parallel_with_zero_linking(th)
    assert loop.linking == 0
    assert linking_number(loop.delta, th.knot, seed=3) == 0


def test_unknot_chord_parallel_unlinked():
    K = convex_polygon(16)
    th = build_theta(K, K.knot_point(1, 0.3), K.knot_point(9, 0.6))
    loop = parallel_with_zero_linking(th)
    assert linking_number(loop.delta, th.knot) == 0
    assert loop.offset > 0


# ---------------------------------------------------------------- certificates

def test_unknot_secants_inessential():
    K = convex_polygon(16)
    v = certify_secant(K, K.knot_point(2, 0.1), K.knot_point(10, 0.4))
    assert v.status == INESSENTIAL
    assert v.forward.witness["criterion"] == "unknot"


def test_trefoil_middle_secant_essential(hex_trefoil, hex_quads):
    for q in hex_quads:
        v = certify_secant(hex_trefoil, q.b, q.c)
        assert v.status == ESSENTIAL
        w = v.forward.witness
        assert w["group"] in {G.name for G in grp.default_groups()}
        images = [tuple(p) for p in w["generator_images"]]
        word = [tuple(x) for x in w["loop_word"]]
        assert not grp.is_identity(grp.evaluate(word, images))
        rels = [tuple(r) for r in w["relations"]]
        for o, i, j, c in rels:
            conj = grp.power(images[o], c)
            assert images[j] == grp.mul(grp.mul(grp.inv(conj), images[i]), conj)


def test_ball_criterion_on_unit_thickness():
    K = builtin_knot("torus", (2, 3), 64)
    K = K.transformed(scale=1.0 / thickness(K.vertices))
    a = K.knot_point(10, 0.0)
    b = K.knot_point(11, 0.5)
    v = certify_arc(K, a, b, thickness=1.0)
    assert np.linalg.norm(a.point - b.point) < 1
    assert v.status == INESSENTIAL and v.witness["criterion"] == "ball"


def test_ball_criterion_skips_the_long_arc():
    K = builtin_knot("torus", (2, 3), 64)
    K = K.transformed(scale=1.0 / thickness(K.vertices))
    a, b = K.knot_point(10, 0.0), K.knot_point(11, 0.5)
    long_arc = certify_arc(K, b, a, thickness=1.0, exhaustive=True)
    assert long_arc.witness.get("criterion") != "ball"
    assert certify_secant(K, a, b, thickness=1.0).status == INESSENTIAL


@pytest.mark.parametrize("seed", range(8))
def test_no_conflicting_certificates(seed):
    K = generic_builtin("torus", (2, 3), 24, seed)
    L = K.total_length
    rng = np.random.default_rng(seed)
    for _ in range(3):
        s0, s1 = rng.uniform(0, L, 2)
        a, b = K.point_at_arclength(s0), K.point_at_arclength(s1)
        if K.common_straight_subarc(a, b):
            continue
        certify_arc(K, a, b, seed=seed, exhaustive=True)


def test_alternating_on_trefoil_certified(hex_trefoil, hex_quads):
    q = essential_quadrisecant_check(hex_trefoil, hex_quads[0])
    assert q.essential == "certified"
    assert set(q.verdicts) == {"bc"}


def test_flipped_examines_end_secants():
    K = random_unknot(1)
    (q,) = enumerate_quadrisecants(K)
    assert q.dihedral_class == "flipped"
    q = essential_quadrisecant_check(K, q)
    assert set(q.verdicts) == {"ab", "cd"}
    assert q.essential == "inessential"


def test_unknot_alternating_quadrisecants_not_essential():
    K = random_unknot(16)
    assert knot_signature(K).is_unknot_signature
    qs = enumerate_quadrisecants(K)
    assert [q.dihedral_class for q in qs] == ["alternating"] * 3
    assert all(essential_quadrisecant_check(K, q).essential == "inessential" for q in qs)


def test_simple_examines_three_secants():
    K = random_unknot(2)
    (q,) = enumerate_quadrisecants(K)
    assert q.dihedral_class == "simple"
    assert set(essential_quadrisecant_check(K, q).verdicts) == {"ab", "bc", "cd"}


# ---------------------------------------------------------------- shortest essential arc

def test_shortest_essential_arc_unknot():
    with pytest.raises(NoneCertified):
        shortest_essential_arc(convex_polygon(12), resolution=8)


@pytest.mark.slow
def test_shortest_essential_arc_trefoil_respects_length_bound():
    K = builtin_knot("torus", (2, 3), 48)
    K = K.transformed(scale=1.0 / thickness(K.vertices))
    arc, length, rep = shortest_essential_arc(K, resolution=16, thickness=1.0)
    chord = float(np.linalg.norm(arc.start.point - arc.end.point))
    assert chord >= 1.0
    assert length >= 0.98 * g(chord) >= 0.98 * math.pi
    assert "min_chord_clearance" in rep


@pytest.mark.slow
def test_refined_search_not_longer():
    K = builtin_knot("torus", (2, 3), 48)
    _, coarse, _ = shortest_essential_arc(K, resolution=12)
    _, fine, _ = shortest_essential_arc(K, resolution=24)
    assert fine <= coarse + 1e-12
