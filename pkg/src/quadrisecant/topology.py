"""Essential secants: Theta-graphs, zero-linking parallels, Wirtinger
presentations, finite-quotient certificates and knot signatures.

Essentiality is three-valued.  ``essential_certified`` needs a
homomorphism of the knot group to a finite group under which the parallel
loop survives; ``inessential_certified`` needs a constructive disk
criterion.  Anything else is ``inconclusive``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy

from . import groups as grp
from .errors import (
    CannotEmbed,
    CertificateConflict,
    NoneCertified,
    NotDisjoint,
    OffsetCollision,
    ProjectionDegenerate,
    ValidationError,
)
from .geom3 import batch_segment_distance
from .knot import Arc, KnotPoint, PolygonalKnot
from .projection import Projection, crossings, with_retries
from .tolerances import DEFAULT_TOL, ToleranceConfig

ESSENTIAL = "essential_certified"
INESSENTIAL = "inessential_certified"
INCONCLUSIVE = "inconclusive"


def _polygon(K) -> np.ndarray:
    return K.vertices if isinstance(K, PolygonalKnot) else np.asarray(K, dtype=float)


def _segs(P: np.ndarray, closed: bool = True):
    return (P, np.roll(P, -1, axis=0)) if closed else (P[:-1], P[1:])


def polyline_distance(A: np.ndarray, B: np.ndarray, closed_a=True, closed_b=True) -> float:
    a0, a1 = _segs(A, closed_a)
    b0, b1 = _segs(B, closed_b)
    d = batch_segment_distance(a0[:, None], a1[:, None], b0[None], b1[None])
    return float(d.min())


# ---------------------------------------------------------------- linking number

def linking_number(c1, c2, seed: int = 0, retries: int = 20) -> int:
    """Linking number of two disjoint closed polylines from signed crossings
    of ``c1`` over ``c2`` in a random generic projection."""
    A, B = _polygon(c1), _polygon(c2)
    if polyline_distance(A, B) <= 1e-12 * max(np.ptp(A), np.ptp(B), 1e-300):
        raise NotDisjoint("closed curves intersect")
    rng = np.random.default_rng(seed)

    def count(proj):
        return sum(c.sign for c in crossings(A, B, proj) if c.first_over)

    return int(with_retries(count, rng, retries))


# ---------------------------------------------------------------- Wirtinger

@dataclass
class WirtingerPresentation:
    """Knot group presentation read from one projection.

    Generator ``k`` is the over-arc that starts at the ``k``-th
    undercrossing (arc 0 wraps through the polygon start).  Relations are
    ``(o, i, j, c)`` with ``x_j = x_o^{-c} x_i x_o^{c}``.
    """

    n_generators: int
    relations: list
    projection: Projection
    under_positions: np.ndarray

    def arc_at(self, pos: float) -> int:
        if self.n_generators <= 1:
            return 0
        return int(np.searchsorted(self.under_positions, pos)) % self.n_generators

    def relator_words(self) -> list:
        """Relators ``x_o^{-c} x_i x_o^{c} x_j^{-1}`` as (generator, exponent) lists."""
        return [[(o, -c), (i, 1), (o, c), (j, -1)] for o, i, j, c in self.relations]

    def abelianization_is_z(self) -> bool:
        parent = list(range(max(self.n_generators, 1)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, i, j, _ in self.relations:
            parent[find(i)] = find(j)
        return len({find(x) for x in range(len(parent))}) == 1


def wirtinger(P: np.ndarray, proj: Projection) -> WirtingerPresentation:
    P = _polygon(P)
    cr = crossings(P, None, proj)
    unders = []
    for c in cr:
        over_pos, under_pos = (c.i + c.s, c.j + c.t) if c.first_over else (c.j + c.t, c.i + c.s)
        unders.append((under_pos, over_pos, c.sign))
    unders.sort()
    m = len(unders)
    upos = np.array([u[0] for u in unders])
    pres = WirtingerPresentation(max(m, 1), [], proj, upos)
    for k, (_, over_pos, sign) in enumerate(unders):
        o = pres.arc_at(over_pos)
        pres.relations.append((o, k % m, (k + 1) % m, sign))
    return pres


def alexander_polynomial(pres: WirtingerPresentation) -> tuple:
    """Normalised Alexander polynomial coefficients (lowest degree first,
    Delta(1) = 1) from the Fox-calculus matrix of ``pres``."""
    m = len(pres.relations)
    if m <= 1:
        return (1,)

    def matrix_at(t):
        M = [[0] * m for _ in range(m)]
        for r, (o, i, j, c) in enumerate(pres.relations):
            if c > 0:
                M[r][o] += t - 1
                M[r][i] += 1
                M[r][j] -= t
            else:
                M[r][o] += 1 - t
                M[r][i] += t
                M[r][j] -= 1
        return sympy.Matrix([row[:-1] for row in M[:-1]])

    xs = list(range(2, m + 2))
    pts = [(x, matrix_at(x).det(method="bareiss")) for x in xs]
    t = sympy.Symbol("t")
    poly = sympy.Poly(sympy.interpolate(pts, t), t)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return (0,)
    if sum(coeffs) < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


@dataclass(frozen=True)
class KnotSignature:
    alexander: tuple
    determinant: int

    @property
    def is_unknot_signature(self) -> bool:
        return self.alexander == (1,)


UNKNOT_SIGNATURE = KnotSignature((1,), 1)


def knot_signature(K, seed: int = 0, retries: int = 20) -> KnotSignature:
    P = _polygon(K)
    rng = np.random.default_rng(seed)
    poly = with_retries(lambda pr: alexander_polynomial(wirtinger(P, pr)), rng, retries)
    det = abs(sum(c * (-1) ** k for k, c in enumerate(poly)))
    return KnotSignature(poly, det)


def crossing_free_view(P: np.ndarray, n_dirs: int = 64) -> Optional[np.ndarray]:
    """A projection direction showing no crossings, if one is found among
    the best-fit-plane normal and a Fibonacci sphere of directions."""
    P = _polygon(P)
    c = P - P.mean(axis=0)
    _, _, vt = np.linalg.svd(c, full_matrices=False)
    dirs = [vt[-1]] + list(fibonacci_sphere(n_dirs))
    for v in dirs:
        try:
            if not crossings(P, None, Projection.along(v)):
                return np.asarray(v)
        except ProjectionDegenerate:
            continue
    return None


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z * z)
    phi = k * math.pi * (3 - math.sqrt(5))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


# ---------------------------------------------------------------- Theta-graphs

@dataclass
class ThetaGraph:
    """Arcs ``alpha`` (a to b), ``beta`` (a to b) and ``gamma`` (b to a)."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    a: Optional[KnotPoint] = None
    b: Optional[KnotPoint] = None
    beta_straight: bool = True

    @property
    def knot(self) -> np.ndarray:
        """The closed polygon alpha + gamma."""
        return np.concatenate([self.alpha[:-1], self.gamma[:-1]])

    @property
    def alpha_beta(self) -> np.ndarray:
        """The closed polygon alpha followed by beta reversed."""
        return np.concatenate([self.alpha[:-1], self.beta[::-1][:-1]])


def _beta_clear(beta: np.ndarray, knot: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    k0, k1 = _segs(knot)
    for p, q in zip(beta[:-1], beta[1:]):
        touching = np.zeros(len(k0), dtype=bool)
        for end in (a, b):
            for X in (k0, k1):
                touching |= np.linalg.norm(X - end, axis=1) <= tol
        # a segment incident to an endpoint may touch beta only there
        d = batch_segment_distance(np.broadcast_to(p, k0.shape), np.broadcast_to(q, k0.shape), k0, k1)
        if np.any(d[~touching] <= tol):
            return False
        for s in np.nonzero(touching)[0]:
            u, v = k1[s] - k0[s], q - p
            if np.linalg.norm(np.cross(u, v)) <= 1e-12 * np.linalg.norm(u) * np.linalg.norm(v):
                return False
            # shared endpoint only: shrink beta slightly away from the shared point
            shr_p = p + 1e-6 * (q - p) if np.linalg.norm(p - k0[s]) <= tol or np.linalg.norm(p - k1[s]) <= tol else p
            shr_q = q - 1e-6 * (q - p) if np.linalg.norm(q - k0[s]) <= tol or np.linalg.norm(q - k1[s]) <= tol else q
            if batch_segment_distance(shr_p[None], shr_q[None], k0[s][None], k1[s][None])[0] <= 1e-12 * tol:
                return False
    return True


def build_theta(K: PolygonalKnot, a: KnotPoint, b: KnotPoint, epsilon: Optional[float] = None,
                seed: int = 0, retries: int = 20,
                tol: ToleranceConfig = DEFAULT_TOL) -> ThetaGraph:
    """Theta-graph of the knot and the secant from ``a`` to ``b``.

    ``beta`` is the straight segment when it misses the rest of the knot,
    otherwise a seeded two-segment detour within ``epsilon`` of it.
    """
    if K.common_straight_subarc(a, b):
        raise ValidationError("secant endpoints lie on a common straight subarc")
    alpha = K.arc_polyline(a, b)
    gamma = K.arc_polyline(b, a)
    knot = np.concatenate([alpha[:-1], gamma[:-1]])
    etol = tol.tol_embed * K.diameter
    beta = np.array([a.point, b.point])
    if _beta_clear(beta, knot, a.point, b.point, etol):
        return ThetaGraph(alpha, beta, gamma, a, b, True)
    rng = np.random.default_rng(seed)
    chord = b.point - a.point
    L = np.linalg.norm(chord)
    eps = epsilon if epsilon is not None else 0.02 * L
    for k in range(retries):
        u = np.cross(chord, rng.normal(size=3))
        u /= np.linalg.norm(u)
        m = 0.5 * (a.point + b.point) + eps * (0.5 + 0.5 * rng.random()) * u
        beta = np.array([a.point, m, b.point])
        if _beta_clear(beta, knot, a.point, b.point, etol):
            return ThetaGraph(alpha, beta, gamma, a, b, False)
    raise CannotEmbed(f"no embedded perturbation of the secant after {retries} tries")


# ---------------------------------------------------------------- parallels

@dataclass
class ParallelLoop:
    delta: np.ndarray
    linking: int
    twists: int
    offset: float


def _rotate(v, axis, ang):
    return (v * math.cos(ang) + np.cross(axis, v) * math.sin(ang)
            + axis * np.dot(axis, v) * (1 - math.cos(ang)))


def _frame(L: np.ndarray, n0: np.ndarray) -> np.ndarray:
    N = len(L)
    u = np.roll(L, -1, axis=0) - L
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    T = u + np.roll(u, 1, axis=0)
    bad = np.linalg.norm(T, axis=1) < 1e-9
    T[bad] = u[bad]
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    n = np.zeros_like(L)
    cur = n0 - np.dot(n0, T[0]) * T[0]
    cur /= np.linalg.norm(cur)
    n[0] = cur
    for k in range(1, N + 1):
        t = T[k % N]
        cur = cur - np.dot(cur, t) * t
        cur /= np.linalg.norm(cur)
        if k < N:
            n[k] = cur
    phi = math.atan2(np.dot(np.cross(n[0], cur), T[0]), np.dot(n[0], cur))
    for k in range(1, N):
        n[k] = _rotate(n[k], T[k], -phi * k / N)
    return n


def _feature_size(theta: ThetaGraph) -> float:
    L = theta.alpha_beta
    l0, l1 = _segs(L)
    sizes = [np.linalg.norm(l1 - l0, axis=1).min()]
    N = len(L)
    i, j = np.triu_indices(N, 2)
    keep = ~((i == 0) & (j == N - 1))
    if keep.any():
        sizes.append(batch_segment_distance(l0[i[keep]], l1[i[keep]], l0[j[keep]], l1[j[keep]]).min())
    g0, g1 = _segs(theta.gamma, closed=False)
    if len(g0) > 0:
        d = batch_segment_distance(l0[:, None], l1[:, None], g0[None], g1[None])
        touch = np.zeros(d.shape, dtype=bool)
        for end in (theta.alpha[0], theta.alpha[-1]):
            at_l = (np.linalg.norm(l0 - end, axis=1) < 1e-12) | (np.linalg.norm(l1 - end, axis=1) < 1e-12)
            at_g = (np.linalg.norm(g0 - end, axis=1) < 1e-12) | (np.linalg.norm(g1 - end, axis=1) < 1e-12)
            touch |= at_l[:, None] & at_g[None, :]
        if (~touch).any():
            sizes.append(d[~touch].min())
    return float(min(sizes))


def _helix(p0, p1, n0, n1, eps, turns, per_turn=12):
    e = (p1 - p0) / np.linalg.norm(p1 - p0)
    m = max(per_turn * abs(turns), 4)
    pts = []
    for k in range(m + 1):
        s = 0.2 + 0.6 * k / m
        n = (1 - s) * n0 + s * n1
        n = n - np.dot(n, e) * e
        n /= np.linalg.norm(n)
        bvec = np.cross(e, n)
        ph = 2 * math.pi * turns * k / m
        pts.append(p0 + s * (p1 - p0) + eps * (math.cos(ph) * n + math.sin(ph) * bvec))
    return np.array(pts)


def parallel_with_zero_linking(theta: ThetaGraph, offset_frac: float = 0.25, seed: int = 0,
                               retries: int = 8) -> ParallelLoop:
    """Push-off of alpha + beta, twisted around alpha until it has zero
    linking number with the knot alpha + gamma."""
    L = theta.alpha_beta
    knot = theta.knot
    rng = np.random.default_rng(seed)
    eps = offset_frac * _feature_size(theta)
    n_alpha = len(theta.alpha) - 1
    for attempt in range(retries):
        n = _frame(L, rng.normal(size=3))
        delta = L + eps * n
        if polyline_distance(delta, knot) < 0.02 * eps:
            if attempt % 2:
                eps *= 0.5
            continue
        lk0 = linking_number(delta, knot, seed=seed)
        if lk0 == 0:
            return ParallelLoop(delta, 0, 0, eps)
        # twist around the longest edge of alpha
        lens = np.linalg.norm(L[1:n_alpha + 1] - L[:n_alpha], axis=1)
        k = int(np.argmax(lens))

        def twisted(w):
            h = _helix(L[k], L[k + 1], n[k], n[k + 1], eps, w)
            return np.concatenate([delta[:k + 1], h, delta[k + 1:]])

        one = twisted(1)
        if polyline_distance(one, knot) < 0.02 * eps:
            eps *= 0.5
            continue
        sigma = linking_number(one, knot, seed=seed) - lk0
        if sigma not in (1, -1):
            eps *= 0.5
            continue
        w = -lk0 * sigma
        cand = twisted(w)
        lk = linking_number(cand, knot, seed=seed)
        if lk == 0 and polyline_distance(cand, knot) >= 0.02 * eps:
            return ParallelLoop(cand, 0, w, eps)
        eps *= 0.5
    raise OffsetCollision("could not build a zero-linking parallel")


# ---------------------------------------------------------------- certificates

@dataclass
class EssentialityVerdict:
    status: str
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness}


def loop_word(delta: np.ndarray, pres: WirtingerPresentation, knot: np.ndarray) -> list:
    """Word of a loop in the knot complement: one letter per passage
    under the knot, read along the loop."""
    cr = crossings(delta, knot, pres.projection)
    letters = sorted((c.i + c.s, pres.arc_at(c.j + c.t), c.sign) for c in cr if not c.first_over)
    return [(g, e) for _, g, e in letters]


def essential_search(theta: ThetaGraph, loop: ParallelLoop, seed: int = 0,
                     groups: Optional[Sequence] = None, time_box: float = 0.2,
                     retries: int = 20):
    """Look for a finite quotient in which the parallel survives.

    Returns a witness dict or None.
    """
    knot = theta.knot
    rng = np.random.default_rng(seed)

    def setup(proj):
        pres = wirtinger(knot, proj)
        return pres, loop_word(loop.delta, pres, knot)

    pres, word = with_retries(setup, rng, retries)
    if sum(e for _, e in word) != loop.linking:
        raise ProjectionDegenerate("loop word disagrees with the linking number")
    deadline = time.perf_counter() + time_box
    for G in (groups if groups is not None else grp.default_groups()):
        for images in grp.homomorphisms(pres.n_generators, pres.relations, G, deadline):
            if not grp.is_identity(grp.evaluate(word, images)):
                return {
                    "criterion": "finite_quotient",
                    "group": G.name,
                    "generator_images": [list(p) for p in images],
                    "loop_word": [[g, e] for g, e in word],
                    "relations": [list(r) for r in pres.relations],
                    "view": pres.projection.view.tolist(),
                }
        if time.perf_counter() > deadline:
            break
    return None


def _arc_in_ball(theta: ThetaGraph, a, b, rel: float = 1e-9) -> bool:
    """alpha inside the closed ball on diameter ab and gamma outside its
    interior: the short-chord arc of a thick knot, not its complement."""
    c, r = 0.5 * (a + b), 0.5 * float(np.linalg.norm(a - b))
    slack = rel * max(r, 1.0)
    if np.linalg.norm(theta.alpha - c, axis=1).max() > r + slack:
        return False
    A, B = theta.gamma[:-1], theta.gamma[1:]
    u = B - A
    t = np.clip(np.einsum("ij,ij->i", c - A, u) / np.einsum("ij,ij->i", u, u), 0.0, 1.0)
    return bool(np.linalg.norm(A + t[:, None] * u - c, axis=1).min() >= r - slack)


def inessential_criteria(theta: ThetaGraph, thickness: Optional[float] = None):
    """Constructive disk criteria; returns a witness dict or None."""
    a, b = theta.alpha[0], theta.alpha[-1]
    if thickness is not None and thickness > 0:
        d = float(np.linalg.norm(a - b)) / thickness
        if d < 1.0 and _arc_in_ball(theta, a, b):
            return {"criterion": "ball", "scaled_distance": d}
    view = crossing_free_view(theta.knot)
    if view is not None:
        return {"criterion": "unknot", "crossing_free_view": view.tolist()}
    sticks = stick_count(theta.knot)
    # knots with trivial Alexander polynomial have crossing number >= 11,
    # hence at least 9 sticks
    if sticks <= 8 and knot_signature(theta.knot).is_unknot_signature:
        return {"criterion": "unknot", "sticks": sticks, "alexander": [1]}
    return None


def stick_count(P: np.ndarray, rel: float = 1e-12) -> int:
    """Number of maximal straight edges of a closed polygon."""
    P = _polygon(P)
    u = np.roll(P, -1, axis=0) - P
    w = np.roll(u, 1, axis=0)
    c = np.linalg.norm(np.cross(w, u), axis=1)
    straight = (c <= rel * np.linalg.norm(w, axis=1) * np.linalg.norm(u, axis=1)) & (
        np.einsum("ij,ij->i", w, u) > 0)
    return int(len(P) - straight.sum())


def certify_essential(theta: ThetaGraph, loop: ParallelLoop, thickness: Optional[float] = None,
                      seed: int = 0, groups: Optional[Sequence] = None, time_box: float = 0.2,
                      exhaustive: bool = False) -> EssentialityVerdict:
    """Three-valued verdict for the ordered triple (alpha, beta, gamma).

    With ``exhaustive`` both certificate paths run and a
    :class:`CertificateConflict` is raised if both succeed.
    """
    if loop.linking != 0:
        raise ValueError("parallel must have zero linking number")
    ines = inessential_criteria(theta, thickness)
    if ines is not None and not exhaustive:
        return EssentialityVerdict(INESSENTIAL, ines)
    ess = essential_search(theta, loop, seed, groups, time_box)
    if ines is not None and ess is not None:
        raise CertificateConflict(f"both certificates fired: {ines['criterion']} / {ess['group']}")
    if ess is not None:
        return EssentialityVerdict(ESSENTIAL, ess)
    if ines is not None:
        return EssentialityVerdict(INESSENTIAL, ines)
    return EssentialityVerdict(INCONCLUSIVE, {})


def certify_arc(K: PolygonalKnot, a: KnotPoint, b: KnotPoint, thickness: Optional[float] = None,
                seed: int = 0, time_box: float = 0.2, exhaustive: bool = False,
                groups: Optional[Sequence] = None,
                tol: ToleranceConfig = DEFAULT_TOL) -> EssentialityVerdict:
    """Verdict for the arc from ``a`` to ``b``."""
    theta = build_theta(K, a, b, seed=seed, tol=tol)
    loop = parallel_with_zero_linking(theta, seed=seed)
    v = certify_essential(theta, loop, thickness, seed, groups, time_box, exhaustive)
    v.witness.setdefault("beta_straight", theta.beta_straight)
    return v


@dataclass
class SecantVerdict:
    forward: EssentialityVerdict
    backward: EssentialityVerdict

    @property
    def status(self) -> str:
        s = {self.forward.status, self.backward.status}
        if s == {ESSENTIAL}:
            return ESSENTIAL
        if INESSENTIAL in s:
            return INESSENTIAL
        return INCONCLUSIVE


def certify_secant(K: PolygonalKnot, a: KnotPoint, b: KnotPoint, **kw) -> SecantVerdict:
    """A secant is essential when both of its arcs are."""
    return SecantVerdict(certify_arc(K, a, b, **kw), certify_arc(K, b, a, **kw))


def essential_quadrisecant_check(K: PolygonalKnot, q, **kw):
    """Certify the class-dependent secants of quadrisecant ``q``.

    A secant between consecutive points on the line is examined when one
    of its arcs contains no other point of the quadrisecant: all three for
    simple, the end secants for flipped, the middle one for alternating.
    """
    from .secants import required_secants

    verdicts = {}
    for x, y in required_secants(q):
        pa, pb = q.points[x], q.points[y]
        verdicts["abcd"[x] + "abcd"[y]] = certify_secant(K, pa, pb, **kw)
    statuses = {v.status for v in verdicts.values()}
    if statuses == {ESSENTIAL}:
        essential = "certified"
    elif INESSENTIAL in statuses:
        essential = "inessential"
    else:
        essential = "inconclusive"
    return q.with_essential(essential, verdicts)


def _seed_for(fa: Fraction, fb: Fraction, base: int) -> int:
    return hash((fa.numerator, fa.denominator, fb.numerator, fb.denominator, base)) & 0x7FFFFFFF


def shortest_essential_arc(K: PolygonalKnot, resolution: int = 24, seed: int = 0,
                           thickness: Optional[float] = None, time_box: float = 0.2,
                           max_checks: Optional[int] = None,
                           tol: ToleranceConfig = DEFAULT_TOL):
    """Shortest certified-essential arc between grid points.

    Grid points sit at arclength fractions k / resolution, so refining the
    resolution by an integer factor searches a superset of arcs.  Returns
    ``(Arc, length, report)``; ``report["min_chord_clearance"]`` is the
    distance from the open secant to the rest of the knot, a diagnostic for
    a nearby trisecant.
    """
    N = int(resolution)
    fr = [Fraction(k, N) for k in range(N)]
    pts = [K.point_at_arclength(float(f) * K.total_length) for f in fr]
    cand = []
    for i in range(N):
        for j in range(N):
            if i == j or K.common_straight_subarc(pts[i], pts[j]):
                continue
            cand.append((float((fr[j] - fr[i]) % 1), i, j))
    cand.sort()
    checked = 0
    for frac, i, j in cand:
        if max_checks is not None and checked >= max_checks:
            break
        checked += 1
        try:
            v = certify_arc(K, pts[i], pts[j], thickness=thickness,
                            seed=_seed_for(fr[i], fr[j], seed), time_box=time_box, tol=tol)
        except (CannotEmbed, OffsetCollision, ProjectionDegenerate):
            continue
        if v.status == ESSENTIAL:
            arc = K.arc(pts[i], pts[j])
            rest = np.concatenate([K.arc_polyline(pts[j], pts[i])])
            chord = np.array([pts[i].point, pts[j].point])
            shrink = chord[0] + np.array([[0.01], [0.99]]) * (chord[1] - chord[0])
            clearance = polyline_distance(shrink, K.vertices, closed_a=False)
            return arc, arc.length, {"verdict": v.to_json(), "checked": checked,
                                     "min_chord_clearance": clearance}
    raise NoneCertified(f"no essential arc certified among {checked} candidates")
