"""Secants, trisecants and quadrisecants of polygonal knots.

Edge quadruples fall into three solvable shapes: four pairwise
non-adjacent edges (quadric through three of them, cut by the fourth),
one adjacent pair plus two loose edges (the line lies in the plane of the
pair), and two adjacent pairs (intersection of two planes).  Quadruples
containing three consecutive edges carry no quadrisecant.  Edge
parameters are half-open, ``[0, 1)``, so a line through a vertex is
counted on the edge that starts there.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import FiveSecantDetected, MissingMetadata, NotGeneric
from .geom3 import (OrientedLine, batch_line_edge_params, batch_line_quadric_roots, batch_quadrics,
                    batch_surface_distance)
from .knot import KnotPoint, PolygonalKnot, check_genericity, iter_combinations
from .tolerances import DEFAULT_TOL, ToleranceConfig

LABELS = "abcd"
SIMPLE, FLIPPED, ALTERNATING = "simple", "flipped", "alternating"


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class Secant:
    a: KnotPoint
    b: KnotPoint

    @property
    def line(self) -> OrientedLine:
        return OrientedLine.through(self.a.point, self.b.point)


@dataclass(frozen=True)
class Trisecant:
    """Three knot points in order along the line.

    ``order_class`` is ``direct`` when the knot visits them cyclically as
    a, b, c and ``reversed`` when it visits a, c, b.
    """

    a: KnotPoint
    b: KnotPoint
    c: KnotPoint
    order_class: str

    @property
    def line(self) -> OrientedLine:
        return OrientedLine.through(self.a.point, self.c.point)


@dataclass(frozen=True)
class Quadrisecant:
    """Four knot points listed in order along ``line`` as a, b, c, d.

    ``knot_order`` spells the cyclic order in which the knot meets them,
    reduced to the representative starting at ``a`` with ``b`` before
    ``d``.  ``r, s, t`` are the consecutive gaps along the line.
    """

    points: tuple
    line: OrientedLine
    knot_order: str
    dihedral_class: str
    r: float
    s: float
    t: float
    essential: str = "unchecked"
    verdicts: Optional[dict] = field(default=None, compare=False, repr=False)

    a = property(lambda self: self.points[0])
    b = property(lambda self: self.points[1])
    c = property(lambda self: self.points[2])
    d = property(lambda self: self.points[3])

    @property
    def edges(self) -> tuple:
        return tuple(p.edge_index for p in self.points)

    @property
    def line_order(self) -> str:
        """Line order of the points when they are labelled a, b, c, d in
        knot order."""
        pos = {ch: k for k, ch in enumerate(self.knot_order)}
        return "".join(LABELS[pos[ch]] for ch in LABELS)

    def sub_trisecants(self) -> list:
        out = []
        for drop in range(4):
            idx = [k for k in range(4) if k != drop]
            pts = [self.points[k] for k in idx]
            labels = [LABELS[k] for k in idx]
            cyc = [ch for ch in self.knot_order if ch in labels]
            k0 = cyc.index(labels[0])
            direct = cyc[(k0 + 1) % 3] == labels[1]
            out.append(Trisecant(*pts, "direct" if direct else "reversed"))
        return out

    def with_essential(self, essential: str, verdicts: Optional[dict] = None) -> "Quadrisecant":
        return replace(self, essential=essential, verdicts=verdicts)

    def sort_key(self):
        return tuple(sorted((p.edge_index, round(p.t, 12)) for p in self.points))

    def to_json(self) -> dict:
        out = {
            "class": self.dihedral_class,
            "knot_order": self.knot_order,
            "edges": list(self.edges),
            "params": [p.t for p in self.points],
            "points": [p.point.tolist() for p in self.points],
            "r": self.r, "s": self.s, "t": self.t,
            "line": {"base": self.line.base.tolist(), "direction": self.line.direction.tolist()},
            "essential": self.essential,
        }
        if self.verdicts:
            out["secants"] = {
                k: {"forward": v.forward.to_json(), "backward": v.backward.to_json(), "status": v.status}
                for k, v in self.verdicts.items()
            }
        return out


CSV_HEADER = ["edge_a", "edge_b", "edge_c", "edge_d", "t_a", "t_b", "t_c", "t_d", "class",
              "r", "s", "t", "base_x", "base_y", "base_z", "dir_x", "dir_y", "dir_z"]


def csv_rows(qs) -> list:
    rows = []
    for q in qs:
        rows.append(list(q.edges) + [p.t for p in q.points] + [q.dihedral_class, q.r, q.s, q.t]
                    + q.line.base.tolist() + q.line.direction.tolist())
    return rows


# ---------------------------------------------------------------- classification

def classify_dihedral(knot_order_points, line_order) -> str:
    """Dihedral class of four labels met cyclically in ``knot_order_points``
    and linearly in ``line_order``.

    After relabelling the line order as a, b, c, d, the class is read off
    from the label diametrically opposite ``a`` in the knot cycle:
    c for simple, d for flipped, b for alternating.
    """
    knot = list(knot_order_points)
    line = list(line_order)
    if len(set(knot)) != 4 or sorted(knot) != sorted(line):
        raise ValueError("need four distinct labels in both orders")
    rel = {x: LABELS[k] for k, x in enumerate(line)}
    cyc = [rel[x] for x in knot]
    opp = cyc[(cyc.index("a") + 2) % 4]
    return {"c": SIMPLE, "d": FLIPPED, "b": ALTERNATING}[opp]


def canonical_knot_order(cyc) -> str:
    """Representative of a cyclic label order: starts at ``a``, ``b``
    before ``d``."""
    cyc = list(cyc)
    k = cyc.index("a")
    fwd = cyc[k:] + cyc[:k]
    bwd = [fwd[0]] + fwd[1:][::-1]
    return "".join(fwd if fwd.index("b") < fwd.index("d") else bwd)


def required_secants(q: Quadrisecant) -> list:
    """Consecutive line pairs with an arc free of the other two points:
    simple ab, bc, cd; flipped ab, cd; alternating bc."""
    out = []
    for x in range(3):
        u, v = LABELS[x], LABELS[x + 1]
        i, j = q.knot_order.index(u), q.knot_order.index(v)
        if (i - j) % 4 in (1, 3):
            out.append((x, x + 1))
    return out


# ---------------------------------------------------------------- enumeration core

@dataclass
class _Scene:
    A: np.ndarray      # normalised edge starts
    D: np.ndarray      # edge vectors
    lo: np.ndarray     # edge boxes
    hi: np.ndarray
    n: int


def _scene(K: PolygonalKnot) -> _Scene:
    V = K.vertices
    c = 0.5 * (V.max(axis=0) + V.min(axis=0))
    X = (V - c) / K.diameter
    D = np.roll(X, -1, axis=0) - X
    B = X + D
    return _Scene(X, D, np.minimum(X, B), np.maximum(X, B), len(X))


def _boxes_meet(lo1, hi1, lo2, hi2, pad):
    return np.all((lo1 <= hi2 + pad) & (lo2 <= hi1 + pad), axis=-1)


def _triple_ok(S: _Scene, x, y, z, pad=1e-9):
    """Necessary condition for a line through three edges: the middle hit
    lies in the box of the other two edges."""
    ok = np.zeros(np.shape(x), dtype=bool)
    for m, p, q in ((x, y, z), (y, x, z), (z, x, y)):
        lo = np.minimum(S.lo[p], S.lo[q])
        hi = np.maximum(S.hi[p], S.hi[q])
        ok |= _boxes_meet(S.lo[m], S.hi[m], lo, hi, pad)
    return ok


def _adj(i, j, n):
    d = np.abs(i - j)
    return (d == 1) | (d == n - 1)


def _skew_candidates(S: _Scene, T: np.ndarray, tol: ToleranceConfig, prefilter: bool):
    """Transversal candidates for quadruples (i, j, k, l), l > k, all
    pairwise non-adjacent, from the quadric through edges i, j, k."""
    n = S.n
    i, j, k = T[:, 0], T[:, 1], T[:, 2]
    if prefilter:
        keep = _triple_ok(S, i, j, k)
        T, i, j, k = T[keep], i[keep], j[keep], k[keep]
    if len(T) == 0:
        return None
    L = np.arange(n)[None, :]
    ok = (L >= k[:, None] + 2) & ~((i[:, None] == 0) & (L == n - 1))
    ti, l = np.nonzero(ok)
    if prefilter and len(ti):
        keep = (_triple_ok(S, i[ti], j[ti], l) & _triple_ok(S, i[ti], k[ti], l)
                & _triple_ok(S, j[ti], k[ti], l))
        ti, l = ti[keep], l[keep]
    if len(ti) == 0:
        return None
    used = np.unique(ti)
    Q, cond = batch_quadrics(S.A[T[used]], S.D[T[used]])
    remap = np.full(len(T), -1)
    remap[used] = np.arange(len(used))
    bad = cond[remap[ti]] > tol.cond_max
    fallback = None
    if bad.any():
        # lines not pairwise skew: the quadric is not unique
        fq = np.stack([i[ti[bad]], j[ti[bad]], k[ti[bad]], l[bad]], axis=1)
        fallback = _plucker_candidates(S, fq)
        ti, l = ti[~bad], l[~bad]
    Qp = Q[remap[ti]]
    t1, t2, contained = batch_line_quadric_roots(Qp, S.A[l], S.D[l], tol.tol_quadric)
    if contained.any():
        c = np.nonzero(contained)[0]
        X = S.A[l[c], None, :] + np.array([0.0, 0.5, 1.0])[None, :, None] * S.D[l[c], None, :]
        far = batch_surface_distance(Qp[c, None], X).max(axis=1) >= tol.tol_quadric
        contained[c[far]] = False
    events = [tuple(int(x) for x in T[a]) + (int(b),) for a, b in zip(ti[contained], l[contained])]
    pts, dirs, quads = [], [], []
    for tau in (t1, t2):
        good = np.isfinite(tau) & (tau > -tol.tol_param_snap) & (tau < 1 - tol.tol_param_snap)
        if not good.any():
            continue
        a, ll, tt = ti[good], l[good], np.clip(tau[good], 0.0, None)
        X = S.A[ll] + tt[:, None] * S.D[ll]
        ni = np.cross(S.D[i[a]], S.A[i[a]] - X)
        nj = np.cross(S.D[j[a]], S.A[j[a]] - X)
        d = np.cross(ni, nj)
        pts.append(X)
        dirs.append(d)
        quads.append(np.stack([i[a], j[a], k[a], ll], axis=1))
    if fallback is not None:
        pts.append(fallback[0])
        dirs.append(fallback[1])
        quads.append(fallback[2])
    if not pts:
        return [np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 4), dtype=int), events]
    return [np.concatenate(pts), np.concatenate(dirs), np.concatenate(quads), events]


def _plucker_candidates(S: _Scene, quads: np.ndarray):
    """Common transversals of four lines per row of ``quads`` from the
    pencil of lines reciprocal to all four, cut by the Klein quadric."""
    A, D = S.A[quads], S.D[quads]
    M = np.cross(A, D)
    rows = np.concatenate([M, D], axis=-1)               # reciprocal rows
    _, sv, vt = np.linalg.svd(rows)
    finite = sv[:, 3] > 1e-9 * sv[:, 0]
    v1, v2 = vt[:, 4], vt[:, 5]

    def klein(x, y):
        return np.einsum("ij,ij->i", x[:, :3], y[:, 3:]) + np.einsum("ij,ij->i", y[:, :3], x[:, 3:])

    a, b, c = 0.5 * klein(v1, v1), klein(v1, v2), 0.5 * klein(v2, v2)
    disc = b * b - 4 * a * c
    ok = finite & (disc >= 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    pts, dirs, qs = [], [], []
    for sgn in (1.0, -1.0):
        # (mu, lam) with a mu^2 + b mu lam + c lam^2 = 0
        use_mu = np.abs(a) >= np.abs(c)
        with np.errstate(divide="ignore", invalid="ignore"):
            r_mu = np.where(use_mu, (-b + sgn * sq) / (2 * a), 1.0)
            r_lam = np.where(use_mu, 1.0, (-b + sgn * sq) / (2 * c))
        L = np.where(use_mu[:, None], r_mu[:, None] * v1 + v2, v1 + r_lam[:, None] * v2)
        Dl, Ml = L[:, :3], L[:, 3:]
        nd = np.einsum("ij,ij->i", Dl, Dl)
        good = ok & np.all(np.isfinite(L), axis=1) & (nd > 1e-18 * np.einsum("ij,ij->i", L, L))
        P = np.cross(Dl, Ml) / np.where(nd > 0, nd, 1.0)[:, None]
        pts.append(P[good])
        dirs.append(Dl[good])
        qs.append(quads[good])
    return np.concatenate(pts), np.concatenate(dirs), np.concatenate(qs)


def _plane_point(S: _Scene, e, N, V0, j):
    den = np.einsum("ij,ij->i", N, S.D[j])
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.einsum("ij,ij->i", N, V0 - S.A[j]) / den
    return S.A[j] + tau[:, None] * S.D[j]


def _run_candidates(S: _Scene, prefilter: bool):
    """Candidates for quadruples containing one or two adjacent pairs."""
    n = S.n
    pts, dirs, quads = [], [], []
    for i in range(n):
        i1 = (i + 1) % n
        rest = np.array([e for e in range(n) if e not in {(i - 1) % n, i, i1, (i + 2) % n}])
        if len(rest) < 2:
            continue
        N0 = np.cross(S.D[i], S.D[i1])
        V0 = S.A[i1]
        # one adjacent pair plus two loose edges
        a, b = np.triu_indices(len(rest), 1)
        j, k = rest[a], rest[b]
        sel = ~_adj(j, k, n)
        j, k = j[sel], k[sel]
        if len(j):
            m = len(j)
            N = np.broadcast_to(N0, (m, 3))
            Vb = np.broadcast_to(V0, (m, 3))
            Xj = _plane_point(S, i, N, Vb, j)
            Xk = _plane_point(S, i, N, Vb, k)
            pts.append(Xj)
            dirs.append(Xk - Xj)
            quads.append(np.stack([np.full(m, i), np.full(m, i1), j, k], axis=1))
        # two adjacent pairs (each unordered pair of runs once)
        js = np.array([e for e in range(n) if (e - i) % n >= 3 and (i - e) % n >= 3 and e > i])
        if len(js):
            j1 = (js + 1) % n
            N2 = np.cross(S.D[js], S.D[j1])
            d = np.cross(np.broadcast_to(N0, N2.shape), N2)
            # point on both planes: solve in the span of the two normals
            h1 = N0 @ V0
            h2 = np.einsum("ij,ij->i", N2, S.A[j1])
            n11 = N0 @ N0
            n22 = np.einsum("ij,ij->i", N2, N2)
            n12 = N2 @ N0
            det = n11 * n22 - n12 ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                c1 = (h1 * n22 - h2 * n12) / det
                c2 = (h2 * n11 - h1 * n12) / det
            P = c1[:, None] * N0[None, :] + c2[:, None] * N2
            pts.append(P)
            dirs.append(d)
            quads.append(np.stack([np.full(len(js), i), np.full(len(js), i1), js, j1], axis=1))
    if not pts:
        return np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 4), dtype=int)
    P, D, Qd = np.concatenate(pts), np.concatenate(dirs), np.concatenate(quads)
    if prefilter and len(Qd):
        keep = np.ones(len(Qd), dtype=bool)
        for x, y, z in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
            keep &= _triple_ok(S, Qd[:, x], Qd[:, y], Qd[:, z])
        P, D, Qd = P[keep], D[keep], Qd[keep]
    return P, D, Qd


def _validate(S: _Scene, P, D, Qd, tol: ToleranceConfig):
    """Keep candidate lines that meet all four edges inside ``[0, 1)``."""
    nrm = np.linalg.norm(D, axis=1)
    ok = np.isfinite(nrm) & (nrm > 1e-12) & np.all(np.isfinite(P), axis=1)
    P, D, Qd = P[ok], D[ok] / nrm[ok, None], Qd[ok]
    if len(P) == 0:
        return P, D
    u, t, res = batch_line_edge_params(P[:, None, :], D[:, None, :], S.A[Qd], S.D[Qd])
    snap = tol.tol_param_snap
    good = np.all((res < tol.tol_hit) & (t > -snap) & (t < 1 - snap), axis=1)
    return P[good], D[good]


def _dedup_lines(P, D, tol: float):
    """Drop repeated lines (unoriented)."""
    if len(P) == 0:
        return P, D
    sign = np.where(D[np.arange(len(D)), np.argmax(np.abs(D), axis=1)] < 0, -1.0, 1.0)
    D = D * sign[:, None]
    base = P - np.einsum("ij,ij->i", P, D)[:, None] * D
    keep = []
    for k in range(len(P)):
        if keep:
            kk = np.array(keep)
            close = (np.linalg.norm(D[kk] - D[k], axis=1) < tol) & (np.linalg.norm(base[kk] - base[k], axis=1) < tol)
            if close.any():
                continue
        keep.append(k)
    return base[keep], D[keep]


def _all_hits(S: _Scene, P, D, tol: ToleranceConfig):
    """Edge hits of each line against every edge, merged by position."""
    u, t, res = batch_line_edge_params(P[:, None, :], D[:, None, :], S.A[None], S.D[None])
    snap = tol.tol_param_snap
    t = np.where((t > -snap) & (t < 0), 0.0, t)
    hit = (res < tol.tol_hit) & (t >= 0) & (t < 1 - snap)
    out = []
    for m in range(len(P)):
        es = np.nonzero(hit[m])[0]
        order = np.argsort(u[m, es])
        merged = []
        for e in es[order]:
            if merged and abs(u[m, e] - u[m, merged[-1]]) < tol.tol_hit:
                continue
            merged.append(int(e))
        out.append([(e, float(t[m, e]), float(u[m, e])) for e in merged])
    return out


def _build(K: PolygonalKnot, hits) -> Quadrisecant:
    kps = [K.knot_point(e, t) for e, t, _ in hits]
    pos = [K.arclength_of(p) for p in kps]
    order = np.argsort(pos)
    cyc = [LABELS[k] for k in order]
    ko = canonical_knot_order(cyc)
    line = OrientedLine.through(kps[0].point, kps[3].point)
    gaps = [float(np.linalg.norm(kps[k + 1].point - kps[k].point)) for k in range(3)]
    return Quadrisecant(tuple(kps), line, ko, classify_dihedral(ko, LABELS), *gaps)


def enumerate_quadrisecants(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL,
                            check: bool = True, require_generic: bool = True,
                            prefilter: bool = True, threads: int = 1,
                            chunk: int = 20_000, with_excess: bool = False):
    """All quadrisecants of ``K``, deterministically sorted.

    ``check`` runs the vertex and quadric genericity tests first
    (:class:`NotGeneric` on failure).  With ``require_generic`` a line
    meeting five or more edges raises :class:`FiveSecantDetected`;
    otherwise such lines are skipped (or returned separately when
    ``with_excess`` is set).
    """
    if check:
        rep = check_genericity(K, tol, check_secants=False)
        if not rep.is_generic:
            raise NotGeneric(f"knot is not generic: {rep.summary()}", rep)
    S = _scene(K)
    n = S.n
    triples = [T[~(_adj(T[:, 0], T[:, 1], n) | _adj(T[:, 1], T[:, 2], n) | _adj(T[:, 0], T[:, 2], n))]
               for T in iter_combinations(n, 3, chunk)]
    triples = [T for T in triples if len(T)]

    def work(T):
        return _skew_candidates(S, T, tol, prefilter)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(work, triples))
    else:
        parts = [work(T) for T in triples]
    parts = [p for p in parts if p is not None]
    events = [e for p in parts for e in p[3]]
    if events and require_generic:
        raise NotGeneric(f"edge contained in the quadric of three others: {events[0]}")
    Pr, Dr, Qr = _run_candidates(S, prefilter)
    P = np.concatenate([p[0] for p in parts] + [Pr]) if parts else Pr
    D = np.concatenate([p[1] for p in parts] + [Dr]) if parts else Dr
    Qd = np.concatenate([p[2] for p in parts] + [Qr]) if parts else Qr
    P, D = _validate(S, P, D, Qd, tol)
    P, D = _dedup_lines(P, D, tol.tol_line)
    result, excess = [], []
    for m, hits in enumerate(_all_hits(S, P, D, tol)):
        if len(hits) < 4:
            continue
        if len(hits) > 4:
            if require_generic:
                w = [K.knot_point(e, t).point.tolist() for e, t, _ in hits]
                raise FiveSecantDetected(f"line meets the knot {len(hits)} times", w)
            excess.append(hits)
            continue
        result.append(_build(K, hits))
    result.sort(key=Quadrisecant.sort_key)
    if with_excess:
        return result, excess
    return result


def five_secants(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Lines meeting the knot in five or more points (point lists)."""
    _, excess = enumerate_quadrisecants(K, tol, check=False, require_generic=False, with_excess=True)
    return [[K.knot_point(e, t).point.tolist() for e, t, _ in h] for h in excess]


def quadrisecant_upper_bound(n: int) -> int:
    """Maximum number of generic quadrisecants of an n-gon."""
    return n * (n - 3) * (n - 4) * (n - 5) // 12


def pannwitz_lower_check(K: PolygonalKnot, qs=None, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """At least 2 u^2 quadrisecants for unknotting number u."""
    if K.unknotting_number is None:
        raise MissingMetadata("unknotting number not provided")
    if qs is None:
        qs = enumerate_quadrisecants(K, tol)
    return len(qs) >= 2 * K.unknotting_number ** 2


# ---------------------------------------------------------------- trisecants

@dataclass
class TrisecantFamily:
    """One connected family of trisecant lines through edges
    ``edge_triple``.

    The family is parametrised by ``s``, the parameter of the hit on the
    first edge, over ``interval``; ``params`` holds the three edge
    parameters at the sampled lines.  ``topology`` is ``closed_interval``,
    ``half_open`` (the open end degenerates into a shared vertex) or
    ``point``.
    """

    edge_triple: tuple
    topology: str
    interval: tuple
    params: np.ndarray

    def points(self, K: PolygonalKnot) -> np.ndarray:
        V, E = K.vertices, K.edge_vectors
        idx = np.array(self.edge_triple)
        return V[idx][None] + self.params[..., None] * E[idx][None]


def _mobius_fit(s, t):
    """Fractional-linear map through three samples, as (a, b, c, d) with
    t = (a s + b) / (c s + d)."""
    M = np.array([[s[k], 1.0, -s[k] * t[k], -t[k]] for k in range(3)])
    _, _, vt = np.linalg.svd(M)
    return vt[-1]


def _mobius_preimage_breaks(m, values=(0.0, 1.0)):
    a, b, c, d = m
    out = []
    for v in values:
        den = a - v * c
        if abs(den) > 1e-14 * (abs(a) + abs(c) + 1e-300):
            out.append((v * d - b) / den)
    if abs(c) > 1e-14 * (abs(a) + abs(d) + 1e-300):
        out.append(-d / c)
    return out


def _mobius_eval(m, s):
    a, b, c, d = m
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a * s + b) / (c * s + d)


def _transversal_params(S: _Scene, x, i, j, k):
    """Parameters on lines j, k of the transversal through point ``x``."""
    nj = np.cross(S.D[j], S.A[j] - x)
    nk = np.cross(S.D[k], S.A[k] - x)
    d = np.cross(nj, nk)
    _, tj, _ = batch_line_edge_params(x, d, S.A[j], S.D[j])
    _, tk, _ = batch_line_edge_params(x, d, S.A[k], S.D[k])
    return tj, tk


def _intervals(breaks, ok_at, lo=0.0, hi=1.0, tiny=1e-12):
    pts = sorted({lo, hi, *[b for b in breaks if lo < b < hi]})
    good = []
    for p, q in zip(pts[:-1], pts[1:]):
        if q - p > tiny and ok_at(0.5 * (p + q)):
            if good and abs(good[-1][1] - p) <= tiny:
                good[-1] = (good[-1][0], q)
            else:
                good.append((p, q))
    return good


def _sample(interval, step):
    p, q = interval
    m = max(int(np.ceil((q - p) / step)), 1)
    return p + (q - p) * np.arange(m + 1) / m


def trisecant_families(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL,
                       check: bool = True) -> list:
    """Connected trisecant families of every edge triple.

    Transversals of three lines induce fractional-linear maps between
    their parameters, so each family is cut out of the first edge by
    exact breakpoints and then sampled at ``tol.family_step``.
    """
    if check:
        rep = check_genericity(K, tol, check_secants=False)
        if not rep.is_generic:
            raise NotGeneric(f"knot is not generic: {rep.summary()}", rep)
    S = _scene(K)
    n = S.n
    out = []
    probe = np.array([0.1, 0.5, 0.9])
    for T in iter_combinations(n, 3):
        for i, j, k in T.tolist():
            a_ij, a_jk, a_ik = _adj(i, j, n), _adj(j, k, n), _adj(i, k, n)
            n_adj = int(a_ij) + int(a_jk) + int(a_ik)
            if n_adj >= 2:
                continue
            if n_adj == 0:
                fam = _skew_family(S, (i, j, k), probe, tol)
            else:
                pair = (i, j) if a_ij else (j, k) if a_jk else (i, k)
                loose = ({i, j, k} - set(pair)).pop()
                first = pair[0] if (pair[1] - pair[0]) % n == 1 else pair[1]
                fam = _pair_family(S, first, (first + 1) % n, loose, tol)
            out.extend(fam)
    return out


def _skew_family(S, triple, probe, tol):
    i, j, k = triple
    X = S.A[i][None] + probe[:, None] * S.D[i][None]
    tj, tk = _transversal_params(S, X, i, np.full(3, j), np.full(3, k))
    if not (np.all(np.isfinite(tj)) and np.all(np.isfinite(tk))):
        return []
    mj, mk = _mobius_fit(probe, tj), _mobius_fit(probe, tk)

    def ok(s):
        u, v = _mobius_eval(mj, s), _mobius_eval(mk, s)
        return 0 <= u <= 1 and 0 <= v <= 1

    fams = []
    for iv in _intervals(_mobius_preimage_breaks(mj) + _mobius_preimage_breaks(mk), ok):
        s = _sample(iv, tol.family_step)
        P = np.stack([s, _mobius_eval(mj, s), _mobius_eval(mk, s)], axis=1)
        topo = "point" if iv[1] - iv[0] <= tol.tol_param_snap else "closed_interval"
        fams.append(TrisecantFamily((i, j, k), topo, iv, np.clip(P, 0.0, 1.0)))
    return fams


def _pair_family(S, i, i1, j, tol):
    """Lines in the plane of edges i, i+1 through the point where edge j
    crosses that plane."""
    N = np.cross(S.D[i], S.D[i1])
    den = N @ S.D[j]
    if abs(den) <= 1e-14 * np.linalg.norm(N) * np.linalg.norm(S.D[j]):
        return []
    tau = N @ (S.A[i1] - S.A[j]) / den
    if not (0 <= tau <= 1):
        return []
    X = S.A[j] + tau * S.D[j]

    def hit_i1(s):
        P = S.A[i] + np.asarray(s)[..., None] * S.D[i]
        _, t, _ = batch_line_edge_params(X, P - X, S.A[i1], S.D[i1])
        return t

    probe = np.array([0.1, 0.5, 0.9])
    m = _mobius_fit(probe, hit_i1(probe))

    def ok(s):
        v = _mobius_eval(m, s)
        return 0 <= v <= 1

    fams = []
    for iv in _intervals(_mobius_preimage_breaks(m), ok):
        s = _sample(iv, tol.family_step)
        if iv[1] >= 1.0 - 1e-12:
            s = s[:-1]      # s = 1 is the shared vertex, a degenerate limit
            topo = "half_open"
        else:
            topo = "closed_interval"
        if len(s) == 0:
            continue
        P = np.stack([s, _mobius_eval(m, s), np.full(len(s), tau)], axis=1)
        fams.append(TrisecantFamily((i, i1, j), topo, iv, np.clip(P, 0.0, 1.0)))
    return fams


def trisecant_coverage(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL,
                       step: Optional[float] = None) -> dict:
    """Fraction of sample points that are the first point of a trisecant.

    A sample x qualifies when some line through x meets the knot in two
    further points on the same side of x.
    """
    S = _scene(K)
    n = S.n
    step = tol.family_step if step is None else step
    m = int(round(1.0 / step))
    jj, kk = np.triu_indices(n, 1)
    covered, total = 0, 0
    per_edge = np.zeros(n)
    for e in range(n):
        sel = (jj != e) & (kk != e)
        J, Kx = jj[sel], kk[sel]
        for q in range(m):
            s = q / m
            x = S.A[e] + s * S.D[e]
            total += 1
            if _first_point(S, x, e, s, J, Kx, tol):
                covered += 1
                per_edge[e] += 1
    return {"coverage": covered / total, "samples": total,
            "per_edge": (per_edge / m).tolist()}


def _first_point(S, x, e, s, J, Kx, tol) -> bool:
    n = S.n
    nj = np.cross(S.D[J], S.A[J] - x)
    nk = np.cross(S.D[Kx], S.A[Kx] - x)
    d = np.cross(nj, nk)
    nrm = np.linalg.norm(d, axis=1)
    good = nrm > 1e-12
    J, Kx, d = J[good], Kx[good], d[good] / nrm[good, None]
    uj, tj, rj = batch_line_edge_params(x[None], d, S.A[J], S.D[J])
    uk, tk, rk = batch_line_edge_params(x[None], d, S.A[Kx], S.D[Kx])
    ok = (rj < tol.tol_hit) & (rk < tol.tol_hit) & (tj >= 0) & (tj <= 1) & (tk >= 0) & (tk <= 1)
    ok &= (uj * uk > 0) & (np.abs(uj) > 1e-9) & (np.abs(uk) > 1e-9) & (np.abs(uj - uk) > 1e-9)
    # hits on a neighbouring edge at the shared vertex lie on x's own straight piece
    nxt, prv = (e + 1) % n, (e - 1) % n
    for idx, t in ((J, tj), (Kx, tk)):
        ok &= ~((idx == nxt) & (t < 1e-9)) & ~((idx == prv) & (t > 1 - 1e-9))
        if s == 0.0:
            ok &= ~((idx == prv) & (t > 1 - 1e-9))
    return bool(ok.any())
