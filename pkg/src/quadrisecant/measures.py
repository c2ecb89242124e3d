"""Geometric measures of polygonal knots and the quadrisecant length bounds.

Lengths in the bound functions are in units of the thickness: a knot of
unit thickness has ropelength equal to its length.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateDirection, DomainError, NoQuadrisecants, PointOnKnot, ProjectionDegenerate, ZeroThickness
from .geom3 import batch_segment_distance
from .knot import PolygonalKnot
from .projection import crossing_count
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .topology import fibonacci_sphere

# ---------------------------------------------------------------- bound functions


def f(r: float) -> float:
    """Shortest arc from distance r to the antipodal ray around a unit ball
    (one side): sqrt(r^2 - 1) + arcsin(1/r)."""
    if r < 1:
        raise DomainError(f"f needs r >= 1, got {r}")
    return math.sqrt(r * r - 1) + math.asin(1 / r)


def g(d: float) -> float:
    """Length lower bound of an essential arc with chord ``d``."""
    if d < 0:
        raise DomainError(f"g needs d >= 0, got {d}")
    return 2 * math.pi - 2 * math.asin(d / 2) if d <= 2 else math.pi


def theta_star(r: float, s: float) -> float:
    return math.acos(1 / r) + math.acos(1 / s)


def m(r: float, s: float, theta: float) -> float:
    """Shortest path between points at distances r, s from the centre of a
    unit ball, at angle theta, that avoids the ball."""
    if r < 1 or s < 1 or not 0 <= theta <= math.pi:
        raise DomainError(f"m needs r, s >= 1 and theta in [0, pi]; got {(r, s, theta)}")
    if theta <= theta_star(r, s):
        return math.sqrt(max(r * r + s * s - 2 * r * s * math.cos(theta), 0.0))
    return f(r) + f(s) + (theta - math.pi)


min_length_outside_ball = m

BOUND_TYPES = ("simple", "flipped", "alternating")


def _terms(kind: str):
    if kind == "simple":
        return (lambda r: g(r) + f(r), lambda s: g(s) + s, lambda t: g(t) + f(t))
    if kind == "flipped":
        return (lambda r: g(r) + f(r), lambda s: 2 * f(s), lambda t: g(t) + f(t))
    if kind == "alternating":
        return (lambda r: 2 * f(r), lambda s: 2 * f(s) + g(s) + s, lambda t: 2 * f(t))
    raise DomainError(f"unknown quadrisecant type {kind!r}")


def eval_bounds(kind: str, r: float, s: float, t: float) -> float:
    """Length lower bound for a unit-thickness knot with an essential
    quadrisecant of type ``kind`` and gaps r, s, t."""
    if min(r, s, t) < 1:
        raise DomainError(f"gaps must be at least 1, got {(r, s, t)}")
    a, b, c = _terms(kind)
    return a(r) + b(s) + c(t)


@dataclass(frozen=True)
class BoundConfig:
    lo: float = 1.0
    hi: float = 2.0
    grid: int = 201
    opt_tol: float = 1e-6


def _golden(fn, a, b, tol):
    gr = (math.sqrt(5) - 1) / 2
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def minimize_term(fn, cfg: BoundConfig = BoundConfig()):
    """Grid search then golden-section refinement on the best bracket;
    the interval ends are compared explicitly."""
    xs = np.linspace(cfg.lo, cfg.hi, cfg.grid)
    ys = np.array([fn(x) for x in xs])
    k = int(np.argmin(ys))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, cfg.grid - 1)]
    best = _golden(fn, a, b, cfg.opt_tol)
    for x in (cfg.lo, cfg.hi):
        y = fn(x)
        if y <= best[1]:
            best = (x, y)
    return best


def minimize_bound(kind: str, cfg: BoundConfig = BoundConfig()):
    """Termwise minimum over gaps in [1, 2]; returns (value, {r, s, t})."""
    terms = _terms(kind)
    arg, val = {}, 0.0
    for name, fn in zip("rst", terms):
        x, y = minimize_term(fn, cfg)
        arg[name] = float(x)
        val += float(y)
    return val, arg


def bound_constants() -> dict:
    """Closed forms of the simple and flipped minima."""
    return {"simple": 10 * math.pi / 3 + 2 * math.sqrt(3) + 2,
            "flipped": 10 * math.pi / 3 + 2 * math.sqrt(3)}


def bound_grid_rows(n: int = 101, theta_samples: int = 7) -> list:
    """Rows (function, x, y, theta, value) for plotting f, g and m."""
    rows = []
    for x in np.linspace(1, 3, n):
        rows.append(("f", x, "", "", f(x)))
    for x in np.linspace(0, 3, n):
        rows.append(("g", x, "", "", g(x)))
    for th in np.linspace(0, math.pi, theta_samples):
        for x in np.linspace(1, 3, n):
            rows.append(("m", x, x, th, m(x, x, th)))
    return rows


# ---------------------------------------------------------------- curvature, thickness

def _poly(P) -> np.ndarray:
    return P.vertices if isinstance(P, PolygonalKnot) else np.asarray(P, dtype=float)


def total_curvature(P) -> float:
    """Sum of exterior angles of a closed polygon."""
    P = _poly(P)
    if len(P) < 3:
        raise DomainError("need at least 3 vertices")
    u = np.roll(P, -1, axis=0) - P
    w = np.roll(u, 1, axis=0)
    return float(np.sum(np.arctan2(np.linalg.norm(np.cross(w, u), axis=1),
                                   np.einsum("ij,ij->i", w, u))))


def thickness(P, window: int = 3) -> float:
    """Twice the least circumradius over vertex triples.

    Triples whose vertices lie within fewer than ``window`` consecutive
    edges are skipped, which removes the corner artefacts of an inscribed
    polygon.  Pairs already farther apart than the running minimum
    diameter are pruned.
    """
    P = _poly(P)
    n = len(P)
    best = math.inf
    for i in range(n - 2):
        j, k = np.triu_indices(n - i - 1, 1)
        j, k = j + i + 1, k + i + 1
        span = n - np.maximum(np.maximum(j - i, k - j), n - k + i)
        keep = span >= window
        a = P[j] - P[i]
        la = np.linalg.norm(a, axis=1)
        keep &= la < best
        j, k, a, la = j[keep], k[keep], a[keep], la[keep]
        if len(j) == 0:
            continue
        b = P[k] - P[i]
        c = P[k] - P[j]
        cr = np.linalg.norm(np.cross(a, b), axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            R = la * np.linalg.norm(b, axis=1) * np.linalg.norm(c, axis=1) / (2 * cr)
        R = R[np.isfinite(R)]
        if len(R):
            best = min(best, float(2 * R.min()))
    return best


def ropelength(P, tol: ToleranceConfig = DEFAULT_TOL, window: int = 3) -> float:
    P = _poly(P)
    tau = thickness(P, window)
    diam = float(np.ptp(P, axis=0).max())
    if not tau > tol.tol_len * diam:
        raise ZeroThickness(f"thickness {tau} too small")
    return float(np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1).sum()) / tau


# ---------------------------------------------------------------- distortion

@dataclass(frozen=True)
class DistortionInterval:
    lo: float
    hi: float
    cells: int
    converged: bool

    @property
    def width(self) -> float:
        return self.hi - self.lo


def distortion(P, tol: float = 1e-3, budget: int = 200_000) -> DistortionInterval:
    """Certified enclosure of the arclength-to-chord supremum.

    ``lo`` is attained by vertex pairs (and by cell corners visited while
    refining); ``hi`` bounds each pair of edge cells by the largest
    intrinsic distance over the smallest chord, with cells bisected until
    the gap is below ``tol`` or ``budget`` cells were split.
    """
    P = _poly(P)
    n = len(P)
    E = np.roll(P, -1, axis=0) - P
    lens = np.linalg.norm(E, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    L = cum[-1]

    def intrinsic(x):
        x = np.mod(x, L)
        return np.minimum(x, L - x)

    i, j = np.triu_indices(n, 1)
    chord = np.linalg.norm(P[i] - P[j], axis=1)
    lo = float(np.max(intrinsic(cum[j] - cum[i]) / chord))
    # adjacent edges: sup of (x + y) / |x u + y w| is 1 / sin(phi / 2), phi the
    # angle at the shared vertex, attained along x = y
    u, w = -E / lens[:, None], np.roll(E, -1, axis=0) / np.roll(lens, -1)[:, None]
    phi = np.arctan2(np.linalg.norm(np.cross(u, w), axis=1), np.einsum("ij,ij->i", u, w))
    adj = float(np.max(1 / np.sin(phi / 2)))
    lo = max(lo, adj, 1.0)
    hi_fixed = max(adj, 1.0)

    def cell_bound(e, s0, s1, f_, t0, t1):
        p0, p1 = P[e] + s0 * E[e], P[e] + s1 * E[e]
        q0, q1 = P[f_] + t0 * E[f_], P[f_] + t1 * E[f_]
        dmin = float(batch_segment_distance(p0[None], p1[None], q0[None], q1[None])[0])
        a_lo = cum[f_] + t0 * lens[f_] - (cum[e] + s1 * lens[e])
        a_hi = cum[f_] + t1 * lens[f_] - (cum[e] + s0 * lens[e])
        a_lo, a_hi = a_lo % L, a_lo % L + (a_hi - a_lo)
        if a_lo <= L / 2 <= a_hi:
            dmax = L / 2
        else:
            dmax = max(min(a_lo, L - a_lo), min(a_hi, L - a_hi))
        return dmax / dmin if dmin > 0 else math.inf

    # initial cells: non-adjacent edge pairs, bounded in one vectorised pass
    ei, fi = np.triu_indices(n, 2)
    keep = ~((ei == 0) & (fi == n - 1))
    ei, fi = ei[keep], fi[keep]
    dmin = batch_segment_distance(P[ei], P[ei] + E[ei], P[fi], P[fi] + E[fi])
    a_lo = cum[fi] - cum[ei + 1]
    a_hi = cum[fi + 1] - cum[ei]
    half = (a_lo <= L / 2) & (L / 2 <= a_hi)
    dmax = np.where(half, L / 2, np.maximum(np.minimum(a_lo, L - a_lo), np.minimum(a_hi, L - a_hi)))
    with np.errstate(divide="ignore"):
        bounds = np.where(dmin > 0, dmax / dmin, np.inf)
    heap = [(-b, int(e), 0.0, 1.0, int(f_), 0.0, 1.0) for b, e, f_ in zip(bounds, ei, fi) if b > lo + tol]
    heapq.heapify(heap)
    # cells set aside because they cannot beat lo + tol still bound the sup
    dropped = float(bounds[bounds <= lo + tol].max()) if np.any(bounds <= lo + tol) else -math.inf
    splits = 0
    while heap and -heap[0][0] - lo >= tol and splits < budget:
        nb, e, s0, s1, f_, t0, t1 = heapq.heappop(heap)
        splits += 1
        if (s1 - s0) * lens[e] >= (t1 - t0) * lens[f_]:
            sm = 0.5 * (s0 + s1)
            kids = [(e, s0, sm, f_, t0, t1), (e, sm, s1, f_, t0, t1)]
            probes = [(sm, t0), (sm, t1)]
        else:
            tm = 0.5 * (t0 + t1)
            kids = [(e, s0, s1, f_, t0, tm), (e, s0, s1, f_, tm, t1)]
            probes = [(s0, tm), (s1, tm)]
        for s, t in probes:
            p, q = P[e] + s * E[e], P[f_] + t * E[f_]
            d = float(np.linalg.norm(p - q))
            if d > 0:
                lo = max(lo, float(intrinsic(cum[f_] + t * lens[f_] - cum[e] - s * lens[e])) / d)
        for kid in kids:
            b = cell_bound(*kid)
            if b > lo + tol:
                heapq.heappush(heap, (-b,) + kid)
            else:
                dropped = max(dropped, b)
    hi = float(max(lo, hi_fixed, dropped, -heap[0][0] if heap else -math.inf))
    return DistortionInterval(float(lo), hi, splits, bool(hi - lo <= tol))


# ---------------------------------------------------------------- second hull

@dataclass
class HullVerdict:
    status: str                    # exact_member, member_sampled or not_member
    min_cuts: int
    witness_normal: Optional[list] = None


def plane_cuts(P: np.ndarray, p: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Transversal crossings of the closed polygon with planes through p."""
    h = (P - p) @ normals.T                      # (n, m)
    sg = np.sign(h)
    # vertices on the plane take the sign of the previous vertex
    for k in range(len(P)):
        z = sg[k] == 0
        if z.any():
            sg[k, z] = sg[k - 1, z]
    return np.sum(sg != np.roll(sg, -1, axis=0), axis=0)


def second_hull_membership(K, p, n: int = 2, mode: str = "auto", samples: int = 2000,
                           tol: ToleranceConfig = DEFAULT_TOL) -> HullVerdict:
    """Does every plane through ``p`` cut the knot at least 2n times?

    The exact mode samples one normal in every cell of the arrangement of
    great circles orthogonal to the vectors from ``p`` to the vertices;
    the crossing count is constant on each cell.
    """
    P = _poly(K)
    p = np.asarray(p, dtype=float)
    A, B = P, np.roll(P, -1, axis=0)
    d = batch_segment_distance(A, B, np.broadcast_to(p, A.shape), np.broadcast_to(p, A.shape))
    diam = float(np.ptp(P, axis=0).max())
    if d.min() <= tol.tol_embed * diam:
        raise PointOnKnot("query point lies on the knot")
    if mode == "auto":
        mode = "exact" if len(P) <= 64 else "sampled"
    if mode == "sampled":
        N = fibonacci_sphere(samples)
        cuts = plane_cuts(P, p, N)
        k = int(np.argmin(cuts))
        if cuts[k] < 2 * n:
            return HullVerdict("not_member", int(cuts[k]), N[k].tolist())
        return HullVerdict("member_sampled", int(cuts[k]))
    U = P - p
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    i, j = np.triu_indices(len(U), 1)
    W = np.cross(U[i], U[j])
    nw = np.linalg.norm(W, axis=1)
    ok = nw > 1e-12
    i, j, W = i[ok], j[ok], W[ok] / nw[ok, None]
    eps = 1e-7
    normals = []
    for si in (-1.0, 1.0):
        for sj in (-1.0, 1.0):
            # tangent step with prescribed signs against the two circles
            G = np.stack([U[i], U[j]], axis=1)           # (m, 2, 3)
            rhs = np.array([si, sj])
            gram = np.einsum("mik,mjk->mij", G, G)
            coef = np.linalg.solve(gram, np.broadcast_to(rhs, (len(G), 2))[..., None])[..., 0]
            t = np.einsum("mi,mik->mk", coef, G)
            t /= np.linalg.norm(t, axis=1, keepdims=True)
            normals.append(W + eps * t)
    if not normals:
        N = fibonacci_sphere(samples)
    else:
        N = np.concatenate(normals)
        N /= np.linalg.norm(N, axis=1, keepdims=True)
    cuts = np.concatenate([plane_cuts(P, p, N[s:s + 4096]) for s in range(0, len(N), 4096)])
    k = int(np.argmin(cuts))
    if cuts[k] < 2 * n:
        return HullVerdict("not_member", int(cuts[k]), N[k].tolist())
    return HullVerdict("exact_member", int(cuts[k]))


# ---------------------------------------------------------------- bridges, crossings

def bridge_count(K, v) -> int:
    """Strict local maxima of the height along ``v``."""
    P = _poly(K)
    v = np.asarray(v, dtype=float)
    h = P @ (v / np.linalg.norm(v))
    dh = np.roll(h, -1) - h
    if np.any(np.abs(dh) <= 1e-12 * max(np.ptp(h), 1e-300)):
        raise DegenerateDirection("an edge is level for this direction")
    return int(np.sum((h > np.roll(h, 1)) & (h > np.roll(h, -1))))


def superbridge_estimate(K, N: int = 500, seed: int = 0) -> int:
    """Largest bridge count over N directions (a lower estimate of the
    maximum)."""
    rng = np.random.default_rng(seed)
    R = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    best = 0
    for v in fibonacci_sphere(N) @ R.T:
        try:
            best = max(best, bridge_count(K, v))
        except DegenerateDirection:
            continue
    return best


def supercrossing_floor(K: PolygonalKnot, quadrisecants=None, seed: int = 0,
                        tries: int = 50, tol: ToleranceConfig = DEFAULT_TOL):
    """Six crossings seen from near a quadrisecant line.

    Returns ``(6, witness)``; the witness holds the projection direction,
    its crossing count and the quadrisecant used.
    """
    from .secants import enumerate_quadrisecants

    qs = enumerate_quadrisecants(K, tol) if quadrisecants is None else quadrisecants
    if not qs:
        raise NoQuadrisecants("knot has no quadrisecants")
    rng = np.random.default_rng(seed)
    order = sorted(range(len(qs)), key=lambda k: qs[k].dihedral_class != "alternating")
    for k in order:
        d = qs[k].line.direction / np.linalg.norm(qs[k].line.direction)
        for eta in (1e-4, 1e-3, 1e-2):
            for _ in range(tries):
                t = np.cross(d, rng.normal(size=3))
                v = d + eta * t / np.linalg.norm(t)
                try:
                    c = crossing_count(K.vertices, v)
                except ProjectionDegenerate:
                    continue
                if c >= 6:
                    return 6, {"view": (v / np.linalg.norm(v)).tolist(), "crossings": c, "quadrisecant": k}
    raise ProjectionDegenerate("no projection near a quadrisecant showed six crossings")


# ---------------------------------------------------------------- report

@dataclass
class MeasureReport:
    name: str
    n_vertices: int
    length: float
    total_curvature: float
    thickness: float
    ropelength: Optional[float]
    distortion_interval: list
    bridge_counts: dict = field(default_factory=dict)
    superbridge_estimate: int = 0
    second_hull_samples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def measure_report(K: PolygonalKnot, directions=None, superbridge_dirs: int = 500,
                   hull_points=None, seed: int = 0, distortion_tol: float = 1e-3,
                   tol: ToleranceConfig = DEFAULT_TOL) -> MeasureReport:
    P = K.vertices
    tau = thickness(P)
    try:
        rop = ropelength(P, tol)
    except ZeroThickness:
        rop = None
    dist = distortion(P, distortion_tol)
    dirs = directions if directions is not None else [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    bridges = {}
    for v in dirs:
        try:
            bridges[",".join(f"{x:g}" for x in v)] = bridge_count(P, v)
        except DegenerateDirection:
            bridges[",".join(f"{x:g}" for x in v)] = None
    hull = []
    for q in (hull_points or []):
        hv = second_hull_membership(P, q, 2, tol=tol)
        hull.append({"point": list(map(float, q)), "status": hv.status, "min_cuts": hv.min_cuts})
    return MeasureReport(K.name, K.n, K.total_length, total_curvature(P), tau, rop,
                         [dist.lo, dist.hi], bridges, superbridge_estimate(P, superbridge_dirs, seed), hull)
