"""3-D primitives: oriented lines, segments, doubly-ruled quadrics and
transversal solvers.

Two independent routes compute the lines meeting four given lines:

* the quadric route builds the doubly-ruled surface through three skew
  lines, intersects the fourth line with it and takes the transversal
  ruling through each intersection point;
* the Plücker route solves four linear incidence conditions inside the
  Klein quadric.

Batched variants of the quadric construction used by the enumerator live
at the bottom of the module.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateConfiguration,
    DegenerateTangency,
    IllConditioned,
    NotOnSurface,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

HYPERBOLOID = "hyperboloid-one-sheet"
PARABOLOID = "hyperbolic-paraboloid"
DEGENERATE = "degenerate"


class _Sentinel:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


#: returned by :func:`line_quadric_intersection` when the line lies on the quadric
CONTAINED = _Sentinel("ContainedInQuadric")
#: returned by :func:`transversals_of_four_lines` for a one-parameter family
INFINITE = _Sentinel("Infinite")


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite point {p!r}")
    return a


def unit(v, tol: float = 1e-300) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n <= tol:
        raise DegenerateConfiguration("zero-length direction")
    return v / n


def _lex_positive(d: np.ndarray, tol: float) -> np.ndarray:
    for x in d:
        if abs(x) > tol:
            return d if x > 0 else -d
    return d


@dataclass(frozen=True, eq=False)
class OrientedLine:
    """Line ``base + t * direction`` in canonical form.

    ``base`` is the point closest to the origin and ``direction`` a unit
    vector.  :meth:`canonical` additionally flips the direction to be
    lexicographically positive, which gives lines a stable identity.
    """

    base: np.ndarray
    direction: np.ndarray

    @classmethod
    def from_point_direction(cls, p, v) -> "OrientedLine":
        p = as_point(p)
        d = unit(v)
        base = p - np.dot(p, d) * d
        return cls(base, d)

    @classmethod
    def through(cls, p, q) -> "OrientedLine":
        p, q = as_point(p), as_point(q)
        return cls.from_point_direction(p, q - p)

    def canonical(self, tol: float = 1e-12) -> "OrientedLine":
        return OrientedLine(self.base, _lex_positive(self.direction, tol))

    def reversed(self) -> "OrientedLine":
        return OrientedLine(self.base, -self.direction)

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.base + t[..., None] * self.direction

    def param_of(self, p) -> float:
        return float(np.dot(as_point(p) - self.base, self.direction))

    def distance_to_point(self, p) -> float:
        w = as_point(p) - self.base
        return float(np.linalg.norm(w - np.dot(w, self.direction) * self.direction))

    def distance_to_line(self, other: "OrientedLine") -> float:
        n = np.cross(self.direction, other.direction)
        nn = np.linalg.norm(n)
        w = other.base - self.base
        if nn < 1e-14:
            return float(np.linalg.norm(w - np.dot(w, self.direction) * self.direction))
        return float(abs(np.dot(w, n)) / nn)

    def same_as(self, other: "OrientedLine", tol: float = DEFAULT_TOL.tol_line,
                oriented: bool = False) -> bool:
        """Equality of the underlying (optionally oriented) lines within ``tol``."""
        if np.linalg.norm(self.base - other.base) > tol:
            return False
        if np.linalg.norm(self.direction - other.direction) <= tol:
            return True
        return (not oriented) and np.linalg.norm(self.direction + other.direction) <= tol

    def transformed(self, R: np.ndarray, t=None) -> "OrientedLine":
        t = np.zeros(3) if t is None else as_point(t)
        return OrientedLine.from_point_direction(R @ self.base + t, R @ self.direction)

    def as_tuple(self):
        return tuple(self.base.tolist()) + tuple(self.direction.tolist())

    def __repr__(self):
        b = np.array2string(self.base, precision=6)
        d = np.array2string(self.direction, precision=6)
        return f"OrientedLine(base={b}, direction={d})"


@dataclass(frozen=True, eq=False)
class Segment:
    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        if np.linalg.norm(np.asarray(self.p1) - np.asarray(self.p0)) <= 0.0:
            raise DegenerateConfiguration("zero-length segment")

    @property
    def vector(self) -> np.ndarray:
        return self.p1 - self.p0

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.vector))

    def point(self, t: float) -> np.ndarray:
        return self.p0 + t * self.vector

    def line(self) -> OrientedLine:
        return OrientedLine.through(self.p0, self.p1)


@dataclass(frozen=True, eq=False)
class PluckerLine:
    """Plücker coordinates ``(d, m)`` with moment ``m = p x d``."""

    d: np.ndarray
    m: np.ndarray

    @classmethod
    def from_line(cls, line: OrientedLine) -> "PluckerLine":
        return cls(line.direction.copy(), np.cross(line.base, line.direction))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.d, self.m])

    def reciprocal(self, other: "PluckerLine") -> float:
        """Zero iff the two lines are coplanar (meet or are parallel)."""
        return float(np.dot(self.d, other.m) + np.dot(other.d, self.m))

    def identity_residual(self) -> float:
        return float(np.dot(self.d, self.m))

    def to_line(self) -> OrientedLine:
        dd = np.dot(self.d, self.d)
        if dd < 1e-28:
            raise DegenerateConfiguration("line at infinity")
        return OrientedLine.from_point_direction(np.cross(self.d, self.m) / dd, self.d)


@dataclass(frozen=True, eq=False)
class Quadric:
    """Projective quadric ``x~^T Q x~ = 0`` with ``x~ = (x, y, z, 1)``."""

    Q: np.ndarray
    kind: str = HYPERBOLOID
    condition: float = 1.0

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        h = np.concatenate([p, np.ones(p.shape[:-1] + (1,))], axis=-1)
        return np.einsum("...i,ij,...j->...", h, self.Q, h)

    def gradient(self, p) -> np.ndarray:
        h = np.append(as_point(p), 1.0)
        return 2.0 * (self.Q @ h)[:3]

    def transformed(self, R: np.ndarray, t=None) -> "Quadric":
        """Quadric of the surface moved by ``x -> R x + t``."""
        t = np.zeros(3) if t is None else as_point(t)
        T = np.eye(4)
        T[:3, :3] = R
        T[:3, 3] = t
        Ti = np.linalg.inv(T)
        return Quadric(_normalize_form(Ti.T @ self.Q @ Ti), self.kind, self.condition)


def _normalize_form(Q: np.ndarray) -> np.ndarray:
    Q = 0.5 * (Q + Q.T)
    Q = Q / np.linalg.norm(Q)
    iu = np.triu_indices(4)
    flat = Q[iu]
    k = np.argmax(np.abs(flat) > 1e-9)
    return Q if flat[k] > 0 else -Q


def form_from_coefficients(c) -> np.ndarray:
    """Symmetric 4x4 form from monomial coefficients
    ``(xx, yy, zz, xy, xz, yz, x, y, z, 1)``; works on stacked arrays."""
    c = np.asarray(c, dtype=float)
    Q = np.zeros(c.shape[:-1] + (4, 4))
    Q[..., 0, 0], Q[..., 1, 1], Q[..., 2, 2], Q[..., 3, 3] = c[..., 0], c[..., 1], c[..., 2], c[..., 9]
    for (i, j), k in (((0, 1), 3), ((0, 2), 4), ((1, 2), 5), ((0, 3), 6), ((1, 3), 7), ((2, 3), 8)):
        Q[..., i, j] = Q[..., j, i] = 0.5 * c[..., k]
    return Q


def _monomials(P: np.ndarray) -> np.ndarray:
    x, y, z = P[..., 0], P[..., 1], P[..., 2]
    one = np.ones_like(x)
    return np.stack([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, one], axis=-1)


def quadric_through_lines(l1: OrientedLine, l2: OrientedLine, l3: OrientedLine,
                          tol: ToleranceConfig = DEFAULT_TOL) -> Quadric:
    """The unique quadric containing three pairwise-skew lines."""
    lines = (l1, l2, l3)
    scale = max(1.0, *(float(np.linalg.norm(l.base)) for l in lines))
    for a in range(3):
        for b in range(a + 1, 3):
            la, lb = lines[a], lines[b]
            if np.linalg.norm(np.cross(la.direction, lb.direction)) < tol.tol_dir:
                raise DegenerateConfiguration(f"lines {a} and {b} are parallel")
            if la.distance_to_line(lb) < tol.tol_skew * scale:
                raise DegenerateConfiguration(f"lines {a} and {b} are coplanar")
    ts = np.array([-1.0, 0.0, 1.0]) * scale
    P = np.concatenate([l.point(ts) for l in lines])
    Q, cond = _quadric_from_points(P)
    if cond > tol.cond_max:
        raise IllConditioned(f"condition number {cond:.3g} exceeds {tol.cond_max:.3g}")
    det = abs(np.linalg.det(np.stack([l.direction for l in lines])))
    kind = PARABOLOID if det < tol.tol_dir else HYPERBOLOID
    return Quadric(_normalize_form(Q), kind, cond)


def _quadric_from_points(P: np.ndarray):
    """Null vector of the 9x10 monomial system, computed in centred and
    rescaled coordinates and mapped back."""
    c = P.mean(axis=0)
    s = np.abs(P - c).max() or 1.0
    M = _monomials((P - c) / s)
    _, sv, vt = np.linalg.svd(M)
    cond = sv[0] / max(sv[-1], 1e-300)
    Qn = form_from_coefficients(vt[-1])
    T = np.eye(4) / s
    T[3, 3] = 1.0
    T[:3, 3] = -c / s
    return T.T @ Qn @ T, cond


def line_quadric_roots(Q: np.ndarray, p, v, tol: float = DEFAULT_TOL.tol_quadric):
    """Parameters ``t`` with ``p + t v`` on the quadric, or CONTAINED.

    A vanishing leading coefficient (relative to the linear one) switches
    to the linear formula instead of the quadratic one.
    """
    ph = np.append(as_point(p), 1.0)
    vh = np.append(np.asarray(v, dtype=float), 0.0)
    A = float(vh @ Q @ vh)
    B = float(2.0 * vh @ Q @ ph)
    C = float(ph @ Q @ ph)
    big = max(abs(A), abs(B), abs(C))
    if big < tol:
        return CONTAINED
    if abs(A) <= tol * max(abs(B), abs(C)):
        if abs(B) <= tol * abs(C):
            return []
        return [-C / B]
    disc = B * B - 4.0 * A * C
    if disc < -tol * (B * B + abs(4.0 * A * C)):
        return []
    if disc <= tol * (B * B + abs(4.0 * A * C)):
        return [-B / (2.0 * A)]
    q = -0.5 * (B + np.copysign(np.sqrt(disc), B))
    return sorted([q / A, C / q])


def line_quadric_intersection(quadric: Quadric, line: OrientedLine,
                              tol: ToleranceConfig = DEFAULT_TOL):
    """Parameters along ``line`` where it meets the quadric (0-2 values),
    or CONTAINED when the line lies on the surface."""
    return line_quadric_roots(quadric.Q, line.base, line.direction, tol.tol_quadric)


def ruling_through_point(quadric: Quadric, p, generators: Sequence[OrientedLine],
                         tol: ToleranceConfig = DEFAULT_TOL) -> OrientedLine:
    """The line through ``p`` of the ruling that crosses the generators."""
    p = as_point(p)
    scale = max(1.0, float(np.linalg.norm(p)))
    if abs(float(quadric(p))) > tol.tol_on_surface * scale * scale:
        raise NotOnSurface(f"|x^T Q x| = {abs(float(quadric(p))):.3g} at {p}")
    n = quadric.gradient(p)
    if np.linalg.norm(n) < 1e-14:
        raise DegenerateTangency("singular point of the quadric")
    n = n / np.linalg.norm(n)
    e1 = np.cross(n, [1.0, 0.0, 0.0] if abs(n[0]) < 0.9 else [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    Q3 = quadric.Q[:3, :3]
    a, b, c = e1 @ Q3 @ e1, e1 @ Q3 @ e2, e2 @ Q3 @ e2
    disc = b * b - a * c
    if disc <= tol.tol_quadric * (a * a + b * b + c * c):
        raise DegenerateTangency("tangent-plane conic does not split into two lines")
    r = np.sqrt(disc)
    if abs(a) >= abs(c):
        dirs = [(-b + r) / a * e1 + e2, (-b - r) / a * e1 + e2]
    else:
        dirs = [e1 + (-b + r) / c * e2, e1 + (-b - r) / c * e2]
    candidates = [OrientedLine.from_point_direction(p, d) for d in dirs]
    miss = [max(c.distance_to_line(g) for g in generators) for c in candidates]
    k = int(np.argmin(miss))
    if miss[k] > 1e-6 * scale:
        raise DegenerateConfiguration("no ruling through p meets all generators")
    return candidates[k].canonical()


def _dedupe_lines(lines, tol):
    out = []
    for l in lines:
        if not any(l.same_as(o, tol) for o in out):
            out.append(l)
    return out


def transversals_of_four_lines(l1: OrientedLine, l2: OrientedLine, l3: OrientedLine,
                               l4: OrientedLine, method: str = "quadric",
                               tol: ToleranceConfig = DEFAULT_TOL):
    """All lines meeting the four given lines (l1..l3 pairwise skew).

    Returns a list of 0, 1 or 2 canonical lines, or INFINITE.
    """
    if method == "quadric":
        Q = quadric_through_lines(l1, l2, l3, tol)
        roots = line_quadric_intersection(Q, l4, tol)
        if roots is CONTAINED:
            return INFINITE
        out = []
        for t in roots:
            out.append(ruling_through_point(Q, l4.point(t), (l1, l2, l3), tol))
        return _dedupe_lines(out, tol.tol_line)
    if method == "plucker":
        return _plucker_transversals((l1, l2, l3, l4), tol)
    raise ValueError(f"unknown method {method!r}")


def _transversal_through(p, la: OrientedLine, lb: OrientedLine) -> OrientedLine:
    """Line through ``p`` meeting ``la`` and ``lb`` (intersection of the two
    planes spanned by ``p`` and each line)."""
    n1 = np.cross(p - la.base, la.direction)
    n2 = np.cross(p - lb.base, lb.direction)
    d = np.cross(n1, n2)
    if np.linalg.norm(d) < 1e-14:
        raise DegenerateConfiguration("point lies on a generator")
    return OrientedLine.from_point_direction(p, d).canonical()


def _plucker_transversals(lines, tol: ToleranceConfig):
    pl = [PluckerLine.from_line(l) for l in lines]
    M = np.array([np.concatenate([x.m, x.d]) for x in pl])
    _, sv, vt = np.linalg.svd(M)
    if sv[2] < tol.tol_skew * sv[0]:
        raise DegenerateConfiguration("incidence conditions are dependent")
    if sv[3] < tol.tol_quadric * sv[0]:
        # l4 lies in the span of the regulus of l1..l3, i.e. on the quadric
        return INFINITE
    N1, N2 = vt[4], vt[5]

    def omega(X, Y):
        return 0.5 * (np.dot(X[:3], Y[3:]) + np.dot(Y[:3], X[3:]))

    w11, w12, w22 = omega(N1, N1), omega(N1, N2), omega(N2, N2)
    size = max(abs(w11), abs(w12), abs(w22))
    if size < tol.tol_quadric:
        return INFINITE
    disc = w12 * w12 - w11 * w22
    eps = tol.tol_quadric * size * size
    if disc < -eps:
        return []
    r = np.sqrt(max(disc, 0.0))
    roots = [r, -r] if disc > eps else [0.0]
    sols = []
    for s in roots:
        if abs(w11) >= abs(w22):
            X = (-w12 + s) / w11 * N1 + N2
        else:
            X = N1 + (-w12 + s) / w22 * N2
        sols.append(X)
    out = []
    for X in sols:
        d = X[:3]
        if np.linalg.norm(d) < 1e-9 * np.linalg.norm(X):
            continue  # line at infinity
        out.append(PluckerLine(d, X[3:]).to_line().canonical())
    return _dedupe_lines(out, tol.tol_line)


def segment_distance(p0, p1, q0, q1) -> float:
    """Euclidean distance between two closed segments."""
    return float(batch_segment_distance(np.asarray(p0, float)[None], np.asarray(p1, float)[None],
                                        np.asarray(q0, float)[None], np.asarray(q1, float)[None])[0])


def batch_segment_distance(P0, P1, Q0, Q1) -> np.ndarray:
    """Vectorised closed segment-segment distance (Ericson's clamping)."""
    d1 = P1 - P0
    d2 = Q1 - Q0
    r = P0 - Q0
    a = np.einsum("...i,...i", d1, d1)
    e = np.einsum("...i,...i", d2, d2)
    f = np.einsum("...i,...i", d2, r)
    c = np.einsum("...i,...i", d1, r)
    b = np.einsum("...i,...i", d1, d2)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-300, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / np.where(e > 0, e, 1.0)
        t_lo = t < 0
        t_hi = t > 1
        s = np.where(t_lo, np.clip(-c / np.where(a > 0, a, 1.0), 0.0, 1.0), s)
        s = np.where(t_hi, np.clip((b - c) / np.where(a > 0, a, 1.0), 0.0, 1.0), s)
        t = np.clip(t, 0.0, 1.0)
    diff = P0 + d1 * s[..., None] - Q0 - d2 * t[..., None]
    return np.linalg.norm(diff, axis=-1)


# ---------------------------------------------------------------- batched kernels

def batch_quadrics(A: np.ndarray, D: np.ndarray):
    """Quadrics through stacks of three lines ``A[:, k] + t D[:, k]``.

    Coordinates are assumed pre-normalised to the unit ball.  Returns the
    forms (T, 4, 4), normalised to unit Frobenius norm, and the ratio of the
    largest to the ninth singular value of each 9x10 system.
    """
    ts = np.array([0.0, 0.5, 1.0])
    P = A[:, :, None, :] + ts[None, None, :, None] * D[:, :, None, :]
    P = P.reshape(len(A), 9, 3)
    M = _monomials(P)
    _, sv, vt = np.linalg.svd(M)
    cond = sv[:, 0] / np.maximum(sv[:, -1], 1e-300)
    Q = form_from_coefficients(vt[:, -1, :])
    Q /= np.linalg.norm(Q, axis=(1, 2))[:, None, None]
    return Q, cond


def batch_surface_distance(Q, X):
    """First-order distance ``|q(x)| / |grad q(x)|`` from points to quadrics.

    ``Q`` has shape (..., 4, 4) and ``X`` shape (..., 3), broadcasting.
    Unlike the raw residual it does not shrink when a near-degenerate
    quadric is rescaled to unit norm.
    """
    Xh = np.concatenate([X, np.ones(X.shape[:-1] + (1,))], axis=-1)
    QX = np.einsum("...ij,...j->...i", Q, Xh)
    val = np.einsum("...i,...i->...", Xh, QX)
    grad = 2.0 * np.linalg.norm(QX[..., :3], axis=-1)
    return np.abs(val) / np.maximum(grad, 1e-300)


def batch_line_quadric_roots(Q, P, V, tol):
    """Roots of ``(P + t V)`` on ``Q`` for stacks; returns (t1, t2, n_roots,
    contained) with NaN for missing roots."""
    Ph = np.concatenate([P, np.ones(P.shape[:-1] + (1,))], axis=-1)
    Vh = np.concatenate([V, np.zeros(V.shape[:-1] + (1,))], axis=-1)
    A = np.einsum("ni,nij,nj->n", Vh, Q, Vh)
    B = 2.0 * np.einsum("ni,nij,nj->n", Vh, Q, Ph)
    C = np.einsum("ni,nij,nj->n", Ph, Q, Ph)
    big = np.maximum(np.maximum(np.abs(A), np.abs(B)), np.abs(C))
    contained = big < tol
    linear = (np.abs(A) <= tol * np.maximum(np.abs(B), np.abs(C))) & ~contained
    t1 = np.full(len(A), np.nan)
    t2 = np.full(len(A), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        lin_ok = linear & (np.abs(B) > tol * np.abs(C))
        t1 = np.where(lin_ok, -C / B, t1)
        quad = ~linear & ~contained
        disc = B * B - 4.0 * A * C
        scale = B * B + np.abs(4.0 * A * C)
        pos = quad & (disc > tol * scale)
        dbl = quad & (np.abs(disc) <= tol * scale)
        sq = np.sqrt(np.where(pos, disc, 0.0))
        q = -0.5 * (B + np.copysign(sq, B))
        t1 = np.where(pos, q / A, t1)
        t2 = np.where(pos, C / q, t2)
        t1 = np.where(dbl, -B / (2.0 * A), t1)
    return t1, t2, contained


def batch_line_edge_params(P, Dir, A, E):
    """Closest-point parameters between lines ``P + u Dir`` and ``A + t E``.

    Returns ``(u, t, residual)`` where residual is the distance between
    the two closest points (zero when the lines meet).
    """
    r = P - A
    c1 = np.einsum("...i,...i", Dir, Dir)
    c2 = np.einsum("...i,...i", E, E)
    b = np.einsum("...i,...i", Dir, E)
    Dr = np.einsum("...i,...i", Dir, r)
    Er = np.einsum("...i,...i", E, r)
    den = b * b - c1 * c2
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (c2 * Dr - b * Er) / den
        t = (b * Dr - c1 * Er) / den
        res = np.linalg.norm(r + u[..., None] * Dir - t[..., None] * E, axis=-1)
    return u, t, res
