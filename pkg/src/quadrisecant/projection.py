"""Orthogonal projections of closed polylines and their crossings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProjectionDegenerate


@dataclass(frozen=True)
class Projection:
    """Projection along ``view`` (unit vector pointing at the viewer)."""

    view: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    @classmethod
    def along(cls, v) -> "Projection":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        a = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(v, a)
        e1 /= np.linalg.norm(e1)
        return cls(v, e1, np.cross(v, e1))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Projection":
        return cls.along(rng.normal(size=3))

    def plane(self, P: np.ndarray) -> np.ndarray:
        return np.stack([P @ self.e1, P @ self.e2], axis=-1)

    def height(self, P: np.ndarray) -> np.ndarray:
        return P @ self.view


@dataclass(frozen=True)
class Crossing:
    """Crossing between segment ``i`` (param ``s``) of the first polyline and
    segment ``j`` (param ``t``) of the second.

    ``first_over`` tells which strand is nearer the viewer and ``sign`` is
    the sign of ``(over x under) . view``.
    """

    i: int
    s: float
    j: int
    t: float
    first_over: bool
    sign: int


def _segments(P: np.ndarray, closed: bool):
    if closed:
        return P, np.roll(P, -1, axis=0)
    return P[:-1], P[1:]


def crossings(A: np.ndarray, B: np.ndarray | None, proj: Projection,
              closed_a: bool = True, closed_b: bool = True,
              eps: float = 1e-9) -> list[Crossing]:
    """All crossings of polylines ``A`` and ``B`` in the projection.

    With ``B is None`` the self-crossings of ``A`` are returned (adjacent
    segments skipped, each crossing reported once with ``i < j``).
    Raises :class:`ProjectionDegenerate` when a crossing sits within
    ``eps`` of a segment end or the strands are too close in height.
    """
    self_mode = B is None
    A0, A1 = _segments(A, closed_a)
    if self_mode:
        B0, B1 = A0, A1
    else:
        B0, B1 = _segments(B, closed_b)
    a0, a1, b0, b1 = (proj.plane(X) for X in (A0, A1, B0, B1))
    da = a1 - a0
    db = b1 - b0
    # pairwise 2-D solve a0 + s da = b0 + t db
    den = da[:, None, 0] * db[None, :, 1] - da[:, None, 1] * db[None, :, 0]
    w = b0[None, :, :] - a0[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (w[..., 0] * db[None, :, 1] - w[..., 1] * db[None, :, 0]) / den
        t = (w[..., 0] * da[:, None, 1] - w[..., 1] * da[:, None, 0]) / den
    scale = max(np.abs(np.concatenate([a0, b0])).max(), 1e-300)
    la = np.linalg.norm(da, axis=1)[:, None]
    lb = np.linalg.norm(db, axis=1)[None, :]
    parallel = np.abs(den) <= 1e-12 * la * lb
    hit = (~parallel) & (s > -eps) & (s < 1 + eps) & (t > -eps) & (t < 1 + eps)
    if self_mode:
        m = len(A0)
        ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        near = (np.abs(ii - jj) <= 1)
        if closed_a:
            near |= (np.abs(ii - jj) == m - 1)
        hit &= (jj > ii) & ~near
    # exact collinear overlaps are projection degeneracies
    if np.any(parallel):
        cr = np.abs(w[..., 0] * da[:, None, 1] - w[..., 1] * da[:, None, 0])
        coll = parallel & (cr <= 1e-12 * scale * la)
        if self_mode:
            coll &= (jj > ii) & ~near
        if np.any(coll & _overlap(a0, a1, b0, b1)):
            raise ProjectionDegenerate("collinear overlap in projection")
    idx = np.argwhere(hit)
    out = []
    for i, j in idx:
        si, tj = float(s[i, j]), float(t[i, j])
        if min(si, 1 - si) < eps or min(tj, 1 - tj) < eps:
            raise ProjectionDegenerate("crossing at a projected vertex")
        pa = A0[i] + si * (A1[i] - A0[i])
        pb = B0[j] + tj * (B1[j] - B0[j])
        ha, hb = proj.height(pa), proj.height(pb)
        if abs(ha - hb) <= eps * scale:
            raise ProjectionDegenerate("strands intersect in space or nearly so")
        first_over = ha > hb
        da3 = A1[i] - A0[i]
        db3 = B1[j] - B0[j]
        over, under = (da3, db3) if first_over else (db3, da3)
        sign = 1 if np.dot(np.cross(over, under), proj.view) > 0 else -1
        out.append(Crossing(int(i), si, int(j), tj, bool(first_over), sign))
    return out


def _overlap(a0, a1, b0, b1):
    # 1-D interval overlap along the segment direction, for collinear pairs
    d = a1 - a0
    pa0 = np.einsum("ik,ik->i", a0, d)[:, None]
    pa1 = np.einsum("ik,ik->i", a1, d)[:, None]
    pb0 = b0 @ d.T
    pb1 = b1 @ d.T
    lo_a, hi_a = np.minimum(pa0, pa1), np.maximum(pa0, pa1)
    lo_b, hi_b = np.minimum(pb0, pb1).T, np.maximum(pb0, pb1).T
    return (np.minimum(hi_a, hi_b) - np.maximum(lo_a, lo_b)) > 0


def crossing_count(P: np.ndarray, view, closed: bool = True) -> int:
    return len(crossings(P, None, Projection.along(view), closed_a=closed))


def with_retries(fn, rng: np.random.Generator, retries: int = 20):
    """Call ``fn(projection)`` with random projections until one is
    non-degenerate."""
    last = None
    for _ in range(retries):
        proj = Projection.random(rng)
        try:
            return fn(proj)
        except ProjectionDegenerate as exc:
            last = exc
    raise ProjectionDegenerate(f"no generic projection after {retries} tries: {last}")
