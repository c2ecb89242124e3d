"""Quadrisecant approximation: the polygon through all quadrisecant points
in knot order, and the test of whether it keeps the knot type and the
quadrisecants of the source."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NoQuadrisecants, ProjectionDegenerate
from .geom3 import batch_segment_distance
from .knot import PolygonalKnot
from .secants import Quadrisecant, enumerate_quadrisecants
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .topology import KnotSignature, knot_signature


@dataclass
class QuadApprox:
    source: PolygonalKnot
    cut_points: list
    polyline: np.ndarray
    embedded: bool
    signature: Optional[KnotSignature] = None
    source_quadrisecants: list = field(default_factory=list)
    quadrisecants: list = field(default_factory=list)

    def line_set_matches(self, tol: float = 1e-6) -> bool:
        """Same quadrisecant lines as the source, up to ``tol`` on the
        unit-diameter scale."""
        if len(self.quadrisecants) != len(self.source_quadrisecants):
            return False
        scale = self.source.diameter
        src = [_line_key(q, scale) for q in self.source_quadrisecants]
        own = [_line_key(q, scale) for q in self.quadrisecants]
        used = set()
        for key in src:
            hit = None
            for m, other in enumerate(own):
                if m not in used and np.max(np.abs(key - other)) < tol:
                    hit = m
                    break
            if hit is None:
                return False
            used.add(hit)
        return True


def _line_key(q: Quadrisecant, scale: float) -> np.ndarray:
    d = q.line.direction / np.linalg.norm(q.line.direction)
    if d[np.argmax(np.abs(d))] < 0:
        d = -d
    p = q.line.base / scale
    p = p - np.dot(p, d) * d
    return np.concatenate([p, d])


def is_embedded(P: np.ndarray, tol: float) -> bool:
    """Exhaustive segment-pair test of a closed polygon."""
    n = len(P)
    A, B = P, np.roll(P, -1, axis=0)
    i, j = np.triu_indices(n, 2)
    keep = ~((i == 0) & (j == n - 1))
    if keep.any():
        d = batch_segment_distance(A[i[keep]], B[i[keep]], A[j[keep]], B[j[keep]])
        if np.any(d <= tol):
            return False
    # adjacent edges may only share their common vertex
    u = B - A
    w = np.roll(u, 1, axis=0)
    fold = (np.linalg.norm(np.cross(w, u), axis=1) <= 1e-12 * np.linalg.norm(w, axis=1) * np.linalg.norm(u, axis=1)) \
        & (np.einsum("ij,ij->i", w, u) < 0)
    return bool(np.all(np.linalg.norm(u, axis=1) > tol) and not fold.any())


def quadrisecant_approximation(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL,
                               quadrisecants=None, seed: int = 0) -> QuadApprox:
    """Polygon through the quadrisecant points of ``K`` in knot order.

    When it is embedded its signature is computed and its own
    quadrisecants are enumerated.  Those lines pass through vertices of
    the approximation, so that enumeration runs without the genericity
    requirement and with a wider vertex snap.
    """
    qs = enumerate_quadrisecants(K, tol) if quadrisecants is None else list(quadrisecants)
    if not qs:
        raise NoQuadrisecants("knot has no quadrisecants")
    pts = sorted((p for q in qs for p in q.points), key=K.arclength_of)
    cut = []
    for p in pts:
        if not cut or np.linalg.norm(p.point - cut[-1].point) > tol.tol_embed * K.diameter:
            cut.append(p)
    if len(cut) > 1 and np.linalg.norm(cut[0].point - cut[-1].point) <= tol.tol_embed * K.diameter:
        cut.pop()
    P = np.array([p.point for p in cut])
    out = QuadApprox(K, cut, P, False, source_quadrisecants=qs)
    if len(P) < 3 or not is_embedded(P, tol.tol_embed * K.diameter):
        return out
    out.embedded = True
    try:
        out.signature = knot_signature(P, seed=seed)
    except ProjectionDegenerate:
        out.signature = None
    hat = PolygonalKnot(P, name=f"approx({K.name})", check=False)
    loose = tol.with_overrides(tol_param_snap=max(tol.tol_param_snap, 1e-7))
    out.quadrisecants = enumerate_quadrisecants(hat, loose, check=False, require_generic=False)
    return out


def conjecture_report(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0,
                      line_tol: float = 1e-6, approx: Optional[QuadApprox] = None) -> dict:
    """Does the approximation keep the knot type and the quadrisecants?

    The answer is data: the general statement is known to fail.
    """
    A = approx if approx is not None else quadrisecant_approximation(K, tol, seed=seed)
    same_sig = None
    if A.embedded and A.signature is not None:
        same_sig = A.signature == knot_signature(K, seed=seed)
    return {
        "knot": K.name,
        "n_quadrisecants": len(A.source_quadrisecants),
        "n_cut_points": len(A.cut_points),
        "embedded": A.embedded,
        "same_signature": bool(same_sig) if same_sig is not None else False,
        "same_quadrisecant_set": A.embedded and A.line_set_matches(line_tol),
        "approx_signature": None if A.signature is None else
        {"alexander": list(A.signature.alexander), "determinant": A.signature.determinant},
    }
