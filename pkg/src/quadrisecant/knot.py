"""Polygonal knots: arclength bookkeeping, genericity, perturbation and
built-in families."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterator, Optional

import numpy as np

from .errors import (
    CannotPerturb,
    TooFewVertices,
    UnknownFamily,
    ValidationError,
)
from .geom3 import batch_quadrics, batch_surface_distance, batch_segment_distance
from .tolerances import DEFAULT_TOL, ToleranceConfig

SCHEMA_VERSION = 1


def iter_combinations(n: int, r: int, chunk: int = 200_000) -> Iterator[np.ndarray]:
    """Yield the r-subsets of range(n) (lexicographic) as int arrays in chunks."""
    it = combinations(range(n), r)
    while True:
        block = np.fromiter((x for _, c in zip(range(chunk), it) for x in c), dtype=np.int64)
        if block.size == 0:
            return
        yield block.reshape(-1, r)


@dataclass(frozen=True)
class KnotPoint:
    """A point on edge ``edge_index`` at parameter ``t`` in [0, 1)."""

    edge_index: int
    t: float
    point: np.ndarray = field(compare=False, repr=False)


@dataclass(frozen=True)
class Arc:
    """Arc from ``start`` to ``end`` following the knot orientation."""

    start: KnotPoint
    end: KnotPoint
    length: float


@dataclass
class GenericityReport:
    coplanar_quadruples: list = field(default_factory=list)
    collinear_triples: list = field(default_factory=list)
    quadric_violations: list = field(default_factory=list)
    n_secant_excess: list = field(default_factory=list)

    @property
    def is_generic(self) -> bool:
        return not (self.coplanar_quadruples or self.collinear_triples
                    or self.quadric_violations or self.n_secant_excess)

    def summary(self) -> dict:
        return {
            "is_generic": self.is_generic,
            "coplanar_quadruples": len(self.coplanar_quadruples),
            "collinear_triples": len(self.collinear_triples),
            "quadric_violations": len(self.quadric_violations),
            "n_secant_excess": len(self.n_secant_excess),
        }


class PolygonalKnot:
    """Closed oriented polygon; vertex ``i`` starts edge ``i``.

    Instances are immutable: the vertex array is copied and locked.
    """

    def __init__(self, vertices, name: Optional[str] = None,
                 unknotting_number: Optional[int] = None, check: bool = True,
                 tol: ToleranceConfig = DEFAULT_TOL):
        V = np.array(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 3:
            raise ValidationError("vertices must be an (n, 3) array")
        if len(V) > 3 and np.allclose(V[0], V[-1]):
            V = V[:-1]
        if len(V) < 3:
            raise ValidationError("a polygonal knot needs at least 3 vertices")
        if not np.all(np.isfinite(V)):
            raise ValidationError("non-finite vertex coordinate")
        if unknotting_number is not None and (int(unknotting_number) != unknotting_number
                                              or unknotting_number < 0):
            raise ValidationError("unknotting_number must be a non-negative integer")
        V.setflags(write=False)
        self._V = V
        self.name = name
        self.unknotting_number = None if unknotting_number is None else int(unknotting_number)
        E = np.roll(V, -1, axis=0) - V
        E.setflags(write=False)
        self._E = E
        L = np.linalg.norm(E, axis=1)
        L.setflags(write=False)
        self._L = L
        self._cum = np.concatenate([[0.0], np.cumsum(L)])
        self._diam = None
        if check:
            self.validate(tol)

    # -- basic geometry
    @property
    def vertices(self) -> np.ndarray:
        return self._V

    @property
    def edge_vectors(self) -> np.ndarray:
        return self._E

    @property
    def edge_lengths(self) -> np.ndarray:
        return self._L

    @property
    def n(self) -> int:
        return len(self._V)

    @property
    def total_length(self) -> float:
        return float(self._cum[-1])

    @property
    def diameter(self) -> float:
        if self._diam is None:
            d = self._V[:, None, :] - self._V[None, :, :]
            self._diam = float(np.sqrt((d * d).sum(-1).max()))
        return self._diam

    def validate(self, tol: ToleranceConfig = DEFAULT_TOL) -> None:
        if np.any(self._L <= tol.tol_len * max(self.diameter, 1e-300)):
            raise ValidationError("zero-length edge")
        gap, pair = self.min_nonadjacent_gap(return_pair=True)
        if gap <= tol.tol_embed * self.diameter:
            raise ValidationError(f"polygon is not embedded: edges {pair} at distance {gap:.3g}")

    def nonadjacent_pairs(self) -> np.ndarray:
        n = self.n
        i, j = np.triu_indices(n, 1)
        keep = (j - i > 1) & ~((i == 0) & (j == n - 1))
        return np.stack([i[keep], j[keep]], axis=1)

    def min_nonadjacent_gap(self, return_pair: bool = False):
        pairs = self.nonadjacent_pairs()
        if len(pairs) == 0:
            return (math.inf, None) if return_pair else math.inf
        V, W = self._V, np.roll(self._V, -1, axis=0)
        d = batch_segment_distance(V[pairs[:, 0]], W[pairs[:, 0]], V[pairs[:, 1]], W[pairs[:, 1]])
        k = int(np.argmin(d))
        if return_pair:
            return float(d[k]), tuple(int(x) for x in pairs[k])
        return float(d[k])

    # -- knot points and arcs
    def knot_point(self, edge_index: int, t: float) -> KnotPoint:
        e = int(edge_index) % self.n
        t = float(t)
        while t >= 1.0:
            e, t = (e + 1) % self.n, t - 1.0
        while t < 0.0:
            e, t = (e - 1) % self.n, t + 1.0
        return KnotPoint(e, t, self._V[e] + t * self._E[e])

    def arclength_of(self, p: KnotPoint) -> float:
        return float(self._cum[p.edge_index] + p.t * self._L[p.edge_index])

    def point_at_arclength(self, s: float) -> KnotPoint:
        s = float(s) % self.total_length
        e = int(np.searchsorted(self._cum, s, side="right") - 1)
        e = min(e, self.n - 1)
        t = (s - self._cum[e]) / self._L[e]
        # snap round-off onto vertices
        if t < 1e-9:
            t = 0.0
        elif t > 1 - 1e-9:
            e, t = (e + 1) % self.n, 0.0
        return self.knot_point(e, t)

    def arc_length(self, a: KnotPoint, b: KnotPoint) -> float:
        """Length of the arc from ``a`` to ``b`` along the orientation."""
        d = self.arclength_of(b) - self.arclength_of(a)
        return float(d % self.total_length) if d != 0 else 0.0

    def arc(self, a: KnotPoint, b: KnotPoint) -> Arc:
        return Arc(a, b, self.arc_length(a, b))

    def arc_polyline(self, a: KnotPoint, b: KnotPoint) -> np.ndarray:
        """Vertices of the arc from ``a`` to ``b`` (both endpoints included)."""
        pts = [a.point]
        e = a.edge_index
        if b.edge_index == a.edge_index and b.t > a.t:
            return np.array([a.point, b.point])
        e = (e + 1) % self.n
        while e != b.edge_index:
            pts.append(self._V[e])
            e = (e + 1) % self.n
        if b.t > 0.0 or not np.allclose(pts[-1], b.point):
            pts.append(self._V[e])
        if b.t > 0.0:
            pts.append(b.point)
        return _drop_repeats(np.array(pts))

    def common_straight_subarc(self, a: KnotPoint, b: KnotPoint, tol: float = 1e-12) -> bool:
        """True when ``a`` and ``b`` lie on one straight piece of the knot."""
        if a.edge_index == b.edge_index:
            return True
        if np.linalg.norm(a.point - b.point) <= tol * self.diameter:
            return True
        n = self.n
        i, j = a.edge_index, b.edge_index
        if (i - j) % n == 1:
            i, j = j, i
        if (j - i) % n == 1:
            c = np.cross(self._E[i], self._E[j])
            return bool(np.linalg.norm(c) <= 1e-12 * self._L[i] * self._L[j]
                        and np.dot(self._E[i], self._E[j]) > 0)
        return False

    # -- transforms and serialisation
    def transformed(self, R=None, t=None, scale: float = 1.0) -> "PolygonalKnot":
        V = self._V * scale
        if R is not None:
            V = V @ np.asarray(R).T
        if t is not None:
            V = V + np.asarray(t)
        return PolygonalKnot(V, self.name, self.unknotting_number, check=False)

    def with_vertices(self, V, check: bool = True) -> "PolygonalKnot":
        return PolygonalKnot(V, self.name, self.unknotting_number, check=check)

    def to_json(self) -> dict:
        d = {"schema": SCHEMA_VERSION, "name": self.name or "",
             "vertices": self._V.tolist()}
        if self.unknotting_number is not None:
            d["unknotting_number"] = self.unknotting_number
        return d

    @classmethod
    def from_json(cls, data, tol: ToleranceConfig = DEFAULT_TOL) -> "PolygonalKnot":
        if not isinstance(data, dict):
            raise ValidationError("knot JSON must be an object")
        verts = data.get("vertices")
        if not isinstance(verts, list) or not all(
                isinstance(v, (list, tuple)) and len(v) == 3
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
                for v in verts):
            raise ValidationError("'vertices' must be a list of [x, y, z] numbers")
        name = data.get("name")
        if name is not None and not isinstance(name, str):
            raise ValidationError("'name' must be a string")
        u = data.get("unknotting_number")
        if u is not None and (not isinstance(u, int) or isinstance(u, bool)):
            raise ValidationError("'unknotting_number' must be an integer")
        schema = data.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ValidationError(f"unsupported schema {schema!r}")
        return cls(verts, name or None, u, check=True, tol=tol)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def __repr__(self):
        return f"PolygonalKnot(name={self.name!r}, n={self.n})"


def _drop_repeats(P: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    eps = rel * max(float(np.ptp(P)), 1e-300)
    keep = [0]
    for k in range(1, len(P)):
        if np.linalg.norm(P[k] - P[keep[-1]]) > eps:
            keep.append(k)
    return P[keep]


def load_knot(path, tol: ToleranceConfig = DEFAULT_TOL) -> PolygonalKnot:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON: {exc}") from exc
    return PolygonalKnot.from_json(data, tol)


def save_knot(knot: PolygonalKnot, path) -> None:
    with open(path, "w") as fh:
        fh.write(knot.dumps())
        fh.write("\n")


# ---------------------------------------------------------------- genericity

def _normalized(V: np.ndarray) -> np.ndarray:
    c = V.mean(axis=0)
    d = V - c
    diam = np.sqrt(((d[:, None] - d[None]) ** 2).sum(-1).max())
    return d / diam


def check_genericity(K: PolygonalKnot, tol: ToleranceConfig = DEFAULT_TOL,
                     check_secants: bool = True,
                     five_secant_hook: Optional[Callable] = None) -> GenericityReport:
    """Exhaustive test of the genericity conditions.

    Vertex quadruples are tested for coplanarity, triples for collinearity;
    every pairwise-skew edge triple gets its quadric and each remaining edge
    is tested for containment.  With ``check_secants`` the n-secant
    condition is delegated to :func:`quadrisecant.secants.five_secants`.
    """
    rep = GenericityReport()
    V = _normalized(K.vertices)
    n = K.n
    for T in iter_combinations(n, 3):
        a, b, c = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
        # smallest distance from a vertex to the line through the other two
        twice_area = np.linalg.norm(np.cross(b - a, c - a), axis=1)
        longest = np.max(np.linalg.norm(np.stack([b - a, c - a, c - b]), axis=2), axis=0)
        dist = twice_area / np.maximum(longest, 1e-300)
        rep.collinear_triples += [tuple(map(int, t)) for t in T[dist < tol.tol_collinear]]
    for Q4 in iter_combinations(n, 4):
        P = [V[Q4[:, k]] for k in range(4)]
        vol6 = np.abs(np.linalg.det(np.stack([P[1] - P[0], P[2] - P[0], P[3] - P[0]], axis=1)))
        # smallest height of the tetrahedron
        faces = [np.cross(P[y] - P[x], P[z] - P[x]) for x, y, z in ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))]
        big = np.max(np.linalg.norm(np.stack(faces), axis=2), axis=0)
        height = vol6 / np.maximum(big, 1e-300)
        rep.coplanar_quadruples += [tuple(map(int, q)) for q in Q4[height < tol.tol_coplanar]]
    rep.quadric_violations = _quadric_violations(V, tol)
    if check_secants or five_secant_hook is not None:
        if five_secant_hook is None:
            from .secants import five_secants
            five_secant_hook = five_secants
        rep.n_secant_excess = list(five_secant_hook(K, tol))
    return rep


def _skew_triples(n: int) -> np.ndarray:
    out = []
    for T in iter_combinations(n, 3):
        i, j, k = T[:, 0], T[:, 1], T[:, 2]
        adj = _adjacent(i, j, n) | _adjacent(j, k, n) | _adjacent(i, k, n)
        out.append(T[~adj])
    return np.concatenate(out) if out else np.zeros((0, 3), dtype=np.int64)


def _adjacent(i, j, n):
    d = np.abs(i - j)
    return (d == 1) | (d == n - 1)


def _quadric_violations(V: np.ndarray, tol: ToleranceConfig) -> list:
    n = len(V)
    E = np.roll(V, -1, axis=0) - V
    T = _skew_triples(n)
    out = []
    if len(T) == 0:
        return out
    ts = np.array([0.0, 0.5, 1.0])
    samples = V[:, None, :] + ts[None, :, None] * E[:, None, :]     # (n, 3, 3)
    for start in range(0, len(T), 2_000):
        Tb = T[start:start + 2_000]
        Q, _ = batch_quadrics(V[Tb], E[Tb])
        dist = batch_surface_distance(Q[:, None, None], samples[None])  # (T, n, 3)
        on = np.all(dist < tol.tol_quadric, axis=2)
        on[np.arange(len(Tb))[:, None], Tb] = False
        for t, l in zip(*np.nonzero(on)):
            out.append(tuple(int(x) for x in Tb[t]) + (int(l),))
    return out


def perturb_to_generic(K: PolygonalKnot, magnitude: float, seed: int = 0,
                       tol: ToleranceConfig = DEFAULT_TOL, max_retries: int = 25,
                       check_secants: bool = False) -> PolygonalKnot:
    """Seeded vertex perturbation that stays in the knot type of ``K``.

    Each vertex moves by at most ``magnitude``; requiring the gap between
    non-adjacent edges to exceed ``2 * magnitude`` makes the straight-line
    homotopy between the two polygons an isotopy.
    """
    def generic(P):
        return check_genericity(P, tol, check_secants=check_secants).is_generic

    if magnitude == 0:
        if generic(K):
            return K
        raise CannotPerturb("knot is not generic and magnitude is 0")
    if magnitude >= K.edge_lengths.min() / 10:
        raise CannotPerturb("magnitude must be below a tenth of the shortest edge")
    gap = K.min_nonadjacent_gap()
    if gap <= 2 * magnitude:
        raise CannotPerturb(f"inter-edge gap {gap:.3g} too small for magnitude {magnitude:.3g}")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        d = rng.normal(size=(K.n, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        d *= magnitude * rng.uniform(0.0, 1.0, size=(K.n, 1)) ** (1 / 3)
        P = K.with_vertices(K.vertices + d, check=False)
        if generic(P):
            return P
    raise CannotPerturb(f"no generic perturbation after {max_retries} retries")


# ---------------------------------------------------------------- built-in families

def _sample(fn, n: int, phase: float) -> np.ndarray:
    t = 2 * np.pi * (np.arange(n) + phase) / n
    return np.stack(fn(t), axis=1)


def _torus(p: int, q: int):
    def fn(t):
        r = 2.0 + np.cos(q * t)
        return r * np.cos(p * t), r * np.sin(p * t), np.sin(q * t)
    return fn


def _figure8(t):
    r = 2.0 + np.cos(2 * t)
    return r * np.cos(3 * t), r * np.sin(3 * t), np.sin(4 * t)


def _lissajous(nx, ny, nz, px, py, pz):
    def fn(t):
        return np.cos(nx * t + px), np.cos(ny * t + py), np.cos(nz * t + pz)
    return fn


# A six-stick trefoil.  The coordinates are not taken from any reference;
# the knot type is checked by the Alexander polynomial in the test-suite.
HEXAGONAL_TREFOIL = np.array([
    [-0.1, 2.2, 1.2],
    [-2.4, -0.5, -1.2],
    [1.9, -0.7, 1.1],
    [0.5, 2.2, -1.3],
    [-1.3, -0.6, 1.7],
    [1.7, -1.7, -0.9],
])

FAMILIES = {
    # name: (minimum vertices, unknotting number)
    "round_circle": (3, 0),
    "torus": (6, None),
    "hexagonal_trefoil": (6, 1),
    "figure8_sampled": (8, 1),
    "five_two_sampled": (16, 1),
}


def _torus_unknotting(p: int, q: int) -> int:
    return (abs(p) - 1) * (abs(q) - 1) // 2


def builtin_knot(family: str, params=None, n_vertices: Optional[int] = None,
                 phase: float = 0.0) -> PolygonalKnot:
    """Polygon inscribed in a standard parametrisation.

    ``torus`` takes ``params=(p, q)`` or ``{"p": p, "q": q}``; ``five_two_sampled`` is the
    Lissajous knot with frequencies (3, 2, 7).
    """
    if family not in FAMILIES:
        raise UnknownFamily(family)
    min_n, u = FAMILIES[family]
    if family == "hexagonal_trefoil":
        return PolygonalKnot(HEXAGONAL_TREFOIL, "hexagonal_trefoil", 1)
    if n_vertices is None:
        raise TooFewVertices(f"{family} needs n_vertices")
    if family == "torus":
        if params is None:
            p, q = 2, 3
        elif isinstance(params, dict):
            p, q = int(params["p"]), int(params["q"])
        else:
            p, q = (int(x) for x in params)
        min_n = 2 * max(p, q) + 2
        fn, name, u = _torus(p, q), f"torus({p},{q})", _torus_unknotting(p, q)
    elif family == "round_circle":
        fn, name = (lambda t: (np.cos(t), np.sin(t), 0.0 * t)), "round_circle"
    elif family == "figure8_sampled":
        fn, name = _figure8, "figure8"
    else:
        fn, name = _lissajous(3, 2, 7, 0.7, 0.2, 0.0), "5_2"
    if n_vertices < min_n:
        raise TooFewVertices(f"{family} needs at least {min_n} vertices")
    return PolygonalKnot(_sample(fn, n_vertices, phase), name, u)
