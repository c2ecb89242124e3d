"""Scene export of polylines as OBJ or ASCII PLY line records."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def quadrisecant_segment(q, overhang: float = 0.1) -> np.ndarray:
    """Segment a-d of a quadrisecant line, extended by ``overhang`` of its
    length at both ends."""
    a, d = q.points[0].point, q.points[3].point
    v = d - a
    return np.array([a - overhang * v, d + overhang * v])


def write_obj(path, polylines, closed=None) -> None:
    """One ``l`` record per polyline; ``closed[k]`` repeats the first vertex."""
    closed = closed or [False] * len(polylines)
    lines, base = [], 1
    out = ["# polylines"]
    for P, c in zip(polylines, closed):
        P = np.asarray(P, dtype=float)
        out += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in P]
        idx = list(range(base, base + len(P)))
        if c:
            idx.append(base)
        lines.append("l " + " ".join(map(str, idx)))
        base += len(P)
    Path(path).write_text("\n".join(out + lines) + "\n")


def write_ply(path, polylines, closed=None) -> None:
    """ASCII PLY with ``vertex`` and ``edge`` elements."""
    closed = closed or [False] * len(polylines)
    verts, edges, base = [], [], 0
    for P, c in zip(polylines, closed):
        P = np.asarray(P, dtype=float)
        verts += P.tolist()
        m = len(P)
        edges += [(base + k, base + k + 1) for k in range(m - 1)]
        if c:
            edges.append((base + m - 1, base))
        base += m
    head = ["ply", "format ascii 1.0", f"element vertex {len(verts)}",
            "property double x", "property double y", "property double z",
            f"element edge {len(edges)}", "property int vertex1", "property int vertex2",
            "end_header"]
    body = [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in verts] + [f"{a} {b}" for a, b in edges]
    Path(path).write_text("\n".join(head + body) + "\n")


def write_scene(path, polylines, closed=None) -> None:
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        write_ply(path, polylines, closed)
    elif suffix == ".obj":
        write_obj(path, polylines, closed)
    else:
        raise ValueError(f"unknown scene format {suffix!r}; use .obj or .ply")


def read_obj_polylines(path) -> list:
    """Minimal OBJ reader for ``v`` and ``l`` records."""
    V, out = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            V.append([float(x) for x in parts[1:4]])
        elif parts[0] == "l":
            out.append(np.array([V[int(k) - 1] for k in parts[1:]]))
    return out
