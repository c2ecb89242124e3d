"""One auditable tolerance policy for every geometric predicate.

Length-like tolerances are relative: they are multiplied by the scene
diameter before use (see :meth:`ToleranceConfig.scaled`).
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class ToleranceConfig:
    tol_unit: float = 1e-12       # |norm(dir) - 1|
    tol_skew: float = 1e-9        # relative line-line distance
    tol_dir: float = 1e-9         # |sin| between directions counted as parallel
    tol_quadric: float = 1e-9     # first-order distance from a point to the surface
    tol_on_surface: float = 1e-8
    tol_line: float = 1e-7        # canonical line comparison
    tol_len: float = 1e-9         # relative segment length / point merge
    tol_embed: float = 1e-9       # relative self-distance for embeddedness
    tol_coplanar: float = 1e-9    # smallest tetrahedron height
    tol_collinear: float = 1e-9   # distance from a vertex to the opposite side
    tol_hit: float = 1e-7         # relative residual for a line meeting an edge
    tol_param_snap: float = 1e-10  # edge-parameter snapping to vertex
    cond_max: float = 1e12
    family_step: float = 1.0 / 64.0
    opt_tol: float = 1e-6

    def with_overrides(self, **overrides) -> "ToleranceConfig":
        known = {f.name for f in fields(self)}
        bad = set(overrides) - known
        if bad:
            raise KeyError(f"unknown tolerance(s): {sorted(bad)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = ToleranceConfig()
