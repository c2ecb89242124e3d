"""Command-line interface.

Exit codes: 0 success, 2 input not generic, 3 invalid input, 4 empty
domain (for example no quadrisecants to approximate).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import measures as ms
from .approx import conjecture_report, quadrisecant_approximation
from .errors import (
    CannotPerturb,
    FiveSecantDetected,
    NoQuadrisecants,
    NotGeneric,
    UnknownFamily,
    ValidationError,
    TooFewVertices,
)
from .export import quadrisecant_segment, write_scene
from .knot import PolygonalKnot, builtin_knot, check_genericity, load_knot, perturb_to_generic, save_knot
from .secants import CSV_HEADER, csv_rows, enumerate_quadrisecants, quadrisecant_upper_bound
from .tolerances import DEFAULT_TOL, ToleranceConfig
from .topology import build_theta, essential_quadrisecant_check, parallel_with_zero_linking

SCHEMA = 1
EXIT_OK, EXIT_NOT_GENERIC, EXIT_INVALID, EXIT_EMPTY = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    inputs: list
    tol_overrides: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    format: str = "json"
    export: Optional[str] = None
    perturb: float = 0.0
    n_vertices: Optional[int] = None
    params: Optional[tuple] = None
    essential: bool = True
    out_dir: Optional[str] = None
    grid: Optional[str] = None
    theta: bool = False

    @property
    def tol(self) -> ToleranceConfig:
        return DEFAULT_TOL.with_overrides(**self.tol_overrides)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def load_input(spec: str, cfg: RunConfig) -> PolygonalKnot:
    """A knot JSON path or ``builtin:<family>``."""
    if spec.startswith("builtin:"):
        K = builtin_knot(spec.split(":", 1)[1], cfg.params, cfg.n_vertices)
    else:
        K = load_knot(spec, cfg.tol)
    if cfg.perturb > 0:
        K = perturb_to_generic(K, cfg.perturb * K.diameter, seed=cfg.seed, tol=cfg.tol)
    return K


# ---------------------------------------------------------------- commands

def cmd_quadrisecants(cfg: RunConfig, out) -> int:
    K = load_input(cfg.inputs[0], cfg)
    tol = cfg.tol
    rep = check_genericity(K, tol, check_secants=False)
    if not rep.is_generic:
        raise NotGeneric("knot is not generic; rerun with --perturb <magnitude>", rep)
    qs = enumerate_quadrisecants(K, tol, check=False, threads=cfg.threads)
    if cfg.essential:
        qs = [essential_quadrisecant_check(K, q, seed=cfg.seed, tol=tol) for q in qs]
    bound = quadrisecant_upper_bound(K.n)
    if cfg.format == "csv":
        out.write(_csv(CSV_HEADER + ["essential"], [r + [q.essential] for r, q in zip(csv_rows(qs), qs)]))
    else:
        counts = {c: sum(q.dihedral_class == c for q in qs) for c in ("simple", "flipped", "alternating")}
        report = {
            "schema": SCHEMA,
            "knot": K.name,
            "n_edges": K.n,
            "genericity": rep.summary(),
            "count": len(qs),
            "counts": counts,
            "upper_bound": bound,
            "upper_bound_ok": len(qs) <= bound,
            "quadrisecants": [q.to_json() for q in qs],
        }
        if K.unknotting_number is not None:
            report["pannwitz_floor"] = 2 * K.unknotting_number ** 2
            report["pannwitz_ok"] = len(qs) >= 2 * K.unknotting_number ** 2
        out.write(_dumps(report))
    if cfg.export:
        _export(K, qs, cfg)
    return EXIT_OK


def _export(K, qs, cfg: RunConfig, theta: bool = False):
    polys, closed = [K.vertices], [True]
    for q in qs:
        polys.append(quadrisecant_segment(q))
        closed.append(False)
    if theta:
        for q in qs:
            if q.dihedral_class != "alternating":
                continue
            th = build_theta(K, q.points[1], q.points[2], seed=cfg.seed, tol=cfg.tol)
            polys.append(parallel_with_zero_linking(th, seed=cfg.seed).delta)
            closed.append(True)
    write_scene(cfg.export, polys, closed)


def cmd_approx(cfg: RunConfig, out) -> int:
    K = load_input(cfg.inputs[0], cfg)
    A = quadrisecant_approximation(K, cfg.tol, seed=cfg.seed)
    verdict = conjecture_report(K, cfg.tol, seed=cfg.seed, approx=A)
    verdict["schema"] = SCHEMA
    if cfg.out_dir:
        d = Path(cfg.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        hat = PolygonalKnot(A.polyline, name=f"approx({K.name})", check=False)
        save_knot(hat, d / "approximation.json")
        (d / "verdict.json").write_text(_dumps(verdict))
    if cfg.format == "csv":
        out.write(_csv(["field", "value"], [[k, verdict[k]] for k in sorted(verdict)]))
    else:
        out.write(_dumps(verdict))
    return EXIT_OK


def cmd_measures(cfg: RunConfig, out) -> int:
    K = load_input(cfg.inputs[0], cfg)
    R = ms.measure_report(K, seed=cfg.seed, tol=cfg.tol)
    data = R.to_json()
    data["schema"] = SCHEMA
    if cfg.format == "csv":
        flat = []
        for k in sorted(data):
            v = data[k]
            flat.append([k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v])
        out.write(_csv(["field", "value"], flat))
    else:
        out.write(_dumps(data))
    return EXIT_OK


def cmd_bounds(cfg: RunConfig, out) -> int:
    kinds = ms.BOUND_TYPES if not cfg.inputs else cfg.inputs
    table = {}
    for kind in kinds:
        val, arg = ms.minimize_bound(kind, ms.BoundConfig(opt_tol=cfg.tol.opt_tol))
        table[kind] = {"minimum": val, "argmin": arg}
    if cfg.grid:
        Path(cfg.grid).write_text(_csv(["function", "x", "y", "theta", "value"], ms.bound_grid_rows()))
    if cfg.format == "csv":
        out.write(_csv(["type", "minimum", "r", "s", "t"],
                       [[k, v["minimum"], v["argmin"]["r"], v["argmin"]["s"], v["argmin"]["t"]]
                        for k, v in table.items()]))
    else:
        out.write(_dumps({"schema": SCHEMA, "bounds": table, "closed_forms": ms.bound_constants()}))
    return EXIT_OK


def cmd_export(cfg: RunConfig, out) -> int:
    if not cfg.export:
        raise ValidationError("export needs --export <path.obj|path.ply>")
    K = load_input(cfg.inputs[0], cfg)
    qs = enumerate_quadrisecants(K, cfg.tol, threads=cfg.threads)
    _export(K, qs, cfg, theta=cfg.theta)
    out.write(_dumps({"schema": SCHEMA, "export": cfg.export, "quadrisecants": len(qs)}))
    return EXIT_OK


COMMANDS = {
    "quadrisecants": cmd_quadrisecants,
    "approx": cmd_approx,
    "measures": cmd_measures,
    "bounds": cmd_bounds,
    "export": cmd_export,
}


# ---------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadrisecant",
                                description="Quadrisecants, essential secants and ropelength bounds of polygonal knots.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--export", default=None, help="scene file (.obj or .ply)")
    common.add_argument("--perturb", type=float, default=0.0,
                        help="perturb vertices by this fraction of the diameter")
    common.add_argument("--n-vertices", type=int, default=None, help="vertex count for builtin inputs")
    common.add_argument("--params", default=None, help="builtin parameters, e.g. 2,3 for torus")
    for f_ in fields(ToleranceConfig):
        common.add_argument("--" + f_.name.replace("_", "-"), dest="tolopt_" + f_.name,
                            type=float, default=None, metavar="X")
    sub = p.add_subparsers(dest="command", required=True)
    q = sub.add_parser("quadrisecants", parents=[common], help="enumerate and classify quadrisecants")
    q.add_argument("input")
    q.add_argument("--no-essential", action="store_true", help="skip essentiality certificates")
    a = sub.add_parser("approx", parents=[common], help="quadrisecant approximation and verdict")
    a.add_argument("input")
    a.add_argument("--out-dir", default=None)
    m_ = sub.add_parser("measures", parents=[common], help="curvature, thickness, distortion, bridges")
    m_.add_argument("input")
    b = sub.add_parser("bounds", parents=[common], help="minimised ropelength bound constants")
    b.add_argument("types", nargs="*", default=[], help="simple, flipped and/or alternating")
    b.add_argument("--grid", default=None, help="write f, g, m sample grid CSV here")
    e = sub.add_parser("export", parents=[common], help="write knot and quadrisecant lines")
    e.add_argument("input")
    e.add_argument("--theta", action="store_true", help="include parallel loops of middle secants")
    return p


def config_from_args(ns) -> RunConfig:
    tol = {k[len("tolopt_"):]: v for k, v in vars(ns).items() if k.startswith("tolopt_") and v is not None}
    inputs = [ns.input] if hasattr(ns, "input") else list(getattr(ns, "types", []))
    params = tuple(int(x) for x in ns.params.split(",")) if ns.params else None
    return RunConfig(ns.command, inputs, tol, ns.seed, ns.threads, ns.format, ns.export,
                     ns.perturb, ns.n_vertices, params,
                     essential=not getattr(ns, "no_essential", False),
                     out_dir=getattr(ns, "out_dir", None), grid=getattr(ns, "grid", None),
                     theta=getattr(ns, "theta", False))


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg, out)
    except (NotGeneric, FiveSecantDetected, CannotPerturb) as exc:
        print(f"error: {exc} (try --perturb 1e-4)", file=sys.stderr)
        return EXIT_NOT_GENERIC
    except (ValidationError, UnknownFamily, TooFewVertices, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NoQuadrisecants as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    raise SystemExit(main())
