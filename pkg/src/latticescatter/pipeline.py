"""End-to-end runs: config -> engine -> boundary system -> field grid -> files."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .config import RunConfig
from .green import truncation_check
from .lattice import embed
from .radiation import check_radiation, ray_points
from .solver import (FieldEvaluator, FieldGrid, build_engine, evaluate_field, hole_center,
                     residual_report, solve)

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-10
INTERIOR_TOL = 1e-9
EXPONENT_TOL = 0.05


@dataclass
class OutputBundle:
    grid: FieldGrid
    report: Dict
    paths: Dict[str, Path] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _fmt(v: float) -> str:
    return format(float(v), ".15g")


def emit_field(grid: FieldGrid, field_path, embedded_path=None) -> int:
    """Write the window as CSV (lattice and, optionally, plane coordinates).

    Rows follow lexicographic ``(x1, x2)`` order; hole points are skipped.
    Returns the number of data rows.
    """
    rows, erows = ["x1,x2,re,im,abs"], ["ex,ey,re,im,abs"]
    for p, v, h in zip(grid.points.tolist(), grid.values, grid.hole):
        if h:
            continue
        tail = f"{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v))}"
        rows.append(f"{p[0]},{p[1]},{tail}")
        ex, ey = embed(p)
        erows.append(f"{_fmt(ex)},{_fmt(ey)},{tail}")
    Path(field_path).write_text("\n".join(rows) + "\n")
    if embedded_path is not None:
        Path(embedded_path).write_text("\n".join(erows) + "\n")
    return len(rows) - 1


def mirror_asymmetry(grid: FieldGrid, x2: int, hole) -> Optional[float]:
    """Max ``|Re u(x1) - Re u(x1')|`` along row ``x2`` for pairs mirrored about the hole.

    The mirror axis is the mean ``x1`` of the hole points on that row (or of
    the whole hole when the row misses it), rounded to a half-integer.
    """
    xs, vals = grid.row(x2)
    if len(xs) == 0:
        return None
    on_row = [p[0] for p in hole if p[1] == x2] or [p[0] for p in hole]
    if not on_row:
        return None
    twice_c = int(round(2 * float(np.mean(on_row))))
    lookup = dict(zip(xs.tolist(), vals.real))
    diffs = [abs(lookup[a] - lookup[twice_c - a]) for a in lookup
             if twice_c - a in lookup and a != twice_c - a]
    return float(max(diffs)) if diffs else None


def run(config: RunConfig, out_dir=None, write: bool = True) -> OutputBundle:
    spec = config.problem()
    spec.validate()
    center = config.center or hole_center(spec)
    radii = np.arange(config.radii[0], config.radii[1] + 1)
    rays = [math.radians(a) for a in config.rays]
    probe = np.concatenate([ray_points(a, radii, center) for a in rays]) if rays else None
    if probe is not None:
        probe = np.concatenate([probe, probe + (1, 0), probe + (0, 1)])

    engine = build_engine(spec, probe)
    logger.info("engine: k=%g eps=%g n_max=%d", engine.k, engine.eps, engine.n_max)
    system, engine = solve(spec, engine, validate=False)
    grid = evaluate_field(spec, system, engine)
    radiation = None
    if rays:
        radiation = check_radiation(FieldEvaluator(spec, system, engine), spec.k, rays, radii,
                                    center=center)
    diag = residual_report(grid, spec, system, engine, radiation)

    fmax = max(abs(v) for v in spec.data.values())
    failures = []
    if not diag.boundary_residual <= BOUNDARY_TOL * (1.0 + fmax):
        failures.append(f"boundary_residual {diag.boundary_residual:.3e}")
    if not diag.interior_residual <= INTERIOR_TOL:
        failures.append(f"interior_residual {diag.interior_residual:.3e}")
    if radiation is not None and not radiation.passed(EXPONENT_TOL):
        failures.append("radiation_check")

    report = {
        "case": spec.case,
        "k": spec.k,
        "eps": spec.eps,
        "eta": spec.eta if spec.case == "II" else None,
        "n_max": engine.n_max,
        "m": system.enum.m,
        "boundary_points": [list(p) for p in system.enum.points],
        "side_counts": list(system.enum.counts),
        "phi": [[float(v.real), float(v.imag)] for v in system.phi],
        "diagnostics": diag.as_dict(),
        "micro_asymmetry_row2": mirror_asymmetry(grid, 2, spec.hole),
        "failures": failures,
    }
    if radiation is not None:
        report["radiation"] = {
            "center": list(center),
            "radii": list(config.radii),
            "rays": [{"alpha_deg": math.degrees(r.alpha), "exponent": r.exponent,
                      "phase_slopes": list(r.phase_slopes),
                      "phase_decreasing": r.phase_decreasing} for r in radiation.rays],
        }
    if config.stability_check:
        report["truncation_change"] = truncation_check(engine)

    bundle = OutputBundle(grid=grid, report=report, failures=failures)
    if write:
        out = Path(out_dir or config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "field": out / f"{config.prefix}.csv",
            "embedded": out / f"{config.prefix}_embedded.csv",
            "report": out / f"{config.prefix}_report.json",
        }
        emit_field(grid, paths["field"], paths["embedded"])
        paths["report"].write_text(json.dumps(report, indent=2, sort_keys=True, default=_jsonable)
                                   + "\n")
        bundle.paths = paths
    return bundle


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialise {type(obj)!r}")
