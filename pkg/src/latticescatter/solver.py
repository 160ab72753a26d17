"""Boundary linear systems for the exterior Dirichlet problem.

Two geometries are handled:

* ``case="I"``: the whole plane with a finite boundary set.  The field is a
  single-layer potential ``u(x) = sum_i G(x - y_i) phi_i`` and the system is
  ``H phi = f`` with ``H_ij = G(y_i - y_j)``.
* ``case="II"``: the plane with a finite hole sharing its boundary.  The
  field is ``u(x) = (1 + i eta) sum_j n_j G(x - y_j) phi_j
  - sum_j sum_l G(x - y^-_jl) phi_j`` and the system is
  ``((1 + i eta) H N - K) phi = f``, where ``n_j`` counts the sides of ``y_j``
  relative to the hole and ``y^-_jl`` are the adjacent hole points.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
import scipy.linalg

from .green import GreenEngine, stencil
from .lattice import (BoundaryEnumeration, Point, Region, check_cone_condition,
                      complement_region, enumerate_boundary, exterior_region, full_plane,
                      lattice_distance, validate_region)
from .potentials import CaseMismatch, fsum_complex
from .radiation import K_MAX

logger = logging.getLogger(__name__)

COND_MAX = 1e14


class NumericallySingular(ArithmeticError):
    pass


Window = Tuple[Tuple[int, int], Tuple[int, int]]


@dataclass(frozen=True)
class ProblemSpec:
    case: str
    boundary: frozenset
    k: float
    data: Mapping[Point, complex]
    hole: frozenset = frozenset()
    eta: float = 1.0
    eps: float = 1e-6
    n_max: Optional[int] = None
    window: Optional[Window] = None

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(map(tuple, self.boundary)))
        object.__setattr__(self, "hole", frozenset(map(tuple, self.hole)))
        object.__setattr__(self, "data", {tuple(p): complex(v) for p, v in self.data.items()})
        if self.case not in ("I", "II"):
            raise ValueError(f"case must be 'I' or 'II', got {self.case!r}")
        if not 0.0 < self.k < K_MAX:
            raise ValueError(f"k={self.k} lies outside (0, 2*sqrt(2))")
        if self.case == "II" and self.eta == 0:
            raise ValueError("eta must be non-zero")
        if self.case == "I" and self.hole:
            raise CaseMismatch("case I has an empty complement")
        if self.case == "II" and not self.hole:
            raise CaseMismatch("case II needs a non-empty hole")
        missing = sorted(self.boundary - set(self.data))
        if missing:
            raise ValueError(f"boundary data missing at {missing[0]}")

    @property
    def region(self) -> Region:
        if self.case == "I":
            return full_plane(self.boundary)
        return exterior_region(self.hole, self.boundary)

    def validate(self) -> None:
        """Check region axioms for the domain (and the hole) plus the cone condition."""
        validate_region(self.region)
        if self.case == "II":
            validate_region(complement_region(self.region))
        check_cone_condition(self.region)

    def enumeration(self) -> BoundaryEnumeration:
        if self.case == "I":
            return enumerate_boundary(self.region)
        return enumerate_boundary(complement_region(self.region))

    def rhs(self, enum: BoundaryEnumeration) -> np.ndarray:
        return np.array([self.data[p] for p in enum.points], dtype=complex)

    def with_data(self, data: Mapping[Point, complex]) -> "ProblemSpec":
        return replace(self, data=dict(data))


@dataclass
class BoundarySystem:
    case: str
    enum: BoundaryEnumeration
    matrix: np.ndarray
    rhs: np.ndarray
    eta: float = 1.0
    phi: Optional[np.ndarray] = None
    condition: Optional[float] = None
    relative_residual: Optional[float] = None


def required_distance(spec: ProblemSpec, points: Optional[np.ndarray] = None) -> int:
    """Largest lattice distance the engine must serve for ``spec`` (plus stencils)."""
    sources = list(spec.boundary) + list(spec.hole)
    targets = [tuple(p) for p in points] if points is not None else []
    targets += list(spec.boundary)
    if spec.window is not None:
        (a0, a1), (b0, b1) = spec.window
        targets += [(a0, b0), (a0, b1), (a1, b0), (a1, b1)]
    worst = 0
    for t in targets:
        for s in sources:
            worst = max(worst, lattice_distance((t[0] - s[0], t[1] - s[1])))
    return worst + 1


def build_engine(spec: ProblemSpec, extra_points: Optional[np.ndarray] = None) -> GreenEngine:
    return GreenEngine.build(spec.k, spec.eps, n_max=spec.n_max,
                             max_distance=required_distance(spec, extra_points))


def _green_matrix(engine: GreenEngine, rows, cols) -> np.ndarray:
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    return engine(r[:, None, :] - c[None, :, :])


def assemble_case1(spec: ProblemSpec, engine: GreenEngine) -> BoundarySystem:
    if spec.case != "I":
        raise CaseMismatch("assemble_case1 needs a case I problem")
    enum = spec.enumeration()
    H = _green_matrix(engine, enum.points, enum.points)
    return BoundarySystem("I", enum, H, spec.rhs(enum))


def assemble_case2(spec: ProblemSpec, engine: GreenEngine) -> BoundarySystem:
    if spec.case != "II":
        raise CaseMismatch("assemble_case2 needs a case II problem")
    enum = spec.enumeration()
    pts = np.array(enum.points)
    H = _green_matrix(engine, pts, pts)
    N = np.diag(np.array(enum.counts, dtype=float))
    K = np.zeros_like(H)
    for j, inward in enumerate(enum.inward):
        K[:, j] = _green_matrix(engine, pts, inward).sum(axis=1)
    M = (1.0 + 1j * spec.eta) * H @ N - K
    return BoundarySystem("II", enum, M, spec.rhs(enum), eta=spec.eta)


def assemble(spec: ProblemSpec, engine: GreenEngine) -> BoundarySystem:
    return assemble_case1(spec, engine) if spec.case == "I" else assemble_case2(spec, engine)


def solve_system(system: BoundarySystem) -> np.ndarray:
    """Dense LU solve with one step of iterative refinement.

    Stores the density, the 2-norm condition number and the relative residual
    on ``system``; raises :class:`NumericallySingular` past ``COND_MAX``.
    """
    M, F = system.matrix, system.rhs
    cond = float(np.linalg.cond(M))
    system.condition = cond
    if not np.isfinite(cond) or cond > COND_MAX:
        raise NumericallySingular(f"condition number {cond:.3e} exceeds {COND_MAX:.0e}")
    lu = scipy.linalg.lu_factor(M, check_finite=False)
    phi = scipy.linalg.lu_solve(lu, F, check_finite=False)
    phi = phi + scipy.linalg.lu_solve(lu, F - M @ phi, check_finite=False)
    fnorm = np.linalg.norm(F)
    system.relative_residual = float(np.linalg.norm(M @ phi - F) / fnorm) if fnorm > 0 else 0.0
    system.phi = phi
    return phi


class FieldEvaluator:
    """Scattered field ``u`` for a solved density, evaluable at any lattice points."""

    def __init__(self, spec: ProblemSpec, system: BoundarySystem, engine: GreenEngine):
        if system.phi is None:
            raise ValueError("system has not been solved")
        self.spec, self.system, self.engine = spec, system, engine
        enum, phi = system.enum, system.phi
        src, wts = [], []
        if system.case == "I":
            for y, ph in zip(enum.points, phi):
                src.append(y)
                wts.append(ph)
        else:
            c = 1.0 + 1j * system.eta
            for y, n, inward, ph in zip(enum.points, enum.counts, enum.inward, phi):
                src.append(y)
                wts.append(c * n * ph)
                for z in inward:
                    src.append(z)
                    wts.append(-ph)
        self._sources = np.array(src, dtype=np.int64)
        self._weights = np.array(wts, dtype=complex)

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
        g = self.engine(pts[:, None, :] - self._sources[None, :, :])
        return fsum_complex(g * self._weights[None, :])


@dataclass
class FieldGrid:
    """Field values on a rectangular window; hole points carry ``nan``."""

    points: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    hole: np.ndarray = field(repr=False)
    shape: Tuple[int, int]
    k: float
    case: str
    window: Window

    def row(self, x2: int) -> Tuple[np.ndarray, np.ndarray]:
        """``(x1, u(x1, x2))`` along a window row, hole points dropped."""
        sel = (self.points[:, 1] == x2) & ~self.hole
        return self.points[sel, 0], self.values[sel]


def window_points(window: Window) -> np.ndarray:
    (a0, a1), (b0, b1) = window
    a, b = np.meshgrid(np.arange(a0, a1 + 1), np.arange(b0, b1 + 1), indexing="ij")
    return np.stack([a.ravel(), b.ravel()], axis=1)


def evaluate_field(spec: ProblemSpec, system: BoundarySystem, engine: GreenEngine,
                   window: Optional[Window] = None) -> FieldGrid:
    window = window or spec.window
    if window is None:
        raise ValueError("no evaluation window given")
    pts = window_points(window)
    hole = np.array([tuple(p) in spec.hole for p in pts.tolist()], dtype=bool)
    values = np.full(len(pts), np.nan + 0j)
    values[~hole] = FieldEvaluator(spec, system, engine)(pts[~hole])
    (a0, a1), (b0, b1) = window
    return FieldGrid(points=pts, values=values, hole=hole, shape=(a1 - a0 + 1, b1 - b0 + 1),
                     k=spec.k, case=spec.case, window=window)


def boundary_residual(grid: FieldGrid, spec: ProblemSpec,
                      evaluator: Optional[FieldEvaluator] = None) -> float:
    """``max |u(y) - f(y)|`` over boundary points (all of them when an evaluator is given)."""
    if evaluator is not None:
        ys = np.array(sorted(spec.boundary))
        vals = evaluator(ys)
        return float(max(abs(v - spec.data[tuple(y)]) for y, v in zip(ys.tolist(), vals)))
    worst = 0.0
    for p, v in zip(grid.points.tolist(), grid.values):
        if tuple(p) in spec.boundary:
            worst = max(worst, abs(v - spec.data[tuple(p)]))
    return float(worst)


def interior_residual(grid: FieldGrid, spec: ProblemSpec, k2: complex) -> float:
    """Max ``|(Delta + k^2 + i eps) u|`` at domain-interior window points with a full stencil."""
    lookup = {tuple(p): v for p, v in zip(grid.points.tolist(), grid.values)}
    region = spec.region
    inner = [p for p in lookup if region.is_interior(p)
             and all((p[0] + d1, p[1] + d2) in lookup
                     for d1, d2 in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)))]
    if not inner:
        return 0.0

    def at(pts):
        return np.array([lookup[tuple(q)] for q in pts.tolist()])

    res = stencil(at, np.array(inner), k2)
    return float(np.max(np.abs(res)))


@dataclass
class Diagnostics:
    boundary_residual: float
    interior_residual: float
    condition: Optional[float]
    relative_residual: Optional[float]
    decay_statistic: Optional[float] = None
    radiation: Optional[object] = None

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {
            "boundary_residual": self.boundary_residual,
            "interior_residual": self.interior_residual,
            "condition": self.condition,
            "relative_residual": self.relative_residual,
            "decay_statistic": self.decay_statistic,
        }


def residual_report(grid: FieldGrid, spec: ProblemSpec, system: Optional[BoundarySystem] = None,
                    engine: Optional[GreenEngine] = None, radiation=None) -> Diagnostics:
    """Collect residual diagnostics; ``radiation`` is an optional :class:`RadiationReport`."""
    k2 = engine.k2 if engine is not None else spec.k ** 2 + 1j * spec.eps
    evaluator = None
    if system is not None and engine is not None and system.phi is not None:
        evaluator = FieldEvaluator(spec, system, engine)
    return Diagnostics(
        boundary_residual=boundary_residual(grid, spec, evaluator),
        interior_residual=interior_residual(grid, spec, k2),
        condition=system.condition if system is not None else None,
        relative_residual=system.relative_residual if system is not None else None,
        decay_statistic=radiation.decay_statistic() if radiation is not None else None,
        radiation=radiation,
    )


def hole_center(spec: ProblemSpec) -> Tuple[float, float]:
    pts = list(spec.hole) or list(spec.boundary)
    return (float(np.mean([p[0] for p in pts])), float(np.mean([p[1] for p in pts])))


def solve(spec: ProblemSpec, engine: Optional[GreenEngine] = None, validate: bool = True):
    """Validate, assemble and solve; returns ``(system, engine)``."""
    if validate:
        spec.validate()
    engine = engine or build_engine(spec)
    system = assemble(spec, engine)
    solve_system(system)
    logger.info("solved case %s system, m=%d, cond=%.3e", spec.case, system.enum.m,
                system.condition)
    return system, engine


def max_abs(values) -> float:
    v = np.asarray(values)
    v = v[np.isfinite(v)]
    return float(np.max(np.abs(v))) if v.size else 0.0

