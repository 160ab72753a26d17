"""Difference layer potentials and the discrete Green formulas.

All potentials take a :class:`~latticescatter.lattice.BoundaryEnumeration`
(which fixes the boundary order and side memberships), a density aligned
with it, and an array of target points.  Multi-side boundary points
contribute once per side unless a reduced (one summand per point) form is
requested.
"""
from __future__ import annotations

import math
from typing import Callable, Mapping, Optional

import numpy as np

from .green import GreenEngine
from .lattice import (DIRECTIONS, BoundaryEnumeration, Point, Region, direction,
                      enumerate_boundary)

LatticeFunction = Callable[[np.ndarray], np.ndarray]


class SideMismatch(ValueError):
    pass


class CaseMismatch(ValueError):
    pass


def fsum_complex(terms: np.ndarray) -> np.ndarray:
    """Compensated sum over the last axis, preserving term order."""
    terms = np.asarray(terms, dtype=complex)
    flat = terms.reshape(-1, terms.shape[-1])
    out = np.array([complex(math.fsum(row.real), math.fsum(row.imag)) for row in flat])
    return out.reshape(terms.shape[:-1])


def _targets(x) -> np.ndarray:
    return np.atleast_2d(np.asarray(x, dtype=np.int64))


def _squeeze(values: np.ndarray, x):
    return complex(values[0]) if np.ndim(x) == 1 else values


def normal_derivative(u: Callable, y: Point, j: int, region: Optional[Region] = None) -> complex:
    """``T u(y) = u(y) - u(y - e_j)`` for ``y`` on side ``j``.

    If ``region`` is given the side is checked against its interior.
    """
    e = direction(j)
    inner = (y[0] - e[0], y[1] - e[1])
    if region is not None and not region.is_interior(inner):
        raise SideMismatch(f"{y} - e_{j} = {inner} is not an interior point")
    return complex(u(tuple(y))) - complex(u(inner))


def single_layer(engine: GreenEngine, enum: BoundaryEnumeration, phi, x,
                 reduced: bool = False):
    """``V phi(x) = sum_y n_y G(x - y) phi(y)``.

    ``n_y`` is the number of sides of ``y``; ``reduced=True`` keeps one
    summand per boundary point instead.
    """
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (enum.m,):
        raise ValueError(f"density has shape {phi.shape}, expected ({enum.m},)")
    xs = _targets(x)
    ys = np.array(enum.points)
    weight = np.ones(enum.m) if reduced else np.array(enum.counts, dtype=float)
    g = engine(xs[:, None, :] - ys[None, :, :])
    return _squeeze(fsum_complex(g * (weight * phi)[None, :]), x)


def _double_layer_terms(engine, enum, phi, xs):
    terms = []
    for idx, (y, inward) in enumerate(zip(enum.points, enum.inward)):
        gy = engine(xs - np.array(y))
        for z in inward:
            terms.append((gy - engine(xs - np.array(z))) * phi[idx])
    return np.stack(terms, axis=-1)


def double_layer(engine: GreenEngine, enum: BoundaryEnumeration, phi, x):
    """``W phi(x) = sum_y (T G(x - y) + delta_{x,y}) phi(y)``, ``T`` over every side of ``y``."""
    phi = np.asarray(phi, dtype=complex)
    xs = _targets(x)
    terms = _double_layer_terms(engine, enum, phi, xs)
    index = {p: i for i, p in enumerate(enum.points)}
    delta = np.array([phi[index[tuple(p)]] if tuple(p) in index else 0.0 for p in xs.tolist()],
                     dtype=complex)
    total = np.concatenate([terms, delta[:, None]], axis=-1)
    return _squeeze(fsum_complex(total), x)


def double_layer_complement(engine: GreenEngine, enum: BoundaryEnumeration, phi, x,
                            region: Optional[Region] = None):
    """``W' phi(x) = sum_y sum_l (G(x - y) - G(x - y^-_l)) phi(y)``.

    ``enum`` must carry sides relative to the hole.  When ``region`` is
    given it must be a plane-with-hole region.
    """
    if region is not None and not (region.cofinite and region.hole):
        raise CaseMismatch("the complement double layer needs a non-empty hole")
    phi = np.asarray(phi, dtype=complex)
    xs = _targets(x)
    return _squeeze(fsum_complex(_double_layer_terms(engine, enum, phi, xs)), x)


def green_representation(engine: GreenEngine, enum: BoundaryEnumeration,
                         u_boundary: Mapping[Point, complex],
                         tu_boundary: Mapping[tuple, complex], x,
                         source: Optional[Mapping[Point, complex]] = None) -> complex:
    """Right-hand side of the discrete Green representation at ``x``.

    ``tu_boundary`` maps ``(y, j)`` to ``T u(y)`` on side ``j``; ``source``
    optionally maps interior points to ``(Delta + k^2 + i eps) u``.
    """
    x = np.asarray(x, dtype=np.int64)
    terms = []
    for y, sides, inward in zip(enum.points, enum.sides, enum.inward):
        gy = engine(x - np.array(y))
        for j, z in zip(sides, inward):
            tg = gy - engine(x - np.array(z))
            terms.append(u_boundary[y] * tg - gy * tu_boundary[(y, j)])
    for y, val in sorted((source or {}).items()):
        terms.append(engine(x - np.array(y)) * val)
    return complex(fsum_complex(np.array(terms))) if terms else 0j


def represent(engine: GreenEngine, region: Region, u: Callable, x,
              with_source: bool = True) -> complex:
    """Green representation of ``u`` at ``x`` built from ``u`` on the finite ``region``."""
    enum = enumerate_boundary(region)
    ub = {y: complex(u(y)) for y in enum.points}
    tu = {(y, j): normal_derivative(u, y, j) for y, sides in zip(enum.points, enum.sides)
          for j in sides}
    source = None
    if with_source:
        source = {v: apply_helmholtz(u, v, engine.k2) for v in region.interior}
    return green_representation(engine, enum, ub, tu, x, source)


def laplacian(u: Callable, x: Point) -> complex:
    x1, x2 = x
    return sum(complex(u((x1 + d1, x2 + d2))) for d1, d2 in DIRECTIONS) - 6.0 * complex(u((x1, x2)))


def apply_helmholtz(u: Callable, x: Point, k2: complex) -> complex:
    return laplacian(u, x) + k2 * complex(u(tuple(x)))


def green_second_identity_check(u: Callable, v: Callable, region: Region) -> float:
    """Residual of the discrete Green second identity on a finite region."""
    lhs = [complex(u(x)) * laplacian(v, x) - complex(v(x)) * laplacian(u, x)
           for x in sorted(region.interior)]
    enum = enumerate_boundary(region)
    rhs = []
    for y, inward in zip(enum.points, enum.inward):
        uy, vy = complex(u(y)), complex(v(y))
        for z in inward:
            rhs.append(uy * (vy - complex(v(z))) - vy * (uy - complex(u(z))))
    return abs(complex(fsum_complex(np.array(lhs + [-r for r in rhs]))))
