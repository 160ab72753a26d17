"""Saddle points of the dispersion relation and radiation diagnostics.

For a direction ``alpha`` (measured in lattice coordinates,
``x1 = |x| cos(alpha)``, ``x2 = |x| sin(alpha)``) the phases
``xi* = (xi1, xi2)`` and the scale ``zeta > 0`` solve

    2 zeta (sin xi1 + sin(xi1 - xi2)) = cos(alpha)
    2 zeta (sin xi2 - sin(xi1 - xi2)) = sin(alpha)
    k^2 - 6 + 2 cos xi1 + 2 cos xi2 + 2 cos(xi1 - xi2) = 0

A radiating field then behaves like ``u(x + e_j) ~ exp(i xi*_j) u(x)`` with
amplitude ``O(|x|^{-1/2})``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .lattice import Point, direction

K_MAX = 2.0 * math.sqrt(2.0)
_STEP = math.pi / 64


class NoConvergence(RuntimeError):
    pass


class InsufficientSamples(ValueError):
    pass


class NonConvergent(RuntimeError):
    pass


@dataclass(frozen=True)
class SaddlePoint:
    alpha: float
    k: float
    xi1: float
    xi2: float
    zeta: float

    @property
    def xi(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2])

    @property
    def mu(self) -> float:
        """Phase speed along the ray: ``xi* . (cos alpha, sin alpha)``."""
        return self.xi1 * math.cos(self.alpha) + self.xi2 * math.sin(self.alpha)

    def residuals(self) -> np.ndarray:
        return _system(np.array([self.xi1, self.xi2, self.zeta]), self.alpha, self.k)


def _system(v: np.ndarray, alpha: float, k: float) -> np.ndarray:
    a, b, z = v
    s12 = math.sin(a - b)
    return np.array([
        2.0 * z * (math.sin(a) + s12) - math.cos(alpha),
        2.0 * z * (math.sin(b) - s12) - math.sin(alpha),
        k * k - 6.0 + 2.0 * math.cos(a) + 2.0 * math.cos(b) + 2.0 * math.cos(a - b),
    ])


def _jacobian(v: np.ndarray) -> np.ndarray:
    a, b, z = v
    c12, s12 = math.cos(a - b), math.sin(a - b)
    return np.array([
        [2.0 * z * (math.cos(a) + c12), -2.0 * z * c12, 2.0 * (math.sin(a) + s12)],
        [-2.0 * z * c12, 2.0 * z * (math.cos(b) + c12), 2.0 * (math.sin(b) - s12)],
        [-2.0 * math.sin(a) - 2.0 * s12, -2.0 * math.sin(b) + 2.0 * s12, 0.0],
    ])


def _newton(v: np.ndarray, alpha: float, k: float, tol: float, max_iter: int) -> np.ndarray:
    r = _system(v, alpha, k)
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            return v
        step = np.linalg.solve(_jacobian(v), -r)
        lam, norm0 = 1.0, np.linalg.norm(r)
        while True:
            trial = v + lam * step
            r_trial = _system(trial, alpha, k)
            if np.linalg.norm(r_trial) < norm0 or lam < 1e-6:
                break
            lam *= 0.5
        v, r = trial, r_trial
    if np.max(np.abs(r)) <= tol:
        return v
    raise NoConvergence(f"Newton failed for alpha={alpha}, k={k} (residual {np.max(np.abs(r)):.2e})")


def _diagonal_solution(k: float) -> np.ndarray:
    # xi1 = xi2 = t on the alpha = pi/4 ray: cos t = (4 - k^2) / 4
    t = math.acos((4.0 - k * k) / 4.0)
    return np.array([t, t, (math.sqrt(2.0) / 2.0) / (2.0 * math.sin(t))])


def solve_dispersion(alpha: float, k: float, tol: float = 1e-13, max_iter: int = 50,
                     guess: Optional[SaddlePoint] = None) -> SaddlePoint:
    """Saddle point ``xi*(alpha, k)`` with ``zeta > 0``.

    Continues from the closed-form ``alpha = pi/4`` solution (or from
    ``guess``) in angular steps of at most ``pi/64``, running damped Newton at
    each stage.
    """
    if not 0.0 < k < K_MAX:
        raise ValueError(f"k must lie in (0, 2*sqrt(2)), got {k}")
    if guess is not None:
        start_alpha, v = guess.alpha, np.array([guess.xi1, guess.xi2, guess.zeta])
    else:
        start_alpha, v = math.pi / 4.0, _diagonal_solution(k)
    delta = math.remainder(alpha - start_alpha, 2.0 * math.pi)
    steps = max(1, math.ceil(abs(delta) / _STEP))
    for s in range(1, steps + 1):
        a = start_alpha + delta * s / steps
        v = _newton(v, a, k, tol, max_iter)
    if v[2] <= 0:
        raise NoConvergence(f"continuation left the zeta > 0 branch at alpha={alpha}")
    xi1 = math.remainder(v[0], 2.0 * math.pi)
    xi2 = math.remainder(v[1], 2.0 * math.pi)
    return SaddlePoint(alpha=alpha % (2.0 * math.pi), k=k, xi1=xi1, xi2=xi2, zeta=float(v[2]))


def direction_angle(x) -> float:
    return math.atan2(x[1], x[0]) % (2.0 * math.pi)


def zeta_boundary(y: Point, j: int, k: float, saddle: Optional[SaddlePoint] = None) -> complex:
    """Asymptotic ratio ``T u(y) / u(y)`` on side ``j``: ``1 - exp(-i xi* . e_j)``.

    For ``j = 1, 2, 3`` this is ``1 - exp(-i xi1)``, ``1 - exp(-i xi2)`` and
    ``1 - exp(-i (xi1 - xi2))``; sides 4-6 follow from ``e_{j+3} = -e_j``.
    """
    sp = saddle or solve_dispersion(direction_angle(y), k)
    e = direction(j)
    return 1.0 - np.exp(-1j * (sp.xi1 * e[0] + sp.xi2 * e[1]))


def ray_points(alpha: float, radii: Sequence[float], center=(0, 0)) -> np.ndarray:
    """Distinct lattice points nearest to ``center + r (cos alpha, sin alpha)``."""
    c = np.asarray(center, dtype=float)
    pts = [tuple(np.rint(c + r * np.array([math.cos(alpha), math.sin(alpha)])).astype(int))
           for r in radii]
    unique = list(dict.fromkeys(pts))
    return np.array(unique, dtype=np.int64)


@dataclass
class RayReport:
    alpha: float
    points: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    amplitude: np.ndarray = field(repr=False)
    phase_errors: np.ndarray = field(repr=False)  # shape (n, 2): j = 1, 2
    exponent: float = float("nan")
    phase_slopes: Tuple[float, float] = (float("nan"), float("nan"))
    phase_decreasing: bool = False

    @property
    def scaled_amplitude(self) -> np.ndarray:
        """``|u(x)| |x|^{1/2}`` along the ray."""
        return self.amplitude * np.sqrt(self.radii)


@dataclass
class RadiationReport:
    k: float
    rays: List[RayReport]
    exponent_target: float = -0.5

    def exponent_errors(self) -> np.ndarray:
        return np.array([abs(r.exponent - self.exponent_target) for r in self.rays])

    def passed(self, exponent_tol: float = 0.05) -> bool:
        return bool(np.all(self.exponent_errors() <= exponent_tol)
                    and all(r.phase_decreasing for r in self.rays))

    def decay_statistic(self) -> float:
        """Max over rays of ``| |u| |x|^{1/2} - median |``."""
        worst = 0.0
        for r in self.rays:
            s = r.scaled_amplitude
            worst = max(worst, float(np.max(np.abs(s - np.median(s)))))
        return worst


def _loglog_slope(r: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(np.log(r), np.log(y), 1)[0])


def _trend_decreasing(r: np.ndarray, err: np.ndarray) -> Tuple[float, bool]:
    """Fitted log-log slope and whether the errors trend downwards.

    Lattice rounding makes successive errors jitter, so the test is the sign
    of the fitted slope together with a drop from the first to the last
    quarter of the samples.
    """
    slope = _loglog_slope(r, np.maximum(err, 1e-300))
    q = max(1, len(err) // 4)
    return slope, bool(slope < 0 and np.mean(err[-q:]) < np.mean(err[:q]))


def check_radiation(u: Callable[[np.ndarray], np.ndarray], k: float,
                    rays: Sequence[float], radii: Sequence[float],
                    center=(0, 0)) -> RadiationReport:
    """Measure decay and neighbour phase ratios of ``u`` along rays.

    ``u`` maps an ``(n, 2)`` integer array to complex values.  Distances and
    directions are taken relative to ``center``.
    """
    c = np.asarray(center, dtype=float)
    reports = []
    for alpha in rays:
        pts = ray_points(alpha, radii, center)
        if len(pts) < 8:
            raise InsufficientSamples(f"only {len(pts)} distinct points on ray alpha={alpha}")
        rel = pts - c
        r = np.hypot(rel[:, 0], rel[:, 1])
        vals = np.asarray(u(pts), dtype=complex)
        amp = np.abs(vals)
        errs = np.empty((len(pts), 2))
        guess = None
        for n, d in enumerate(rel):
            sp = solve_dispersion(direction_angle(d), k, guess=guess)
            guess = sp
            for col, j in enumerate((1, 2)):
                e = np.array(direction(j))
                ratio = complex(u((pts[n] + e)[None, :])[0]) / vals[n]
                errs[n, col] = abs(ratio - np.exp(1j * (sp.xi1 * e[0] + sp.xi2 * e[1])))
        exponent = _loglog_slope(r, amp) if np.all(amp > 0) else float("nan")
        s1, ok1 = _trend_decreasing(r, errs[:, 0])
        s2, ok2 = _trend_decreasing(r, errs[:, 1])
        reports.append(RayReport(alpha=float(alpha), points=pts, radii=r, amplitude=amp,
                                 phase_errors=errs, exponent=exponent,
                                 phase_slopes=(s1, s2), phase_decreasing=ok1 and ok2))
    return RadiationReport(k=k, rays=reports)


@dataclass(frozen=True)
class FarFieldEstimate:
    value: complex
    radius: float
    spread: float  # |estimate(2R) - estimate(R)|


def _far_field_at(u, k, x: np.ndarray, center: np.ndarray) -> complex:
    rel = x - center
    sp = solve_dispersion(direction_angle(rel), k)
    phase = sp.xi1 * rel[0] + sp.xi2 * rel[1]
    r = math.hypot(rel[0], rel[1])
    return -complex(u(x[None, :])[0]) * math.sqrt(r) * np.exp(-1j * phase)


def far_field_estimate(u: Callable[[np.ndarray], np.ndarray], k: float, direction_vector,
                       radii: Sequence[int], center=(0, 0), rtol: float = 0.5) -> FarFieldEstimate:
    """Estimate the far-field pattern of ``u`` in a lattice direction.

    ``direction_vector`` is an integer step ``(a, b)``; samples sit exactly at
    ``center + t (a, b)`` for ``t`` in ``radii`` so every sample shares the same
    direction.  The last two samples (at ``t`` and ``2t``) are Richardson
    combined assuming an ``O(1/|x|)`` remainder.  :class:`NonConvergent` is
    raised when the successive estimates wander more than the remainder allows.
    """
    d = np.asarray(direction_vector, dtype=np.int64)
    c = np.asarray(center, dtype=np.int64)
    ts = sorted(int(t) for t in radii)
    if len(ts) < 2:
        raise InsufficientSamples("need at least two radii")
    t_hi = ts[-1]
    t_lo = t_hi // 2
    e_lo = _far_field_at(u, k, c + t_lo * d, c)
    e_hi = _far_field_at(u, k, c + t_hi * d, c)
    spread = abs(e_hi - e_lo)
    scale = max(abs(e_hi), 1e-300)
    if spread > rtol * scale and scale > 1e-12:
        raise NonConvergent(f"far-field estimates differ by {spread:.3e} (|u_inf|~{scale:.3e})")
    return FarFieldEstimate(value=2.0 * e_hi - e_lo, radius=float(t_hi * np.hypot(*d)),
                            spread=spread)
