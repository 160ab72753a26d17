"""Radiating lattice Green's function by backward shell recursion.

The distinct values ``G(i, j)`` with ``i >= j >= 0`` are grouped into shell
vectors ``V_n`` (``i + j = n``).  The Helmholtz equation links consecutive
shells through ``gamma_n V_n = alpha_n V_{n-1} + beta_n V_{n+1}`` and the
propagation matrices ``A_n`` with ``V_n = A_n V_{n-1}`` are obtained by
recursing downwards from a seed ``A_{N+1}``.

A zero seed imposes ``G = 0`` past shell ``N``; for real wave numbers that
boundary reflects the outgoing wave back onto the origin.  By default the
recursion therefore runs through an extra absorbing layer of shells in which
the damping ramps up smoothly, and only shells ``1..N`` are kept.  Passing
``absorber=None`` gives the plain recursion.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.linalg.lapack import zgecon

from .lattice import DIRECTIONS, Point

logger = logging.getLogger(__name__)

#: Reciprocal condition number below which a recursion step is declared singular.
RCOND_MIN = 1e-14


class SingularStep(ArithmeticError):
    """``gamma_n - beta_n A_{n+1}`` is numerically singular at shell ``n``."""

    def __init__(self, n: int, rcond: float):
        super().__init__(f"singular recursion step at shell {n} (rcond={rcond:.3e})")
        self.n = n
        self.rcond = rcond


class OutOfRange(LookupError):
    """Requested point lies beyond the engine's last computed shell."""


def shell_length(n: int) -> int:
    return n // 2 + 1


@dataclass(frozen=True)
class SparseTriple:
    n: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray


def sparse_matrices(n: int, k2: complex) -> SparseTriple:
    """Coupling matrices of shell ``n`` for the squared wave number ``k2``.

    Indices below are 1-based to match the usual listing of the entries;
    ``k2`` may be complex (damped wave number).
    """
    if n < 1:
        raise ValueError("shell index must be >= 1")
    diag = 6.0 - k2
    if n == 1:
        return SparseTriple(1, np.ones((1, 1)), np.array([[1.0, 2.0]]),
                            np.array([[4.0 - k2]], dtype=complex))

    p = n // 2
    if n % 2 == 0:
        alpha = np.zeros((p + 1, p))
        beta = np.zeros((p + 1, p + 1))
        gamma = np.zeros((p + 1, p + 1), dtype=complex)
        for i in range(1, p + 1):
            alpha[i - 1, i - 1] = 1.0
            beta[i - 1, i - 1] = 1.0
        for i in range(2, p + 1):
            alpha[i - 1, i - 2] = 1.0
            beta[i - 1, i] = 1.0
            gamma[i - 1, i] = -1.0
            gamma[i - 1, i - 2] = -1.0
        alpha[p, p - 1] = 2.0
        beta[p, p] = 2.0
        beta[0, 1] = 2.0
        gamma[np.diag_indices(p + 1)] = diag
        gamma[0, 1] = -2.0
        gamma[p, p - 1] = -2.0
    else:
        alpha = np.zeros((p + 1, p + 1))
        beta = np.zeros((p + 1, p + 2))
        gamma = np.zeros((p + 1, p + 1), dtype=complex)
        for i in range(1, p + 2):
            alpha[i - 1, i - 1] = 1.0
            beta[i - 1, i - 1] = 1.0
        for i in range(2, p + 2):
            alpha[i - 1, i - 2] = 1.0
            beta[i - 1, i] = 1.0
            gamma[i - 1, i - 2] = -1.0
        for i in range(2, p + 1):
            gamma[i - 1, i] = -1.0
        beta[0, 1] = 2.0
        gamma[np.diag_indices(p)] = diag
        gamma[p, p] = 5.0 - k2
        gamma[0, 1] = -2.0
    return SparseTriple(n, alpha, beta, gamma)


@dataclass(frozen=True)
class Absorber:
    """Damping layer appended beyond the last kept shell.

    Shell ``N + s`` (``1 <= s <= width``) is damped with
    ``eps + strength * (s / width) ** power``.
    """

    width: int = 300
    strength: float = 1.0
    power: int = 5

    def damping(self, s: int) -> float:
        return self.strength * (s / self.width) ** self.power


DEFAULT_ABSORBER = Absorber()


def degenerate_seed_needed(k: float, eps: float) -> bool:
    # every gamma_n is singular at k^2 = 4 without damping
    return eps == 0.0 and abs(k * k - 4.0) < 1e-9


def _zero_seed(n: int) -> np.ndarray:
    return np.zeros((shell_length(n + 1), shell_length(n)), dtype=complex)


def perturbed_seed(n: int, delta: float = 1e-6) -> np.ndarray:
    """``i * delta * I`` shaped as ``A_{n+1}``."""
    return 1j * delta * np.eye(shell_length(n + 1), shell_length(n), dtype=complex)


def _solve_step(n: int, lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        lu, piv = lu_factor(lhs, check_finite=False)
    anorm = np.abs(lhs).sum(axis=0).max()
    rcond, info = zgecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < RCOND_MIN:
        raise SingularStep(n, float(rcond))
    return lu_solve((lu, piv), rhs, check_finite=False)


def propagation_matrices(k: float, eps: float, n_max: int,
                         seed: Optional[np.ndarray] = None,
                         absorber: Optional[Absorber] = None) -> List[np.ndarray]:
    """Return ``[A_1, ..., A_{n_max}]``.

    ``seed`` is the starting matrix for the outermost shell (``A_{n_max+1}``,
    or the shell past the absorbing layer when one is given); ``None`` means
    zero.  Raises :class:`SingularStep` when a step cannot be inverted.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    width = absorber.width if absorber is not None else 0
    top = n_max + width
    a_next = _zero_seed(top) if seed is None else np.asarray(seed, dtype=complex)
    if a_next.shape != (shell_length(top + 1), shell_length(top)):
        raise ValueError(f"seed must have shape {(shell_length(top + 1), shell_length(top))}")
    k2 = k * k
    kept: List[np.ndarray] = [None] * n_max  # type: ignore[list-item]
    for n in range(top, 0, -1):
        damp = eps + (absorber.damping(n - n_max) if n > n_max else 0.0)
        t = sparse_matrices(n, k2 + 1j * damp)
        a_next = _solve_step(n, t.gamma - t.beta @ a_next, t.alpha)
        if n <= n_max:
            kept[n - 1] = a_next
    return kept


def canonicalize(x: Point) -> Tuple[int, int]:
    """Representative ``(i, j)``, ``i >= j >= 0``, of the symmetry orbit of ``x``.

    The orbit is generated by ``(x1, x2) -> (x2, x1)``, ``-> (-x1, -x2)`` and
    ``-> (x1 + x2, -x2)``; it has at most 12 members.
    """
    start = (int(x[0]), int(x[1]))
    orbit = {start}
    frontier = [start]
    while frontier:
        a, b = frontier.pop()
        for q in ((b, a), (-a, -b), (a + b, -b)):
            if q not in orbit:
                orbit.add(q)
                frontier.append(q)
    reps = [q for q in orbit if q[0] >= q[1] >= 0]
    assert len(reps) == 1, (start, reps)
    return reps[0]


def canonicalize_array(points) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised canonical form.

    In cube coordinates ``(x1, x2, -x1 - x2)`` the symmetry group acts by
    signed permutations, so the sorted absolute values ``s0 <= s1 <= s2``
    identify the orbit and ``(s1, s0)`` is its representative.
    """
    pts = np.asarray(points, dtype=np.int64)
    s = np.sort(np.abs(np.stack([pts[..., 0], pts[..., 1], pts[..., 0] + pts[..., 1]])), axis=0)
    return s[1], s[0]


@dataclass(frozen=True, eq=False)
class GreenEngine:
    """Precomputed ``G(x)`` for all ``x`` within lattice distance ``n_max``.

    Values solve ``(Delta + k^2 + i eps) G = delta``; build with
    :meth:`build`.
    """

    k: float
    eps: float
    n_max: int
    absorber: Optional[Absorber]
    A: Tuple[np.ndarray, ...]
    shells: Tuple[np.ndarray, ...]
    table: np.ndarray

    @classmethod
    def build(cls, k: float, eps: float = 1e-6, n_max: Optional[int] = None,
              max_distance: Optional[int] = None, seed: Optional[np.ndarray] = None,
              absorber: Optional[Absorber] = DEFAULT_ABSORBER) -> "GreenEngine":
        if k <= 0:
            raise ValueError("k must be positive")
        if eps < 0:
            raise ValueError("eps must be non-negative")
        if n_max is None:
            n_max = default_n_max(max_distance or 0, absorber)
        if seed is None and degenerate_seed_needed(k, eps):
            width = absorber.width if absorber is not None else 0
            seed = perturbed_seed(n_max + width)
        A = propagation_matrices(k, eps, n_max, seed=seed, absorber=absorber)
        g00 = 1.0 / (6.0 * A[0][0, 0] - 6.0 + k * k + 1j * eps)
        shells = [np.array([g00], dtype=complex)]
        for a in A:
            shells.append(a @ shells[-1])
        table = np.full((n_max + 1, n_max // 2 + 1), np.nan + 0j)
        for n, v in enumerate(shells):
            j = np.arange(len(v))
            table[n - j, j] = v
        table.setflags(write=False)
        for v in shells:
            v.setflags(write=False)
        logger.debug("built Green engine k=%s eps=%s n_max=%d", k, eps, n_max)
        return cls(k=float(k), eps=float(eps), n_max=int(n_max), absorber=absorber,
                   A=tuple(A), shells=tuple(shells), table=table)

    @property
    def k2(self) -> complex:
        """Effective squared wave number ``k^2 + i eps``."""
        return self.k * self.k + 1j * self.eps

    @property
    def g00(self) -> complex:
        return complex(self.shells[0][0])

    def __call__(self, points) -> np.ndarray:
        """``G`` at an integer point ``(x1, x2)`` or an array of shape ``(..., 2)``."""
        i, j = canonicalize_array(points)
        if np.any(i + j > self.n_max):
            raise OutOfRange(f"lattice distance {int(np.max(i + j))} exceeds n_max={self.n_max}")
        out = self.table[i, j]
        return complex(out) if np.ndim(out) == 0 else out


def default_n_max(max_distance: int, absorber: Optional[Absorber] = DEFAULT_ABSORBER) -> int:
    """Shell count needed to serve lookups up to ``max_distance``.

    Without an absorber the truncation boundary must sit far away
    (``4 * max_distance``); with one a small margin suffices.
    """
    if absorber is None:
        return max(4 * max_distance, 80)
    return max(max_distance + 10, 80)


def green(x: Point, engine: GreenEngine) -> complex:
    return engine(x)


_STENCIL = np.array(DIRECTIONS)


def stencil(values_at, points: np.ndarray, k2: complex) -> np.ndarray:
    """``(Delta + k2) u`` at ``points`` for a vectorised evaluator ``values_at``."""
    points = np.asarray(points, dtype=np.int64)
    total = (k2 - 6.0) * values_at(points)
    for d in _STENCIL:
        total = total + values_at(points + d)
    return total


def hexagon_points(radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    a, b = np.meshgrid(r, r, indexing="ij")
    pts = np.stack([a.ravel(), b.ravel()], axis=1)
    dist = np.max(np.abs(np.stack([pts[:, 0], pts[:, 1], pts.sum(axis=1)])), axis=0)
    return pts[dist <= radius]


def helmholtz_residual(engine: GreenEngine, radius: int) -> float:
    """``max |(Delta + k^2 + i eps) G - delta|`` over lattice distance ``<= radius``."""
    if radius + 1 > engine.n_max:
        raise OutOfRange("radius + 1 must not exceed n_max")
    pts = hexagon_points(radius)
    res = stencil(engine, pts, engine.k2)
    res[np.all(pts == 0, axis=1)] -= 1.0
    return float(np.max(np.abs(res)))


def truncation_check(engine: GreenEngine, extra: int = 20, radius: Optional[int] = None) -> float:
    """Largest change of ``G`` within ``radius`` when ``n_max`` grows by ``extra``."""
    radius = engine.n_max // 4 if radius is None else radius
    other = GreenEngine.build(engine.k, engine.eps, n_max=engine.n_max + extra,
                              absorber=engine.absorber)
    pts = hexagon_points(radius)
    return float(np.max(np.abs(engine(pts) - other(pts))))


def shell_vector(engine: GreenEngine, n: int) -> np.ndarray:
    if n > engine.n_max:
        raise OutOfRange(f"shell {n} exceeds n_max={engine.n_max}")
    return engine.shells[n]


def shell_points(n: int) -> Sequence[Point]:
    """Canonical points of shell ``n`` in storage order."""
    return [(n - j, j) for j in range(shell_length(n))]
