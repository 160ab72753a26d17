"""Brillouin-zone quadrature for the damped lattice Green's function.

Evaluates

    G(x) = 1/(4 pi^2) \\iint_{[-pi,pi]^2} exp(i x.xi) / sigma(xi; k^2 + i eps) dxi,
    sigma(xi; z) = z - 6 + 2 cos xi1 + 2 cos xi2 + 2 cos(xi1 - xi2),

independently of the shell recursion.  This is the reference the engine is
checked against.

The default method integrates over ``xi2`` exactly by residues and applies
the periodic trapezoid rule in ``xi1``.  For fixed ``xi1`` and
``w = exp(i xi2)`` the denominator is ``conj(c) w + c / w + b`` with
``c = 1 + exp(i xi1)`` and ``b = z - 6 + 2 cos xi1``; its two roots have
product ``c / conj(c)``, so exactly one lies inside the unit circle.  With
``s = sqrt(b^2 - 4|c|^2)`` (branch with ``|b + s| >= |b - s|``) the inner
integral is ``r^|x2| / s`` where ``r = -2c/(b+s)`` for ``x2 >= 0`` and
``r = -2 conj(c)/(b+s)`` for ``x2 < 0``.  The ``"tensor"`` method is the plain
two-dimensional trapezoid rule, usable for moderate damping only.
"""
from __future__ import annotations

import numpy as np


class ToleranceNotReached(RuntimeError):
    pass


def sigma(xi1, xi2, k2):
    return k2 - 6.0 + 2.0 * np.cos(xi1) + 2.0 * np.cos(xi2) + 2.0 * np.cos(xi1 - xi2)


def _residue_rule(x1: int, x2: int, k2: complex, m: int) -> complex:
    t = -np.pi + 2.0 * np.pi * np.arange(m) / m
    c = 1.0 + np.exp(1j * t)
    b = k2 - 6.0 + 2.0 * np.cos(t)
    s = np.sqrt(b * b - 4.0 * np.abs(c) ** 2)
    s = np.where(np.abs(b + s) >= np.abs(b - s), s, -s)
    r = -2.0 * (c if x2 >= 0 else np.conj(c)) / (b + s)
    inner = r ** abs(x2) / s if x2 != 0 else 1.0 / s
    return complex(np.mean(np.exp(1j * x1 * t) * inner))


def _tensor_rule(x1: int, x2: int, k2: complex, m: int) -> complex:
    t = -np.pi + 2.0 * np.pi * np.arange(m) / m
    a, b = np.meshgrid(t, t, indexing="ij")
    return complex(np.mean(np.exp(1j * (x1 * a + x2 * b)) / sigma(a, b, k2)))


_RULES = {"residue": _residue_rule, "tensor": _tensor_rule}


def green_quadrature_oracle(x, k: float, eps: float, tol: float = 1e-12,
                            method: str = "residue", m0: int = 256,
                            m_max: int = 2 ** 22) -> complex:
    """Quadrature value of ``G(x)`` at ``k^2 + i eps`` (``eps > 0``).

    The grid is doubled until two successive values differ by less than
    ``tol``; :class:`ToleranceNotReached` is raised past ``m_max`` points per
    dimension.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rule = _RULES[method]
    if method == "tensor":
        m_max = min(m_max, 2 ** 12)
    x1, x2 = int(x[0]), int(x[1])
    k2 = k * k + 1j * eps
    m = m0
    prev = rule(x1, x2, k2, m)
    while m < m_max:
        m *= 2
        cur = rule(x1, x2, k2, m)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise ToleranceNotReached(f"no convergence to {tol:g} with {m} points (x={x}, eps={eps})")


def extrapolated_oracle(x, k: float, eps0: float = 1e-2, terms: int = 3,
                        tol: float = 1e-12) -> complex:
    """Richardson extrapolation of the quadrature value to ``eps -> 0+``.

    Uses ``eps0, eps0/2, ...``; with three terms this is
    ``(8 G(eps0/4) - 6 G(eps0/2) + G(eps0)) / 3``.
    """
    table = [green_quadrature_oracle(x, k, eps0 / 2 ** i, tol=tol) for i in range(terms)]
    for level in range(1, terms):
        f = 2.0 ** level
        table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
    return table[0]
