"""Exterior Dirichlet problems for the discrete Helmholtz equation on the triangular lattice.

The lattice Green's function is built shell by shell from a backward matrix
recursion; boundary densities come from single/double layer potentials and
the far field is checked against the discrete radiation condition.
"""
from .green import Absorber, GreenEngine, OutOfRange, SingularStep, canonicalize
from .lattice import (BoundaryEnumeration, Region, RegionError, enumerate_boundary,
                      exterior_region, full_plane, hexagon_window, validate_region)
from .quadrature import extrapolated_oracle, green_quadrature_oracle
from .radiation import SaddlePoint, check_radiation, solve_dispersion, zeta_boundary
from .solver import FieldEvaluator, ProblemSpec, evaluate_field, solve

__version__ = "0.1.0"

__all__ = [
    "Absorber", "BoundaryEnumeration", "FieldEvaluator", "GreenEngine", "OutOfRange",
    "ProblemSpec", "Region", "RegionError", "SaddlePoint", "SingularStep", "canonicalize",
    "check_radiation", "enumerate_boundary", "evaluate_field", "exterior_region",
    "extrapolated_oracle", "full_plane", "green_quadrature_oracle", "hexagon_window",
    "solve", "solve_dispersion", "validate_region", "zeta_boundary",
]
