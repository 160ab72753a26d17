import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticescatter.green import GreenEngine
from latticescatter.lattice import enumerate_boundary, hexagon_window, lattice_distance
from latticescatter.radiation import (InsufficientSamples, NonConvergent, check_radiation,
                                      direction_angle, far_field_estimate, ray_points,
                                      solve_dispersion, zeta_boundary)
from latticescatter.solver import FieldEvaluator, ProblemSpec, build_engine, hole_center, solve

SQRT2 = math.sqrt(2.0)
RAYS = [math.radians(a) for a in (10, 55, 100, 145, 190, 235, 280, 325)]
angles = st.floats(0.0, 2 * math.pi, allow_nan=False, exclude_max=True)
wavenumbers = st.floats(0.2, 2.75)


@pytest.fixture(scope="module")
def far_engine():
    return GreenEngine.build(SQRT2, 1e-6, max_distance=170)


def test_diagonal_saddle_point():
    sp = solve_dispersion(math.pi / 4, SQRT2)
    assert sp.xi1 == pytest.approx(math.pi / 3, abs=1e-10)
    assert sp.xi2 == pytest.approx(math.pi / 3, abs=1e-10)
    assert sp.zeta == pytest.approx(SQRT2 / (2 * math.sqrt(3)), abs=1e-10)


def test_axis_saddle_point():
    sp = solve_dispersion(0.0, SQRT2)
    assert sp.xi1 == pytest.approx(2 * sp.xi2, abs=1e-10)
    assert math.cos(sp.xi2) == pytest.approx((math.sqrt(7) - 1) / 2, abs=1e-10)


@given(angles, wavenumbers)
def test_saddle_point_residuals(alpha, k):
    sp = solve_dispersion(alpha, k)
    assert np.max(np.abs(sp.residuals())) <= 1e-12
    assert sp.zeta > 0


@given(angles)
def test_saddle_point_is_continuous(alpha):
    a = solve_dispersion(alpha, SQRT2)
    b = solve_dispersion(alpha + 1e-6, SQRT2)
    assert np.max(np.abs(b.xi - a.xi)) < 1e-4


@given(angles, wavenumbers)
def test_swap_symmetry(alpha, k):
    a = solve_dispersion(alpha, k)
    b = solve_dispersion(math.pi / 2 - alpha, k)
    assert b.xi1 == pytest.approx(a.xi2, abs=1e-10)
    assert b.xi2 == pytest.approx(a.xi1, abs=1e-10)
    assert b.mu == pytest.approx(a.mu, abs=1e-10)


def test_dispersion_rejects_out_of_range_k():
    with pytest.raises(ValueError):
        solve_dispersion(0.3, 3.0)


def test_zeta_on_diagonal():
    assert zeta_boundary((5, 5), 1, SQRT2) == pytest.approx(1 - np.exp(-1j * math.pi / 3), abs=1e-10)


def test_zeta_side_one_and_three():
    for alpha in np.linspace(-1.4, -0.1, 8):
        sp = solve_dispersion(alpha, SQRT2)
        assert 0 < sp.xi1 - sp.xi2 < math.pi
    enum = enumerate_boundary(hexagon_window(12))
    for y, sides in zip(enum.points, enum.sides):
        for j in sides:
            sp = solve_dispersion(direction_angle(y), SQRT2)
            if j == 1:
                assert math.sin(sp.xi1) > 0
            assert zeta_boundary(y, j, SQRT2, sp).imag > 0


@pytest.mark.parametrize("n", [5, 15, 30])
@pytest.mark.parametrize("k", [1.0, SQRT2, 2.5])
def test_zeta_has_positive_imaginary_part(n, k):
    enum = enumerate_boundary(hexagon_window(n))
    vals = [zeta_boundary(y, j, k).imag for y, s in zip(enum.points, enum.sides) for j in s]
    assert min(vals) > 0


def test_ray_points_are_distinct_and_centred():
    pts = ray_points(0.3, np.arange(20, 81), center=(2.5, 2.5))
    assert len({tuple(p) for p in pts}) == len(pts)
    assert pts.dtype == np.int64


def test_green_function_radiates(far_engine):
    rep = check_radiation(lambda p: far_engine(np.asarray(p)), SQRT2, RAYS, np.arange(20, 81))
    assert rep.passed(0.05)
    assert np.max(rep.exponent_errors()) <= 0.05
    assert rep.decay_statistic() < 0.1


def test_green_function_radiates_short_radii(far_engine):
    z = np.array([1, -2])
    rep = check_radiation(lambda p: far_engine(np.asarray(p) - z), SQRT2, RAYS,
                          np.arange(20, 61), center=z)
    assert rep.passed(0.05)


def test_constant_field_fails():
    rep = check_radiation(lambda p: np.ones(len(np.atleast_2d(p)), dtype=complex), SQRT2, RAYS[:2],
                          np.arange(20, 81))
    assert not rep.passed(0.05)
    assert abs(rep.rays[0].exponent) < 1e-12


def test_too_few_samples():
    with pytest.raises(InsufficientSamples):
        check_radiation(lambda p: np.ones(len(p)), SQRT2, [0.0], np.arange(20, 24))


def test_example_solution_radiates(example_spec):
    center = hole_center(example_spec)
    pts = np.concatenate([ray_points(a, np.arange(20, 82), center) for a in RAYS])
    reach = max(lattice_distance(tuple(p - np.array(y))) for p in pts.tolist()
                for y in [(1, 2), (4, 3)]) + 2
    engine = GreenEngine.build(example_spec.k, example_spec.eps, max_distance=reach)
    system, engine = solve(example_spec, engine)
    u = FieldEvaluator(example_spec, system, engine)
    rep = check_radiation(u, SQRT2, RAYS, np.arange(20, 81), center=center)
    assert rep.passed(0.05)


def test_far_field_of_zero():
    est = far_field_estimate(lambda p: np.zeros(len(p), dtype=complex), SQRT2, (1, 1), [10, 20])
    assert est.value == 0


def test_far_field_remainder_shrinks(far_engine):
    u = lambda p: far_engine(np.asarray(p))  # noqa: E731
    spreads = [far_field_estimate(u, SQRT2, (1, 1), [t // 2, t]).spread for t in (20, 40, 80)]
    assert spreads[2] < spreads[1] < spreads[0]
    assert spreads[2] * 80 < 2 * spreads[0] * 20


def test_far_field_needs_two_radii(far_engine):
    with pytest.raises(InsufficientSamples):
        far_field_estimate(lambda p: far_engine(np.asarray(p)), SQRT2, (1, 0), [10])


def test_far_field_detects_non_radiating_field():
    with pytest.raises(NonConvergent):
        far_field_estimate(lambda p: np.exp(0.3j * np.asarray(p)[:, 0] ** 2), SQRT2, (1, 0), [20, 40])


def test_far_field_is_linear_in_data():
    boundary = frozenset(p for p in hexagon_window(2).points if lattice_distance(p) == 2)
    rng = np.random.default_rng(2)
    f = {p: complex(rng.normal(), rng.normal()) for p in boundary}
    spec1 = ProblemSpec("I", boundary, SQRT2, f)
    spec2 = ProblemSpec("I", boundary, SQRT2, {p: 2 * v for p, v in f.items()})
    engine = build_engine(spec1, np.array([[90, 0], [0, 90]]))
    est = []
    for spec in (spec1, spec2):
        system, _ = solve(spec, engine)
        est.append(far_field_estimate(FieldEvaluator(spec, system, engine), SQRT2, (1, 0),
                                      [40, 80]).value)
    assert abs(est[1] / est[0] - 2.0) < 1e-6
