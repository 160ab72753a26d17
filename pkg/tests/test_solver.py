import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticescatter.green import GreenEngine
from latticescatter.lattice import (ConeConditionViolation, InteriorNeighborhoodViolation,
                                    hexagon_window, lattice_distance, neighborhood)
from latticescatter.potentials import CaseMismatch
from latticescatter.solver import (BoundarySystem, FieldEvaluator, NumericallySingular,
                                   ProblemSpec, assemble, assemble_case1, assemble_case2,
                                   build_engine, evaluate_field, interior_residual, max_abs,
                                   residual_report, solve, solve_system)

SQRT2 = math.sqrt(2.0)
HOLE = frozenset({(2, 2), (3, 2), (3, 3)})
RING = frozenset({(2, 1), (3, 1), (4, 1), (4, 2), (4, 3), (3, 4), (2, 4), (2, 3), (1, 3), (1, 2)})
WINDOW = ((-6, 10), (-6, 10))


def case2(data=1.0, eta=1.0, k=SQRT2, window=WINDOW):
    if not isinstance(data, dict):
        data = {p: data for p in RING}
    return ProblemSpec("II", RING, k, data, hole=HOLE, eta=eta, window=window)


def case1(boundary, data, k=SQRT2, window=WINDOW):
    return ProblemSpec("I", frozenset(boundary), k, data, window=window)


def test_problem_definition_validation():
    with pytest.raises(ValueError):
        case2(k=3.0)
    with pytest.raises(ValueError):
        case2(eta=0.0)
    with pytest.raises(CaseMismatch):
        ProblemSpec("I", RING, SQRT2, {p: 1 for p in RING}, hole=HOLE)
    with pytest.raises(CaseMismatch):
        ProblemSpec("II", RING, SQRT2, {p: 1 for p in RING})
    with pytest.raises(ValueError):
        ProblemSpec("II", RING, SQRT2, {(2, 1): 1}, hole=HOLE)


def test_geometry_errors_surface():
    with pytest.raises(InteriorNeighborhoodViolation):
        ProblemSpec("II", RING - {(4, 2)}, SQRT2, {p: 1 for p in RING}, hole=HOLE).validate()
    # a ring with a one-point gap keeps the pocket connected but blocks every cone
    ring = {p for p in hexagon_window(4).points if lattice_distance(p) == 3} - {(3, 0)}
    bnd = set()
    for p in ring:
        bnd |= neighborhood(p)
    bnd -= ring
    with pytest.raises(ConeConditionViolation):
        ProblemSpec("II", bnd, SQRT2, {p: 1 for p in bnd}, hole=ring).validate()


def test_single_point_case1_matrix():
    spec = case1({(0, 0)}, {(0, 0): 1.0})
    engine = build_engine(spec)
    system = assemble_case1(spec, engine)
    assert system.matrix.shape == (1, 1)
    assert system.matrix[0, 0] == engine.g00


def test_case1_matrix_entries_and_symmetry():
    boundary = {p for p in hexagon_window(2).points if lattice_distance(p) == 2}
    spec = case1(boundary, {p: 1.0 for p in boundary})
    engine = build_engine(spec)
    system = assemble_case1(spec, engine)
    pts = system.enum.points
    for i, yi in enumerate(pts):
        for j, yj in enumerate(pts):
            assert system.matrix[i, j] == engine((yi[0] - yj[0], yi[1] - yj[1]))
    np.testing.assert_array_equal(system.matrix, system.matrix.T)


def test_case2_structure():
    spec = case2()
    engine = build_engine(spec)
    system = assemble_case2(spec, engine)
    enum = system.enum
    assert enum.m == 10
    pts = np.array(enum.points)
    H = engine(pts[:, None, :] - pts[None, :, :])
    j = enum.index((4, 2))
    col = (1 + 1j) * 2 * H[:, j] - engine(pts - np.array((3, 2))) - engine(pts - np.array((3, 3)))
    np.testing.assert_allclose(system.matrix[:, j], col, atol=1e-15)
    other = assemble_case2(case2(eta=-0.5), engine)
    # eta only scales the H N part
    np.testing.assert_allclose(system.matrix - other.matrix, 1.5j * H @ np.diag(enum.counts),
                               atol=1e-14)


def test_assemble_dispatch_checks_case():
    spec = case2()
    engine = build_engine(spec)
    assert assemble(spec, engine).case == "II"
    with pytest.raises(CaseMismatch):
        assemble_case1(spec, engine)


def test_solve_identity_system():
    from latticescatter.lattice import BoundaryEnumeration

    enum = BoundaryEnumeration(((0, 0), (1, 0)), ((1,), (1,)), (((-1, 0),), ((0, 0),)))
    f = np.array([1 + 2j, -3.0])
    system = BoundarySystem("I", enum, np.eye(2, dtype=complex), f)
    np.testing.assert_array_equal(solve_system(system), f)
    assert system.condition == pytest.approx(1.0)


@given(st.integers(0, 2 ** 32 - 1))
def test_solve_random_system(seed):
    from latticescatter.lattice import BoundaryEnumeration

    rng = np.random.default_rng(seed)
    M = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10)) + 8 * np.eye(10)
    f = rng.normal(size=10) + 1j * rng.normal(size=10)
    enum = BoundaryEnumeration(tuple((i, 0) for i in range(10)), ((1,),) * 10, (((0, 0),),) * 10)
    system = BoundarySystem("I", enum, M, f)
    phi = solve_system(system)
    assert np.linalg.norm(M @ phi - f) <= 1e-12 * np.linalg.norm(f)
    assert system.relative_residual <= 1e-14


def test_singular_system_is_rejected():
    from latticescatter.lattice import BoundaryEnumeration

    enum = BoundaryEnumeration(((0, 0), (1, 0)), ((1,), (1,)), (((-1, 0),), ((0, 0),)))
    system = BoundarySystem("I", enum, np.ones((2, 2), dtype=complex), np.ones(2))
    with pytest.raises(NumericallySingular):
        solve_system(system)


def test_example_problem_residuals(example_spec, example_solution):
    system, engine = example_solution
    assert np.isfinite(system.condition)
    grid = evaluate_field(example_spec, system, engine)
    diag = residual_report(grid, example_spec, system, engine)
    assert diag.boundary_residual <= 1e-10
    assert diag.interior_residual <= 1e-9


def test_homogeneous_data_gives_zero(example_spec):
    spec = example_spec.with_data({p: 0.0 for p in example_spec.boundary})
    system, engine = solve(spec)
    assert max_abs(system.phi) <= 1e-12
    grid = evaluate_field(spec, system, engine)
    assert max_abs(grid.values) <= 1e-11


def test_zero_density_gives_zero_field(example_spec, example_solution):
    system, engine = example_solution
    from dataclasses import replace

    zero = replace(system, phi=np.zeros(system.enum.m, dtype=complex))
    pts = np.array([[0, 0], [7, -3]])
    np.testing.assert_array_equal(FieldEvaluator(example_spec, zero, engine)(pts), 0)


def test_zero_field_report(example_spec, example_solution):
    system, engine = example_solution
    grid = evaluate_field(example_spec, system, engine, window=((-3, 3), (-3, 3)))
    grid.values[~grid.hole] = 0.0
    zero = example_spec.with_data({p: 0.0 for p in example_spec.boundary})
    diag = residual_report(grid, zero)
    assert diag.boundary_residual == 0.0 and diag.interior_residual == 0.0


@pytest.mark.parametrize("eta", [1.0, -0.3, 4.0])
def test_case2_field_independent_of_eta(eta):
    spec = case2(eta=eta)
    system, engine = solve(spec)
    grid = evaluate_field(spec, system, engine)
    diag = residual_report(grid, spec, system, engine)
    assert diag.boundary_residual <= 1e-10 and diag.interior_residual <= 1e-9
    ref_spec = case2(eta=1.0)
    ref_sys, _ = solve(ref_spec, engine)
    ref = evaluate_field(ref_spec, ref_sys, engine)
    ok = ~grid.hole
    np.testing.assert_allclose(grid.values[ok], ref.values[ok], atol=1e-10)


def test_linearity_in_data():
    rng = np.random.default_rng(5)
    f1 = {p: complex(rng.normal(), rng.normal()) for p in RING}
    f2 = {p: complex(rng.normal(), rng.normal()) for p in RING}
    c = 0.3 - 1.2j
    engine = build_engine(case2())
    u = []
    for data in (f1, f2, {p: f1[p] + c * f2[p] for p in RING}):
        spec = case2(data)
        system, _ = solve(spec, engine)
        u.append(evaluate_field(spec, system, engine).values)
    ok = np.isfinite(u[0])
    np.testing.assert_allclose(u[2][ok], (u[0] + c * u[1])[ok], atol=1e-10)


def test_manufactured_case1():
    boundary = {p for p in hexagon_window(3).points if lattice_distance(p) == 3}
    z = np.array([9, -4])
    spec0 = case1(boundary, {p: 0.0 for p in boundary})
    engine = build_engine(spec0, np.array([[12, 12], [-12, -12]]))
    data = {p: engine(np.array(p) - z) for p in boundary}
    spec = case1(boundary, data)
    system, _ = solve(spec, engine)
    ev = FieldEvaluator(spec, system, engine)
    # G(. - z) solves the homogeneous equation inside the ring, where the data pins u
    far = np.array([[0, 0], [1, 1], [-2, 1]])
    np.testing.assert_allclose(ev(far), engine(far - z), atol=1e-10)
    assert np.max(np.abs(ev(np.array(sorted(boundary))) - [data[p] for p in sorted(boundary)])) < 1e-12


def test_interior_residual_of_random_field_is_large(example_spec, example_solution):
    system, engine = example_solution
    grid = evaluate_field(example_spec, system, engine, window=((-3, 3), (-3, 3)))
    grid.values[~grid.hole] = np.random.default_rng(0).normal(size=(~grid.hole).sum())
    assert interior_residual(grid, example_spec, engine.k2) > 1e-3


def test_engine_covers_window(example_spec):
    engine = build_engine(example_spec)
    (a0, a1), (b0, b1) = example_spec.window
    assert engine.n_max >= lattice_distance((a0 - 4, b0 - 4))
    assert isinstance(engine, GreenEngine)
