import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticescatter.lattice import (DIRECTIONS, SQRT3, BoundaryContactViolation,
                                    ConeConditionViolation, Disconnected, DisjointnessViolation,
                                    EmptyBoundary, InteriorNeighborhoodViolation, Region,
                                    check_cone_condition, closed_neighborhood, complement_region,
                                    embed, enumerate_boundary, exterior_region, full_plane,
                                    hexagon_window, in_cone, lattice_distance, neighborhood,
                                    rotate60, validate_region)

HOLE = {(2, 2), (3, 2), (3, 3)}
RING = {(2, 1), (3, 1), (4, 1), (4, 2), (4, 3), (3, 4), (2, 4), (2, 3), (1, 3), (1, 2)}

coords = st.integers(-40, 40)
points = st.tuples(coords, coords)


def test_embed_examples():
    assert embed((0, 0)) == (0.0, 0.0)
    assert embed((1, 0)) == (1.0, 0.0)
    assert embed((0, 1)) == pytest.approx((0.5, SQRT3 / 2))


def test_neighborhood_of_origin():
    assert neighborhood((0, 0)) == {(1, 0), (0, 1), (1, -1), (-1, 0), (0, -1), (-1, 1)}
    assert closed_neighborhood((0, 0)) == neighborhood((0, 0)) | {(0, 0)}


def test_neighborhood_translates():
    assert neighborhood((2, 2)) == {(2 + a, 2 + b) for a, b in DIRECTIONS}


@given(points)
def test_neighbours_at_unit_distance(p):
    ex, ey = embed(p)
    for q in neighborhood(p):
        qx, qy = embed(q)
        assert math.hypot(qx - ex, qy - ey) == pytest.approx(1.0)


@given(points, points)
def test_adjacency_iff_unit_embedded_distance(p, q):
    (px, py), (qx, qy) = embed(p), embed(q)
    unit = abs(math.hypot(qx - px, qy - py) - 1.0) < 1e-9
    assert unit == (q in neighborhood(p))


@given(points)
def test_lattice_distance_is_graph_distance_to_origin(p):
    d = lattice_distance(p)
    if d > 0:
        assert min(lattice_distance(q) for q in neighborhood(p)) == d - 1


def test_validate_single_point_region():
    validate_region(Region(boundary=neighborhood((0, 0)), interior=frozenset({(0, 0)})))


def test_missing_neighbour_is_reported():
    region = Region(boundary=neighborhood((0, 0)) - {(1, 0)}, interior=frozenset({(0, 0)}))
    with pytest.raises(InteriorNeighborhoodViolation) as info:
        validate_region(region)
    assert info.value.point == (0, 0)


def test_overlap_is_reported():
    with pytest.raises(DisjointnessViolation):
        validate_region(Region(boundary=neighborhood((0, 0)) | {(0, 0)},
                               interior=frozenset({(0, 0)})))


def test_stray_boundary_point_is_reported():
    region = Region(boundary=neighborhood((0, 0)) | {(5, 5)}, interior=frozenset({(0, 0)}))
    with pytest.raises(BoundaryContactViolation):
        validate_region(region)


def test_two_islands_are_disconnected():
    a = neighborhood((0, 0))
    b = {(p[0] + 10, p[1]) for p in a}
    region = Region(boundary=frozenset(a | b), interior=frozenset({(0, 0), (10, 0)}))
    with pytest.raises(Disconnected):
        validate_region(region)


def test_example_geometry_is_valid():
    validate_region(exterior_region(HOLE, RING))
    validate_region(complement_region(exterior_region(HOLE, RING)))
    check_cone_condition(exterior_region(HOLE, RING))


def test_missing_ring_point_invalidates_exterior():
    with pytest.raises(InteriorNeighborhoodViolation):
        validate_region(exterior_region(HOLE, RING - {(4, 2)}))


def test_case_one_always_satisfies_cone_condition():
    check_cone_condition(full_plane({(0, 0), (1, 0), (5, -3)}))


def _ring_hole(radius):
    """Hole = lattice points at distance ``radius`` around a pocket at the origin."""
    hole = {p for p in hexagon_window(radius + 1).points if lattice_distance(p) == radius}
    boundary = set()
    for p in hole:
        boundary |= neighborhood(p)
    return hole, boundary - hole


def test_surrounded_point_violates_cone_condition():
    hole, boundary = _ring_hole(3)
    with pytest.raises(ConeConditionViolation):
        check_cone_condition(exterior_region(hole, boundary))
    with pytest.raises(Disconnected):
        validate_region(exterior_region(hole, boundary))


def test_gapped_ring_is_valid_but_violates_cone_condition():
    hole, _ = _ring_hole(3)
    hole = hole - {(3, 0)}
    boundary = set()
    for p in hole:
        boundary |= neighborhood(p)
    region = exterior_region(hole, boundary - hole)
    validate_region(region)
    with pytest.raises(ConeConditionViolation) as info:
        check_cone_condition(region)
    assert lattice_distance(info.value.point) < 3


@given(st.integers(0, 5), points, points)
def test_rotation_is_cyclic(i, w, v):
    d = (v[0] - w[0], v[1] - w[1])
    assert rotate60(d, 6) == d
    assert in_cone(i, w, v) == in_cone((i + 6) % 6, w, v)


@given(st.sets(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=2, max_size=12),
       st.data())
def test_cone_monotone_under_shrinking_hole(hole, data):
    boundary = set()
    for p in hole:
        boundary |= neighborhood(p)
    region = exterior_region(hole, boundary - hole)
    try:
        check_cone_condition(region)
    except ConeConditionViolation:
        return
    removed = data.draw(st.sampled_from(sorted(hole)))
    smaller = hole - {removed}
    ring = set()
    for p in smaller:
        ring |= neighborhood(p)
    check_cone_condition(exterior_region(smaller, ring - smaller))


def test_hexagon_sizes():
    h0 = hexagon_window(0)
    assert h0.points == {(0, 0)} and not h0.boundary
    assert len(hexagon_window(1).points) == 7
    assert len(hexagon_window(2).points) == 19


@given(st.integers(1, 12))
def test_hexagon_satisfies_axioms(n):
    region = hexagon_window(n)
    validate_region(region)
    assert len(region.points) == 1 + 3 * n * (n + 1)


def test_enumeration_examples():
    enum = enumerate_boundary(complement_region(exterior_region(HOLE, RING)))
    i = enum.index((2, 1))
    assert enum.sides[i] == (5,) and enum.inward[i] == ((2, 2),)
    i = enum.index((4, 2))
    assert enum.sides[i] == (1, 3) and set(enum.inward[i]) == {(3, 2), (3, 3)}
    assert enum.points == tuple(sorted(RING))
    assert enum.counts == (1, 1, 1, 3, 1, 2, 1, 1, 2, 1)


def test_empty_boundary_cannot_be_enumerated():
    with pytest.raises(EmptyBoundary):
        enumerate_boundary(hexagon_window(0))


@given(st.integers(1, 10))
def test_every_boundary_point_has_a_side(n):
    region = hexagon_window(n)
    enum = enumerate_boundary(region)
    assert all(enum.counts)
    union = set()
    for j in range(1, 7):
        union |= set(enum.side_members(j))
    assert union == region.boundary


@given(st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=15))
def test_random_regions_have_sides(interior):
    boundary = set()
    for p in interior:
        boundary |= neighborhood(p)
    region = Region(boundary=frozenset(boundary - interior), interior=frozenset(interior))
    try:
        validate_region(region)
    except Disconnected:
        return
    enum = enumerate_boundary(region)
    assert all(c >= 1 for c in enum.counts)
