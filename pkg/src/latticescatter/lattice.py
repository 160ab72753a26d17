"""Integer-coordinate geometry of the triangular lattice.

Points are integer pairs ``(x1, x2)``; the plane embedding is
``T(x1, x2) = (x1 + x2/2, sqrt(3) x2 / 2)`` so that the six offsets
``±e1, ±e2, ±(e1 - e2)`` are exactly the unit-distance neighbours.

Regions come in two flavours:

* finite regions, with explicit ``interior`` and ``boundary`` sets;
* cofinite regions (``cofinite=True``), where the interior is every lattice
  point outside ``boundary | hole``.  ``hole`` is empty for a full-plane
  region and holds the complement interior for a plane with a hole.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Tuple

Point = Tuple[int, int]

#: e_1 .. e_6, stored at index j - 1.
DIRECTIONS: Tuple[Point, ...] = ((1, 0), (0, 1), (1, -1), (-1, 0), (0, -1), (-1, 1))

SQRT3 = math.sqrt(3.0)


class RegionError(ValueError):
    """Base class for region axiom violations.  ``point`` is the first offender."""

    def __init__(self, message: str, point: Optional[Point] = None):
        super().__init__(message)
        self.point = point


class DisjointnessViolation(RegionError):
    pass


class InteriorNeighborhoodViolation(RegionError):
    pass


class BoundaryContactViolation(RegionError):
    pass


class Disconnected(RegionError):
    pass


class EmptyBoundary(RegionError):
    pass


class ConeConditionViolation(RegionError):
    pass


def direction(j: int) -> Point:
    """Offset vector e_j, ``j`` taken modulo 6 in ``1..6``."""
    return DIRECTIONS[(j - 1) % 6]


def embed(p: Point) -> Tuple[float, float]:
    x1, x2 = p
    return (x1 + x2 / 2.0, SQRT3 * x2 / 2.0)


def neighborhood(p: Point) -> frozenset:
    """The six unit-distance neighbours of ``p`` (``p`` itself excluded)."""
    x1, x2 = p
    return frozenset((x1 + d1, x2 + d2) for d1, d2 in DIRECTIONS)


def closed_neighborhood(p: Point) -> frozenset:
    return neighborhood(p) | {tuple(p)}


def lattice_distance(p: Point) -> int:
    """Graph distance from the origin: ``max(|x1|, |x2|, |x1 + x2|)``."""
    x1, x2 = p
    return max(abs(x1), abs(x2), abs(x1 + x2))


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class Region:
    """A lattice region with fixed interior/boundary split.

    For ``cofinite=True`` the ``interior`` field is ignored and the interior is
    taken to be everything outside ``boundary | hole``.
    """

    boundary: frozenset
    interior: frozenset = frozenset()
    cofinite: bool = False
    hole: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(map(tuple, self.boundary)))
        object.__setattr__(self, "interior", frozenset(map(tuple, self.interior)))
        object.__setattr__(self, "hole", frozenset(map(tuple, self.hole)))

    def is_interior(self, p: Point) -> bool:
        p = tuple(p)
        if self.cofinite:
            return p not in self.boundary and p not in self.hole
        return p in self.interior

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return p in self.boundary or self.is_interior(p)

    @property
    def points(self) -> frozenset:
        if self.cofinite:
            raise ValueError("a cofinite region has infinitely many points")
        return self.interior | self.boundary

    def bounding_box(self, margin: int = 0) -> Tuple[int, int, int, int]:
        pts = self.boundary | self.hole if self.cofinite else self.points
        if not pts:
            return (-margin, margin, -margin, margin)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        return (min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin)


def full_plane(boundary: Iterable[Point]) -> Region:
    """Region with an empty complement: interior is everything but ``boundary``."""
    return Region(boundary=frozenset(boundary), cofinite=True)


def exterior_region(hole: Iterable[Point], boundary: Iterable[Point]) -> Region:
    """The plane minus the finite set ``hole``, sharing ``boundary`` with it."""
    return Region(boundary=frozenset(boundary), hole=frozenset(hole), cofinite=True)


def complement_region(region: Region) -> Region:
    """The finite region formed by the hole of ``region`` and their shared boundary."""
    if not region.cofinite:
        raise ValueError("complement is only defined for cofinite regions")
    return Region(boundary=region.boundary, interior=region.hole)


def _box_points(box: Tuple[int, int, int, int]) -> Iterator[Point]:
    x1lo, x1hi, x2lo, x2hi = box
    for a in range(x1lo, x1hi + 1):
        for b in range(x2lo, x2hi + 1):
            yield (a, b)


def _connected(points: frozenset, start: Point) -> frozenset:
    seen = {start}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for q in neighborhood(p):
            if q in points and q not in seen:
                seen.add(q)
                queue.append(q)
    return frozenset(seen)


def validate_region(region: Region) -> None:
    """Check the region axioms (a)-(c) and 6-connectivity.

    Raises the matching :class:`RegionError` subclass naming the first
    violating point in lexicographic order.
    """
    boundary = region.boundary
    if not boundary:
        raise EmptyBoundary("boundary is empty")
    if region.cofinite:
        overlap = sorted(boundary & region.hole)
        if overlap:
            raise DisjointnessViolation(f"point {overlap[0]} is both hole and boundary", overlap[0])
        # An interior point next to the hole would have a neighbour outside the region.
        for v in sorted(region.hole):
            for q in sorted(neighborhood(v)):
                if region.is_interior(q):
                    raise InteriorNeighborhoodViolation(
                        f"interior point {q} is adjacent to excluded point {v}", q)
    else:
        if not region.interior:
            raise DisjointnessViolation("interior is empty")
        overlap = sorted(boundary & region.interior)
        if overlap:
            raise DisjointnessViolation(f"point {overlap[0]} is both interior and boundary", overlap[0])
        pts = region.points
        for v in sorted(region.interior):
            for q in sorted(neighborhood(v)):
                if q not in pts:
                    raise InteriorNeighborhoodViolation(
                        f"neighbour {q} of interior point {v} lies outside the region", v)
    for y in sorted(boundary):
        if not any(region.is_interior(q) for q in neighborhood(y)):
            raise BoundaryContactViolation(f"boundary point {y} has no interior neighbour", y)

    if region.cofinite:
        # Outside the padded box every point is interior and the frame is connected,
        # so it is enough to flood the box from one frame point.
        box = region.bounding_box(margin=2)
        pts = frozenset(p for p in _box_points(box) if p in region)
        start = (box[0], box[2])
    else:
        pts = region.points
        start = min(pts)
    reached = _connected(pts, start)
    if reached != pts:
        missing = min(pts - reached)
        raise Disconnected(f"point {missing} is not connected to {start}", missing)


def rotate60(d: Point, times: int = 1) -> Point:
    """Rotate an offset by ``60 * times`` degrees counter-clockwise in the plane."""
    d1, d2 = d
    for _ in range(times % 6):
        d1, d2 = -d2, d1 + d2
    return (d1, d2)


def in_cone(i: int, w: Point, v: Point) -> bool:
    """Exact membership ``v in C_i(w)``.

    The cone is the closed 120-degree wedge at ``w`` around the direction at
    angle ``pi * i / 3``.  Rotating ``v - w`` by ``-pi * i / 3`` maps the test to
    the ``i = 0`` case, ``|Y| <= sqrt(3) X`` in the plane, which in lattice
    coordinates reads ``|d2| <= 2 d1 + d2`` with no irrational factor left.
    """
    d1, d2 = rotate60(_sub(v, w), -i)
    return abs(d2) <= 2 * d1 + d2


def check_cone_condition(region: Region) -> None:
    """Verify that every point of ``region`` has a cone avoiding the hole.

    If ``w`` lies outside the convex hull of the finite hole ``C``, a line
    through ``w`` leaves all of ``C`` in an open half-plane; the directions
    towards ``C`` then fit in an arc shorter than 180 degrees, and the
    complementary arc contains one of the six 120-degree cones.  The convex
    hull sits inside the coordinate bounding box of ``C`` (the embedding is
    linear), so only points of the box (padded by 2) need an explicit test.
    """
    hole = region.hole if region.cofinite else frozenset()
    if not hole:
        return
    x1lo = min(p[0] for p in hole) - 2
    x1hi = max(p[0] for p in hole) + 2
    x2lo = min(p[1] for p in hole) - 2
    x2hi = max(p[1] for p in hole) + 2
    for w in _box_points((x1lo, x1hi, x2lo, x2hi)):
        if w in hole:
            continue
        if not any(all(not in_cone(i, w, c) for c in hole) for i in range(6)):
            raise ConeConditionViolation(f"every cone at {w} meets the hole", w)


def hexagon_window(n: int) -> Region:
    """``H_n``: interior ``H_{n-1}``, boundary ``H_n \\ H_{n-1}``.

    ``H_n`` is the set of points at lattice distance at most ``n``; ``H_0`` is
    the origin alone (returned as a region with empty boundary).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Region(boundary=frozenset(), interior=frozenset({(0, 0)}))
    inner, ring = set(), set()
    for a in range(-n, n + 1):
        for b in range(-n, n + 1):
            d = lattice_distance((a, b))
            if d < n:
                inner.add((a, b))
            elif d == n:
                ring.add((a, b))
    return Region(boundary=frozenset(ring), interior=frozenset(inner))


@dataclass(frozen=True)
class BoundaryEnumeration:
    """Boundary points in lexicographic order with their sides.

    ``sides[i]`` lists the ``j`` with ``points[i] - e_j`` interior to the
    reference region; ``inward[i]`` lists the matching points
    ``points[i] - e_j`` in the same order.
    """

    points: Tuple[Point, ...]
    sides: Tuple[Tuple[int, ...], ...]
    inward: Tuple[Tuple[Point, ...], ...] = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.sides)

    def index(self, p: Point) -> int:
        return self.points.index(tuple(p))

    def primary_side(self, i: int) -> int:
        """The single side kept for a multi-side point: the smallest ``j``."""
        return self.sides[i][0]

    def side_members(self, j: int) -> Tuple[Point, ...]:
        return tuple(p for p, s in zip(self.points, self.sides) if j in s)


def enumerate_boundary(region: Region) -> BoundaryEnumeration:
    """Order the boundary of ``region`` and classify each point's sides.

    Sides are taken with respect to ``region``'s own interior; for the plane
    with a hole, pass :func:`complement_region` to get them relative to the
    hole.
    """
    if not region.boundary:
        raise EmptyBoundary("boundary is empty")
    points = tuple(sorted(region.boundary))
    sides, inward = [], []
    for y in points:
        js = tuple(j for j in range(1, 7) if region.is_interior(_sub(y, direction(j))))
        if not js:
            raise BoundaryContactViolation(f"boundary point {y} belongs to no side", y)
        sides.append(js)
        inward.append(tuple(_sub(y, direction(j)) for j in js))
    return BoundaryEnumeration(points, tuple(sides), tuple(inward))
