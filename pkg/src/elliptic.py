#!/usr/bin/env python3
"""
Planar case: the skeleton cycle {h° = c} of a tropical elliptic curve, its two
reflections, and the rotation number of their product in lattice arc length.
"""

import functools
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from dynamics3d import fixed_coordinate, reflect_point
from errors import (
    DegeneratePolytopeError,
    InternalConsistencyError,
    InvalidPolynomialError,
    OffSkeletonError,
    TropDynError,
)
from geometry import (
    break_locus_curve,
    lattice_length,
    level_set_polytope,
    polynomial_maximum,
    primitive_direction,
)
from logger import get_logger
from settings import get_settings
from trop_core import (
    AffineForm,
    AxisGrouping,
    TropicalPolynomial,
    as_point,
    as_rational,
    univariate_pieces,
)

RationalPoint = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CurveSpec:
    hcirc: TropicalPolynomial
    level: Fraction
    groupings: Tuple[AxisGrouping, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "level", as_rational(self.level))
        if self.hcirc.dimension != 2:
            raise InvalidPolynomialError(f"Curves live in dimension 2, got {self.hcirc.dimension}")
        for form in self.hcirc.forms:
            if not any(form.slope) or any(s not in (-1, 0, 1) for s in form.slope):
                raise InvalidPolynomialError(f"Slope {form.slope} outside {{-1,0,1}}^2 minus 0")
        groupings = tuple(self.hcirc.group_by_axis(axis) for axis in range(2))
        for grouping in groupings:
            if grouping.minus.is_infinite or grouping.plus.is_infinite:
                raise InvalidPolynomialError(
                    f"Axis e{grouping.axis + 1} needs forms on both sides for its reflection"
                )
        object.__setattr__(self, "groupings", groupings)

    def with_level(self, level) -> "CurveSpec":
        return CurveSpec(self.hcirc, level)

    def curve_polynomial(self) -> TropicalPolynomial:
        """min(h°, c): the curve is its break locus"""
        return TropicalPolynomial(self.hcirc.forms + (AffineForm((0, 0), self.level),))

    def maximum(self) -> Fraction:
        return polynomial_maximum(self.hcirc)[0]


@dataclass(frozen=True)
class SkeletonCycle:
    vertices: Tuple[RationalPoint, ...]
    edge_lengths: Tuple[Fraction, ...]
    total_length: Fraction

    def edge(self, index: int) -> Tuple[RationalPoint, RationalPoint]:
        return self.vertices[index], self.vertices[(index + 1) % len(self.vertices)]

    def cumulative(self) -> List[Fraction]:
        marks, running = [], Fraction(0)
        for length in self.edge_lengths:
            marks.append(running)
            running += length
        return marks


def _ccw_order(points: Sequence[RationalPoint]) -> Tuple[RationalPoint, ...]:
    count = len(points)
    cx = sum(p[0] for p in points) / count
    cy = sum(p[1] for p in points) / count

    def half(p):
        dx, dy = p[0] - cx, p[1] - cy
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def compare(p, q):
        hp, hq = half(p), half(q)
        if hp != hq:
            return hp - hq
        cross = (p[0] - cx) * (q[1] - cy) - (q[0] - cx) * (p[1] - cy)
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    ordered = sorted(points, key=functools.cmp_to_key(compare))
    start = ordered.index(min(ordered))
    return tuple(ordered[start:] + ordered[:start])


def skeleton_cycle(curve: CurveSpec) -> SkeletonCycle:
    polytope = level_set_polytope(curve.hcirc, curve.level)
    if polytope.degenerate or not polytope.bounded or len(polytope.vertices) < 3:
        raise DegeneratePolytopeError(
            f"Level {curve.level} has no interior cycle (max h° = {polytope.maximum})"
        )
    vertices = _ccw_order(polytope.vertices)
    lengths = tuple(
        lattice_length(vertices[i], vertices[(i + 1) % len(vertices)]) for i in range(len(vertices))
    )
    return SkeletonCycle(vertices, lengths, sum(lengths, Fraction(0)))


def j_invariant(curve: CurveSpec) -> Fraction:
    return skeleton_cycle(curve).total_length


def reflection(curve: CurveSpec, axis: int, point: Sequence) -> RationalPoint:
    return reflect_point(curve.hcirc, axis, point, curve.groupings[axis])


def reflection_line(curve: CurveSpec, axis: int, rest) -> Fraction:
    """Fixed coordinate of the reflection along `axis` above the other coordinate"""
    return fixed_coordinate(curve.groupings[axis], (rest,))


def _on_segment(p, a, b) -> bool:
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def arc_coordinate(cycle: SkeletonCycle, point: Sequence) -> Fraction:
    """Lattice arc length from vertex 0, counterclockwise, in [0, L)"""
    point = as_point(point)
    marks = cycle.cumulative()
    for i in range(len(cycle.vertices)):
        a, b = cycle.edge(i)
        if _on_segment(point, a, b):
            return (marks[i] + lattice_length(a, point)) % cycle.total_length
    raise OffSkeletonError(f"Point {point} is not on the skeleton cycle")


def point_at(cycle: SkeletonCycle, s) -> RationalPoint:
    s = as_rational(s) % cycle.total_length
    marks = cycle.cumulative()
    for i in range(len(cycle.vertices) - 1, -1, -1):
        if s >= marks[i]:
            a, b = cycle.edge(i)
            t = (s - marks[i]) / cycle.edge_lengths[i]
            return tuple(x + t * (y - x) for x, y in zip(a, b))
    return cycle.vertices[0]


def product_map(curve: CurveSpec, point: Sequence) -> RationalPoint:
    """sigma_1 o sigma_2"""
    return reflection(curve, 0, reflection(curve, 1, point))


def rotation_displacements(curve: CurveSpec, samples: int = 10,
                           cycle: Optional[SkeletonCycle] = None) -> List[Fraction]:
    cycle = cycle or skeleton_cycle(curve)
    length = cycle.total_length
    displacements = []
    for k in range(samples + 1):
        p = point_at(cycle, length * Fraction(k, samples + 1))
        q = product_map(curve, p)
        displacements.append((arc_coordinate(cycle, q) - arc_coordinate(cycle, p)) % length)
    return displacements


def rotation_number(curve: CurveSpec, samples: int = 10) -> Fraction:
    """rho with sigma_1 sigma_2 acting as t -> t + rho L on arc coordinates"""
    cycle = skeleton_cycle(curve)
    displacements = rotation_displacements(curve, samples, cycle)
    if len(set(displacements)) != 1:
        raise InternalConsistencyError(
            f"Arc displacement is not rigid at level {curve.level}: {sorted(set(displacements))}"
        )
    rho = displacements[0] / cycle.total_length
    get_logger().log_elliptic(f"Level {curve.level}: L = {cycle.total_length}, rho = {rho}")
    return rho


def reflection_fixed_points(curve: CurveSpec, axis: int) -> Tuple[RationalPoint, RationalPoint]:
    """The two cycle points fixed by one reflection.

    The reflection acts on arc coordinates as s -> a - s, so its fixed points
    sit at a/2 and a/2 + L/2.
    """
    cycle = skeleton_cycle(curve)
    base = cycle.vertices[0]
    a = arc_coordinate(cycle, reflection(curve, axis, base)) + arc_coordinate(cycle, base)
    half = (a % cycle.total_length) / 2
    return point_at(cycle, half), point_at(cycle, half + cycle.total_length / 2)


@dataclass(frozen=True)
class TwistSample:
    level: Fraction
    rotation_number: Optional[Fraction]
    error: Optional[str] = None


def twist_profile(hcirc: TropicalPolynomial, levels: Sequence) -> List[TwistSample]:
    """Rotation number at each level of the pencil; failures are recorded per level"""
    levels = [as_rational(level) for level in levels]

    def one(level):
        try:
            return TwistSample(level, rotation_number(CurveSpec(hcirc, level)))
        except TropDynError as e:
            get_logger().log_elliptic(f"Level {level} failed: {e}", "WARNING")
            return TwistSample(level, None, str(e))

    results: Dict[int, TwistSample] = {}
    workers = get_settings().workers_for(len(levels))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {executor.submit(one, level): i for i, level in enumerate(levels)}
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()
    return [results[i] for i in range(len(levels))]


@dataclass(frozen=True)
class Tentacle:
    direction: Tuple[int, int]
    offset: Fraction
    base: RationalPoint
    weight: int = 1


def tentacles(curve: CurveSpec) -> List[Tentacle]:
    """Unbounded rays of the curve, with the coordinate they keep constant"""
    complex_ = break_locus_curve(curve.curve_polynomial())
    found = []
    for edge in complex_.rays():
        if edge.end is None:
            outward, base = edge.direction, complex_.vertices[edge.start]
        else:
            outward, base = tuple(-d for d in edge.direction), complex_.vertices[edge.end]
        offset = base[1] if outward[1] == 0 else base[0]
        found.append(Tentacle(outward, offset, base, edge.weight))
    return sorted(found, key=lambda t: (t.direction, t.offset))


def expected_tentacle_offsets(curve: CurveSpec) -> Dict[Tuple[int, int], List[Fraction]]:
    """Offsets predicted by coefficient differences of each side group, repeated by weight"""
    sides = {
        (-1, 0): curve.groupings[0].plus,
        (1, 0): curve.groupings[0].minus,
        (0, -1): curve.groupings[1].plus,
        (0, 1): curve.groupings[1].minus,
    }
    offsets = {}
    for direction, side in sides.items():
        pieces = univariate_pieces(side)
        offsets[direction] = sorted(
            after.start
            for before, after in zip(pieces, pieces[1:])
            for _ in range(int(before.slope - after.slope))
        )
    return offsets


def primitive_edge_directions(cycle: SkeletonCycle) -> List[Tuple[int, ...]]:
    return [
        primitive_direction(tuple(b - a for a, b in zip(*cycle.edge(i))))[0]
        for i in range(len(cycle.vertices))
    ]
