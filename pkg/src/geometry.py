#!/usr/bin/env python3
"""
Skeletons as polytope boundaries.

For a concave PL function h° and a level c the region {h° >= c} is a convex
polytope cut out by one halfspace per affine form. Vertices are found by
exhaustive intersection of dimension-many hyperplanes with exact feasibility
filtering; faces and edges follow from exact incidence.

Face normals are stored as the inward slope of the active form (the halfspace
normal). ``MeshFace.outward`` gives the outward normal; vertex cycles are
counterclockwise viewed from outside.
"""

import functools
import itertools
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from errors import (
    DegeneratePolytopeError,
    DimensionMismatchError,
    DomainError,
    EmptyLevelSetError,
    InvalidPolynomialError,
    LatticeDirectionError,
)
from logger import get_logger
from trop_core import TropicalPolynomial, as_point, as_rational, exact_rank, solve_exact

RationalPoint = Tuple[Fraction, ...]

# LP optimum is only used to pick candidate forms; the value is recomputed exactly
_ACTIVE_TOLERANCE = 1e-7


def primitive_direction(vector: Sequence) -> Tuple[Tuple[int, ...], Fraction]:
    """Split a rational vector into (primitive integer vector, positive scale)"""
    try:
        entries = as_point(vector)
    except InvalidPolynomialError as e:
        raise LatticeDirectionError(f"Direction {vector!r} is not a rational vector") from e
    if all(v == 0 for v in entries):
        raise LatticeDirectionError("Zero vector has no primitive direction")
    scale = math.lcm(*(v.denominator for v in entries))
    integers = [int(v * scale) for v in entries]
    g = functools.reduce(math.gcd, (abs(v) for v in integers))
    primitive = tuple(v // g for v in integers)
    return primitive, Fraction(g, scale)


def lattice_length(p: Sequence, q: Sequence) -> Fraction:
    if len(p) != len(q):
        raise DimensionMismatchError(f"Points of dimension {len(p)} and {len(q)}")
    difference = [as_rational(b) - as_rational(a) for a, b in zip(p, q)]
    if all(v == 0 for v in difference):
        return Fraction(0)
    return primitive_direction(difference)[1]


@dataclass(frozen=True)
class Halfspace:
    """{p : normal . p + offset >= 0} with a primitive normal"""

    normal: Tuple[int, ...]
    offset: Fraction

    def __post_init__(self):
        normal = tuple(int(v) for v in self.normal)
        g = functools.reduce(math.gcd, (abs(v) for v in normal), 0)
        if g == 0:
            raise DomainError("Halfspace normal must be nonzero")
        object.__setattr__(self, "normal", tuple(v // g for v in normal))
        object.__setattr__(self, "offset", as_rational(self.offset) / g)

    @classmethod
    def from_form(cls, form, level) -> "Halfspace":
        return cls(form.slope, form.constant - as_rational(level))

    @property
    def dimension(self) -> int:
        return len(self.normal)

    def value(self, point: Sequence) -> Fraction:
        return sum(n * x for n, x in zip(self.normal, point)) + self.offset

    def contains(self, point: Sequence) -> bool:
        return self.value(point) >= 0

    def is_tight(self, point: Sequence) -> bool:
        return self.value(point) == 0


def _dedupe(halfspaces: Sequence[Halfspace]) -> Tuple[Halfspace, ...]:
    # Same normal: only the smallest offset can be tight
    best: Dict[Tuple[int, ...], Halfspace] = {}
    for h in halfspaces:
        current = best.get(h.normal)
        if current is None or h.offset < current.offset:
            best[h.normal] = h
    return tuple(sorted(best.values(), key=lambda h: (h.normal, h.offset)))


def enumerate_vertices(halfspaces: Sequence[Halfspace]) -> Tuple[RationalPoint, ...]:
    """All feasible intersections of dimension-many independent boundary hyperplanes.

    Returns an empty tuple when the region has no vertex at all.
    """
    halfspaces = _dedupe(halfspaces)
    if not halfspaces:
        return ()
    dimension = halfspaces[0].dimension
    if dimension not in (2, 3):
        raise DimensionMismatchError(f"Vertex enumeration supports dimension 2 or 3, got {dimension}")
    if any(h.dimension != dimension for h in halfspaces):
        raise DimensionMismatchError("Halfspaces of mixed dimension")

    found = set()
    for combo in itertools.combinations(halfspaces, dimension):
        point = solve_exact([h.normal for h in combo], [-h.offset for h in combo])
        if point is None:
            continue
        if all(h.contains(point) for h in halfspaces):
            found.add(point)
    return tuple(sorted(found))


def _recession_ray(normals: Sequence[Tuple[int, ...]]) -> Optional[Tuple[int, ...]]:
    """A nonzero v with n . v >= 0 for every normal, if the recession cone is not {0}"""
    dimension = len(normals[0])
    candidates = []
    if dimension == 2:
        for n in normals:
            candidates.append((-n[1], n[0]))
    else:
        for a, b in itertools.combinations(normals, 2):
            cross = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
            if any(cross):
                candidates.append(cross)
    for ray in candidates:
        for signed in (ray, tuple(-v for v in ray)):
            if all(sum(x * y for x, y in zip(n, signed)) >= 0 for n in normals):
                return signed
    return None


def _vertex_candidate(poly: TropicalPolynomial, indices: Sequence[int]):
    """Exact (point, value) where the chosen forms all take the same value"""
    d = poly.dimension
    rows = [list(poly.forms[i].slope) + [-1] for i in indices]
    rhs = [-poly.forms[i].constant for i in indices]
    solution = solve_exact(rows, rhs)
    if solution is None:
        return None
    point, value = solution[:d], solution[d]
    if poly.evaluate(point) != value:
        return None
    return point, value


def polynomial_maximum(poly: TropicalPolynomial) -> Tuple[Fraction, RationalPoint]:
    """Exact maximum of a concave PL function that is bounded above.

    The LP optimum (dual simplex, so a vertex of the hypograph) locates the
    near-active forms; the maximum itself is re-derived exactly from them.
    """
    if poly.is_infinite:
        raise InvalidPolynomialError("The +inf polynomial has no maximum")
    d = poly.dimension
    slopes = np.array([form.slope for form in poly.forms], dtype=float)
    constants = np.array([float(form.constant) for form in poly.forms])
    objective = np.zeros(d + 1)
    objective[-1] = -1.0
    a_ub = np.hstack([-slopes, np.ones((len(poly.forms), 1))])
    result = linprog(objective, A_ub=a_ub, b_ub=constants, bounds=[(None, None)] * (d + 1),
                     method="highs-ds")
    if result.status == 3:
        raise DomainError(f"{poly} is unbounded above; its level sets are not bounded")
    if result.status != 0:
        raise DomainError(f"Could not locate the maximum of {poly}: {result.message}")

    optimum = result.x[:d]
    top = result.x[d]
    gaps = slopes @ optimum + constants - top
    near = sorted(
        (i for i, gap in enumerate(gaps) if gap <= _ACTIVE_TOLERANCE * (1.0 + abs(top))),
        key=lambda i: gaps[i],
    )

    chosen: List[int] = []
    for i in near:
        trial = chosen + [i]
        rows = [list(poly.forms[j].slope) + [-1] for j in trial]
        if exact_rank(rows) == len(trial):
            chosen = trial
        if len(chosen) == d + 1:
            break
    if len(chosen) == d + 1:
        candidate = _vertex_candidate(poly, chosen)
        if candidate is not None:
            return candidate[1], candidate[0]

    best = None
    for combo in itertools.combinations(near, d + 1):
        candidate = _vertex_candidate(poly, combo)
        if candidate is not None and (best is None or candidate[1] > best[1]):
            best = candidate
    if best is None:
        raise DomainError(f"Could not certify the maximum of {poly} exactly")
    return best[1], best[0]


@dataclass(frozen=True)
class ConvexPolytope:
    halfspaces: Tuple[Halfspace, ...]
    vertices: Tuple[RationalPoint, ...]
    incidence: Tuple[FrozenSet[int], ...]
    dimension: int
    bounded: bool
    degenerate: bool = False
    level: Optional[Fraction] = None
    maximum: Optional[Fraction] = None

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[Halfspace], **kwargs) -> "ConvexPolytope":
        halfspaces = _dedupe(halfspaces)
        vertices = enumerate_vertices(halfspaces)
        incidence = tuple(
            frozenset(i for i, h in enumerate(halfspaces) if h.is_tight(v)) for v in vertices
        )
        bounded = bool(vertices) and _recession_ray([h.normal for h in halfspaces]) is None
        return cls(halfspaces, vertices, incidence, halfspaces[0].dimension, bounded, **kwargs)

    def contains(self, point: Sequence) -> bool:
        return all(h.contains(point) for h in self.halfspaces)

    def on_boundary(self, point: Sequence) -> bool:
        return self.contains(point) and any(h.is_tight(point) for h in self.halfspaces)

    def centroid(self) -> RationalPoint:
        if not self.vertices:
            raise DegeneratePolytopeError("Polytope has no vertices")
        count = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / count for i in range(self.dimension))

    def boundary_point(self, direction: Sequence[int], origin: Optional[Sequence] = None):
        """First boundary point on the ray origin + t*direction (origin defaults to the centroid)"""
        origin = as_point(origin) if origin is not None else self.centroid()
        best = None
        for h in self.halfspaces:
            rate = sum(n * d for n, d in zip(h.normal, direction))
            if rate < 0:
                t = h.value(origin) / -rate
                if best is None or t < best:
                    best = t
        if best is None:
            raise DegeneratePolytopeError(f"Ray in direction {tuple(direction)} never leaves the region")
        return tuple(o + best * d for o, d in zip(origin, direction))

    def random_boundary_point(self, rng: random.Random, spread: int = 7) -> RationalPoint:
        while True:
            direction = tuple(rng.randint(-spread, spread) for _ in range(self.dimension))
            if any(direction):
                return self.boundary_point(direction)


def level_set_polytope(hcirc: TropicalPolynomial, level) -> ConvexPolytope:
    """The region {h° >= level}; its boundary is the skeleton {h° = level} below the maximum"""
    level = as_rational(level)
    if hcirc.dimension not in (2, 3):
        raise DimensionMismatchError(f"Level sets are built in dimension 2 or 3, got {hcirc.dimension}")
    maximum, _ = polynomial_maximum(hcirc)
    if level > maximum:
        raise EmptyLevelSetError(level, maximum)
    polytope = ConvexPolytope.from_halfspaces(
        [Halfspace.from_form(form, level) for form in hcirc.forms],
        degenerate=level == maximum,
        level=level,
        maximum=maximum,
    )
    get_logger().log_geometry(
        f"Level set of {hcirc} at {level}: {len(polytope.vertices)} vertices, "
        f"max h° = {maximum}, degenerate={polytope.degenerate}"
    )
    return polytope


@dataclass(frozen=True)
class MeshEdge:
    start: int
    end: int
    direction: Tuple[int, ...]
    length: Fraction


@dataclass(frozen=True)
class MeshFace:
    cycle: Tuple[int, ...]
    normal: Tuple[int, ...]
    offset: Fraction

    @property
    def outward(self) -> Tuple[int, ...]:
        return tuple(-v for v in self.normal)


@dataclass(frozen=True)
class SkeletonMesh:
    vertices: Tuple[RationalPoint, ...]
    edges: Tuple[MeshEdge, ...]
    faces: Tuple[MeshFace, ...]

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def faces_containing(self, point: Sequence) -> Tuple[int, ...]:
        point = as_point(point)
        return tuple(
            i for i, face in enumerate(self.faces)
            if sum(n * x for n, x in zip(face.normal, point)) + face.offset == 0
        )


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _ccw_cycle(points: Sequence[RationalPoint], indices: Sequence[int],
               outward: Tuple[int, ...]) -> Tuple[int, ...]:
    count = len(indices)
    center = tuple(sum(points[i][k] for i in indices) / count for k in range(3))
    u = _sub(points[indices[0]], center)
    w = _cross(outward, u)

    def polar(i):
        rel = _sub(points[i], center)
        return _dot(rel, u), _dot(rel, w)

    def half(a, b):
        return 0 if b > 0 or (b == 0 and a > 0) else 1

    def compare(i, j):
        (a1, b1), (a2, b2) = polar(i), polar(j)
        h1, h2 = half(a1, b1), half(a2, b2)
        if h1 != h2:
            return h1 - h2
        cross = a1 * b2 - a2 * b1
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    ordered = sorted(indices, key=functools.cmp_to_key(compare))
    start = ordered.index(min(ordered))
    return tuple(ordered[start:] + ordered[:start])


def skeleton_mesh(polytope: ConvexPolytope) -> SkeletonMesh:
    if polytope.dimension != 3:
        raise DegeneratePolytopeError("Skeleton meshes are built from 3D polytopes")
    if not polytope.bounded:
        raise DegeneratePolytopeError("Polytope is unbounded")
    if polytope.degenerate or len(polytope.vertices) < 4:
        raise DegeneratePolytopeError(
            f"Polytope is degenerate ({len(polytope.vertices)} vertices at the maximum level)"
        )

    faces = []
    for index, h in enumerate(polytope.halfspaces):
        members = [v for v, tight in enumerate(polytope.incidence) if index in tight]
        if len(members) < 3:
            continue
        outward = tuple(-n for n in h.normal)
        faces.append(MeshFace(_ccw_cycle(polytope.vertices, members, outward), h.normal, h.offset))

    edges: Dict[Tuple[int, int], MeshEdge] = {}
    for face in faces:
        for a, b in zip(face.cycle, face.cycle[1:] + face.cycle[:1]):
            key = (min(a, b), max(a, b))
            if key not in edges:
                direction, length = primitive_direction(
                    _sub(polytope.vertices[key[1]], polytope.vertices[key[0]])
                )
                edges[key] = MeshEdge(key[0], key[1], direction, length)

    mesh = SkeletonMesh(polytope.vertices, tuple(edges[k] for k in sorted(edges)), tuple(faces))
    get_logger().log_geometry(
        f"Skeleton mesh V={len(mesh.vertices)} E={len(mesh.edges)} F={len(mesh.faces)} "
        f"chi={mesh.euler_characteristic}"
    )
    return mesh


@dataclass(frozen=True)
class CurveEdge:
    forms: Tuple[int, int]
    start: Optional[int]
    end: Optional[int]
    direction: Tuple[int, int]
    weight: int
    anchor: RationalPoint

    @property
    def is_ray(self) -> bool:
        return (self.start is None) != (self.end is None)


@dataclass(frozen=True)
class TropicalCurve:
    """Break locus of a two-variable polynomial: finite vertices, segments, rays and lines"""

    vertices: Tuple[RationalPoint, ...]
    edges: Tuple[CurveEdge, ...]

    def rays(self) -> Tuple[CurveEdge, ...]:
        return tuple(e for e in self.edges if e.is_ray)

    def without_edge(self, index: int) -> "TropicalCurve":
        return replace(self, edges=self.edges[:index] + self.edges[index + 1:])


def break_locus_curve(poly: TropicalPolynomial) -> TropicalCurve:
    if poly.dimension != 2:
        raise DimensionMismatchError(f"Break-locus curves are planar, got dimension {poly.dimension}")
    forms = poly.forms
    vertex_index: Dict[RationalPoint, int] = {}
    edges = []

    def vertex(point):
        if point not in vertex_index:
            vertex_index[point] = len(vertex_index)
        return vertex_index[point]

    for i, j in itertools.combinations(range(len(forms)), 2):
        diff = _sub(forms[i].slope, forms[j].slope)
        if not any(diff):
            continue
        weight = math.gcd(abs(diff[0]), abs(diff[1]))
        direction = (-diff[1] // weight, diff[0] // weight)
        rhs = forms[j].constant - forms[i].constant
        if diff[0] != 0:
            anchor = (Fraction(rhs, diff[0]), Fraction(0))
        else:
            anchor = (Fraction(0), Fraction(rhs, diff[1]))

        low, high, empty = None, None, False
        for k, form in enumerate(forms):
            if k in (i, j):
                continue
            gap = _sub(form.slope, forms[i].slope)
            alpha = _dot(gap, anchor) + form.constant - forms[i].constant
            beta = _dot(gap, direction)
            if beta == 0:
                # A form tying along the whole line with a slope strictly between
                # the pair splits the dual edge; the pair itself is not an edge
                between = 0 < -_dot(gap, diff) < _dot(diff, diff)
                if alpha < 0 or (alpha == 0 and between):
                    empty = True
                    break
                continue
            bound = -alpha / beta
            if beta > 0:
                low = bound if low is None else max(low, bound)
            else:
                high = bound if high is None else min(high, bound)
        if empty or (low is not None and high is not None and low >= high):
            continue

        def at(s):
            return tuple(a + s * d for a, d in zip(anchor, direction))

        start = vertex(at(low)) if low is not None else None
        end = vertex(at(high)) if high is not None else None
        edges.append(CurveEdge((i, j), start, end, direction, weight, anchor))

    ordered = sorted(vertex_index, key=vertex_index.get)
    return TropicalCurve(tuple(ordered), tuple(edges))


def check_balancing(curve: TropicalCurve) -> bool:
    """Weighted primitive outgoing directions sum to zero at every vertex"""
    sums = {v: [0, 0] for v in range(len(curve.vertices))}
    for edge in curve.edges:
        if edge.start is not None:
            sums[edge.start][0] += edge.weight * edge.direction[0]
            sums[edge.start][1] += edge.weight * edge.direction[1]
        if edge.end is not None:
            sums[edge.end][0] -= edge.weight * edge.direction[0]
            sums[edge.end][1] -= edge.weight * edge.direction[1]
    balanced = all(total == [0, 0] for total in sums.values())
    if not balanced:
        get_logger().log_geometry("Curve fails the balancing condition", "WARNING")
    return balanced
