#!/usr/bin/env python3
"""
Vieta reflections of the degree (2,2,2) family and their lifts.

Words compose right to left: the word (x, y, z) is sigma_x o sigma_y o sigma_z,
so z acts first. Lifted points are 2x3 matrices with rows (A0, A1) and one
column per axis; projection is A1 - A0 and the section is p -> (-p/2, p/2).
"""

import enum
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from errors import (
    InternalConsistencyError,
    InvalidPolynomialError,
    OffSkeletonError,
    OrbitBlowupError,
    UndefinedReflectionError,
)
from logger import get_logger
from settings import get_settings
from trop_core import AxisGrouping, Number, TropicalPolynomial, as_point, as_rational

AXES = ("x", "y", "z")
FLOAT_TOLERANCE = 1e-9


class ArithmeticMode(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


def axis_index(axis) -> int:
    if isinstance(axis, int):
        return axis
    name = str(axis).lower().replace("sigma_", "").replace("σ_", "").replace("σ", "")
    if name not in AXES:
        raise InvalidPolynomialError(f"Unknown axis {axis!r}")
    return AXES.index(name)


def reflect_point(hcirc: TropicalPolynomial, axis: int, point: Sequence[Number],
                  grouping: Optional[AxisGrouping] = None) -> Tuple[Number, ...]:
    """x' = h_{-1}(rest) - h_{+1}(rest) - x along one axis, any dimension"""
    grouping = grouping or hcirc.group_by_axis(axis)
    if grouping.minus.is_infinite or grouping.plus.is_infinite:
        raise UndefinedReflectionError(
            f"Reflection along axis {axis} needs forms of slope -1 and +1 along it"
        )
    rest = tuple(point[:axis]) + tuple(point[axis + 1:])
    image = grouping.minus.evaluate(rest) - grouping.plus.evaluate(rest) - point[axis]
    return tuple(point[:axis]) + (image,) + tuple(point[axis + 1:])


def fixed_coordinate(grouping: AxisGrouping, rest: Sequence[Number]) -> Number:
    """Coordinate of the reflection's fixed point above `rest`"""
    return (grouping.minus.evaluate(rest) - grouping.plus.evaluate(rest)) / 2


@dataclass(frozen=True)
class SurfaceSpec:
    hcirc: TropicalPolynomial
    level: Fraction
    groupings: Tuple[AxisGrouping, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "level", as_rational(self.level))
        if self.hcirc.dimension != 3:
            raise InvalidPolynomialError(f"Surfaces live in dimension 3, got {self.hcirc.dimension}")
        for form in self.hcirc.forms:
            if not any(form.slope) or any(s not in (-1, 0, 1) for s in form.slope):
                raise InvalidPolynomialError(f"Slope {form.slope} outside {{-1,0,1}}^3 minus 0")
        groupings = tuple(self.hcirc.group_by_axis(axis) for axis in range(3))
        for grouping in groupings:
            if grouping.minus.is_infinite or grouping.plus.is_infinite:
                raise InvalidPolynomialError(
                    f"Axis {AXES[grouping.axis]} needs forms on both sides for its reflection"
                )
        object.__setattr__(self, "groupings", groupings)

    def h(self, point: Sequence[Number]) -> Number:
        return self.hcirc.evaluate(point)

    def with_level(self, level) -> "SurfaceSpec":
        return SurfaceSpec(self.hcirc, level)

    def on_skeleton(self, point: Sequence[Number]) -> bool:
        value = self.h(point)
        if isinstance(value, float) or any(isinstance(v, float) for v in point):
            return abs(float(value) - float(self.level)) <= FLOAT_TOLERANCE
        return value == self.level


@dataclass(frozen=True)
class AutomorphismWord:
    letters: Tuple[int, ...]

    def __post_init__(self):
        letters = tuple(axis_index(a) for a in self.letters)
        if not letters:
            raise InvalidPolynomialError("A word needs at least one letter")
        if any(a not in (0, 1, 2) for a in letters):
            raise InvalidPolynomialError(f"Letters must be axes 0..2, got {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "AutomorphismWord":
        """'xyz', 'x,y,z' or 'σxσyσz' style strings"""
        cleaned = text.replace("sigma_", "").replace("σ_", "").replace("σ", "")
        return cls(tuple(c for c in cleaned.lower() if c not in ", _"))

    def inverse(self) -> "AutomorphismWord":
        return AutomorphismWord(tuple(reversed(self.letters)))

    def __str__(self):
        return "".join(f"σ{AXES[a]}" for a in self.letters)


def vieta_reflection(spec: SurfaceSpec, axis, point: Sequence[Number]) -> Tuple[Number, ...]:
    axis = axis_index(axis)
    return reflect_point(spec.hcirc, axis, point, spec.groupings[axis])


def apply_word(spec: SurfaceSpec, word: AutomorphismWord, point: Sequence[Number]):
    current = tuple(point)
    for axis in reversed(word.letters):
        current = reflect_point(spec.hcirc, axis, current, spec.groupings[axis])
    return current


class _FloatReflector:
    """numpy evaluation of the side groups for long float orbits"""

    def __init__(self, spec: SurfaceSpec):
        self.sides = [
            (g.minus.float_view(), g.plus.float_view()) for g in spec.groupings
        ]

    def reflect(self, axis: int, point: Tuple[float, ...]) -> Tuple[float, ...]:
        minus, plus = self.sides[axis]
        rest = point[:axis] + point[axis + 1:]
        image = minus.evaluate(rest) - plus.evaluate(rest) - point[axis]
        return point[:axis] + (image,) + point[axis + 1:]

    def apply(self, word: AutomorphismWord, point: Tuple[float, ...]) -> Tuple[float, ...]:
        for axis in reversed(word.letters):
            point = self.reflect(axis, point)
        return point


def _bit_length(point: Sequence[Fraction]) -> int:
    return max(max(v.numerator.bit_length(), v.denominator.bit_length()) for v in point)


def orbit(spec: SurfaceSpec, word: AutomorphismWord, start: Sequence, steps: int,
          mode: ArithmeticMode = ArithmeticMode.EXACT, bit_bound: Optional[int] = None,
          strict: bool = False, require_on_skeleton: bool = False) -> List[Tuple[Number, ...]]:
    """steps + 1 points of the orbit of `start`.

    In exact mode a coordinate whose numerator or denominator exceeds the bit
    bound either raises (strict) or switches the rest of the orbit to floats.
    """
    log = get_logger()
    bit_bound = bit_bound or get_settings().bit_bound
    if mode is ArithmeticMode.FLOAT:
        current = tuple(float(v) for v in start)
    else:
        current = as_point(start)
    if require_on_skeleton and not spec.on_skeleton(current):
        raise OffSkeletonError(f"Start {start} is not on the skeleton h° = {spec.level}")

    points = [current]
    reflector = None
    for step in range(steps):
        if mode is ArithmeticMode.FLOAT:
            reflector = reflector or _FloatReflector(spec)
            current = reflector.apply(word, current)
        else:
            current = apply_word(spec, word, current)
            if _bit_length(current) > bit_bound:
                message = f"Orbit coordinates exceed {bit_bound} bits at step {step + 1}"
                if strict:
                    raise OrbitBlowupError(message)
                log.log_dynamics(message + "; continuing in float mode", "WARNING")
                mode = ArithmeticMode.FLOAT
                current = tuple(float(v) for v in current)
        points.append(current)
    log.log_dynamics(f"Orbit of {word} from {tuple(map(str, start))}: {steps} steps ({mode.value})")
    return points


def orbit_batch(spec: SurfaceSpec, word: AutomorphismWord, starts: Sequence[Sequence],
                steps: int, mode: ArithmeticMode = ArithmeticMode.EXACT) -> List[List]:
    """Orbits of several starts on a thread pool; output order follows `starts`"""
    results: Dict[int, List] = {}
    workers = get_settings().workers_for(len(starts))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {
            executor.submit(orbit, spec, word, start, steps, mode): i
            for i, start in enumerate(starts)
        }
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()
    return [results[i] for i in range(len(starts))]


def detect_period(points: Sequence[Sequence[Number]]) -> Optional[int]:
    """Smallest k > 0 with points[k] == points[0], if any"""
    for k in range(1, len(points)):
        if tuple(points[k]) == tuple(points[0]):
            return k
    return None


@dataclass(frozen=True)
class LiftedPoint:
    """Rows (A0, A1); column a holds the homogeneous pair of axis a"""

    rows: Tuple[Tuple[Number, ...], Tuple[Number, ...]]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[Number, Number]]) -> "LiftedPoint":
        return cls((tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)))

    def pair(self, axis: int) -> Tuple[Number, Number]:
        return self.rows[0][axis], self.rows[1][axis]

    def shift(self, t: Sequence[Number]) -> "LiftedPoint":
        """P + V t, V the all-ones column"""
        return LiftedPoint(tuple(tuple(a + s for a, s in zip(row, t)) for row in self.rows))

    def __sub__(self, other: "LiftedPoint") -> Tuple[Tuple[Number, ...], ...]:
        return tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))


def project(lifted: LiftedPoint) -> Tuple[Number, ...]:
    return tuple(a1 - a0 for a0, a1 in zip(*lifted.rows))


def section(point: Sequence) -> LiftedPoint:
    if any(isinstance(v, float) for v in point):
        point = tuple(float(v) for v in point)
    else:
        point = as_point(point)
    return LiftedPoint((tuple(-v / 2 for v in point), tuple(v / 2 for v in point)))


def _homogeneous_coordinate(slope: int, pair: Tuple[Number, Number]) -> Number:
    a0, a1 = pair
    if slope == -1:
        return 2 * a0
    if slope == 1:
        return 2 * a1
    return a0 + a1


def homogenized_value(spec: SurfaceSpec, lifted: LiftedPoint) -> Number:
    """H°(X, Y, Z) with P_-1 = 2A0, P_0 = A0 + A1, P_1 = 2A1"""
    return min(
        sum(_homogeneous_coordinate(s, lifted.pair(a)) for a, s in enumerate(form.slope))
        + form.constant
        for form in spec.hcirc.forms
    )


def on_e(spec: SurfaceSpec, lifted: LiftedPoint) -> bool:
    total = sum(a0 + a1 for a0, a1 in zip(*lifted.rows))
    value = homogenized_value(spec, lifted) - total
    if any(isinstance(v, float) for row in lifted.rows for v in row):
        return abs(float(value) - float(spec.level)) <= FLOAT_TOLERANCE
    return value == spec.level


def _side_value(side: TropicalPolynomial, axis: int, lifted: LiftedPoint) -> Number:
    """H_{axis,±1}: the homogenized side group evaluated on the other two pairs"""
    others = [a for a in range(3) if a != axis]
    return min(
        sum(_homogeneous_coordinate(s, lifted.pair(a)) for s, a in zip(form.slope, others))
        + form.constant
        for form in side.forms
    )


def homogeneous_lift_reflection(spec: SurfaceSpec, axis, lifted: LiftedPoint,
                                positive: bool = False, check: bool = True) -> LiftedPoint:
    """Sigma_X(X0 : X1) = (H_{X,1} - X0 : H_{X,-1} - X1).

    With positive=True the variant (X1 + H_{X,1} : X0 + H_{X,-1}) is used; it
    has the same projection but is not an involution.
    """
    axis = axis_index(axis)
    if check and not on_e(spec, lifted):
        raise OffSkeletonError(f"Lifted point {lifted.rows} is not on E for level {spec.level}")
    grouping = spec.groupings[axis]
    h_plus = _side_value(grouping.plus, axis, lifted)
    h_minus = _side_value(grouping.minus, axis, lifted)
    x0, x1 = lifted.pair(axis)
    if positive:
        new_pair = (x1 + h_plus, x0 + h_minus)
    else:
        new_pair = (h_plus - x0, h_minus - x1)
    rows = [list(lifted.rows[0]), list(lifted.rows[1])]
    rows[0][axis], rows[1][axis] = new_pair
    return LiftedPoint((tuple(rows[0]), tuple(rows[1])))


def apply_lifted_word(spec: SurfaceSpec, word: AutomorphismWord, lifted: LiftedPoint,
                      positive: bool = False) -> LiftedPoint:
    for axis in reversed(word.letters):
        lifted = homogeneous_lift_reflection(spec, axis, lifted, positive=positive, check=False)
    return lifted


@dataclass(frozen=True)
class CocycleValue:
    vector: Tuple[Number, Number, Number]


def cocycle(spec: SurfaceSpec, word: AutomorphismWord, point: Sequence) -> CocycleValue:
    """Row c with F(section(p)) - section(f(p)) = V c"""
    point = tuple(point) if any(isinstance(v, float) for v in point) else as_point(point)
    lifted = apply_lifted_word(spec, word, section(point))
    difference = lifted - section(apply_word(spec, word, point))
    top, bottom = difference
    exact = not any(isinstance(v, float) for v in top + bottom)
    for a, b in zip(top, bottom):
        if (a != b) if exact else abs(a - b) > FLOAT_TOLERANCE:
            raise InternalConsistencyError(
                f"Cocycle rows disagree at {point}: {top} vs {bottom}"
            )
    return CocycleValue(top)


def random_lifted_point(spec: SurfaceSpec, point: Sequence[Fraction],
                        rng: random.Random, denominator: int = 16) -> LiftedPoint:
    """A lift of `point` shifted by a random V t; on E whenever point is on the skeleton"""
    t = tuple(Fraction(rng.randint(-4 * denominator, 4 * denominator), denominator) for _ in range(3))
    return section(point).shift(t)
