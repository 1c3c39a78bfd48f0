#!/usr/bin/env python3
"""
Exact min-plus polynomials.

A tropical polynomial here is the pointwise minimum of finitely many affine forms
with integer slopes and rational constants. All evaluation is exact over
``fractions.Fraction``; a numpy view is available for float-mode orbits.
"""

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from errors import DimensionMismatchError, InvalidPolynomialError

Number = Union[Fraction, float]
Point = Tuple[Number, ...]

NEG_INF = float("-inf")
POS_INF = float("inf")


def as_rational(value) -> Fraction:
    """Parse ints, Fractions, 'p/q' strings, decimal strings and floats into a Fraction"""
    if isinstance(value, bool):
        raise InvalidPolynomialError(f"Not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidPolynomialError(f"Not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidPolynomialError(f"Cannot parse rational {value!r}") from e
    raise InvalidPolynomialError(f"Not a rational number: {value!r}")


def as_point(values: Sequence) -> Tuple[Fraction, ...]:
    return tuple(as_rational(v) for v in values)


def random_rational(rng: random.Random, low: Number, high: Number, denominator: int) -> Fraction:
    """Uniform draw from the grid (1/denominator)Z inside [low, high]"""
    lo = math.ceil(Fraction(low) * denominator)
    hi = math.floor(Fraction(high) * denominator)
    return Fraction(rng.randint(lo, hi), denominator)


def random_point(rng: random.Random, dimension: int, low: Number = -2, high: Number = 2,
                 denominator: int = 97) -> Tuple[Fraction, ...]:
    return tuple(random_rational(rng, low, high, denominator) for _ in range(dimension))


def _as_slope(values: Sequence) -> Tuple[int, ...]:
    slope = []
    for s in values:
        if isinstance(s, bool):
            raise InvalidPolynomialError(f"Slope entries must be integers, got {s!r}")
        if isinstance(s, Fraction) and s.denominator == 1:
            s = s.numerator
        if not isinstance(s, (int, np.integer)):
            raise InvalidPolynomialError(f"Slope entries must be integers, got {s!r}")
        slope.append(int(s))
    return tuple(slope)


def _check_dimension(point: Sequence, dimension: int):
    if len(point) != dimension:
        raise DimensionMismatchError(
            f"Point has dimension {len(point)}, polynomial has dimension {dimension}"
        )


@dataclass(frozen=True)
class AffineForm:
    slope: Tuple[int, ...]
    constant: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", _as_slope(self.slope))
        object.__setattr__(self, "constant", as_rational(self.constant))

    @property
    def dimension(self) -> int:
        return len(self.slope)

    def value(self, point: Sequence[Number]) -> Number:
        total = self.constant
        for s, x in zip(self.slope, point):
            if s:
                total += s * x
        return total

    def drop_axis(self, axis: int) -> "AffineForm":
        return AffineForm(self.slope[:axis] + self.slope[axis + 1:], self.constant)

    def __str__(self):
        names = "xyz" if self.dimension <= 3 else None
        parts = []
        for i, s in enumerate(self.slope):
            if s == 0:
                continue
            var = names[i] if names else f"x{i}"
            coeff = "" if abs(s) == 1 else str(abs(s))
            parts.append(("-" if s < 0 else "+") + coeff + var)
        text = "".join(parts).lstrip("+") or "0"
        if self.constant:
            text += f"{'+' if self.constant > 0 else '-'}{abs(self.constant)}"
        return text


@dataclass(frozen=True)
class FloatPolynomial:
    """numpy view of a polynomial: value = min(slopes @ p + constants)"""

    slopes: np.ndarray
    constants: np.ndarray

    def evaluate(self, point) -> float:
        if self.constants.size == 0:
            return POS_INF
        return float(np.min(self.slopes @ np.asarray(point, dtype=float) + self.constants))


@dataclass(frozen=True)
class EnvelopePiece:
    start: Number
    end: Number
    slope: Fraction
    intercept: Fraction
    indices: Tuple[int, ...]

    def value(self, t: Number) -> Number:
        return self.slope * t + self.intercept


def lower_envelope(lines: Sequence[Tuple[Fraction, Fraction]]) -> List[EnvelopePiece]:
    """Pieces of t -> min_i(slope_i * t + intercept_i) over the whole line, left to right"""
    best: Dict[Fraction, Tuple[Fraction, List[int]]] = {}
    for index, (slope, intercept) in enumerate(lines):
        slope, intercept = Fraction(slope), Fraction(intercept)
        current = best.get(slope)
        if current is None or intercept < current[0]:
            best[slope] = (intercept, [index])
        elif intercept == current[0]:
            current[1].append(index)

    # As t -> -inf the steepest line is the smallest
    stack: List[List] = []
    for slope in sorted(best, reverse=True):
        intercept, indices = best[slope]
        start: Number = NEG_INF
        while stack:
            top_slope, top_intercept, _, top_start = stack[-1]
            crossing = (intercept - top_intercept) / (top_slope - slope)
            if top_start != NEG_INF and crossing <= top_start:
                stack.pop()
                continue
            start = crossing
            break
        stack.append([slope, intercept, tuple(indices), start])

    pieces = []
    for i, (slope, intercept, indices, start) in enumerate(stack):
        end = stack[i + 1][3] if i + 1 < len(stack) else POS_INF
        pieces.append(EnvelopePiece(start, end, slope, intercept, indices))
    return pieces


@dataclass(frozen=True)
class SegmentRestriction:
    """Concave PL function t -> h(p + t(q - p)) on [0, 1]"""

    breaks: Tuple[Fraction, ...]
    slopes: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    def value_at(self, t: Fraction) -> Fraction:
        knots = (Fraction(0),) + self.breaks
        for i in range(len(self.slopes) - 1, -1, -1):
            if t >= knots[i]:
                return self.values[i] + self.slopes[i] * (t - knots[i])
        return self.values[0] + self.slopes[0] * t


@dataclass(frozen=True)
class TropicalPolynomial:
    forms: Tuple[AffineForm, ...]
    dimension: Optional[int] = None
    _float_view: list = field(default_factory=list, init=False, repr=False, compare=False,
                              hash=False)

    def __post_init__(self):
        forms = tuple(self.forms)
        if not forms and self.dimension is None:
            raise InvalidPolynomialError(
                "A tropical polynomial needs at least one form; use TropicalPolynomial.infinity()"
            )
        dimension = self.dimension if self.dimension is not None else forms[0].dimension
        seen = set()
        for form in forms:
            if form.dimension != dimension:
                raise DimensionMismatchError(
                    f"Form {form} has dimension {form.dimension}, expected {dimension}"
                )
            if form in seen:
                raise InvalidPolynomialError(f"Duplicate form {form}")
            seen.add(form)
        object.__setattr__(self, "forms", forms)
        object.__setattr__(self, "dimension", dimension)

    @classmethod
    def from_terms(cls, terms: Mapping[Tuple[int, ...], object],
                   dimension: Optional[int] = None) -> "TropicalPolynomial":
        """Build from {slope: constant}; absent slopes are the +inf coefficients"""
        forms = tuple(AffineForm(slope, constant) for slope, constant in terms.items())
        return cls(forms, dimension)

    @classmethod
    def infinity(cls, dimension: int) -> "TropicalPolynomial":
        return cls((), dimension)

    @property
    def is_infinite(self) -> bool:
        return not self.forms

    def terms(self) -> Dict[Tuple[int, ...], Fraction]:
        return {form.slope: form.constant for form in self.forms}

    def evaluate(self, point: Sequence[Number]) -> Number:
        _check_dimension(point, self.dimension)
        if self.is_infinite:
            return POS_INF
        return min(form.value(point) for form in self.forms)

    __call__ = evaluate

    def active_forms(self, point: Sequence[Number]) -> FrozenSet[int]:
        _check_dimension(point, self.dimension)
        values = [form.value(point) for form in self.forms]
        if not values:
            return frozenset()
        low = min(values)
        return frozenset(i for i, v in enumerate(values) if v == low)

    def slopes_along(self, axis: int) -> FrozenSet[int]:
        return frozenset(form.slope[axis] for form in self.forms)

    def group_by_axis(self, axis: int) -> "AxisGrouping":
        if not 0 <= axis < self.dimension:
            raise DimensionMismatchError(f"Axis {axis} outside dimension {self.dimension}")
        groups: Dict[int, List[AffineForm]] = {-1: [], 0: [], 1: []}
        for form in self.forms:
            s = form.slope[axis]
            if s not in groups:
                raise InvalidPolynomialError(
                    f"Form {form} has slope {s} along axis {axis}; only -1, 0, 1 are allowed"
                )
            groups[s].append(form.drop_axis(axis))
        rest = self.dimension - 1
        return AxisGrouping(
            axis=axis,
            minus=TropicalPolynomial(tuple(groups[-1]), rest),
            zero=TropicalPolynomial(tuple(groups[0]), rest),
            plus=TropicalPolynomial(tuple(groups[1]), rest),
        )

    def restrict_to_segment(self, p: Sequence[Number], q: Sequence[Number]) -> SegmentRestriction:
        _check_dimension(p, self.dimension)
        _check_dimension(q, self.dimension)
        p, q = as_point(p), as_point(q)
        if p == q:
            raise DimensionMismatchError("Segment endpoints coincide")
        direction = tuple(b - a for a, b in zip(p, q))
        lines = [
            (sum(s * d for s, d in zip(form.slope, direction)), form.value(p))
            for form in self.forms
        ]
        pieces = [
            piece for piece in lower_envelope(lines) if piece.end > 0 and piece.start < 1
        ]
        breaks = tuple(piece.start for piece in pieces[1:])
        slopes = tuple(piece.slope for piece in pieces)
        knots = (Fraction(0),) + breaks + (Fraction(1),)
        values = tuple(
            pieces[min(i, len(pieces) - 1)].value(t) for i, t in enumerate(knots)
        )
        return SegmentRestriction(breaks, slopes, values)

    def float_view(self) -> FloatPolynomial:
        if not self._float_view:
            slopes = np.array([form.slope for form in self.forms], dtype=float).reshape(
                len(self.forms), self.dimension
            )
            constants = np.array([float(form.constant) for form in self.forms], dtype=float)
            self._float_view.append(FloatPolynomial(slopes, constants))
        return self._float_view[0]

    def __str__(self):
        if self.is_infinite:
            return "+inf"
        return "min(" + ", ".join(str(form) for form in self.forms) + ")"


@dataclass(frozen=True)
class AxisGrouping:
    """h = min(-x + minus(rest), zero(rest), x + plus(rest)) along one axis"""

    axis: int
    minus: TropicalPolynomial
    zero: TropicalPolynomial
    plus: TropicalPolynomial

    def recombine(self, point: Sequence[Number]) -> Number:
        x = point[self.axis]
        rest = tuple(point[:self.axis]) + tuple(point[self.axis + 1:])
        return min(
            -x + self.minus.evaluate(rest),
            self.zero.evaluate(rest),
            x + self.plus.evaluate(rest),
        )


def univariate_pieces(poly: TropicalPolynomial) -> List[EnvelopePiece]:
    if poly.dimension != 1:
        raise DimensionMismatchError(f"Expected a one-variable polynomial, got {poly.dimension}")
    return lower_envelope([(Fraction(form.slope[0]), form.constant) for form in poly.forms])


def _domain_matrix(rows: Sequence[Sequence]) -> DomainMatrix:
    entries = [[QQ(v.numerator, v.denominator) for v in map(Fraction, row)] for row in rows]
    return DomainMatrix(entries, (len(entries), len(entries[0]) if entries else 0), QQ)


def _from_domain(value) -> Fraction:
    value = QQ.to_sympy(value)
    return Fraction(int(value.p), int(value.q))


def exact_rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return _domain_matrix(rows).rank()


def solve_exact(matrix: Sequence[Sequence],
                rhs: Sequence) -> Optional[Tuple[Fraction, ...]]:
    """LU solve over QQ; None when the square system is singular"""
    a = _domain_matrix(matrix)
    if a.det() == 0:
        return None
    solution = a.lu_solve(_domain_matrix([[b] for b in rhs]))
    return tuple(_from_domain(row[0]) for row in solution.to_list())
