#!/usr/bin/env python3
"""
Homogeneity matrices and the dynamically scaled potential of a hyperbolic word.

The potential is the fixed point of g -> (g o f - c.v) / lambda, evaluated lazily
per query point through the unrolled cocycle series

    g_N(p) = -sum_{k<N} lambda^-(k+1) * c(f^k p) . v

Its functional-equation residual is exactly lambda^-N |c(f^N p) . v|, which
drops below double precision after a dozen steps, so the series is summed in
mpmath with an eigenvector resolved to the same precision.
"""

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy

from dynamics3d import (
    ArithmeticMode,
    AutomorphismWord,
    SurfaceSpec,
    apply_word,
    axis_index,
    cocycle,
)
from errors import NotHyperbolicError
from geometry import level_set_polytope, skeleton_mesh
from logger import get_logger

HYPERBOLIC_MARGIN = 1e-9
EIGEN_RESIDUAL = 1e-10
DEFAULT_PRECISION = 60

LETTER_MATRICES = {
    0: ((-1, 0, 0), (2, 1, 0), (2, 0, 1)),
    1: ((1, 2, 0), (0, -1, 0), (0, 2, 1)),
    2: ((1, 0, 2), (0, 1, 2), (0, 0, -1)),
}
# Matrices of the lift (X1 + H_{X,1} : X0 + H_{X,-1})
POSITIVE_LETTER_MATRICES = {
    0: ((1, 0, 0), (2, 1, 0), (2, 0, 1)),
    1: ((1, 2, 0), (0, 1, 0), (0, 2, 1)),
    2: ((1, 0, 2), (0, 1, 2), (0, 0, 1)),
}


def letter_matrix(axis, positive: bool = False) -> np.ndarray:
    table = POSITIVE_LETTER_MATRICES if positive else LETTER_MATRICES
    return np.array(table[axis_index(axis)], dtype=np.int64)


def homogeneity_matrix(word: AutomorphismWord, positive: bool = False) -> np.ndarray:
    """M of a word, using M_(A o B) = M_B . M_A"""
    matrix = np.eye(3, dtype=np.int64)
    for axis in word.letters:
        matrix = letter_matrix(axis, positive) @ matrix
    return matrix


def characteristic_polynomial(matrix) -> Tuple[int, ...]:
    """Integer coefficients of det(tI - M), leading coefficient first"""
    t = sympy.Symbol("t")
    poly = sympy.Matrix(np.asarray(matrix).tolist()).charpoly(t)
    return tuple(int(c) for c in poly.all_coeffs())


def exact_spectrum(matrix) -> List[Tuple[complex, int]]:
    """Eigenvalues with exact multiplicities; a defective eigenvalue 1 stays exactly 1"""
    eigenvalues = sympy.Matrix(np.asarray(matrix).tolist()).eigenvals()
    return [(complex(sympy.N(value, 30)), int(multiplicity))
            for value, multiplicity in eigenvalues.items()]


@dataclass(frozen=True)
class HomogeneityData:
    matrix: Tuple[Tuple[int, ...], ...]
    eigenvalue: float
    vector: Tuple[float, float, float]
    eigenvalues: Tuple[complex, ...]
    charpoly: Tuple[int, ...]
    eigenvalue_mp: mpmath.mpf = field(repr=False, compare=False)
    vector_mp: Tuple[mpmath.mpf, ...] = field(repr=False, compare=False)
    precision: int = DEFAULT_PRECISION

    def eigen_residual(self) -> float:
        m = np.array(self.matrix, dtype=float)
        v = np.array(self.vector)
        return float(np.max(np.abs(m @ v - self.eigenvalue * v)) / np.max(np.abs(v)))


def _normalize(vector, absolute, total):
    scale = absolute(vector)
    signed = [x / scale for x in vector]
    if total(signed) < 0:
        signed = [-x for x in signed]
    return signed


def _mp_null_vector(matrix: np.ndarray, eigenvalue) -> List:
    shifted = [[mpmath.mpf(int(matrix[i][j])) - (eigenvalue if i == j else 0) for j in range(3)]
               for i in range(3)]
    best, best_norm = None, mpmath.mpf(0)
    for a in range(3):
        for b in range(a + 1, 3):
            r, s = shifted[a], shifted[b]
            cross = [r[1] * s[2] - r[2] * s[1], r[2] * s[0] - r[0] * s[2], r[0] * s[1] - r[1] * s[0]]
            norm = max(abs(c) for c in cross)
            if norm > best_norm:
                best, best_norm = cross, norm
    return best


def leading_eigendata(matrix, precision: int = DEFAULT_PRECISION) -> HomogeneityData:
    matrix = np.asarray(matrix, dtype=np.int64)
    spectrum = exact_spectrum(matrix)
    report = [value for value, multiplicity in spectrum for _ in range(multiplicity)]
    radius = max(abs(v) for v in report)
    if radius <= 1 + HYPERBOLIC_MARGIN:
        raise NotHyperbolicError(
            f"Spectral radius {radius:.12g} <= 1: the word does not act hyperbolically", report
        )
    leading = [(v, m) for v, m in spectrum if abs(abs(v) - radius) <= 1e-9 * radius]
    top, multiplicity = leading[0]
    if len(leading) > 1 or multiplicity > 1 or abs(top.imag) > 1e-12 or top.real <= 1:
        raise NotHyperbolicError(
            f"Leading eigenvalue {top:.12g} is not a simple real eigenvalue > 1", report
        )

    values, vectors = np.linalg.eig(matrix.astype(float))
    index = int(np.argmin(np.abs(values - top.real)))
    float_vector = _normalize(
        [float(x) for x in np.real(vectors[:, index])],
        lambda v: sum(abs(x) for x in v),
        sum,
    )
    charpoly = characteristic_polynomial(matrix)

    with mpmath.workdps(precision):
        coefficients = [mpmath.mpf(c) for c in charpoly]
        lam = mpmath.findroot(lambda t: mpmath.polyval(coefficients, t), mpmath.mpf(float(top.real)))
        mp_vector = _normalize(
            _mp_null_vector(matrix, lam),
            lambda v: mpmath.fsum(abs(x) for x in v),
            mpmath.fsum,
        )

    data = HomogeneityData(
        matrix=tuple(tuple(int(x) for x in row) for row in matrix),
        eigenvalue=float(top.real),
        vector=tuple(float_vector),
        eigenvalues=tuple(report),
        charpoly=charpoly,
        eigenvalue_mp=lam,
        vector_mp=tuple(mp_vector),
        precision=precision,
    )
    residual = data.eigen_residual()
    if residual > EIGEN_RESIDUAL:
        raise NotHyperbolicError(f"Eigenvector residual {residual:.3g} exceeds {EIGEN_RESIDUAL}", report)
    return data


def word_eigendata(word: AutomorphismWord, precision: int = DEFAULT_PRECISION) -> HomogeneityData:
    return leading_eigendata(homogeneity_matrix(word), precision)


def default_depth(mc: float, eigenvalue: float, tol: float) -> int:
    """Smallest N with mc * lambda^-N / (lambda - 1) <= tol"""
    if mc <= 0:
        return 1
    return max(1, math.ceil(math.log(mc / ((eigenvalue - 1) * tol)) / math.log(eigenvalue)))


def skeleton_samples(spec: SurfaceSpec, count: int, rng: random.Random) -> List[Tuple[Fraction, ...]]:
    """Mesh vertices followed by `count` random exact skeleton points"""
    polytope = level_set_polytope(spec.hcirc, spec.level)
    points = list(skeleton_mesh(polytope).vertices)
    points.extend(polytope.random_boundary_point(rng) for _ in range(count))
    return points


def estimate_mc(spec: SurfaceSpec, word: AutomorphismWord, data: HomogeneityData,
                samples: int = 1000, seed: int = 0, safety: float = 2.0) -> float:
    rng = random.Random(seed)
    v = data.vector
    largest = 0.0
    for point in skeleton_samples(spec, samples, rng):
        c = cocycle(spec, word, point).vector
        largest = max(largest, abs(sum(float(ci) * vi for ci, vi in zip(c, v))))
    return safety * largest


@dataclass(frozen=True)
class PotentialField:
    spec: SurfaceSpec
    word: AutomorphismWord
    data: HomogeneityData
    depth: int
    mode: ArithmeticMode = ArithmeticMode.EXACT
    mc: float = 0.0
    tol: float = 1e-9

    def tail_bound(self, depth: Optional[int] = None) -> float:
        depth = self.depth if depth is None else depth
        lam = self.data.eigenvalue
        return self.mc * lam ** (-depth) / (lam - 1)

    def with_depth(self, depth: int) -> "PotentialField":
        return replace(self, depth=depth)


def make_potential_field(spec: SurfaceSpec, word: AutomorphismWord, tol: float = 1e-9,
                         depth: Optional[int] = None,
                         mode: ArithmeticMode = ArithmeticMode.EXACT,
                         samples: int = 1000, seed: int = 0) -> PotentialField:
    data = word_eigendata(word)
    mc = estimate_mc(spec, word, data, samples=samples, seed=seed)
    if depth is None:
        depth = default_depth(mc, data.eigenvalue, tol)
    get_logger().log_potential(
        f"Potential for {word}: lambda={data.eigenvalue:.12g}, M_c={mc:.6g}, N={depth}, "
        f"tol={tol:g}, mode={mode.value}"
    )
    return PotentialField(spec, word, data, depth, mode, mc, tol)


def stable_potential(field_: PotentialField) -> PotentialField:
    """Same construction for the inverse word"""
    return make_potential_field(field_.spec, field_.word.inverse(), tol=field_.tol,
                                mode=field_.mode)


def _orbit_terms(field_: PotentialField, point: Sequence, count: int) -> List:
    """c(f^k p) . v for k < count, in the field's arithmetic"""
    spec, word = field_.spec, field_.word
    exact = field_.mode is ArithmeticMode.EXACT
    current = tuple(point) if not exact else tuple(Fraction(x) for x in point)
    if not exact:
        current = tuple(float(x) for x in current)
    v = field_.data.vector_mp if exact else field_.data.vector
    terms = []
    for _ in range(count):
        c = cocycle(spec, word, current).vector
        if exact:
            terms.append(mpmath.fsum(mpmath.mpf(ci.numerator) / ci.denominator * vi
                                     for ci, vi in zip(c, v)))
        else:
            terms.append(sum(ci * vi for ci, vi in zip(c, v)))
        current = apply_word(spec, word, current)
    return terms


def _series(terms: Sequence, lam, depth: int, offset: int = 0):
    total = 0
    scale = 1
    for k in range(depth):
        scale = scale / lam
        total += scale * terms[k + offset]
    return -total


def _lambda(field_: PotentialField):
    return field_.data.eigenvalue_mp if field_.mode is ArithmeticMode.EXACT else field_.data.eigenvalue


def evaluate_potential(field_: PotentialField, point: Sequence, depth: Optional[int] = None) -> float:
    depth = field_.depth if depth is None else depth
    if depth == 0:
        return 0.0
    with mpmath.workdps(field_.data.precision):
        terms = _orbit_terms(field_, point, depth)
        return float(_series(terms, _lambda(field_), depth))


def _residual_from_terms(terms: Sequence, lam, depth: int) -> float:
    g_p = _series(terms, lam, depth)
    g_fp = _series(terms, lam, depth, offset=1)
    return float(abs(g_fp - lam * g_p - terms[0]))


def potential_residual(field_: PotentialField, point: Sequence, depth: Optional[int] = None) -> float:
    """|g(f(p)) - lambda g(p) - c(p).v| for the depth-N series"""
    depth = field_.depth if depth is None else depth
    with mpmath.workdps(field_.data.precision):
        terms = _orbit_terms(field_, point, depth + 1)
        return _residual_from_terms(terms, _lambda(field_), depth)


def residual_profile(field_: PotentialField, points: Sequence, depths: Sequence[int]) -> Dict[int, float]:
    """Max residual over `points` for each depth, sharing one orbit per point"""
    deepest = max(depths)
    profile = {n: 0.0 for n in depths}
    with mpmath.workdps(field_.data.precision):
        lam = _lambda(field_)
        for point in points:
            terms = _orbit_terms(field_, point, deepest + 1)
            for n in depths:
                profile[n] = max(profile[n], _residual_from_terms(terms, lam, n))
    return profile


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    expected_slope: float
    profile: Dict[int, float]

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.expected_slope) / abs(self.expected_slope)


def decay_fit(field_: PotentialField, points: Sequence, depths: Sequence[int] = tuple(range(5, 31))) -> DecayFit:
    profile = residual_profile(field_, points, depths)
    usable = [(n, r) for n, r in profile.items() if r > 0]
    ns = np.array([n for n, _ in usable], dtype=float)
    logs = np.log(np.array([r for _, r in usable]))
    slope, intercept = np.polyfit(ns, logs, 1)
    fit = DecayFit(float(slope), float(intercept), -math.log(field_.data.eigenvalue), profile)
    get_logger().log_potential(
        f"Residual decay for {field_.word}: slope {fit.slope:.6g} vs {fit.expected_slope:.6g} "
        f"({fit.relative_error:.2%})"
    )
    return fit


@dataclass(frozen=True)
class ProbeReport:
    name: str
    value: float
    samples: int
    detail: Dict[str, float]


def concavity_probe(field_: PotentialField, segments: int = 20, steps: int = 8,
                    seed: int = 0) -> ProbeReport:
    """Second differences of g along random segments inside skeleton faces (diagnostic only)"""
    rng = random.Random(seed)
    mesh = skeleton_mesh(level_set_polytope(field_.spec.hcirc, field_.spec.level))
    largest, smallest = -math.inf, math.inf
    for _ in range(segments):
        face = mesh.faces[rng.randrange(len(mesh.faces))]
        corners = [mesh.vertices[i] for i in face.cycle]

        def interior_point():
            weights = [Fraction(rng.randint(1, 16)) for _ in corners]
            total = sum(weights)
            return tuple(sum(w * c[k] for w, c in zip(weights, corners)) / total for k in range(3))

        p, q = interior_point(), interior_point()
        values = [
            evaluate_potential(field_, tuple(a + Fraction(i, steps) * (b - a) for a, b in zip(p, q)))
            for i in range(steps + 1)
        ]
        for i in range(1, steps):
            second = values[i - 1] - 2 * values[i] + values[i + 1]
            largest, smallest = max(largest, second), min(smallest, second)
    report = ProbeReport("concavity", largest, segments,
                         {"max_second_difference": largest, "min_second_difference": smallest})
    get_logger().log_potential(f"Concavity probe: {report.detail}")
    return report


def holder_probe(field_: PotentialField, pairs: int = 20, scales: int = 6,
                 seed: int = 0) -> ProbeReport:
    """Log-log slope of |g(p) - g(q)| against |p - q| for shrinking separations (diagnostic only)"""
    rng = random.Random(seed)
    polytope = level_set_polytope(field_.spec.hcirc, field_.spec.level)
    distances, differences = [], []
    for _ in range(pairs):
        direction = tuple(Fraction(rng.randint(-7, 7)) for _ in range(3))
        if not any(direction):
            continue
        nudge = tuple(Fraction(rng.randint(-3, 3)) for _ in range(3))
        p = polytope.boundary_point(direction)
        g_p = evaluate_potential(field_, p)
        for k in range(1, scales + 1):
            scale = Fraction(1, 4 ** k)
            q = polytope.boundary_point(tuple(d + scale * n for d, n in zip(direction, nudge)))
            distance = float(max(abs(a - b) for a, b in zip(p, q)))
            difference = abs(evaluate_potential(field_, q) - g_p)
            if distance > 0 and difference > 0:
                distances.append(math.log(distance))
                differences.append(math.log(difference))
    exponent = float(np.polyfit(distances, differences, 1)[0]) if len(distances) > 1 else math.nan
    report = ProbeReport("holder", exponent, len(distances), {"exponent": exponent})
    get_logger().log_potential(f"Holder probe exponent estimate {exponent:.4g}")
    return report
