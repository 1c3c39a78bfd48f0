#!/usr/bin/env python3
"""
Tropical Kummer construction: the torus R^2/Z^2 folded onto the tetrahedron
{h = -1}, h = min(-x+y+z, x-y+z, x+y-z, -x-y-z), semiconjugating the integer
involutions of the torus to the Vieta reflections.
"""

import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dynamics3d import AXES, AutomorphismWord, SurfaceSpec, apply_word, vieta_reflection
from logger import get_logger
from potential import word_eigendata
from settings import get_settings
from trop_core import TropicalPolynomial, as_rational

KUMMER_TERMS = {
    (-1, 1, 1): 0,
    (1, -1, 1): 0,
    (1, 1, -1): 0,
    (-1, -1, -1): 0,
}

INVOLUTION_MATRICES = {
    0: ((1, 2), (0, -1)),
    1: ((-1, 0), (2, 1)),
    2: ((-1, 0), (0, 1)),
}


def kummer_polynomial() -> TropicalPolynomial:
    return TropicalPolynomial.from_terms(KUMMER_TERMS, 3)


def kummer_spec(level=-1) -> SurfaceSpec:
    return SurfaceSpec(kummer_polynomial(), level)


@dataclass(frozen=True)
class TorusPoint:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a) % 1)
        object.__setattr__(self, "b", as_rational(self.b) % 1)

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-self.a, -self.b)

    def apply(self, matrix: Sequence[Sequence[int]]) -> "TorusPoint":
        (p, q), (r, s) = matrix
        return TorusPoint(p * self.a + q * self.b, r * self.a + s * self.b)

    @classmethod
    def random(cls, rng: random.Random, max_denominator: int = 360) -> "TorusPoint":
        d = rng.randint(1, max_denominator)
        return cls(Fraction(rng.randrange(d), d), Fraction(rng.randrange(d), d))


def double_cover(a) -> Fraction:
    """c(a) = 4 dist(a, Z) - 1, an even fold of the circle onto [-1, 1]"""
    a = as_rational(a) % 1
    return 4 * min(a, 1 - a) - 1


def kummer_map(p: TorusPoint) -> Tuple[Fraction, Fraction, Fraction]:
    return double_cover(p.a), double_cover(p.b), double_cover(p.a + p.b)


def kummer_involution_matrices() -> Dict[str, Tuple[Tuple[int, int], Tuple[int, int]]]:
    return {AXES[axis]: matrix for axis, matrix in INVOLUTION_MATRICES.items()}


def involution(axis: int, p: TorusPoint) -> TorusPoint:
    return p.apply(INVOLUTION_MATRICES[axis])


def apply_torus_word(word: AutomorphismWord, p: TorusPoint) -> TorusPoint:
    for axis in reversed(word.letters):
        p = involution(axis, p)
    return p


def word_matrix(word: AutomorphismWord) -> np.ndarray:
    matrix = np.eye(2, dtype=np.int64)
    for axis in word.letters:
        matrix = matrix @ np.array(INVOLUTION_MATRICES[axis], dtype=np.int64)
    return matrix


@dataclass(frozen=True)
class WordMatrixDiagnostics:
    matrix: Tuple[Tuple[int, int], Tuple[int, int]]
    trace: int
    determinant: int
    spectral_radius: float

    @property
    def squared_radius(self) -> float:
        return self.spectral_radius ** 2


def word_matrix_diagnostics(word: AutomorphismWord) -> WordMatrixDiagnostics:
    """Linear data of a torus word; compared with the surface stretch factor, never asserted"""
    matrix = word_matrix(word)
    trace = int(matrix[0, 0] + matrix[1, 1])
    determinant = int(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])
    radius = float(max(abs(np.linalg.eigvals(matrix.astype(float)))))
    return WordMatrixDiagnostics(
        tuple(tuple(int(v) for v in row) for row in matrix), trace, determinant, radius
    )


KUMMER_WORD_MATRIX = word_matrix(AutomorphismWord((0, 1, 2)))


@dataclass
class SemiconjugacyReport:
    samples: int
    mismatches: int = 0
    max_deviation: float = 0.0
    orbit_steps: int = 0
    orbit_mismatches: int = 0
    per_axis: Dict[str, int] = field(default_factory=dict)
    examples: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0 and self.orbit_mismatches == 0

    def to_dict(self) -> Dict:
        return {
            "samples": self.samples,
            "mismatches": self.mismatches,
            "max_deviation": self.max_deviation,
            "orbit_steps": self.orbit_steps,
            "orbit_mismatches": self.orbit_mismatches,
            "per_axis": dict(self.per_axis),
            "examples": list(self.examples),
        }


def _deviation(left: Sequence[Fraction], right: Sequence[Fraction]) -> Fraction:
    return max(abs(x - y) for x, y in zip(left, right))


def _check_axis(spec: SurfaceSpec, axis: int, points: Sequence[TorusPoint]):
    mismatches, worst, examples = 0, Fraction(0), []
    for p in points:
        left = kummer_map(involution(axis, p))
        right = vieta_reflection(spec, axis, kummer_map(p))
        gap = _deviation(left, right)
        if gap:
            mismatches += 1
            worst = max(worst, gap)
            if len(examples) < 5:
                examples.append({"axis": AXES[axis], "a": str(p.a), "b": str(p.b),
                                 "deviation": float(gap)})
    return axis, mismatches, worst, examples


def check_semiconjugacy(samples: int = 1000, seed: int = 0, orbit_steps: int = 100,
                        word: Optional[AutomorphismWord] = None,
                        spec: Optional[SurfaceSpec] = None) -> SemiconjugacyReport:
    """C(iota(p)) = sigma(C(p)) exactly on random torus points and along one word orbit"""
    spec = spec or kummer_spec()
    word = word or AutomorphismWord((0, 1, 2))
    rng = random.Random(seed)
    points = [TorusPoint.random(rng) for _ in range(samples)]
    report = SemiconjugacyReport(samples)

    with ThreadPoolExecutor(max_workers=get_settings().workers_for(3)) as executor:
        futures = [executor.submit(_check_axis, spec, axis, points) for axis in range(3)]
        for future in as_completed(futures):
            axis, mismatches, worst, examples = future.result()
            report.per_axis[AXES[axis]] = mismatches
            report.mismatches += mismatches
            report.max_deviation = max(report.max_deviation, float(worst))
            report.examples.extend(examples)

    torus = TorusPoint.random(rng)
    surface = kummer_map(torus)
    for _ in range(orbit_steps):
        torus = apply_torus_word(word, torus)
        surface = apply_word(spec, word, surface)
        gap = _deviation(kummer_map(torus), surface)
        if gap:
            report.orbit_mismatches += 1
            report.max_deviation = max(report.max_deviation, float(gap))
    report.orbit_steps = orbit_steps

    get_logger().log_kummer(
        f"Semiconjugacy: {samples} samples x 3 axes, {report.mismatches} mismatches; "
        f"{orbit_steps}-step {word} orbit, {report.orbit_mismatches} mismatches"
    )
    return report


def check_scaling(alpha, samples: int = 100, seed: int = 0) -> int:
    """Mismatches of sigma(alpha p) = alpha sigma(p) between levels -1 and -alpha"""
    alpha = as_rational(alpha)
    base, scaled = kummer_spec(-1), kummer_spec(-alpha)
    rng = random.Random(seed)
    mismatches = 0
    for _ in range(samples):
        p = kummer_map(TorusPoint.random(rng))
        for axis in range(3):
            image = vieta_reflection(base, axis, p)
            dilated = vieta_reflection(scaled, axis, tuple(alpha * v for v in p))
            if not scaled.on_skeleton(dilated) or dilated != tuple(alpha * v for v in image):
                mismatches += 1
    get_logger().log_kummer(f"Scaling by {alpha}: {mismatches} mismatches over {samples} samples")
    return mismatches


def surface_stretch_comparison(word: AutomorphismWord) -> Dict[str, float]:
    """Squared torus spectral radius next to the stretch factor of the surface word"""
    diagnostics = word_matrix_diagnostics(word)
    return {
        "torus_spectral_radius": diagnostics.spectral_radius,
        "torus_squared_radius": diagnostics.squared_radius,
        "surface_stretch": float(word_eigendata(word).eigenvalue),
    }
