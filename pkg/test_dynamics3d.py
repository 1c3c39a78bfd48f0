#!/usr/bin/env python3

import os
import random
import sys
from fractions import Fraction

import numpy as np
import pytest

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from config import random_surface_config, surface_preset  # noqa: E402
from dynamics3d import (  # noqa: E402
    ArithmeticMode,
    AutomorphismWord,
    SurfaceSpec,
    apply_lifted_word,
    apply_word,
    cocycle,
    detect_period,
    fixed_coordinate,
    homogeneous_lift_reflection,
    on_e,
    orbit,
    orbit_batch,
    project,
    random_lifted_point,
    reflect_point,
    section,
    vieta_reflection,
)
from errors import (  # noqa: E402
    InvalidPolynomialError,
    OffSkeletonError,
    OrbitBlowupError,
    UndefinedReflectionError,
)
from geometry import level_set_polytope  # noqa: E402
from kummer import kummer_spec  # noqa: E402
from potential import homogeneity_matrix, letter_matrix  # noqa: E402
from trop_core import TropicalPolynomial, random_point  # noqa: E402


def _skeleton_points(spec, count, seed):
    rng = random.Random(seed)
    polytope = level_set_polytope(spec.hcirc, spec.level)
    return [polytope.random_boundary_point(rng) for _ in range(count)]


def test_kummer_reflection_example():
    spec = kummer_spec()
    p = (Fraction(3, 10), Fraction(1, 10), Fraction(1, 5))
    assert vieta_reflection(spec, "x", p) == (Fraction(-1, 2), Fraction(1, 10), Fraction(1, 5))


def test_reflections_are_exact_involutions_preserving_h():
    rng = random.Random(5)
    for seed in range(3):
        spec = random_surface_config(seed).to_spec()
        for _ in range(100):
            p = random_point(rng, 3)
            for axis in range(3):
                q = vieta_reflection(spec, axis, p)
                assert spec.h(q) == spec.h(p)
                assert vieta_reflection(spec, axis, q) == p
                assert q[:axis] + q[axis + 1:] == p[:axis] + p[axis + 1:]


def test_fixed_coordinate_is_fixed():
    spec = kummer_spec()
    rest = (Fraction(1, 3), Fraction(-1, 5))
    x = fixed_coordinate(spec.groupings[0], rest)
    point = (x,) + rest
    assert vieta_reflection(spec, 0, point) == point


def test_undefined_reflection():
    poly = TropicalPolynomial.from_terms({(-1, 0): 0, (0, 1): 0, (0, -1): 0}, 2)
    with pytest.raises(UndefinedReflectionError):
        reflect_point(poly, 0, (0, 0))
    with pytest.raises(InvalidPolynomialError):
        SurfaceSpec(TropicalPolynomial.from_terms({(1, 0, 0): 0, (0, 1, 0): 0}, 3), -1)


def test_word_parsing_and_order():
    word = AutomorphismWord.parse("σxσyσz")
    assert word.letters == (0, 1, 2)
    assert str(word) == "σxσyσz"
    assert word.inverse().letters == (2, 1, 0)
    assert AutomorphismWord.parse("x,y").letters == (0, 1)
    with pytest.raises(InvalidPolynomialError):
        AutomorphismWord.parse("")
    with pytest.raises(InvalidPolynomialError):
        AutomorphismWord.parse("xw")

    spec = kummer_spec()
    p = _skeleton_points(spec, 1, 3)[0]
    expected = vieta_reflection(spec, 0, vieta_reflection(spec, 1, p))
    assert apply_word(spec, AutomorphismWord.parse("xy"), p) == expected


def test_exact_orbit_stays_on_skeleton():
    spec = random_surface_config(4).to_spec()
    start = _skeleton_points(spec, 1, 9)[0]
    points = orbit(spec, AutomorphismWord.parse("xyz"), start, 50)
    assert len(points) == 51
    assert all(spec.h(p) == spec.level for p in points)


def test_orbit_requires_skeleton_start():
    spec = kummer_spec()
    with pytest.raises(OffSkeletonError):
        orbit(spec, AutomorphismWord.parse("xyz"), (0, 0, 0), 3, require_on_skeleton=True)


def test_float_orbit_within_band():
    spec = surface_preset("rubik:1/4").to_spec()
    start = _skeleton_points(spec, 1, 1)[0]
    points = orbit(spec, AutomorphismWord.parse("xyz"), start, 10000, mode=ArithmeticMode.FLOAT)
    values = np.array([float(spec.h(p)) for p in points[::50]])
    assert np.max(np.abs(values - float(spec.level))) <= 1e-9


def test_bit_bound_guard():
    spec = kummer_spec()
    start = (Fraction(-3, 7), Fraction(1, 7), Fraction(-1, 7))
    word = AutomorphismWord.parse("xyz")
    with pytest.raises(OrbitBlowupError):
        orbit(spec, word, start, 5, bit_bound=2, strict=True)
    points = orbit(spec, word, start, 5, bit_bound=2)
    assert all(isinstance(v, float) for v in points[-1])


def test_rubik_cube_orbits_are_periodic():
    spec = surface_preset("rubik:1/4").to_spec()
    word = AutomorphismWord.parse("xy")
    for start in _skeleton_points(spec, 100, 17):
        period = detect_period(orbit(spec, word, start, 8))
        assert period is not None and period <= 8


def test_detect_period():
    assert detect_period([(1,), (2,), (1,)]) == 2
    assert detect_period([(1,), (2,), (3,)]) is None


def test_orbit_batch_keeps_order():
    spec = kummer_spec()
    word = AutomorphismWord.parse("xyz")
    starts = _skeleton_points(spec, 5, 2)
    batch = orbit_batch(spec, word, starts, 10)
    assert batch == [orbit(spec, word, s, 10) for s in starts]


def test_section_projects_back_onto_e():
    spec = kummer_spec()
    for p in _skeleton_points(spec, 20, 8):
        lifted = section(p)
        assert project(lifted) == p
        assert on_e(spec, lifted)
        assert not on_e(spec.with_level(-2), lifted)


def test_lifted_reflection_covers_vieta_reflection():
    spec = random_surface_config(1).to_spec()
    rng = random.Random(21)
    for p in _skeleton_points(spec, 30, 6):
        lifted = random_lifted_point(spec, p, rng)
        for axis in range(3):
            image = homogeneous_lift_reflection(spec, axis, lifted)
            assert project(image) == vieta_reflection(spec, axis, p)
            assert on_e(spec, image)
            assert homogeneous_lift_reflection(spec, axis, image) == lifted
            positive = homogeneous_lift_reflection(spec, axis, lifted, positive=True)
            assert project(positive) == project(image)


def test_lifted_reflection_checks_e():
    spec = kummer_spec()
    with pytest.raises(OffSkeletonError):
        homogeneous_lift_reflection(spec, 0, section((0, 0, 0)))


def test_letter_homogeneity():
    spec = random_surface_config(2).to_spec()
    rng = random.Random(13)
    points = _skeleton_points(spec, 100, 12)
    for index, p in enumerate(points):
        axis = index % 3
        lifted = random_lifted_point(spec, p, rng)
        t = tuple(Fraction(rng.randint(-20, 20), 8) for _ in range(3))
        shifted = homogeneous_lift_reflection(spec, axis, lifted.shift(t))
        base = homogeneous_lift_reflection(spec, axis, lifted)
        m = letter_matrix(axis)
        expected = tuple(sum(t[i] * int(m[i][j]) for i in range(3)) for j in range(3))
        top, bottom = shifted - base
        assert top == expected
        assert bottom == expected


def test_word_homogeneity_matches_product():
    spec = kummer_spec()
    word = AutomorphismWord.parse("xyz")
    m = homogeneity_matrix(word)
    rng = random.Random(4)
    for p in _skeleton_points(spec, 10, 5):
        lifted = random_lifted_point(spec, p, rng)
        t = (Fraction(1, 3), Fraction(-2), Fraction(5, 4))
        top, _ = apply_lifted_word(spec, word, lifted.shift(t)) - apply_lifted_word(spec, word, lifted)
        assert top == tuple(sum(t[i] * int(m[i][j]) for i in range(3)) for j in range(3))


def test_cocycle_rows_agree():
    spec = random_surface_config(3).to_spec()
    word = AutomorphismWord.parse("xyz")
    for p in _skeleton_points(spec, 20, 14):
        value = cocycle(spec, word, p)
        assert len(value.vector) == 3
        assert all(isinstance(v, Fraction) for v in value.vector)


def test_cocycle_chain_rule():
    spec = random_surface_config(4).to_spec()
    rng = random.Random(21)
    for p in _skeleton_points(spec, 40, 22):
        first = AutomorphismWord(tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 3))))
        second = AutomorphismWord(tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 3))))
        combined = AutomorphismWord(first.letters + second.letters)
        m = homogeneity_matrix(first)
        inner = cocycle(spec, second, p).vector
        outer = cocycle(spec, first, apply_word(spec, second, p)).vector
        shifted = tuple(sum(inner[i] * int(m[i][j]) for i in range(3)) for j in range(3))
        expected = tuple(a + b for a, b in zip(outer, shifted))
        assert cocycle(spec, combined, p).vector == expected
