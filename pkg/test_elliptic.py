#!/usr/bin/env python3

import os
import sys
from fractions import Fraction

import pytest

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from config import curve_preset, random_curve_config  # noqa: E402
from elliptic import (  # noqa: E402
    CurveSpec,
    arc_coordinate,
    expected_tentacle_offsets,
    j_invariant,
    point_at,
    primitive_edge_directions,
    reflection,
    reflection_fixed_points,
    reflection_line,
    rotation_displacements,
    rotation_number,
    skeleton_cycle,
    tentacles,
    twist_profile,
)
from errors import (  # noqa: E402
    DegeneratePolytopeError,
    EmptyLevelSetError,
    InvalidPolynomialError,
    OffSkeletonError,
)
from trop_core import TropicalPolynomial  # noqa: E402


def _preset(name):
    return curve_preset(name).to_spec()


def test_curve_spec_validation():
    with pytest.raises(InvalidPolynomialError):
        CurveSpec(TropicalPolynomial.from_terms({(1, 0, 0): 0, (-1, 0, 0): 0}, 3), -1)
    with pytest.raises(InvalidPolynomialError):
        CurveSpec(TropicalPolynomial.from_terms({(1, 0): 0, (-1, 0): 0, (0, 1): 0}, 2), -1)
    with pytest.raises(InvalidPolynomialError):
        CurveSpec(TropicalPolynomial.from_terms({(0, 0): 0, (1, 0): 0, (-1, 0): 0}, 2), -1)


def test_diamond_cycle():
    cycle = skeleton_cycle(_preset("symmetric"))
    assert cycle.vertices == ((-1, 0), (0, -1), (1, 0), (0, 1))
    assert cycle.edge_lengths == (1, 1, 1, 1)
    assert cycle.total_length == 4
    assert primitive_edge_directions(cycle) == [(1, -1), (1, 1), (-1, 1), (-1, -1)]


def test_j_invariant_of_presets():
    assert j_invariant(_preset("symmetric")) == 4
    assert j_invariant(_preset("diamond")) == 4
    assert j_invariant(_preset("square")) == 8
    assert j_invariant(_preset("square").with_level(-2)) == 16


def test_arc_coordinate_round_trip():
    cycle = skeleton_cycle(_preset("square"))
    for vertex in cycle.vertices:
        assert point_at(cycle, arc_coordinate(cycle, vertex)) == vertex
    for s in (Fraction(1, 3), Fraction(5, 2), Fraction(7)):
        assert arc_coordinate(cycle, point_at(cycle, s)) == s
    with pytest.raises(OffSkeletonError):
        arc_coordinate(cycle, (0, 0))


def test_reflections_preserve_cycle_and_are_involutions():
    curve = random_curve_config(3).to_spec()
    cycle = skeleton_cycle(curve)
    for k in range(12):
        p = point_at(cycle, cycle.total_length * Fraction(k, 12))
        for axis in range(2):
            q = reflection(curve, axis, p)
            assert curve.hcirc(q) == curve.level
            assert reflection(curve, axis, q) == p


def test_symmetric_presets_rotate_by_half():
    for name in ("symmetric", "square", "diamond"):
        assert rotation_number(_preset(name)) == Fraction(1, 2)


def test_rotation_is_rigid_on_random_curves():
    for seed in range(5):
        curve = random_curve_config(seed).to_spec()
        displacements = rotation_displacements(curve, samples=10)
        assert len(set(displacements)) == 1
        rho = rotation_number(curve)
        assert 0 <= rho < 1


def test_near_maximal_level_rotation():
    for name in ("symmetric", "square", "diamond"):
        curve = _preset(name)
        near = curve.with_level(curve.maximum() - Fraction(1, 100))
        assert rotation_number(near) in (0, Fraction(1, 2))


def test_reflection_fixed_points():
    curve = random_curve_config(1).to_spec()
    for axis in range(2):
        first, second = reflection_fixed_points(curve, axis)
        assert first != second
        assert reflection(curve, axis, first) == first
        assert reflection(curve, axis, second) == second
        assert first[axis] == reflection_line(curve, axis, first[1 - axis])


def test_fixed_points_of_symmetric_reflection():
    first, second = reflection_fixed_points(_preset("symmetric"), 0)
    assert {first, second} == {(0, -1), (0, 1)}


def test_degenerate_and_empty_levels():
    curve = _preset("symmetric")
    with pytest.raises(DegeneratePolytopeError):
        skeleton_cycle(curve.with_level(curve.maximum()))
    with pytest.raises(EmptyLevelSetError):
        skeleton_cycle(curve.with_level(1))


def test_twist_profile_records_failures():
    curve = _preset("symmetric")
    samples = twist_profile(curve.hcirc, [Fraction(-2), Fraction(-1), Fraction(1, 2)])
    assert [s.level for s in samples] == [-2, -1, Fraction(1, 2)]
    assert samples[0].rotation_number == Fraction(1, 2)
    assert samples[1].rotation_number == Fraction(1, 2)
    assert samples[2].rotation_number is None
    assert samples[2].error


def test_tentacle_offsets_match_coefficients():
    for seed in range(5):
        curve = random_curve_config(seed).to_spec()
        expected = expected_tentacle_offsets(curve)
        found = {}
        for tentacle in tentacles(curve):
            found.setdefault(tentacle.direction, []).extend([tentacle.offset] * tentacle.weight)
        assert {d: sorted(v) for d, v in found.items()} == {d: v for d, v in expected.items() if v}
