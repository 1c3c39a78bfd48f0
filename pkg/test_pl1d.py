#!/usr/bin/env python3

import os
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from errors import DomainError, InvalidMapError  # noqa: E402
from pl1d import (  # noqa: E402
    DERIVATIVE_STEPS,
    ClosedFormPotential,
    HomogeneousTerm,
    PLMap1D,
    atom_audit,
    break_points,
    cocycle1d,
    cocycle_atom_masses,
    cocycle_measure_atoms,
    depth_for,
    evaluate_map,
    interval_mass,
    map_pieces,
    measure_from_potential,
    monotonicity_check,
    pullback_form,
    pullback_measure_constant,
    random_line_map,
    solve_potential,
    tent_closed_form,
    tent_map,
)


def test_tent_map_values():
    f = tent_map()
    assert evaluate_map(f, 0) == Fraction(1, 2)
    assert evaluate_map(f, Fraction(1, 4)) == 0
    assert evaluate_map(f, -1) == Fraction(-3, 2)
    assert break_points(f) == (0,)
    assert [p.slope for p in map_pieces(f)] == [2, -2]


def test_invalid_maps():
    with pytest.raises(InvalidMapError):
        PLMap1D.from_terms(1, [(1, 0, 0)], [(0, 1, 0)])
    with pytest.raises(InvalidMapError):
        PLMap1D.from_terms(2, [(2, 0, 0)], [(0, 1, 0)])
    with pytest.raises(InvalidMapError):
        PLMap1D.from_terms(2, [(1, 1, 0)], [(1, 1, 1)])
    with pytest.raises(InvalidMapError):
        PLMap1D.from_terms(2, [(3, -1, 0)], [(0, 2, 0)])
    with pytest.raises(InvalidMapError):
        HomogeneousTerm(1.5, 0, 0)


def test_tent_potential_matches_closed_form():
    g = solve_potential(tent_map(), depth=40)
    xs = np.linspace(-2, 2, 2001)
    closed = tent_closed_form()
    expected = np.array([float(closed(Fraction(x))) for x in xs])
    assert np.max(np.abs(g.evaluate_grid(xs) - expected)) <= 1e-9


def test_grid_and_exact_evaluation_agree():
    g = solve_potential(random_line_map(random.Random(4)), depth=12)
    points = [Fraction(k, 7) for k in range(-10, 11)]
    grid = g.evaluate_grid([float(p) for p in points])
    for value, p in zip(grid, points):
        assert value == pytest.approx(float(g(p)), abs=1e-12)


def test_residual_within_bound():
    f = tent_map()
    depth = 10
    g = solve_potential(f, depth=depth)
    bound = float(g.gap) * f.degree ** (1 - depth)
    for k in range(-12, 13):
        assert g.residual(Fraction(k, 8)) <= bound * (1 + 1e-9)


def test_depth_for_grows_with_precision():
    f = random_line_map(random.Random(1))
    assert depth_for(f, 1e-12) >= depth_for(f, 1e-6) >= 1


def test_tent_measure_has_unit_density():
    measure = measure_from_potential(tent_closed_form(), (-1, 1), resolution=100)
    assert measure.total_mass == pytest.approx(1.0, abs=1e-9)
    assert measure.max_atom() <= 1e-9
    for cell in measure.cells_within(Fraction(-45, 100), Fraction(45, 100)):
        assert cell.value == pytest.approx(1.0, abs=1e-6)
    for cell in measure.cells_within(Fraction(6, 10), 1):
        assert cell.value == pytest.approx(0.0, abs=1e-6)


def test_closed_form_needs_interval():
    with pytest.raises(DomainError):
        measure_from_potential(tent_closed_form())
    with pytest.raises(DomainError):
        measure_from_potential(tent_closed_form(), (1, 1))


def test_interval_mass_of_tent():
    assert interval_mass(tent_closed_form(), Fraction(-1, 4), Fraction(1, 4)) == pytest.approx(0.5)
    assert interval_mass(tent_closed_form(), 1, 2) == pytest.approx(0.0, abs=1e-12)


def test_random_maps_have_unit_mass():
    for seed in range(20):
        f = random_line_map(random.Random(seed), degree=2 + seed % 2)
        measure = measure_from_potential(solve_potential(f), resolution=50)
        assert measure.total_mass == pytest.approx(1.0, abs=1e-9)


def test_integer_series_matches_orbit_sum():
    rng = random.Random(6)
    for _ in range(10):
        f = random_line_map(rng, degree=rng.randint(2, 4))
        g = solve_potential(f, depth=15)
        for _ in range(5):
            x = Fraction(rng.randint(-300, 300), rng.randint(1, 40))
            expected, scale, point = Fraction(0), Fraction(1), x
            for _ in range(15):
                scale /= f.degree
                expected += scale * cocycle1d(f, point)
                point = evaluate_map(f, point)
            expected += scale * (-abs(point) / 2)
            assert g(x) == expected


def test_depth_zero_is_the_seed():
    g = solve_potential(tent_map(), depth=10)
    for x in (Fraction(-3, 2), Fraction(0), Fraction(1, 3), 5):
        assert g.evaluate(x, depth=0) == -abs(Fraction(x)) / 2


def test_truncations_form_a_cauchy_sequence():
    f = random_line_map(random.Random(2), degree=3)
    g = solve_potential(f)
    n = f.degree
    bound = g.gap * n / (n - 1)
    for depth in (4, 8, 12):
        for k in range(-20, 21):
            x = Fraction(k, 6)
            gap = abs(g.evaluate(x, depth=2 * depth) - g.evaluate(x, depth=depth))
            assert gap <= bound * (Fraction(1, n ** depth) + Fraction(1, n ** (2 * depth)))


@pytest.mark.timing
def test_tent_measure_runtime():
    start = time.perf_counter()
    measure = measure_from_potential(solve_potential(tent_map()))
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    cells = measure.cells_within(Fraction(-45, 100), Fraction(45, 100))
    assert cells
    assert all(cell.value == pytest.approx(1.0, abs=1e-6) for cell in cells)
    assert measure.max_atom() < 1e-6
    assert measure.total_mass == pytest.approx(1.0, abs=1e-9)


def test_pullback_through_affine_piece_scales_mass():
    g = tent_closed_form()
    f = tent_map()
    composed = ClosedFormPotential(lambda x: g(evaluate_map(f, x)))
    # f has slope -2 on (0, oo) and 2 on (-oo, 0)
    assert interval_mass(composed, Fraction(1, 8), Fraction(1, 4)) == pytest.approx(0.5)
    assert interval_mass(composed, Fraction(-1, 4), Fraction(-1, 8)) == pytest.approx(0.5)
    assert interval_mass(composed, Fraction(1, 4), Fraction(3, 8)) == pytest.approx(0.5)
    assert interval_mass(composed, Fraction(3, 4), 1) == pytest.approx(0.0, abs=1e-12)


def test_pullback_mass_on_random_pieces():
    checked = 0
    for seed in range(10):
        f = random_line_map(random.Random(seed), degree=2 + seed % 2)
        g = solve_potential(f, depth=20)
        composed = ClosedFormPotential(lambda x, g=g, f=f: g(evaluate_map(f, x)))
        for piece in map_pieces(f)[1:-1]:
            if piece.slope == 0:
                continue
            lo = piece.start + (piece.end - piece.start) / 4
            hi = piece.end - (piece.end - piece.start) / 4
            image = sorted((evaluate_map(f, lo), evaluate_map(f, hi)))
            h = min(DERIVATIVE_STEPS[-1], (hi - lo) / 4)
            pulled = interval_mass(composed, lo, hi, steps=(h,))
            pushed = interval_mass(g, image[0], image[1], steps=(abs(piece.slope) * h,))
            assert pulled == pytest.approx(abs(float(piece.slope)) * pushed, rel=1e-9, abs=1e-12)
            checked += 1
    assert checked > 0


def test_cocycle_atoms():
    assert cocycle_atom_masses(tent_map()) == {Fraction(0): Fraction(2)}
    assert cocycle_measure_atoms(tent_map()).total_mass == pytest.approx(2.0)

    f = PLMap1D.from_terms(2, [(2, 0, 0), (1, 1, Fraction(-1, 2))], [(0, 2, 0)])
    # F0 switches from slope 1 to slope 0 at x = 1/2
    assert cocycle_atom_masses(f) == {Fraction(1, 2): Fraction(1, 2)}


def test_cocycle_atoms_match_slope_jumps_of_c():
    rng = random.Random(11)
    for _ in range(100):
        f = random_line_map(rng, degree=rng.randint(2, 4), extra_terms=rng.randint(1, 4))
        breaks = break_points(f)
        spacing = [b - a for a, b in zip(breaks, breaks[1:])]
        h = min(spacing, default=Fraction(4)) / 4
        expected = {}
        for x in breaks:
            left = (cocycle1d(f, x) - cocycle1d(f, x - h)) / h
            right = (cocycle1d(f, x + h) - cocycle1d(f, x)) / h
            jump = left - right
            if jump:
                expected[x] = jump
        atoms = {x: m for x, m in cocycle_atom_masses(f).items() if m}
        assert atoms == expected


def test_pullback_stays_in_cone():
    rng = random.Random(8)
    for _ in range(500):
        f = random_line_map(rng, degree=rng.randint(2, 3))
        xi = HomogeneousTerm(rng.randint(0, 3), rng.randint(0, 3), Fraction(rng.randint(-8, 8), 4))
        pulled = pullback_form(f, xi)
        assert pulled.in_cone
        for _ in range(5):
            x0, x1 = (Fraction(rng.randint(-40, 40), 8) for _ in range(2))
            f0, f1 = f.homogeneous(x0, x1)
            assert pulled.evaluate(x0, x1) == xi.value(f0, f1)


def test_pullback_rejects_negative_slopes():
    with pytest.raises(InvalidMapError):
        pullback_form(tent_map(), HomogeneousTerm(-1, 2, 0))


def test_pullback_measure_constant():
    assert pullback_measure_constant(1, 1, 2, 1) == 1
    # the tent fold sends both sides onto the left slope of g
    assert pullback_measure_constant(2, -2, Fraction(1, 2), Fraction(-1, 2)) == 2
    assert pullback_measure_constant(-2, 2, Fraction(1, 2), Fraction(-1, 2)) == 2
    assert pullback_measure_constant(-1, -1, 2, 1) == 1


def test_tent_fold_constant_from_closed_form():
    g = tent_closed_form()
    f = tent_map()
    top = evaluate_map(f, 0)
    assert top == Fraction(1, 2)
    h = Fraction(1, 10 ** 6)
    # g is -x^2/2 left of 1/2, so the exact left quotient is -1/2 + h/2
    g_left = (g(top) - g(top - h)) / h - h / 2
    g_right = (g(top + h) - g(top)) / h
    assert g_left == Fraction(-1, 2)
    assert g_right == Fraction(-1, 2)
    slopes = [p.slope for p in map_pieces(f)]
    assert pullback_measure_constant(slopes[0], slopes[1], g_left, g_right) == -2


def test_monotonicity():
    tent = monotonicity_check(tent_map())
    assert not tent.monotonic
    assert tent.max_slope == 2
    assert tent.classification == "non-monotonic"

    doubling = monotonicity_check(PLMap1D.from_terms(2, [(2, 0, 0)], [(0, 2, 0)]))
    assert doubling.monotonic
    assert doubling.reaches_max_slope
    assert doubling.consistent


def test_tent_atom_audit_is_clean():
    audit = atom_audit(tent_map(), tent_closed_form(), resolution=50, interval=(-1, 1))
    assert audit.clean
    assert audit.hypothesis_holds
    assert audit.stable_under_refinement
    assert audit.break_points == (0,)
