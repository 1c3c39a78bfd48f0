#!/usr/bin/env python3
"""
Self-check suites behind `tropdyn verify`: the Kummer semiconjugacy, the
tent-map potential against its closed form, and exact invariance of random
skeletons under the Vieta reflections.
"""

import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from config import random_surface_config
from dynamics3d import AXES, SurfaceSpec, vieta_reflection
from errors import TropDynError
from geometry import level_set_polytope
from kummer import KUMMER_TERMS, check_semiconjugacy, kummer_involution_matrices
from logger import get_logger
from pl1d import measure_from_potential, solve_potential, tent_closed_form, tent_map
from progress_ui import ProgressUI
from settings import get_settings
from trop_core import TropicalPolynomial

TENT_DEPTH = 40
TENT_GRID = 2001
TENT_TOL = 1e-9
DENSITY_TOL = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: List[CheckResult] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(check.passed for check in self.checks)

    @property
    def checks_passed(self) -> int:
        return sum(1 for check in self.checks if check.passed)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(CheckResult(name, bool(passed), detail))


def corrupted_kummer_spec() -> SurfaceSpec:
    """Kummer surface with one coefficient moved, so the semiconjugacy breaks"""
    terms = dict(KUMMER_TERMS)
    terms[(-1, -1, -1)] = Fraction(1, 2)
    return SurfaceSpec(TropicalPolynomial.from_terms(terms, 3), -1)


def kummer_suite(corrupt: bool = False, samples: int = 1000, orbit_steps: int = 100) -> SuiteResult:
    result = SuiteResult("kummer")
    spec = corrupted_kummer_spec() if corrupt else None
    report = check_semiconjugacy(samples=samples, orbit_steps=orbit_steps, spec=spec)
    for axis in AXES:
        mismatches = report.per_axis.get(axis, samples)
        result.add(f"sigma_{axis}", mismatches == 0, f"{mismatches}/{samples} mismatches")
    result.add("orbit", report.orbit_mismatches == 0,
               f"{report.orbit_mismatches}/{orbit_steps} mismatched steps")
    for axis, matrix in kummer_involution_matrices().items():
        m = np.array(matrix, dtype=np.int64)
        determinant = int(round(np.linalg.det(m)))
        involutive = bool((m @ m == np.eye(2, dtype=np.int64)).all())
        result.add(f"iota_{axis}", involutive and determinant == -1,
                   f"square is identity: {involutive}, det {determinant}")
    return result


def tent_suite() -> SuiteResult:
    result = SuiteResult("tent")
    f = tent_map()
    closed = tent_closed_form()
    g = solve_potential(f, depth=TENT_DEPTH)

    xs = np.linspace(-2.0, 2.0, TENT_GRID)
    series = g.evaluate_grid(xs)
    expected = np.array([float(closed(Fraction(x))) for x in xs])
    error = float(np.max(np.abs(series - expected)))
    result.add("closed_form", error <= TENT_TOL, f"max error {error:.3g}")

    measure = measure_from_potential(g)
    cells = measure.cells_within(Fraction(-45, 100), Fraction(45, 100))
    density_error = max((abs(cell.value - 1.0) for cell in cells), default=float("inf"))
    result.add("density", density_error <= DENSITY_TOL, f"max |density - 1| {density_error:.3g}")
    total_error = abs(measure.total_mass - 1.0)
    result.add("total_mass", total_error <= TENT_TOL, f"total {measure.total_mass:.12g}")
    result.add("no_atoms", measure.max_atom() <= DENSITY_TOL,
               f"largest atom {measure.max_atom():.3g}")
    return result


def _surface_checks(spec: SurfaceSpec, rng: random.Random, points: int) -> int:
    """Number of boundary points where some reflection is not an exact involution of the skeleton"""
    polytope = level_set_polytope(spec.hcirc, spec.level)
    failures = 0
    for _ in range(points):
        p = polytope.random_boundary_point(rng)
        for axis in range(3):
            q = vieta_reflection(spec, axis, p)
            if spec.h(q) != spec.h(p) or vieta_reflection(spec, axis, q) != p:
                failures += 1
                break
    return failures


def skeleton_suite(surfaces: int = 10, points: int = 1000, seed: int = 0) -> SuiteResult:
    result = SuiteResult("skeleton")
    for index in range(surfaces):
        spec = random_surface_config(seed + index).to_spec()
        failures = _surface_checks(spec, random.Random(seed + index), points)
        result.add(f"surface_{index}", failures == 0, f"{failures}/{points} failures")
    return result


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "kummer": kummer_suite,
    "tent": tent_suite,
    "skeleton": skeleton_suite,
}


def resolve_suites(name: str) -> List[str]:
    if name == "all":
        return list(SUITES)
    if name not in SUITES:
        raise TropDynError(f"Unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    return [name]


def _run_one(name: str, corrupt: bool, ui: Optional[ProgressUI]) -> SuiteResult:
    if ui:
        ui.update_suite(name, "running", progress=50)
    try:
        # Only the Kummer suite has a negative control
        result = SUITES[name](corrupt=corrupt) if name == "kummer" else SUITES[name]()
    except TropDynError as e:
        result = SuiteResult(name, error=str(e))
    if ui:
        ui.update_suite(name, "passed" if result.passed else "failed", progress=100,
                        checks_passed=result.checks_passed, checks_total=len(result.checks),
                        error_msg=result.error)
        for check in result.checks:
            if not check.passed:
                ui.add_console_output(f"[red]{name}.{check.name}[/red]: {check.detail}")
    return result


def run_suites(names: Sequence[str], corrupt: bool = False,
               ui: Optional[ProgressUI] = None) -> List[SuiteResult]:
    """Run suites in parallel; results come back in the order of `names`"""
    log = get_logger()
    if ui:
        for name in names:
            ui.add_suite(name)

    results: Dict[int, SuiteResult] = {}
    workers = get_settings().workers_for(len(names))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {
            executor.submit(_run_one, name, corrupt, ui): i for i, name in enumerate(names)
        }
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            results[index] = future.result()
            result = results[index]
            log.log_main(
                f"Suite {result.name}: {'PASS' if result.passed else 'FAIL'} "
                f"({result.checks_passed}/{len(result.checks)} checks)",
                "INFO" if result.passed else "ERROR",
            )
    return [results[i] for i in range(len(names))]
