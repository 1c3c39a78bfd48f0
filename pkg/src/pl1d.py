#!/usr/bin/env python3
"""
Expanding piecewise-linear maps of the line written as homogeneous degree-n
min-plus maps F = (F0, F1), their potential g with g(f(x)) = n g(x) - c(x),
and the measures -g'' extracted from concave potentials.

Terms are triples (a, b, c) standing for a X0 + b X1 + c with a + b = n. The
line is the chart X0 = 0, so f(x) = min(b1 x + c1) - min(b0 x + c0).
"""

import math
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConcavityError, DomainError, InvalidMapError
from logger import get_logger
from settings import get_settings
from trop_core import (
    NEG_INF,
    POS_INF,
    EnvelopePiece,
    Number,
    as_rational,
    lower_envelope,
    random_rational,
)

# Base steps for one-sided difference quotients; each is paired with its half
DERIVATIVE_STEPS = (Fraction(1, 10 ** 4), Fraction(1, 10 ** 5), Fraction(1, 10 ** 6))
IMAGE_DEPTH = 10
MEASURE_TOL = 1e-20


@dataclass(frozen=True)
class HomogeneousTerm:
    a: int
    b: int
    c: Fraction

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidMapError(f"Exponent {name}={value!r} must be an integer")
        object.__setattr__(self, "c", as_rational(self.c))

    def value(self, x0: Number, x1: Number) -> Number:
        return self.a * x0 + self.b * x1 + self.c

    def chart_value(self, x: Number) -> Number:
        return self.b * x + self.c


@dataclass(frozen=True)
class MinForm:
    """min over terms of a X0 + b X1 + c"""

    terms: Tuple[HomogeneousTerm, ...]

    def evaluate(self, x0: Number, x1: Number) -> Number:
        return min(term.value(x0, x1) for term in self.terms)

    @property
    def in_cone(self) -> bool:
        return all(term.a >= 0 and term.b >= 0 for term in self.terms)


@dataclass(frozen=True)
class PLMap1D:
    degree: int
    f0: Tuple[HomogeneousTerm, ...]
    f1: Tuple[HomogeneousTerm, ...]

    def __post_init__(self):
        n = self.degree
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise InvalidMapError(f"Degree must be an integer >= 2, got {n!r}")
        f0, f1 = tuple(self.f0), tuple(self.f1)
        if not f0 or not f1:
            raise InvalidMapError("Both F0 and F1 need at least one term")
        for term in f0 + f1:
            if term.a < 0 or term.b < 0 or term.a + term.b != n:
                raise InvalidMapError(
                    f"Term ({term.a}, {term.b}, {term.c}) needs a, b >= 0 with a + b = {n}"
                )
        if not any(t.b == n for t in f0 + f1) or not any(t.b == 0 for t in f0 + f1):
            raise InvalidMapError(
                f"F0 and F1 together need a term with b = {n} and a term with b = 0"
            )
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "f1", f1)

    @classmethod
    def from_terms(cls, degree: int, f0: Sequence[Sequence], f1: Sequence[Sequence]) -> "PLMap1D":
        return cls(
            degree,
            tuple(HomogeneousTerm(int(a), int(b), c) for a, b, c in f0),
            tuple(HomogeneousTerm(int(a), int(b), c) for a, b, c in f1),
        )

    def homogeneous(self, x0: Number, x1: Number) -> Tuple[Number, Number]:
        return MinForm(self.f0).evaluate(x0, x1), MinForm(self.f1).evaluate(x0, x1)

    def to_terms(self) -> Dict[str, List[Tuple[int, int, Fraction]]]:
        return {
            "F0": [(t.a, t.b, t.c) for t in self.f0],
            "F1": [(t.a, t.b, t.c) for t in self.f1],
        }


def tent_map() -> PLMap1D:
    """f(x) = -2|x| + 1/2 in degree 4"""
    return PLMap1D.from_terms(4, [(2, 2, 0)], [(4, 0, Fraction(1, 2)), (0, 4, Fraction(1, 2))])


def random_line_map(rng: random.Random, degree: int = 2, extra_terms: int = 2,
                    spread: int = 1, denominator: int = 64) -> PLMap1D:
    """Both branches carry the two extreme terms, so f is constant far out"""
    branches = []
    for _ in range(2):
        terms = {
            0: random_rational(rng, -spread, spread, denominator),
            degree: random_rational(rng, -spread, spread, denominator),
        }
        for _ in range(extra_terms):
            b = rng.randint(0, degree)
            value = random_rational(rng, -spread, spread, denominator)
            terms[b] = min(terms.get(b, value), value)
        branches.append([(degree - b, b, c) for b, c in sorted(terms.items())])
    return PLMap1D.from_terms(degree, branches[0], branches[1])


def _branch_value(terms: Sequence[HomogeneousTerm], x: Number) -> Number:
    return min(term.chart_value(x) for term in terms)


def _branch_pieces(terms: Sequence[HomogeneousTerm]) -> List[EnvelopePiece]:
    return lower_envelope([(Fraction(t.b), t.c) for t in terms])


def evaluate_map(f: PLMap1D, x: Number) -> Number:
    return _branch_value(f.f1, x) - _branch_value(f.f0, x)


def cocycle1d(f: PLMap1D, x: Number) -> Number:
    """c(x) = (f1(x) + f0(x))/2 - n x/2"""
    return (_branch_value(f.f1, x) + _branch_value(f.f0, x) - f.degree * x) / 2


def break_points(f: PLMap1D) -> Tuple[Fraction, ...]:
    found = set()
    for terms in (f.f0, f.f1):
        found.update(piece.start for piece in _branch_pieces(terms)[1:])
    return tuple(sorted(found))


def _piece_at(pieces: Sequence[EnvelopePiece], t: Fraction) -> EnvelopePiece:
    for piece in pieces:
        if piece.start <= t <= piece.end:
            return piece
    return pieces[-1]


def map_pieces(f: PLMap1D) -> List[EnvelopePiece]:
    """Affine pieces of the dehomogenised map, left to right"""
    breaks = list(break_points(f))
    pieces1, pieces0 = _branch_pieces(f.f1), _branch_pieces(f.f0)
    bounds = [NEG_INF] + breaks + [POS_INF]
    pieces = []
    for start, end in zip(bounds, bounds[1:]):
        if start == NEG_INF:
            sample = (end - 1) if end != POS_INF else Fraction(0)
        elif end == POS_INF:
            sample = start + 1
        else:
            sample = (start + end) / 2
        one, zero = _piece_at(pieces1, sample), _piece_at(pieces0, sample)
        pieces.append(EnvelopePiece(start, end, one.slope - zero.slope,
                                    one.intercept - zero.intercept, ()))
    return pieces


def pullback_form(f: PLMap1D, xi: HomogeneousTerm) -> MinForm:
    """xi(F0, F1) for xi = a X0 + b X1 + c with a, b >= 0, expanded term by term"""
    if xi.a < 0 or xi.b < 0:
        raise InvalidMapError(f"Pullback needs nonnegative slopes, got ({xi.a}, {xi.b})")
    zeros = f.f0 if xi.a else (HomogeneousTerm(0, 0, 0),)
    ones = f.f1 if xi.b else (HomogeneousTerm(0, 0, 0),)
    terms = {}
    for t0 in zeros:
        for t1 in ones:
            slope = (xi.a * t0.a + xi.b * t1.a, xi.a * t0.b + xi.b * t1.b)
            constant = xi.a * t0.c + xi.b * t1.c + xi.c
            if slope not in terms or constant < terms[slope]:
                terms[slope] = constant
    return MinForm(tuple(HomogeneousTerm(a, b, c) for (a, b), c in sorted(terms.items())))


def _seed(x: Number) -> Number:
    return -abs(x) / 2


def seed_gap(f: PLMap1D) -> Fraction:
    """sup |T g0 - g0| with T g = (c + g o f)/n, exact.

    The difference is piecewise affine with constant tails, so the sup is taken
    at its break points: breaks of f, zeros of f, and 0.
    """
    n = f.degree
    candidates = set(break_points(f)) | {Fraction(0)}
    for piece in map_pieces(f):
        if piece.slope != 0:
            root = -piece.intercept / piece.slope
            if piece.start <= root <= piece.end:
                candidates.add(root)
    low, high = min(candidates), max(candidates)
    candidates.update({low - 1, high + 1})

    def gap(x):
        return abs((cocycle1d(f, x) + _seed(evaluate_map(f, x))) / n - _seed(x))

    return max(gap(x) for x in candidates)


def depth_for(f: PLMap1D, tol: float) -> int:
    """Smallest N with n^-N * sup|g - g0| <= tol"""
    n = f.degree
    bound = float(seed_gap(f)) * n / (n - 1)
    if bound <= tol:
        return 1
    return max(1, math.ceil(math.log(bound / tol) / math.log(n)))


def _integer_series(f: PLMap1D, x: Fraction, depth: int) -> Fraction:
    """g_N(x) in integers over the common denominator L of x and the constants.

    Slopes are integers, so every f^k(x) keeps denominator L. With X = L x,
    C_k = 2 L c(f^k x) and the sum is (sum C_k n^(N-1-k) - |X_N|) / (2 L n^N).
    """
    terms = f.f0 + f.f1
    scale = math.lcm(x.denominator, *(t.c.denominator for t in terms))
    zeros = [(t.b, t.c.numerator * (scale // t.c.denominator)) for t in f.f0]
    ones = [(t.b, t.c.numerator * (scale // t.c.denominator)) for t in f.f1]
    n = f.degree
    point = x.numerator * (scale // x.denominator)
    acc = 0
    for _ in range(depth):
        one = min(b * point + c for b, c in ones)
        zero = min(b * point + c for b, c in zeros)
        acc = acc * n + one + zero - n * point
        point = one - zero
    return Fraction(acc - abs(point), 2 * scale * n ** depth)


@dataclass(frozen=True)
class Potential1D:
    """g_N(x) = sum_{k<N} n^-(k+1) c(f^k x) + n^-N g0(f^N x), g0(x) = -|x|/2"""

    line_map: PLMap1D
    depth: int
    tol: float
    gap: Fraction
    bound: Optional[Fraction] = None
    tails: Optional[Tuple[Fraction, Fraction]] = None

    def evaluate(self, x: Number, depth: Optional[int] = None) -> Number:
        depth = self.depth if depth is None else depth
        if not isinstance(x, float):
            return _integer_series(self.line_map, as_rational(x), depth)
        n = self.line_map.degree
        total, scale = 0.0, 1.0
        for _ in range(depth):
            scale /= n
            total += scale * cocycle1d(self.line_map, x)
            x = evaluate_map(self.line_map, x)
        return total + scale * _seed(x)

    __call__ = evaluate

    def evaluate_grid(self, xs) -> np.ndarray:
        f = self.line_map
        n = float(f.degree)
        b1 = np.array([float(t.b) for t in f.f1])
        c1 = np.array([float(t.c) for t in f.f1])
        b0 = np.array([float(t.b) for t in f.f0])
        c0 = np.array([float(t.c) for t in f.f0])
        x = np.asarray(xs, dtype=float)
        total = np.zeros_like(x)
        scale = 1.0
        for _ in range(self.depth):
            one = np.min(np.outer(x, b1) + c1, axis=1)
            zero = np.min(np.outer(x, b0) + c0, axis=1)
            scale /= n
            total += scale * ((one + zero - n * x) / 2)
            x = one - zero
        return total + scale * (-np.abs(x) / 2)

    def residual(self, x: Number) -> float:
        """|g_N(f(x)) - n g_N(x) + c(x)|, at most n^(1-N) sup|T g0 - g0|"""
        x = x if isinstance(x, float) else as_rational(x)
        f = self.line_map
        value = self(evaluate_map(f, x)) - f.degree * self(x) + cocycle1d(f, x)
        return abs(float(value))

    def tail_value(self, x: Number) -> Number:
        if self.tails is None:
            raise DomainError("Tails were not resolved for this potential")
        left, right = self.tails
        return x / 2 + left if x < 0 else -x / 2 + right

    def nodes(self, lo: Fraction, hi: Fraction) -> List[Fraction]:
        """Break points of f and their first images inside [lo, hi]"""
        found = set()
        for point in break_points(self.line_map):
            for _ in range(IMAGE_DEPTH + 1):
                if lo <= point <= hi:
                    found.add(point)
                point = evaluate_map(self.line_map, point)
        return sorted(found)

    def refined(self, tol: float) -> "Potential1D":
        if tol >= self.tol:
            return self
        depth = max(self.depth, depth_for(self.line_map, tol))
        return Potential1D(self.line_map, depth, tol, self.gap, self.bound, self.tails)

    def default_interval(self) -> Tuple[Fraction, Fraction]:
        if self.bound is None:
            reach = max((abs(p) for p in break_points(self.line_map)), default=Fraction(0)) + 1
        else:
            reach = self.bound + 1
        return -reach, reach


def _resolve_tails(potential: Potential1D, tol: float, doublings: int = 30):
    """Smallest K = K0 * 2^j where g_N matches -|x|/2 + const at K and 2K on both sides"""
    reach = max((abs(p) for p in break_points(potential.line_map)), default=Fraction(0)) + 1
    for _ in range(doublings):
        left = potential(-reach) + reach / 2
        right = potential(reach) + reach / 2
        if abs(left - (potential(-2 * reach) + reach)) <= tol \
                and abs(right - (potential(2 * reach) + reach)) <= tol:
            return reach, (left, right)
        reach *= 2
    return None, None


def solve_potential(f: PLMap1D, tol: float = 1e-12, depth: Optional[int] = None) -> Potential1D:
    gap = seed_gap(f)
    depth = depth if depth is not None else depth_for(f, tol)
    potential = Potential1D(f, depth, tol, gap)
    bound, tails = _resolve_tails(potential, tol)
    potential = Potential1D(f, depth, tol, gap, bound, tails)
    get_logger().log_line(
        f"Potential of degree-{f.degree} map: N={depth}, sup|Tg0-g0|={float(gap):.6g}, K={bound}"
    )
    if bound is None:
        get_logger().log_line("Tails did not settle; evaluating by series everywhere", "WARNING")
    return potential


@dataclass(frozen=True)
class ClosedFormPotential:
    """A potential given by a formula, with its non-smooth points declared"""

    function: Callable[[Number], Number]
    kinks: Tuple[Fraction, ...] = ()

    def evaluate(self, x: Number) -> Number:
        return self.function(x)

    __call__ = evaluate

    def nodes(self, lo: Fraction, hi: Fraction) -> List[Fraction]:
        return sorted(as_rational(k) for k in self.kinks if lo <= as_rational(k) <= hi)


def tent_closed_form() -> ClosedFormPotential:
    """g = -x^2/2 + 1/24 on |x| <= 1/2 and -|x|/2 + 1/6 outside"""
    half = Fraction(1, 2)

    def g(x):
        if abs(x) <= half:
            return -x * x / 2 + Fraction(1, 24)
        return -abs(x) / 2 + Fraction(1, 6)

    return ClosedFormPotential(g, (-half, half))


@dataclass(frozen=True)
class DensityCell:
    x0: Fraction
    x1: Fraction
    value: float

    @property
    def mass(self) -> float:
        return self.value * float(self.x1 - self.x0)


@dataclass(frozen=True)
class PiecewiseMeasure:
    atoms: Tuple[Tuple[Fraction, float], ...]
    density: Tuple[DensityCell, ...]
    total_mass: float

    def max_atom(self) -> float:
        return max((mass for _, mass in self.atoms), default=0.0)

    def atoms_above(self, threshold: float) -> Tuple[Tuple[Fraction, float], ...]:
        return tuple((x, m) for x, m in self.atoms if m > threshold)

    def cells_within(self, lo, hi) -> Tuple[DensityCell, ...]:
        lo, hi = as_rational(lo), as_rational(hi)
        return tuple(cell for cell in self.density if cell.x0 >= lo and cell.x1 <= hi)

    def to_dict(self) -> Dict:
        return {
            "atoms": [{"x": float(x), "mass": m} for x, m in self.atoms],
            "density": [
                {"x0": float(c.x0), "x1": float(c.x1), "value": c.value} for c in self.density
            ],
            "total_mass": self.total_mass,
        }


@dataclass(frozen=True)
class _NodeEstimate:
    left: Fraction
    right: Fraction
    atom: Fraction
    spread: Fraction


def _node_estimate(g, x: Fraction, gap: Fraction, steps: Sequence[Fraction]) -> _NodeEstimate:
    """Plain one-sided quotients at the finest step, plus Richardson atoms across steps"""
    scale = min(Fraction(1), gap / 4 / steps[0])
    value = g(x)

    def quotients(h):
        return (value - g(x - h)) / h, (g(x + h) - value) / h

    richardson = []
    finest = None
    for base in steps:
        h = base * scale
        left, right = quotients(h)
        half_left, half_right = quotients(h / 2)
        richardson.append(2 * (half_left - half_right) - (left - right))
        finest = (half_left, half_right)
    spread = max(richardson) - min(richardson)
    return _NodeEstimate(finest[0], finest[1], richardson[-1], spread)


def _measure_grid(g, lo: Fraction, hi: Fraction, resolution: int) -> List[Fraction]:
    grid = {lo + (hi - lo) * Fraction(k, resolution) for k in range(resolution + 1)}
    grid.update(g.nodes(lo, hi))
    return sorted(grid)


def measure_from_potential(g, interval: Optional[Tuple] = None, resolution: int = 200,
                           steps: Sequence[Fraction] = DERIVATIVE_STEPS,
                           stability_tol: float = 1e-7,
                           concavity_tol: float = 1e-9) -> PiecewiseMeasure:
    """Atoms and cell densities of -g'' on an interval.

    Atom candidates are the finest plain slope jumps; a Richardson estimate that
    agrees across the steps keeps its value as an atom and the rest of the jump
    is split between the two neighbouring cells. Totals therefore telescope to
    g'(lo-) - g'(hi+).
    """
    if isinstance(g, Potential1D):
        g = g.refined(MEASURE_TOL)
        interval = interval or g.default_interval()
    if interval is None:
        raise DomainError("An interval is required for closed-form potentials")
    lo, hi = as_rational(interval[0]), as_rational(interval[1])
    if lo >= hi:
        raise DomainError(f"Empty interval [{lo}, {hi}]")
    nodes = _measure_grid(g, lo, hi, resolution)
    gaps = []
    for i, x in enumerate(nodes):
        neighbours = [abs(x - nodes[j]) for j in (i - 1, i + 1) if 0 <= j < len(nodes)]
        gaps.append(min(neighbours))

    estimates: Dict[int, _NodeEstimate] = {}
    workers = get_settings().workers_for(len(nodes))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {
            executor.submit(_node_estimate, g, x, gaps[i], steps): i for i, x in enumerate(nodes)
        }
        for future in as_completed(future_to_index):
            estimates[future_to_index[future]] = future.result()

    cells = []
    for i in range(len(nodes) - 1):
        mass = estimates[i].right - estimates[i + 1].left
        if mass < -concavity_tol:
            raise ConcavityError(
                f"Negative mass {float(mass):.3g} on ({float(nodes[i])}, {float(nodes[i + 1])})"
            )
        cells.append(max(mass, Fraction(0)))

    atoms = []
    for i, x in enumerate(nodes):
        estimate = estimates[i]
        jump = estimate.left - estimate.right
        if jump < -concavity_tol:
            raise ConcavityError(f"Negative slope jump {float(jump):.3g} at {float(x)}")
        jump = max(jump, Fraction(0))
        atom = Fraction(0)
        if estimate.spread <= stability_tol:
            atom = min(max(estimate.atom, Fraction(0)), jump)
        excess = jump - atom
        if i == 0:
            cells[0] += excess
        elif i == len(nodes) - 1:
            cells[-1] += excess
        else:
            cells[i - 1] += excess / 2
            cells[i] += excess / 2
        atoms.append((x, atom))

    density = tuple(
        DensityCell(nodes[i], nodes[i + 1], float(mass / (nodes[i + 1] - nodes[i])))
        for i, mass in enumerate(cells)
    )
    total = sum(cells, Fraction(0)) + sum((m for _, m in atoms), Fraction(0))
    measure = PiecewiseMeasure(tuple((x, float(m)) for x, m in atoms), density, float(total))
    get_logger().log_line(
        f"Measure on [{lo}, {hi}] with {len(nodes)} nodes: total {measure.total_mass:.12g}, "
        f"largest atom {measure.max_atom():.3g}"
    )
    return measure


def interval_mass(g, lo, hi, steps: Sequence[Fraction] = DERIVATIVE_STEPS) -> float:
    """Mass of the open interval (lo, hi): g'(lo+) - g'(hi-)"""
    lo, hi = as_rational(lo), as_rational(hi)
    if lo >= hi:
        raise DomainError(f"Empty interval ({lo}, {hi})")
    h = min(steps[-1], (hi - lo) / 4)

    def right(x):
        return 2 * (g(x + h / 2) - g(x)) / (h / 2) - (g(x + h) - g(x)) / h

    def left(x):
        return 2 * (g(x) - g(x - h / 2)) / (h / 2) - (g(x) - g(x - h)) / h

    return float(right(lo) - left(hi))


def cocycle_atom_masses(f: PLMap1D) -> Dict[Fraction, Fraction]:
    """Exact mass (b_left - b_right)/2 of -c'' at each break of f1 and f0"""
    atoms: Dict[Fraction, Fraction] = {}
    for terms in (f.f0, f.f1):
        pieces = _branch_pieces(terms)
        for before, after in zip(pieces, pieces[1:]):
            jump = (before.slope - after.slope) / 2
            atoms[after.start] = atoms.get(after.start, Fraction(0)) + jump
    return atoms


def cocycle_measure_atoms(f: PLMap1D) -> PiecewiseMeasure:
    atoms = cocycle_atom_masses(f)
    ordered = tuple((x, float(m)) for x, m in sorted(atoms.items()))
    return PiecewiseMeasure(ordered, (), float(sum(atoms.values(), Fraction(0))))


def pullback_measure_constant(fl, fr, gl, gr) -> Fraction:
    """Atom created at a point by pulling g back through f, from one-sided slopes"""
    fl, fr, gl, gr = (as_rational(v) for v in (fl, fr, gl, gr))
    if fl >= 0 and fr >= 0:
        return fl * gl - fr * gr
    if fl >= 0 >= fr:
        return (fl - fr) * gl
    if fl <= 0 <= fr:
        return (fl - fr) * gr
    return fl * gr - fr * gl


@dataclass(frozen=True)
class MonotonicityReport:
    monotonic: bool
    max_slope: Fraction
    reaches_max_slope: bool
    consistent: bool

    @property
    def classification(self) -> str:
        return "monotonic" if self.monotonic else "non-monotonic"


def monotonicity_check(f: PLMap1D) -> MonotonicityReport:
    """Direct slope scan, cross-checked against the slope +-n criterion"""
    slopes = [piece.slope for piece in map_pieces(f)]
    monotonic = all(s >= 0 for s in slopes) or all(s <= 0 for s in slopes)
    reaches = any(abs(s) == f.degree for s in slopes)
    report = MonotonicityReport(monotonic, max(abs(s) for s in slopes), reaches,
                                consistent=monotonic or not reaches)
    if not report.consistent:
        get_logger().log_line(f"Map reaches slope {f.degree} but is not monotonic", "WARNING")
    return report


@dataclass(frozen=True)
class AtomAudit:
    atoms: Tuple[Tuple[Fraction, float], ...]
    off_break: Tuple[Tuple[Fraction, float], ...]
    break_points: Tuple[Fraction, ...]
    hypothesis_holds: bool
    stable_under_refinement: bool

    @property
    def clean(self) -> bool:
        return not self.off_break


def atom_audit(f: PLMap1D, g, tolerance: float = 1e-6, resolution: int = 200,
               interval: Optional[Tuple] = None) -> AtomAudit:
    """Atoms of -g'' above tolerance, flagging any away from the break points of f"""
    report = monotonicity_check(f)
    if report.monotonic:
        get_logger().log_line("Atom audit on a monotonic map; break-point localisation may fail",
                              "WARNING")
    coarse = measure_from_potential(g, interval, resolution).atoms_above(tolerance)
    fine = measure_from_potential(g, interval, 2 * resolution).atoms_above(tolerance)
    stable = [x for x, _ in coarse] == [x for x, _ in fine] and all(
        abs(a - b) <= tolerance for (_, a), (_, b) in zip(coarse, fine)
    )
    breaks = break_points(f)
    off = tuple((x, m) for x, m in coarse if x not in breaks)
    return AtomAudit(coarse, off, breaks, not report.monotonic, stable)
