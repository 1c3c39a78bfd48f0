#!/usr/bin/env python3
"""
JSON input files and named presets.

Surface and curve files map slope keys "i,j,k" (or "i,j") to rational strings;
absent keys are +inf coefficients and the central key is never allowed, since
the central coefficient is the level. Line maps list homogeneous terms.
"""

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Tuple, Union

from dynamics3d import SurfaceSpec
from elliptic import CurveSpec
from errors import ConfigError, TropDynError
from geometry import polynomial_maximum
from kummer import KUMMER_TERMS
from pl1d import PLMap1D, tent_map
from trop_core import TropicalPolynomial, as_rational, random_rational

Slope = Tuple[int, ...]

RUBIK_TERMS = {
    (-1, 0, 0): 0,
    (1, 0, 0): 0,
    (0, -1, 0): 0,
    (0, 1, 0): 0,
    (0, 0, -1): 0,
    (0, 0, 1): 0,
    (-1, -1, -1): 1,
}
DEFAULT_RUBIK_DEPTH = Fraction(1, 4)

OUTER_SLOPES_2D = tuple((i, j) for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0))
OUTER_SLOPES_3D = tuple(
    (i, j, k) for i in (-1, 0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1) if (i, j, k) != (0, 0, 0)
)


def format_rational(value) -> str:
    return str(as_rational(value))


def _parse_rational(value, where: str) -> Fraction:
    try:
        return as_rational(value)
    except TropDynError as e:
        raise ConfigError(f"{where}: {e}") from e


def _parse_key(key: str, dimension: int) -> Slope:
    try:
        slope = tuple(int(part) for part in key.split(","))
    except ValueError as e:
        raise ConfigError(f"Coefficient key {key!r} is not a comma-separated slope") from e
    if len(slope) != dimension or any(s not in (-1, 0, 1) for s in slope):
        raise ConfigError(f"Coefficient key {key!r} must have {dimension} entries in {{-1,0,1}}")
    if not any(slope):
        raise ConfigError(f"Key {key!r} is the central coefficient; set it through 'level'")
    return slope


def _format_key(slope: Slope) -> str:
    return ",".join(str(s) for s in slope)


@dataclass(frozen=True)
class CoefficientConfig:
    """Shared shape of the surface (dimension 3) and curve (dimension 2) files"""

    coefficients: Tuple[Tuple[Slope, Fraction], ...]
    level: Fraction

    dimension = 0

    @classmethod
    def from_dict(cls, data: Dict):
        if not isinstance(data, dict):
            raise ConfigError("Config must be a JSON object")
        unknown = set(data) - {"coefficients", "level"}
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
        if "coefficients" not in data or "level" not in data:
            raise ConfigError("Config needs 'coefficients' and 'level'")
        raw = data["coefficients"]
        if not isinstance(raw, dict) or not raw:
            raise ConfigError("'coefficients' must be a non-empty object")
        coefficients = {
            _parse_key(key, cls.dimension): _parse_rational(value, f"coefficient {key}")
            for key, value in raw.items()
        }
        return cls(tuple(sorted(coefficients.items())), _parse_rational(data["level"], "level"))

    @classmethod
    def from_polynomial(cls, poly: TropicalPolynomial, level):
        return cls(tuple(sorted(poly.terms().items())), as_rational(level))

    def to_dict(self) -> Dict:
        return {
            "coefficients": {_format_key(s): format_rational(c) for s, c in self.coefficients},
            "level": format_rational(self.level),
        }

    def polynomial(self) -> TropicalPolynomial:
        return TropicalPolynomial.from_terms(dict(self.coefficients), self.dimension)


class SurfaceConfig(CoefficientConfig):
    dimension = 3

    def to_spec(self) -> SurfaceSpec:
        return SurfaceSpec(self.polynomial(), self.level)


class CurveConfig(CoefficientConfig):
    dimension = 2

    def to_spec(self) -> CurveSpec:
        return CurveSpec(self.polynomial(), self.level)


@dataclass(frozen=True)
class LineMapConfig:
    degree: int
    f0: Tuple[Tuple[int, int, Fraction], ...]
    f1: Tuple[Tuple[int, int, Fraction], ...]

    @classmethod
    def from_dict(cls, data: Dict) -> "LineMapConfig":
        if not isinstance(data, dict) or not {"degree", "F0", "F1"} <= set(data):
            raise ConfigError("Line map config needs 'degree', 'F0' and 'F1'")

        def terms(name):
            parsed = []
            for entry in data[name]:
                if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                    raise ConfigError(f"{name} entries are [a, b, c] triples, got {entry!r}")
                a, b, c = entry
                if not isinstance(a, int) or not isinstance(b, int):
                    raise ConfigError(f"{name} exponents must be integers, got {entry!r}")
                parsed.append((a, b, _parse_rational(c, name)))
            return tuple(parsed)

        degree = data["degree"]
        if not isinstance(degree, int):
            raise ConfigError(f"'degree' must be an integer, got {degree!r}")
        return cls(degree, terms("F0"), terms("F1"))

    @classmethod
    def from_map(cls, f: PLMap1D) -> "LineMapConfig":
        terms = f.to_terms()
        return cls(f.degree, tuple(terms["F0"]), tuple(terms["F1"]))

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "F0": [[a, b, format_rational(c)] for a, b, c in self.f0],
            "F1": [[a, b, format_rational(c)] for a, b, c in self.f1],
        }

    def to_map(self) -> PLMap1D:
        return PLMap1D.from_terms(self.degree, self.f0, self.f1)


AnyConfig = Union[SurfaceConfig, CurveConfig, LineMapConfig]


def _read_json(path: Union[str, Path]) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config {path} is not valid JSON: {e}") from e


def load_surface_config(path) -> SurfaceConfig:
    return SurfaceConfig.from_dict(_read_json(path))


def load_curve_config(path) -> CurveConfig:
    return CurveConfig.from_dict(_read_json(path))


def load_line_map_config(path) -> LineMapConfig:
    return LineMapConfig.from_dict(_read_json(path))


def dump_config(config: AnyConfig, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def _rubik(depth) -> SurfaceConfig:
    """Levels are given as the depth s = -c below the maximum 0"""
    depth = as_rational(depth)
    if depth <= 0:
        raise ConfigError(f"Rubik depth must be positive, got {depth}")
    return SurfaceConfig(tuple(sorted((s, Fraction(c)) for s, c in RUBIK_TERMS.items())), -depth)


def _terms(mapping) -> Tuple[Tuple[Slope, Fraction], ...]:
    return tuple(sorted((s, Fraction(c)) for s, c in mapping.items()))


CURVE_PRESETS = {
    "square": {(1, 0): 0, (-1, 0): 0, (0, 1): 0, (0, -1): 0},
    "diamond": {(1, 1): 0, (1, -1): 0, (-1, 1): 0, (-1, -1): 0},
    "symmetric": {slope: 0 for slope in OUTER_SLOPES_2D},
}

PRESET_NAMES = ("kummer", "rubik[:<depth>]", "tent", "square", "diamond", "symmetric")


def load_preset(name: str) -> AnyConfig:
    key, _, argument = name.partition(":")
    key = key.strip().lower()
    if key == "kummer":
        return SurfaceConfig(_terms(KUMMER_TERMS), Fraction(-1))
    if key == "rubik":
        return _rubik(argument or DEFAULT_RUBIK_DEPTH)
    if key == "tent":
        return LineMapConfig.from_map(tent_map())
    if key in CURVE_PRESETS:
        return CurveConfig(_terms(CURVE_PRESETS[key]), Fraction(-1))
    raise ConfigError(f"Unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


def _expect(config: AnyConfig, kind, label: str):
    if not isinstance(config, kind):
        raise ConfigError(f"Expected a {label} config, got {type(config).__name__}")
    return config


def surface_preset(name: str) -> SurfaceConfig:
    return _expect(load_preset(name), SurfaceConfig, "surface")


def curve_preset(name: str) -> CurveConfig:
    return _expect(load_preset(name), CurveConfig, "curve")


def line_map_preset(name: str) -> LineMapConfig:
    return _expect(load_preset(name), LineMapConfig, "line map")


def _random_coefficients(rng: random.Random, slopes, coeff_range, denominator: int):
    bound = as_rational(coeff_range)
    return {slope: random_rational(rng, -bound, bound, denominator) for slope in slopes}


def random_surface_config(seed: int, coeff_range=1, denominator: int = 64) -> SurfaceConfig:
    """Full support on all 26 outer monomials, level one below the maximum of h°"""
    rng = random.Random(seed)
    poly = TropicalPolynomial.from_terms(
        _random_coefficients(rng, OUTER_SLOPES_3D, coeff_range, denominator), 3
    )
    maximum, _ = polynomial_maximum(poly)
    return SurfaceConfig.from_polynomial(poly, maximum - 1)


def random_curve_config(seed: int, coeff_range=1, denominator: int = 64) -> CurveConfig:
    rng = random.Random(seed)
    poly = TropicalPolynomial.from_terms(
        _random_coefficients(rng, OUTER_SLOPES_2D, coeff_range, denominator), 2
    )
    maximum, _ = polynomial_maximum(poly)
    return CurveConfig.from_polynomial(poly, maximum - 1)


def list_presets() -> List[str]:
    return list(PRESET_NAMES)
