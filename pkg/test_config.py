#!/usr/bin/env python3

import json
import os
import sys
from fractions import Fraction

import pytest

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from config import (  # noqa: E402
    CurveConfig,
    LineMapConfig,
    SurfaceConfig,
    dump_config,
    load_curve_config,
    load_line_map_config,
    load_preset,
    load_surface_config,
    random_curve_config,
    random_surface_config,
    surface_preset,
)
from errors import ConfigError  # noqa: E402
from geometry import polynomial_maximum  # noqa: E402
from pl1d import tent_map  # noqa: E402


def test_surface_round_trip(tmp_path):
    config = random_surface_config(3)
    path = dump_config(config, tmp_path / "surface.json")
    assert load_surface_config(path) == config
    data = json.loads(path.read_text(encoding="utf-8"))
    assert set(data) == {"coefficients", "level"}
    assert "0,0,0" not in data["coefficients"]


def test_curve_and_line_map_round_trip(tmp_path):
    curve = random_curve_config(2)
    assert load_curve_config(dump_config(curve, tmp_path / "curve.json")) == curve
    line = LineMapConfig.from_map(tent_map())
    loaded = load_line_map_config(dump_config(line, tmp_path / "tent.json"))
    assert loaded.to_map() == tent_map()


def test_central_coefficient_rejected():
    with pytest.raises(ConfigError):
        SurfaceConfig.from_dict({"coefficients": {"0,0,0": "1"}, "level": "-1"})
    with pytest.raises(ConfigError):
        CurveConfig.from_dict({"coefficients": {"0,0": "1", "1,0": "0"}, "level": "-1"})


@pytest.mark.parametrize("data", [
    {"coefficients": {"1,0": "0"}, "level": "-1"},
    {"coefficients": {"2,0,0": "0"}, "level": "-1"},
    {"coefficients": {"1,0,0": "zero"}, "level": "-1"},
    {"coefficients": {"1,0,0": "0"}},
    {"coefficients": {}, "level": "-1"},
    {"coefficients": {"1,0,0": "0"}, "level": "-1", "extra": 1},
    [],
])
def test_malformed_surface_configs(data):
    with pytest.raises(ConfigError):
        SurfaceConfig.from_dict(data)


def test_rational_strings_are_exact():
    config = SurfaceConfig.from_dict({"coefficients": {"1,0,0": "3/4", "-1,0,0": "0.25"},
                                      "level": "-1/3"})
    assert dict(config.coefficients) == {(-1, 0, 0): Fraction(1, 4), (1, 0, 0): Fraction(3, 4)}
    assert config.level == Fraction(-1, 3)


def test_line_map_config_errors():
    with pytest.raises(ConfigError):
        LineMapConfig.from_dict({"degree": 2, "F0": [[2, 0, 0]]})
    with pytest.raises(ConfigError):
        LineMapConfig.from_dict({"degree": 2, "F0": [[2.0, 0, 0]], "F1": [[0, 2, 0]]})
    with pytest.raises(ConfigError):
        LineMapConfig.from_dict({"degree": "2", "F0": [[2, 0, 0]], "F1": [[0, 2, 0]]})


def test_unreadable_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_surface_config(bad)
    with pytest.raises(ConfigError):
        load_surface_config(tmp_path / "missing.json")


def test_presets():
    kummer = load_preset("kummer")
    assert isinstance(kummer, SurfaceConfig)
    assert kummer.level == -1
    assert load_preset("rubik:3/4").level == Fraction(-3, 4)
    assert load_preset("rubik").level == Fraction(-1, 4)
    assert isinstance(load_preset("symmetric"), CurveConfig)
    assert load_preset("tent").to_map() == tent_map()
    with pytest.raises(ConfigError):
        load_preset("rubik:0")
    with pytest.raises(ConfigError):
        load_preset("octahedron")
    with pytest.raises(ConfigError):
        surface_preset("square")


def test_random_configs_are_deterministic():
    assert random_surface_config(5) == random_surface_config(5)
    assert random_surface_config(5) != random_surface_config(6)
    config = random_surface_config(5)
    assert len(config.coefficients) == 26
    assert all((64 % c.denominator) == 0 for _, c in config.coefficients)
    assert all(-1 <= c <= 1 for _, c in config.coefficients)
    assert config.level == polynomial_maximum(config.polynomial())[0] - 1


def test_random_curve_support():
    config = random_curve_config(0, coeff_range=2, denominator=8)
    assert len(config.coefficients) == 8
    assert all((8 % c.denominator) == 0 for _, c in config.coefficients)
    assert config.level == polynomial_maximum(config.polynomial())[0] - 1
