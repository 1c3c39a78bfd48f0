#!/usr/bin/env python3

import csv
import json
import os
import sys
from fractions import Fraction

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from elliptic import TwistSample  # noqa: E402
from exports import (  # noqa: E402
    fmt,
    project_to_view,
    write_json,
    write_measure_json,
    write_mesh_csv,
    write_obj,
    write_orbit_csv,
    write_orbit_svg,
    write_potential_csv,
    write_twist_csv,
)
from geometry import level_set_polytope, skeleton_mesh  # noqa: E402
from kummer import kummer_polynomial  # noqa: E402
from pl1d import measure_from_potential, tent_closed_form  # noqa: E402


def _kummer_mesh():
    return skeleton_mesh(level_set_polytope(kummer_polynomial(), -1))


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_fmt_uses_twelve_significant_digits():
    assert fmt(Fraction(1, 3)) == "0.333333333333"
    assert fmt(Fraction(-2)) == "-2"
    assert fmt(None) == ""


def test_obj_file(tmp_path):
    path = write_obj(_kummer_mesh(), tmp_path / "kummer.obj", comment="level -1")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# tropdyn skeleton"
    assert lines[1] == "# level -1"
    assert lines[2] == "o kummer"
    assert sum(1 for line in lines if line.startswith("v ")) == 4
    faces = [line for line in lines if line.startswith("f ")]
    assert len(faces) == 4
    assert all(len(face.split()) == 4 for face in faces)


def test_mesh_csv(tmp_path):
    rows = _rows(write_mesh_csv(_kummer_mesh(), tmp_path / "mesh.csv"))
    assert rows[0] == ["kind", "index", "x", "y", "z", "start", "end", "lattice_length"]
    kinds = [row[0] for row in rows[1:]]
    assert kinds.count("vertex") == 4
    assert kinds.count("edge") == 6
    assert all(row[7] == "2" for row in rows[1:] if row[0] == "edge")


def test_orbit_and_potential_csv(tmp_path):
    points = [(Fraction(1, 3), 0, -1), (Fraction(-1, 7), Fraction(2, 7), -1)]
    rows = _rows(write_orbit_csv(points, tmp_path / "orbit.csv"))
    assert rows[0] == ["step", "x", "y", "z"]
    assert rows[1] == ["0", "0.333333333333", "0", "-1"]
    assert len(rows) == 3

    rows = _rows(write_potential_csv([(points[0], Fraction(-1, 2), 1e-12)], tmp_path / "g.csv"))
    assert rows == [["x", "y", "z", "g", "residual"], ["0.333333333333", "0", "-1", "-0.5", "1e-12"]]


def test_twist_csv_keeps_failed_levels(tmp_path):
    samples = [TwistSample(Fraction(-2), Fraction(1, 2)), TwistSample(Fraction(1), None, "empty")]
    rows = _rows(write_twist_csv(samples, tmp_path / "twist.csv"))
    assert rows == [["level", "rotation_number"], ["-2", "0.5"], ["1", ""]]


def test_json_writers(tmp_path):
    path = write_json({"b": 1, "a": [1, 2]}, tmp_path / "nested" / "out.json")
    assert json.loads(path.read_text(encoding="utf-8")) == {"a": [1, 2], "b": 1}

    measure = measure_from_potential(tent_closed_form(), (-1, 1), resolution=20)
    data = json.loads(write_measure_json(measure, tmp_path / "m.json").read_text(encoding="utf-8"))
    assert set(data) == {"atoms", "density", "total_mass"}
    assert len(data["density"]) == len(measure.density)
    path = write_measure_json(measure, tmp_path / "r.json", {"map": {"degree": 4}})
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["map"] == {"degree": 4}
    assert report["total_mass"] == data["total_mass"]


def test_projection_flattens_camera_axis():
    assert project_to_view((1, 1, 1)) == (0.0, 0.0)


def test_svg_is_deterministic(tmp_path):
    mesh = _kummer_mesh()
    points = [(Fraction(1, 3), Fraction(-1, 3), Fraction(-1, 3)), (0, 0, -1)]
    first = write_orbit_svg(points, tmp_path / "a.svg", mesh=mesh, title="xyz")
    second = write_orbit_svg(points, tmp_path / "b.svg", mesh=mesh, title="xyz")
    text = first.read_text(encoding="utf-8")
    assert "<svg" in text
    assert text == second.read_text(encoding="utf-8")
