#!/usr/bin/env python3
"""
File writers: OBJ and CSV meshes, orbit / potential / twist CSVs, JSON reports
and SVG scatter plots. Decimals carry 12 significant digits.
"""

import csv
import json
import math
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  pylint: disable=wrong-import-position

from geometry import SkeletonMesh  # noqa: E402  pylint: disable=wrong-import-position

# Fixed salt and no date keep SVG output byte-identical across runs
matplotlib.rcParams["svg.hashsalt"] = "tropdyn"

CAMERA = (1.0, 1.0, 1.0)


def fmt(value) -> str:
    if value is None:
        return ""
    return f"{float(value):.12g}"


def _open_csv(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="", encoding="utf-8")


def write_obj(mesh: SkeletonMesh, path, comment: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# tropdyn skeleton\n")
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(f"o {path.stem}\n")
        for vertex in mesh.vertices:
            fh.write("v " + " ".join(fmt(v) for v in vertex) + "\n")
        for face in mesh.faces:
            fh.write("f " + " ".join(str(i + 1) for i in face.cycle) + "\n")
    return path


def write_mesh_csv(mesh: SkeletonMesh, path) -> Path:
    """Vertex rows then edge rows, told apart by the kind column"""
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "index", "x", "y", "z", "start", "end", "lattice_length"])
        for i, vertex in enumerate(mesh.vertices):
            writer.writerow(["vertex", i] + [fmt(v) for v in vertex] + ["", "", ""])
        for i, edge in enumerate(mesh.edges):
            writer.writerow(["edge", i, "", "", "", edge.start, edge.end, fmt(edge.length)])
    return Path(path)


def write_orbit_csv(points: Sequence[Sequence], path) -> Path:
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "x", "y", "z"])
        for step, point in enumerate(points):
            writer.writerow([step] + [fmt(v) for v in point])
    return Path(path)


def write_potential_csv(rows: Iterable[Sequence], path) -> Path:
    """rows of (point, g, residual)"""
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z", "g", "residual"])
        for point, value, residual in rows:
            writer.writerow([fmt(v) for v in point] + [fmt(value), fmt(residual)])
    return Path(path)


def write_twist_csv(samples, path) -> Path:
    """Failed levels keep their row with an empty rotation number"""
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "rotation_number"])
        for sample in samples:
            writer.writerow([fmt(sample.level), fmt(sample.rotation_number)])
    return Path(path)


def write_potential1d_csv(xs: Sequence, values: Sequence, path) -> Path:
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "g"])
        for x, g in zip(xs, values):
            writer.writerow([fmt(x), fmt(g)])
    return Path(path)


def write_json(data: Dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_measure_json(measure, path, extra: Optional[Dict] = None) -> Path:
    """Atoms, density cells and total mass, plus any report sections in `extra`"""
    data = measure.to_dict()
    data.update(extra or {})
    return write_json(data, path)


def _projection_basis():
    # Orthonormal basis of the plane orthogonal to the camera direction
    u = (1 / math.sqrt(2), -1 / math.sqrt(2), 0.0)
    w = (1 / math.sqrt(6), 1 / math.sqrt(6), -2 / math.sqrt(6))
    return u, w


def project_to_view(point: Sequence) -> tuple:
    u, w = _projection_basis()
    p = [float(v) for v in point]
    return sum(a * b for a, b in zip(p, u)), sum(a * b for a, b in zip(p, w))


def write_orbit_svg(points: Sequence[Sequence], path, mesh: Optional[SkeletonMesh] = None,
                    title: str = "") -> Path:
    """Orthographic scatter seen from the camera direction, face outlines underneath"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 6))
    if mesh is not None:
        for face in mesh.faces:
            outline = [project_to_view(mesh.vertices[i]) for i in face.cycle + face.cycle[:1]]
            ax.plot([p[0] for p in outline], [p[1] for p in outline], color="0.6", linewidth=0.6)
    projected = [project_to_view(p) for p in points]
    size = 20.0 / math.sqrt(max(len(projected), 1))
    ax.scatter([p[0] for p in projected], [p[1] for p in projected], s=size, color="tab:blue",
               linewidths=0)
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
