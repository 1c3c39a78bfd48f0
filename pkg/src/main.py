#!/usr/bin/env python3

import csv
import functools
import json
import os
import random
import sys
from pathlib import Path

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

# Add src directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# pylint: disable=wrong-import-position
from config import (
    curve_preset,
    dump_config,
    line_map_preset,
    list_presets,
    load_curve_config,
    load_line_map_config,
    load_surface_config,
    random_curve_config,
    random_surface_config,
    surface_preset,
)
from dynamics3d import ArithmeticMode, AutomorphismWord, detect_period, orbit
from elliptic import j_invariant, skeleton_cycle, twist_profile
from errors import ConfigError, TropDynError
from exports import (
    write_measure_json,
    write_mesh_csv,
    write_obj,
    write_orbit_csv,
    write_orbit_svg,
    write_potential1d_csv,
    write_potential_csv,
    write_twist_csv,
)
from geometry import level_set_polytope, skeleton_mesh
from logger import get_logger, shutdown_logger
from pl1d import atom_audit, measure_from_potential, monotonicity_check, solve_potential
from potential import evaluate_potential, make_potential_field, potential_residual, skeleton_samples
from progress_ui import ProgressUI
from trop_core import as_point, as_rational
from verify_suites import SUITES, resolve_suites, run_suites

console = Console()
err_console = Console(stderr=True)


def print_banner(title: str):
    console.print(Panel(Text(title, style="bold blue"), expand=False))


def handle_errors(func):
    """Turn library errors into a red panel and the error's exit code"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except TropDynError as e:
            get_logger().log_main(f"{type(e).__name__}: {e}", "ERROR")
            err_console.print(Panel(f"[red]{e}[/red]", title=f"[bold red]{type(e).__name__}[/bold red]"))
            raise click.exceptions.Exit(e.exit_code) from e

    return wrapper


def input_options(func):
    func = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                        help="JSON config file")(func)
    func = click.option("--preset", help=f"Named preset: {', '.join(list_presets())}")(func)
    return func


def _surface_config(preset, config_path):
    if config_path:
        return load_surface_config(config_path)
    return surface_preset(preset or "kummer")


def _parse_point(text: str, dimension: int):
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != dimension:
        raise ConfigError(f"Expected {dimension} comma-separated coordinates, got {text!r}")
    return as_point(parts)


def _parse_levels(text: str):
    try:
        start, stop, step = (as_rational(part) for part in text.split(":"))
    except ValueError as e:
        raise ConfigError(f"Levels must look like a:b:step, got {text!r}") from e
    if step <= 0 or stop < start:
        raise ConfigError(f"Level range {text!r} needs a positive step and a <= b")
    levels = []
    level = start
    while level <= stop:
        levels.append(level)
        level += step
    return levels


def _read_points(path):
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            return [as_point((row["x"], row["y"], row["z"])) for row in csv.DictReader(fh)]
    except (OSError, KeyError) as e:
        raise ConfigError(f"Cannot read points from {path}: {e}") from e


@click.group(name="tropdyn")
def cli():
    """Exact tropical dynamics on K3 skeletons, elliptic curves and the line"""


@cli.command()
@input_options
@click.option("--level", help="Level c of the skeleton {h° = c}; defaults to the config level")
@click.option("--format", "fmt", type=click.Choice(["obj", "csv"]), default="obj", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Output file")
@handle_errors
def skeleton(preset, config_path, level, fmt, out):
    """Write the skeleton mesh as an OBJ or a vertex/edge CSV"""
    spec = _surface_config(preset, config_path).to_spec()
    if level is not None:
        spec = spec.with_level(as_rational(level))
    mesh = skeleton_mesh(level_set_polytope(spec.hcirc, spec.level))
    out = Path(out or f"skeleton.{fmt}")
    if fmt == "obj":
        write_obj(mesh, out, comment=f"level {spec.level}")
    else:
        write_mesh_csv(mesh, out)

    table = Table(title=f"Skeleton at level {spec.level}")
    table.add_column("Vertices", justify="right")
    table.add_column("Edges", justify="right")
    table.add_column("Faces", justify="right")
    table.add_column("Euler", justify="right")
    table.add_row(str(len(mesh.vertices)), str(len(mesh.edges)), str(len(mesh.faces)),
                  str(mesh.euler_characteristic))
    console.print(table)
    console.print(f"Written {out}")


@cli.command(name="orbit")
@input_options
@click.option("--word", default="xyz", show_default=True, help="Reflection word, applied right to left")
@click.option("--start", help="Start point 'x,y,z'; a random skeleton point when omitted")
@click.option("--steps", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--mode", type=click.Choice(["exact", "float"]), default="exact", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="orbit.csv", show_default=True)
@click.option("--svg", type=click.Path(dir_okay=False), help="Also write an SVG scatter plot")
@handle_errors
def orbit_command(preset, config_path, word, start, steps, mode, seed, out, svg):
    """Iterate a reflection word and write the orbit"""
    spec = _surface_config(preset, config_path).to_spec()
    word = AutomorphismWord.parse(word)
    polytope = level_set_polytope(spec.hcirc, spec.level)
    if start:
        point = _parse_point(start, 3)
    else:
        point = polytope.random_boundary_point(random.Random(seed))
    arithmetic = ArithmeticMode(mode)
    points = orbit(spec, word, point, steps, mode=arithmetic,
                   require_on_skeleton=arithmetic is ArithmeticMode.EXACT)
    write_orbit_csv(points, out)
    if svg:
        write_orbit_svg(points, svg, mesh=skeleton_mesh(polytope), title=f"{word}, {steps} steps")

    period = detect_period(points) if arithmetic is ArithmeticMode.EXACT else None
    console.print(f"{steps} steps of {word} written to {out}"
                  + (f" (period {period})" if period else ""))


def _random_config_command(name, factory, kind):
    @cli.command(name=name, help=f"Write a random {kind} config with full support")
    @click.option("--seed", type=int, default=0, show_default=True)
    @click.option("--coeff-range", default="1", show_default=True,
                  help="Coefficients are drawn from [-R, R]")
    @click.option("--denominator", type=click.IntRange(min=1), default=64, show_default=True)
    @click.option("--out", type=click.Path(dir_okay=False), help="Output file; stdout when omitted")
    @handle_errors
    def command(seed, coeff_range, denominator, out):
        config = factory(seed, as_rational(coeff_range), denominator)
        if out:
            dump_config(config, out)
            console.print(f"Written {out} (level {config.level})")
        else:
            click.echo(config_json(config))

    return command


def config_json(config) -> str:
    return json.dumps(config.to_dict(), indent=2)


random_surface = _random_config_command("random-surface", random_surface_config, "surface")
random_curve = _random_config_command("random-curve", random_curve_config, "curve")


@cli.command()
@input_options
@click.option("--word", default="xyz", show_default=True)
@click.option("--points", "points_path", type=click.Path(dir_okay=False),
              help="CSV with x,y,z columns; random skeleton points when omitted")
@click.option("--grid", type=click.IntRange(min=0), default=20, show_default=True,
              help="Number of random skeleton points (after the mesh vertices)")
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--mode", type=click.Choice(["exact", "float"]), default="exact", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="potential.csv", show_default=True)
@handle_errors
def potential(preset, config_path, word, points_path, grid, tol, mode, seed, out):
    """Evaluate the dynamical potential g and its functional-equation residual"""
    spec = _surface_config(preset, config_path).to_spec()
    field_ = make_potential_field(spec, AutomorphismWord.parse(word), tol=tol,
                                  mode=ArithmeticMode(mode), seed=seed)
    if points_path:
        points = _read_points(points_path)
    else:
        points = skeleton_samples(spec, grid, random.Random(seed))
    rows = [(p, evaluate_potential(field_, p), potential_residual(field_, p)) for p in points]
    write_potential_csv(rows, out)
    worst = max((r for _, _, r in rows), default=0.0)
    console.print(f"lambda = {field_.data.eigenvalue:.12g}, N = {field_.depth}, "
                  f"{len(rows)} points, max residual {worst:.3g}; written {out}")


@cli.command()
@input_options
@click.option("--grid", type=click.IntRange(min=2), default=200, show_default=True,
              help="Uniform cells on the measure interval")
@click.option("--lo", help="Left end of the interval")
@click.option("--hi", help="Right end of the interval")
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--audit/--no-audit", default=False, help="Add an atom audit to the report")
@click.option("--out", type=click.Path(dir_okay=False), default="measure.json", show_default=True)
@click.option("--potential-csv", type=click.Path(dir_okay=False), help="Also write g on the grid")
@handle_errors
def measure1d(preset, config_path, grid, lo, hi, tol, audit, out, potential_csv):
    """Extract the measure -g'' of a piecewise-linear map of the line"""
    if config_path:
        f = load_line_map_config(config_path).to_map()
    else:
        f = line_map_preset(preset or "tent").to_map()
    g = solve_potential(f, tol=tol)
    interval = None
    if lo is not None or hi is not None:
        default_lo, default_hi = g.default_interval()
        interval = (as_rational(lo) if lo is not None else default_lo,
                    as_rational(hi) if hi is not None else default_hi)
    measure = measure_from_potential(g, interval, resolution=grid)
    report = monotonicity_check(f)
    extra = {"map": {"degree": f.degree, "classification": report.classification,
                     "max_slope": float(report.max_slope)}}
    if audit:
        result = atom_audit(f, g, resolution=grid, interval=interval)
        extra["audit"] = {
            "clean": result.clean,
            "off_break": [{"x": float(x), "mass": m} for x, m in result.off_break],
            "stable": result.stable_under_refinement,
        }
    write_measure_json(measure, out, extra)
    if potential_csv:
        xs = [cell.x0 for cell in measure.density] + [measure.density[-1].x1]
        write_potential1d_csv(xs, [g(x) for x in xs], potential_csv)

    table = Table(title=f"Degree-{f.degree} map ({report.classification})")
    table.add_column("Total mass", justify="right")
    table.add_column("Largest atom", justify="right")
    table.add_column("Cells", justify="right")
    table.add_row(f"{measure.total_mass:.12g}", f"{measure.max_atom():.3g}", str(len(measure.density)))
    console.print(table)
    console.print(f"Written {out}")


@cli.command()
@input_options
@click.option("--levels", required=True, help="Level range a:b:step")
@click.option("--out", type=click.Path(dir_okay=False), default="twist.csv", show_default=True)
@handle_errors
def elliptic(preset, config_path, levels, out):
    """Rotation number of the reflection product across a pencil of curves"""
    config = load_curve_config(config_path) if config_path else curve_preset(preset or "symmetric")
    curve = config.to_spec()
    samples = twist_profile(curve.hcirc, _parse_levels(levels))
    write_twist_csv(samples, out)

    table = Table(title="Twist profile")
    table.add_column("Level", justify="right")
    table.add_column("Rotation number", justify="right")
    for sample in samples:
        value = str(sample.rotation_number) if sample.rotation_number is not None else "[red]failed[/red]"
        table.add_row(str(sample.level), value)
    console.print(table)
    try:
        console.print(f"j-invariant at level {curve.level}: {j_invariant(curve)} "
                      f"({len(skeleton_cycle(curve).vertices)} cycle vertices)")
    except TropDynError as e:
        get_logger().log_elliptic(f"No j-invariant at level {curve.level}: {e}", "WARNING")
        console.print(f"[yellow]No j-invariant at level {curve.level}: {e}[/yellow]")
    console.print(f"Written {out}")


@cli.command()
@click.option("--suite", type=click.Choice(["all"] + list(SUITES)), default="all", show_default=True)
@click.option("--corrupt", is_flag=True, help="Corrupt one Kummer coefficient (negative control)")
@click.pass_context
def verify(ctx, suite, corrupt):
    """Run the self-check suites; the exit code is the number of failures"""
    print_banner("tropdyn verification")
    ui = ProgressUI(console)
    with ui.live():
        results = run_suites(resolve_suites(suite), corrupt=corrupt, ui=ui)
    console.print(ui.summary_table())
    for result in results:
        for check in result.checks:
            if not check.passed:
                console.print(f"[red]✗[/red] {result.name}.{check.name}: {check.detail}")
        if result.error:
            console.print(f"[red]✗[/red] {result.name}: {result.error}")
    ctx.exit(sum(1 for result in results if not result.passed))


def main(args=None):
    logger = get_logger()
    try:
        return cli.main(args=args, prog_name="tropdyn", standalone_mode=False) or 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        return 1
    except Exception as e:  # pylint: disable=broad-exception-caught
        logger.log_main(f"Unexpected error: {e}", "ERROR")
        console.print(f"[red]Unexpected error: {e}[/red]")
        return 1
    finally:
        shutdown_logger()


if __name__ == "__main__":
    sys.exit(main())
