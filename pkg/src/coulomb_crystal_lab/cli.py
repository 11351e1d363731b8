"""Command-line front end: solves, scans, fits, and SVG plots.

Exit codes: 0 success, 1 computational failure (e.g. non-convergence),
2 invalid usage or configuration, 3 I/O failure.  File outputs are written
atomically; without --output, JSON goes to stdout.
"""

import functools
import json
import math
import sys
from pathlib import Path

import click

from . import analysis, plots, serialize, variational, zigzag
from .cache import ResultCache
from .errors import CoulombCrystalError, PlotDataError
from .model import PotentialSpec
from .solver import SolverOptions, ground_state
from .version import __version__


def _parse_n_values(spec: str) -> list:
    """N values from '12', '2,5,9', or 'start:stop[:step]' (stop included when aligned)."""
    try:
        if ":" in spec:
            parts = [int(p) for p in spec.split(":")]
            if len(parts) == 2:
                start, stop, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                start, stop, step = parts
            else:
                raise ValueError
            if step < 1 or stop < start:
                raise ValueError
            values = list(range(start, stop + 1, step))
        elif "," in spec:
            values = [int(p) for p in spec.split(",")]
        else:
            values = [int(spec)]
    except ValueError:
        raise click.UsageError(f"cannot parse N specification {spec!r}")
    if not values or any(n < 1 for n in values):
        raise click.UsageError("all N values must be >= 1")
    if values != sorted(values) or len(set(values)) != len(values):
        raise click.UsageError("N values must be strictly ascending")
    return values


def _potential(exponent: int) -> PotentialSpec:
    if exponent < 2 or exponent % 2 != 0:
        raise click.UsageError(f"--p must be an even integer >= 2, got {exponent}")
    return PotentialSpec(exponent)


def _cache(cache_dir, no_cache):
    if no_cache:
        return None
    return ResultCache(cache_dir) if cache_dir else ResultCache()


def _write_output(text: str, output) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        serialize.atomic_write_text(output, text)


def _exit_codes(func):
    """Map package errors to exit 1, plot/config data errors to 2, I/O to 3."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except PlotDataError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except CoulombCrystalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(3)

    return wrapper


@click.group()
@click.version_option(__version__)
def main():
    """Ground states and zigzag stability of 1D Coulomb crystals in even-power traps."""


@main.command("ground-state")
@click.option("--p", "exponent", type=int, default=2, show_default=True, help="Even trap exponent.")
@click.option("--n", "n_ions", type=int, required=True, help="Number of ions.")
@click.option("--tol", "tolerance", type=float, default=1e-10, show_default=True,
              help="Gradient max-norm convergence tolerance.")
@click.option("--max-iterations", type=int, default=1_000_000, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Output file (stdout when omitted).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Cache directory (overrides the environment).")
@click.option("--no-cache", is_flag=True, help="Disable the result cache.")
@_exit_codes
def ground_state_command(exponent, n_ions, tolerance, max_iterations, output, fmt, cache_dir, no_cache):
    """Solve for the ground-state chain of N ions."""
    if n_ions < 1:
        raise click.UsageError("--n must be >= 1")
    potential = _potential(exponent)
    opts = SolverOptions(gradient_tolerance=tolerance, max_iterations=max_iterations)
    result = ground_state(n_ions, potential, opts, cache=_cache(cache_dir, no_cache))
    if not result.converged:
        click.echo(f"error: ground state for N={n_ions}, p={exponent} did not converge: "
                   f"{result.message}", err=True)
        sys.exit(1)
    if fmt == "json":
        text = serialize.canonical_json(serialize.ground_state_payload(result, potential, tolerance))
    else:
        rows = [{"index": i + 1, "position": z} for i, z in enumerate(result.chain.positions)]
        text = serialize.scan_rows_to_csv(rows)
    _write_output(text, output)


@main.command("variational")
@click.option("--p", "exponent", type=int, default=2, show_default=True, help="Even trap exponent (2 or 4).")
@click.option("--n", "n_ions", type=int, required=True, help="Number of ions.")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_exit_codes
def variational_command(exponent, n_ions, output):
    """Closed-form trial-density optimum for N ions."""
    if n_ions < 1:
        raise click.UsageError("--n must be >= 1")
    _potential(exponent)
    family = variational.AnsatzFamily.for_exponent(exponent)
    solution = variational.optimal_solution(n_ions, family)
    _write_output(serialize.canonical_json(serialize.variational_payload(solution)), output)


def _scan_rows_or_die(n_values, potential, opts, cache):
    rows = analysis.scan(n_values, potential, opts, cache=cache)
    failures = [row for row in rows if row.error is not None]
    if failures:
        for row in failures:
            click.echo(f"error: N={row.n_ions}: {row.error}", err=True)
        sys.exit(1)
    return rows


def _emit_table(row_dicts, fit, fit_quantity, fmt, output, kind):
    if fmt == "json":
        doc = {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": kind,
            "rows": row_dicts,
            "fit": serialize.fit_payload(fit, fit_quantity) if fit is not None else None,
        }
        _write_output(serialize.canonical_json(doc), output)
    else:
        _write_output(serialize.scan_rows_to_csv(row_dicts), output)
        if fit is not None:
            sidecar_text = serialize.canonical_json(serialize.fit_payload(fit, fit_quantity))
            if output is None:
                click.echo(sidecar_text, nl=False)
            else:
                serialize.atomic_write_text(Path(str(output) + ".fit.json"), sidecar_text)


#: Chains shorter than this are outside the scaling regime and excluded from fits.
FIT_MIN_N = 10


@main.command("scan")
@click.option("--p", "exponent", type=int, default=2, show_default=True)
@click.option("--n", "n_spec", required=True, help="N values: '40', '10,20,40', or '20:300:20'.")
@click.option("--tol", "tolerance", type=float, default=1e-10, show_default=True)
@click.option("--max-iterations", type=int, default=1_000_000, show_default=True)
@click.option("--fit", "fit_quantity", type=click.Choice(["dzmin"]), default=None,
              help="Append a power-law fit record for this quantity.")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--no-cache", is_flag=True)
@_exit_codes
def scan_command(exponent, n_spec, tolerance, max_iterations, fit_quantity, output, fmt,
                 cache_dir, no_cache):
    """Ground-state summaries over a range of N."""
    n_values = _parse_n_values(n_spec)
    if any(n < 2 for n in n_values):
        raise click.UsageError("scan needs N >= 2")
    potential = _potential(exponent)
    opts = SolverOptions(gradient_tolerance=tolerance, max_iterations=max_iterations)
    rows = _scan_rows_or_die(n_values, potential, opts, _cache(cache_dir, no_cache))
    fit = None
    if fit_quantity == "dzmin":
        points = [(row.n_ions, row.dz_min) for row in rows if row.n_ions >= FIT_MIN_N]
        if len(points) < 3:
            raise click.UsageError(f"fit needs at least 3 rows with N >= {FIT_MIN_N}")
        fit = analysis.power_law_fit(points)
    _emit_table([serialize.scan_row_dict(row) for row in rows], fit, "dz_min", fmt, output, "scan")


@main.command("zigzag")
@click.option("--p", "exponent", type=int, default=2, show_default=True)
@click.option("--n", "n_spec", required=True, help="N values: '40', '10,20,40', or '20:300:20'.")
@click.option("--tol", "tolerance", type=float, default=1e-10, show_default=True)
@click.option("--max-iterations", type=int, default=1_000_000, show_default=True)
@click.option("--fit", "fit_quantity", type=click.Choice(["beta_c"]), default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--no-cache", is_flag=True)
@_exit_codes
def zigzag_command(exponent, n_spec, tolerance, max_iterations, fit_quantity, output, fmt,
                   cache_dir, no_cache):
    """Ground-state summaries plus the critical transverse confinement."""
    n_values = _parse_n_values(n_spec)
    if any(n < 2 for n in n_values):
        raise click.UsageError("zigzag needs N >= 2")
    potential = _potential(exponent)
    opts = SolverOptions(gradient_tolerance=tolerance, max_iterations=max_iterations)
    rows = _scan_rows_or_die(n_values, potential, opts, _cache(cache_dir, no_cache))
    betas = [zigzag.critical_beta(row.result.chain).beta_c for row in rows]
    fit = None
    if fit_quantity == "beta_c":
        points = [(row.n_ions, beta) for row, beta in zip(rows, betas) if row.n_ions >= FIT_MIN_N]
        if len(points) < 3:
            raise click.UsageError(f"fit needs at least 3 rows with N >= {FIT_MIN_N}")
        fit = analysis.power_law_fit(points)
    row_dicts = [serialize.scan_row_dict(row, beta_c=beta) for row, beta in zip(rows, betas)]
    _emit_table(row_dicts, fit, "beta_c", fmt, output, "zigzag-scan")


@main.command("fit")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Scan CSV to fit.")
@click.option("--y", "y_column", required=True, help="Column to fit against N.")
@click.option("--min-n", type=int, default=FIT_MIN_N, show_default=True,
              help="Exclude rows with smaller N from the fit.")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_exit_codes
def fit_command(input_path, y_column, min_n, output):
    """Power-law fit of a scan CSV column versus N."""
    rows = serialize.parse_scan_csv(input_path.read_text(encoding="utf-8"))
    if not rows or y_column not in rows[0]:
        raise click.UsageError(f"column {y_column!r} not found in {input_path}")
    points = [(row["N"], row[y_column]) for row in rows
              if row["N"] >= min_n and not math.isnan(row[y_column])]
    fit = analysis.power_law_fit(points)
    _write_output(serialize.canonical_json(serialize.fit_payload(fit, y_column)), output)


@main.command("plot")
@click.option("--kind", type=click.Choice(plots.PLOT_KINDS), required=True)
@click.option("--input", "input_paths", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, multiple=True,
              help="Ground-state JSON (positions, density) or scan CSV (scaling, energy-comparison). "
                   "Repeatable for density overlays.")
@click.option("--y", "y_column", default="dz_min", show_default=True,
              help="Column for scaling plots.")
@click.option("--p", "exponent", type=int, default=4, show_default=True,
              help="Trial-density exponent for energy-comparison plots.")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), required=True)
@_exit_codes
def plot_command(kind, input_paths, y_column, exponent, output):
    """Render a result file as a standalone SVG figure."""
    if kind in ("positions", "density"):
        docs = [json.loads(path.read_text(encoding="utf-8")) for path in input_paths]
        data = docs[0] if kind == "positions" else docs
    else:
        rows = []
        for path in input_paths:
            rows.extend(serialize.parse_scan_csv(path.read_text(encoding="utf-8")))
        data = rows
    plots.emit_plot(data, kind, output, y_column=y_column, exponent=exponent)


if __name__ == "__main__":
    main()
