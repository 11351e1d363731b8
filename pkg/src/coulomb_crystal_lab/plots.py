"""Static SVG plots of chain configurations, density profiles, and scalings."""

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import analysis, variational  # noqa: E402
from .errors import PlotDataError  # noqa: E402
from .model import IonChain  # noqa: E402
from .serialize import atomic_write_bytes  # noqa: E402

# Deterministic ids inside the emitted SVG; text as <text> so the only <use>
# elements are data markers.
plt.rcParams["svg.hashsalt"] = "coulomb-crystal-lab"
plt.rcParams["svg.fonttype"] = "none"

PLOT_KINDS = ("positions", "density", "scaling", "energy-comparison")


def _require_keys(doc: dict, keys, kind: str) -> None:
    missing = [key for key in keys if key not in doc]
    if missing:
        raise PlotDataError(f"{kind} plot input is missing columns {missing}")


def _save(figure, path):
    buffer = io.BytesIO()
    figure.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(figure)
    return atomic_write_bytes(path, buffer.getvalue())


def _positions_figure(doc: dict):
    _require_keys(doc, ["positions"], "positions")
    positions = doc["positions"]
    if not positions:
        raise PlotDataError("positions plot input has no ions")
    figure, ax = plt.subplots(figsize=(6.0, 1.8))
    ax.axhline(0.0, color="0.8", linewidth=0.8, zorder=0)
    ax.plot(positions, [0.0] * len(positions), "o", color="tab:blue", markersize=5)
    ax.set_xlabel("z")
    ax.set_yticks([])
    ax.set_title(f"N={doc.get('n_ions', len(positions))}, p={doc.get('potential_exponent', '?')}")
    figure.tight_layout()
    return figure


def _density_figure(docs: list):
    figure, ax = plt.subplots(figsize=(6.0, 4.0))
    for doc in docs:
        _require_keys(doc, ["positions", "n_ions", "potential_exponent"], "density")
        chain = IonChain(doc["positions"])
        profile = analysis.local_density(chain)
        n_ions = int(doc["n_ions"])
        exponent = int(doc["potential_exponent"])
        points = ax.plot(profile.z, profile.density, ".", markersize=4, label=f"N={n_ions} chain")
        if exponent in (2, 4):
            family = variational.AnsatzFamily.for_exponent(exponent)
            solution = variational.optimal_solution(n_ions, family)
            grid = [solution.half_length * (i / 400.0 - 1.0) for i in range(801)]
            curve = [variational.ansatz_density(z, n_ions, solution.half_length, family) for z in grid]
            ax.plot(grid, curve, "-", color=points[0].get_color(), alpha=0.6,
                    label=f"N={n_ions} trial density")
    ax.set_xlabel("z")
    ax.set_ylabel("n(z)")
    ax.legend(fontsize=8)
    figure.tight_layout()
    return figure


def _scaling_figure(rows: list, y_column: str, fit=None):
    for row in rows:
        _require_keys(row, ["N", y_column], "scaling")
    ns = [row["N"] for row in rows]
    ys = [row[y_column] for row in rows]
    figure, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(ns, ys, "o", label=y_column)
    if fit is not None:
        ax.loglog(ns, [fit.prefactor * n**fit.exponent for n in ns], "-",
                  label=f"{fit.prefactor:.3g} N^{fit.exponent:.3g}")
    ax.set_xlabel("N")
    ax.set_ylabel(y_column)
    ax.legend(fontsize=8)
    figure.tight_layout()
    return figure


def _energy_comparison_figure(rows: list, exponent: int):
    for row in rows:
        _require_keys(row, ["N", "energy"], "energy-comparison")
    family = variational.AnsatzFamily.for_exponent(exponent)
    ns = [row["N"] for row in rows]
    exact = [row["energy"] for row in rows]
    estimate = [variational.optimal_solution(n, family).energy for n in ns]
    figure, axes = plt.subplots(2, 1, figsize=(5.0, 5.5), sharex=True)
    axes[0].loglog(ns, exact, "o", label="discrete minimum")
    axes[0].loglog(ns, estimate, "-", label="variational estimate")
    axes[0].set_ylabel("energy")
    axes[0].legend(fontsize=8)
    axes[1].semilogx(ns, [e - x for e, x in zip(estimate, exact)], "o-")
    axes[1].set_xlabel("N")
    axes[1].set_ylabel("estimate - exact")
    figure.tight_layout()
    return figure


def emit_plot(data, kind: str, path, *, y_column: str = "dz_min", fit=None, exponent: int = 4):
    """Render one figure kind to a standalone SVG file.

    data is a ground-state document for "positions", a list of them for
    "density", and a list of scan rows for "scaling" and "energy-comparison".
    Raises PlotDataError (before creating the file) when the data is empty or
    lacks the columns the kind needs.
    """
    if kind not in PLOT_KINDS:
        raise PlotDataError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    if not data:
        raise PlotDataError(f"{kind} plot input is empty")
    if kind == "positions":
        figure = _positions_figure(data)
    elif kind == "density":
        figure = _density_figure(data)
    elif kind == "scaling":
        rows = [row for row in data if not math.isnan(row.get(y_column, math.nan))]
        if not rows:
            raise PlotDataError(f"scaling plot input has no usable {y_column} values")
        figure = _scaling_figure(rows, y_column, fit=fit)
    else:
        figure = _energy_comparison_figure(data, exponent)
    return _save(figure, path)
