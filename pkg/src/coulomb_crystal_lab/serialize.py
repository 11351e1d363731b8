"""Deterministic JSON/CSV serialization and atomic file output.

Floats are formatted with 17 significant digits, which round-trips every
double exactly, so identical inputs always produce byte-identical files and
parse(serialize(x)) recovers x bit for bit.  Non-finite floats become null in
JSON and nan/inf tokens in CSV.
"""

import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

_CSV_SCAN_COLUMNS = ["N", "energy", "dz_min", "half_length", "peak_fraction", "uniformity"]


def format_float(value: float) -> str:
    """17-significant-digit decimal form of a float (exact round trip)."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(float(value), ".17g")


def _emit_json(obj, out: list, indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append("null" if not math.isfinite(obj) else format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for index, (key, value) in enumerate(obj.items()):
            out.append(f'{pad}  {json.dumps(str(key), ensure_ascii=False)}: ')
            _emit_json(value, out, indent + 1)
            out.append(",\n" if index < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for index, value in enumerate(items):
            out.append(pad + "  ")
            _emit_json(value, out, indent + 1)
            out.append(",\n" if index < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Deterministic pretty-printed JSON with 17-digit floats."""
    out: list = []
    _emit_json(obj, out, 0)
    out.append("\n")
    return "".join(out)


def atomic_write_text(path, text: str) -> Path:
    """Write text via a same-directory temp file and rename, so an interrupted
    write never leaves a partial file at the final path."""
    return atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_bytes(path, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return path


def ground_state_payload(result, potential, gradient_tolerance: float) -> dict:
    """JSON-ready document for a ground-state result."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "ground-state",
        "potential_exponent": potential.exponent,
        "n_ions": len(result.chain),
        "gradient_tolerance": float(gradient_tolerance),
        "energy": result.energy,
        "gradient_max_norm": result.gradient_max_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "symmetric": result.symmetric,
        "message": result.message,
        "positions": [float(z) for z in result.chain.positions],
    }


def ground_state_from_payload(payload: dict):
    """Inverse of ground_state_payload: (GroundStateResult, PotentialSpec, tolerance)."""
    from .model import IonChain, PotentialSpec
    from .solver import GroundStateResult

    result = GroundStateResult(
        chain=IonChain(np.asarray(payload["positions"], dtype=float)),
        energy=float(payload["energy"]),
        gradient_max_norm=float(payload["gradient_max_norm"]),
        iterations=int(payload["iterations"]),
        converged=bool(payload["converged"]),
        symmetric=bool(payload["symmetric"]),
        message=str(payload.get("message", "")),
    )
    potential = PotentialSpec(int(payload["potential_exponent"]))
    return result, potential, float(payload["gradient_tolerance"])


def variational_payload(solution) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "variational",
        "family": solution.family.value,
        "potential_exponent": solution.family.trap_exponent,
        "n_ions": solution.n_ions,
        "half_length": solution.half_length,
        "energy": solution.energy,
    }


def fit_payload(fit, quantity: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "power-law-fit",
        "quantity": quantity,
        "prefactor": fit.prefactor,
        "exponent": fit.exponent,
        "r_squared": fit.r_squared,
        "n_min": fit.n_range[0],
        "n_max": fit.n_range[1],
    }


def scan_row_dict(row, beta_c=None) -> dict:
    doc = {
        "N": row.n_ions,
        "energy": row.energy,
        "dz_min": row.dz_min,
        "half_length": row.half_length,
        "peak_fraction": row.peak_fraction,
        "uniformity": row.uniformity,
    }
    if beta_c is not None:
        doc["beta_c"] = beta_c
    return doc


def scan_rows_to_csv(row_dicts: list) -> str:
    """UTF-8 CSV with a header line and LF endings; floats at 17 digits."""
    if not row_dicts:
        columns = list(_CSV_SCAN_COLUMNS)
    else:
        columns = list(row_dicts[0].keys())
    buffer = io.StringIO()
    buffer.write(",".join(columns) + "\n")
    for row in row_dicts:
        cells = []
        for column in columns:
            value = row[column]
            if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
                cells.append(str(int(value)))
            else:
                cells.append(format_float(float(value)))
        buffer.write(",".join(cells) + "\n")
    return buffer.getvalue()


def parse_scan_csv(text: str) -> list:
    """Rows of a scan CSV as dicts; N as int, other columns as floats."""
    lines = [line for line in text.split("\n") if line]
    if not lines:
        return []
    columns = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row = {}
        for column, cell in zip(columns, cells):
            row[column] = int(cell) if column == "N" else float(cell)
        rows.append(row)
    return rows
