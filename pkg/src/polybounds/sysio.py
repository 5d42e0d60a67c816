"""File-level input/output: systems, matrix polynomials, set lists, reports.

All readers funnel through the JSON schemas of their owning modules and
convert failures into SchemaError with a field path, so the CLI can report
exactly which field was wrong.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .feasibility import Ball, Halfspace, PMISet, SublevelSet
from .poly_core import MatrixPolynomial, Polynomial
from .semialg import ParametricSystem, system_from_dict


def _read_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"file not found: {path}", str(path))
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", str(path)) from None


def load_system(path) -> ParametricSystem:
    """Parse a parametric-system file, with field-path diagnostics."""
    return system_from_dict(_read_json(path), path="system")


def save_system(sys: ParametricSystem, path) -> None:
    Path(path).write_text(json.dumps(sys.to_dict(), indent=2) + "\n")


def load_matrix_polynomial(path) -> MatrixPolynomial:
    return MatrixPolynomial.from_dict(_read_json(path), path="matrix")


def load_polynomial(path) -> Polynomial:
    return Polynomial.from_dict(_read_json(path), path="polynomial")


def parse_convex_set(data: dict, path: str):
    """One entry of a sets file -> a projectable convex set description."""
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError("expected an object with a 'kind' field", path)
    kind = data["kind"]
    try:
        if kind == "halfspace":
            return Halfspace(a=tuple(data["a"]), b=float(data["b"]))
        if kind == "ball":
            return Ball(center=tuple(data["center"]), radius=float(data["radius"]))
        if kind == "sublevel":
            return SublevelSet(Polynomial.from_dict(data["g"], f"{path}.g"))
        if kind == "pmi":
            return PMISet(
                MatrixPolynomial.from_dict(data["P"], f"{path}.P"),
                convex=bool(data.get("convex", False)),
            )
    except KeyError as exc:
        raise SchemaError(f"missing field {exc}", path) from None
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), path) from None
    raise SchemaError(f"unknown set kind {kind!r}", f"{path}.kind")


def load_sets(path):
    """Parse a sets file: {"sets": [...], optional "suggested_x0": [...]}"""
    data = _read_json(path)
    if "sets" not in data or not isinstance(data["sets"], list) or not data["sets"]:
        raise SchemaError("expected a nonempty 'sets' list", "sets")
    sets = [
        parse_convex_set(item, f"sets[{k}]") for k, item in enumerate(data["sets"])
    ]
    x0 = data.get("suggested_x0")
    return sets, (np.asarray(x0, dtype=float) if x0 is not None else None)


def json_default(obj):
    """JSON encoder hook: exact rationals as strings, arrays as lists."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def dump_report(data: dict, path=None) -> str:
    text = json.dumps(data, indent=2, default=json_default)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def write_csv(path, header, rows) -> None:
    """Plain CSV: '.' decimal, comma separator, one header row."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
