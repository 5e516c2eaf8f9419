"""CSV datasets and JSON helpers for the command line.

Datasets are plain RFC-4180 CSV with a header row.  One column is the
response; every other column, in header order, is a predictor.  Floats are
written with 17 significant digits so that a save/load round trip is exact.
"""
from __future__ import annotations

import csv
import json
import math
from typing import Optional, Sequence, Union

import numpy as np

from .core import RegressionProblem
from .errors import MissingColumn, NonFiniteValue, ParseError

FLOAT_FORMAT = "{:.17g}"


def format_float(x: float) -> str:
    return FLOAT_FORMAT.format(float(x))


def _resolve_column(header: Sequence[str], y_column: Union[str, int]) -> int:
    if isinstance(y_column, int) or (isinstance(y_column, str) and y_column.lstrip("-").isdigit()
                                     and y_column not in header):
        idx = int(y_column)
        if not -len(header) <= idx < len(header):
            raise MissingColumn(f"column index {idx} out of range for {len(header)} columns")
        return idx % len(header)
    try:
        return list(header).index(y_column)
    except ValueError:
        raise MissingColumn(f"no column named {y_column!r}; header is {list(header)}") from None


def read_table(path):
    """Header and float matrix of a numeric CSV file."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if not header or any(h == "" for h in header):
            raise ParseError(f"{path}: header has an empty column name")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ParseError(f"{path}: row {lineno} has {len(rec)} fields, expected {len(header)}")
            vals = []
            for col, cell in zip(header, rec):
                cell = cell.strip()
                if cell == "":
                    raise ParseError(f"{path}: blank cell at row {lineno}, column {col!r}")
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"{path}: cannot parse {cell!r} at row {lineno}, column {col!r}") from None
                if not math.isfinite(v):
                    raise NonFiniteValue(f"{path}: non-finite value {cell!r} at row {lineno}, column {col!r}")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return header, np.array(rows, dtype=np.float64)


def load_csv(path, y_column: Union[str, int] = "y") -> RegressionProblem:
    header, table = read_table(path)
    j = _resolve_column(header, y_column)
    X = np.delete(table, j, axis=1)
    if X.shape[1] == 0:
        raise ParseError(f"{path}: no predictor columns besides the response")
    return RegressionProblem(X, table[:, j])


def predictor_names(path, y_column: Union[str, int] = "y"):
    header, _ = read_table(path)
    j = _resolve_column(header, y_column)
    return [h for i, h in enumerate(header) if i != j]


def save_csv(path, problem: RegressionProblem, y_name: str = "y", x_names: Optional[Sequence[str]] = None):
    """Write ``Y`` first, then the columns of ``X``."""
    p = problem.X.shape[1]
    names = list(x_names) if x_names is not None else [f"x{j + 1}" for j in range(p)]
    write_matrix(path, [y_name] + names, np.column_stack([problem.Y, problem.X]))


def write_matrix(path, header: Sequence[str], M: np.ndarray):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in np.atleast_2d(M):
            w.writerow([format_float(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def dumps(obj) -> str:
    """JSON text with keys in insertion order and non-finite floats as strings."""
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
