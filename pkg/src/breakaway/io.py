"""Flat-file formats: parameter documents, tables, data files, manifests."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .errors import DomainError, InputError
from .friction import PARAM_KEYS, FrictionParams


def fmt(value) -> str:
    """Shortest round-trip text for a number; strings pass through."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


# -- parameter documents --------------------------------------------------------


def dumps_params(params: FrictionParams, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines += [f"{key} = {fmt(value)}" for key, value in params.as_dict().items()]
    return "\n".join(lines) + "\n"


def loads_params(text: str, path=None) -> FrictionParams:
    """Parse ``key = value`` lines. ``#`` starts a comment; unset keys keep their defaults."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise InputError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        key, _, value = (part.strip() for part in line.partition(sep))
        if key not in PARAM_KEYS:
            raise InputError(f"unknown parameter {key!r} (expected one of {', '.join(PARAM_KEYS)})", path, lineno)
        if key in values:
            raise InputError(f"duplicate parameter {key!r}", path, lineno)
        try:
            number = float(value)
        except ValueError:
            raise InputError(f"value for {key} is not a number: {value!r}", path, lineno) from None
        if not math.isfinite(number):
            raise InputError(f"value for {key} must be finite, got {value!r}", path, lineno)
        values[key] = number
    try:
        return FrictionParams(**values)
    except DomainError as exc:
        raise InputError(str(exc), path) from None


def read_params(path) -> FrictionParams:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read parameter file: {exc.strerror}", path) from None
    return loads_params(text, path)


def write_params(path, params: FrictionParams, comments: Sequence[str] = ()) -> None:
    Path(path).write_text(dumps_params(params, comments))


# -- tables -----------------------------------------------------------------------


def table_text(header: Sequence[str], rows: Iterable[Sequence], fmt_name: str = "csv") -> str:
    rows = [[fmt(value) for value in row] for row in rows]
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt_name == "json":
        records = [
            {key: (value if not _is_number(value) else json.loads(value)) for key, value in zip(header, row)}
            for row in rows
        ]
        return json.dumps(records, indent=1) + "\n"
    raise DomainError(f"unknown table format {fmt_name!r}")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return text not in ("nan", "inf", "-inf")


def write_table(path, header: Sequence[str], rows, fmt_name: str = "csv") -> Path:
    path = Path(path)
    path.write_text(table_text(header, rows, fmt_name))
    return path


def read_pairs(path) -> np.ndarray:
    """Two-column numeric data. An optional non-numeric header row and ``#`` comments are skipped."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read data file: {exc.strerror}", path) from None
    rows = []
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")] if "," in line else line.split()
        if first and not any(_is_number(c) for c in cells):
            first = False
            continue  # header row
        first = False
        if len(cells) != 2:
            raise InputError(f"expected 2 columns, got {len(cells)}", path, lineno)
        try:
            pair = (float(cells[0]), float(cells[1]))
        except ValueError:
            raise InputError(f"non-numeric value in {raw.strip()!r}", path, lineno) from None
        if not all(math.isfinite(c) for c in pair):
            raise InputError("non-finite value", path, lineno)
        rows.append(pair)
    if not rows:
        raise InputError("data file contains no rows", path)
    return np.array(rows, dtype=float)


def key_value_block(items: Iterable[tuple[str, object]]) -> str:
    return "".join(f"{key} = {fmt(value) if value is not None else 'none'}\n" for key, value in items)


# -- manifests ----------------------------------------------------------------------


def write_manifest(
    out_dir, subcommand: str, params: FrictionParams, options: dict, inputs: dict, outputs: Sequence[Path]
) -> Path:
    """Record everything needed to regenerate the outputs next to them."""
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "params": params.as_dict(),
        "options": options,
        "inputs": {key: (str(value) if value is not None else None) for key, value in inputs.items()},
        "outputs": [Path(p).name for p in outputs],
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    path = Path(out_dir) / f"{subcommand}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"not JSON serializable: {type(value).__name__}")
