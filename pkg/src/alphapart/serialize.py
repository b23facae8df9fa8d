"""JSON and CSV artifacts.

Every artifact carries the resolved run configuration and the package
version.  Integers too wide for an IEEE double, and every count column,
are written as decimal strings; rationals as "p/q".  Output bytes depend
only on the payload, so identical runs give identical files.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__

__all__ = [
    "SCHEMA_VERSION",
    "atomic_write",
    "csv_text",
    "json_text",
    "jsonable",
]

SCHEMA_VERSION = 1
_SAFE_INT = 2 ** 53


def jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        v = int(obj)
        return str(v) if abs(v) >= _SAFE_INT else v
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _envelope(kind: str, config: dict, result: Any) -> dict:
    return {
        "artifact": f"alphapart.{kind}",
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "config": jsonable(config),
        "result": jsonable(result),
    }


def json_text(kind: str, config: dict, result: Any) -> str:
    return json.dumps(_envelope(kind, config, result), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(v: Any) -> str:
    v = jsonable(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(kind: str, config: dict, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """RFC 4180 text preceded by '#' lines holding the version and config as JSON."""
    buf = io.StringIO()
    buf.write(f"# alphapart.{kind} version={__version__} schema_version={SCHEMA_VERSION}\r\n")
    buf.write("# config=" + json.dumps(jsonable(config), sort_keys=True, allow_nan=False) + "\r\n")
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
