"""Job spec files and deterministic JSON/CSV rendering.

A spec is a JSON object::

    {
      "schema_version": 1,
      "c": "1",
      "functions": {
        "f": {"intervals": [{"a": 0, "b": 1, "re": "1/4", "im": "0"}]},
        "h": {"cells": [{"id": "A", "measure": "3/2", "re": "1/8", "im": "0"}]}
      },
      "f": "f", "g": "h", "n": 6
    }

Numbers written as ``"p/q"`` or integers are exact; decimals are floats.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import stepfn
from .errors import ParseError
from .numbers import QQi, format_exact, parse_real

SCHEMA_VERSION = 1
COMMANDS = ("inner", "exp-inner", "exists", "gram", "verify", "scan-boundary")

_TOP_KEYS = {
    "schema_version", "command", "c", "functions", "f", "g", "targets", "n", "tol",
    "n_max", "split", "seed", "scan", "suite", "properties",
}


@dataclass
class JobSpec:
    command: str | None
    c: Fraction | float
    functions: dict[str, stepfn.MeasuredCellFunction]
    options: dict[str, Any] = field(default_factory=dict)

    def function(self, name: str) -> stepfn.MeasuredCellFunction:
        try:
            return self.functions[name]
        except KeyError:
            raise ParseError(f"unknown function name {name!r}") from None


def _complex(entry: dict, where: str):
    re = parse_real(entry.get("re", 0))
    im = parse_real(entry.get("im", 0))
    if isinstance(re, Fraction) and isinstance(im, Fraction):
        return QQi(re, im)
    return complex(float(re), float(im))


def parse_function(obj: Any, name: str = "?") -> stepfn.MeasuredCellFunction:
    if not isinstance(obj, dict):
        raise ParseError(f"function {name!r} must be an object")
    if ("intervals" in obj) == ("cells" in obj):
        raise ParseError(f"function {name!r} needs exactly one of 'intervals' or 'cells'")
    if "intervals" in obj:
        rows = []
        for i, iv in enumerate(obj["intervals"]):
            try:
                rows.append((parse_real(iv["a"]), parse_real(iv["b"]), _complex(iv, name)))
            except (KeyError, TypeError) as exc:
                raise ParseError(f"function {name!r} interval #{i} is malformed") from exc
        return stepfn.from_intervals(rows)
    rows = []
    for i, cell in enumerate(obj["cells"]):
        try:
            rows.append((str(cell.get("id", f"c{i}")), parse_real(cell["measure"]), _complex(cell, name)))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"function {name!r} cell #{i} is malformed") from exc
    return stepfn.from_cells(rows)


def parse_spec(data: Any) -> JobSpec:
    if not isinstance(data, dict):
        raise ParseError("spec must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ParseError(f"unknown keys: {sorted(extra)}")
    command = data.get("command")
    if command is not None and command not in COMMANDS:
        raise ParseError(f"unknown command {command!r}")
    c = parse_real(data.get("c", 1))
    if not c > 0:
        raise ParseError(f"c must be positive, got {c}")
    funcs = data.get("functions", {})
    if not isinstance(funcs, dict):
        raise ParseError("'functions' must be an object")
    functions = {name: parse_function(obj, name) for name, obj in funcs.items()}
    options = {k: v for k, v in data.items() if k not in ("schema_version", "command", "c", "functions")}
    for key in ("f", "g"):
        if key in options and options[key] not in functions:
            raise ParseError(f"{key!r} refers to unknown function {options[key]!r}")
    for name in options.get("targets", []):
        if name not in functions:
            raise ParseError(f"target {name!r} is not a defined function")
    return JobSpec(command, c, functions, options)


def load_spec(path: str | Path) -> JobSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read spec file {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return parse_spec(data)


# -- rendering ------------------------------------------------------------------


def _real(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else format_exact(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isinf(x) or math.isnan(x):
        return repr(x)
    return x


def to_jsonable(x):
    """Convert library values to plain JSON types.

    Exact rationals become ``"p/q"`` strings (bare integers when integral);
    complex values become ``{"re": ..., "im": ...}``.
    """
    if isinstance(x, QQi):
        return {"re": _real(x.re), "im": _real(x.im)}
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _real(x.real), "im": _real(x.imag)}
    if isinstance(x, (Fraction, float, int, np.floating, np.integer, bool, np.bool_)):
        return _real(x)
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return x


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, QQi):
        return str(v) if v.im else format_exact(v.re)
    if isinstance(v, Fraction):
        return format_exact(v)
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v)) if v.imag else repr(float(v.real))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v
