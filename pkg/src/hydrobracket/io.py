"""JSON file formats: bracket files, change files and constants files.

Bracket file::

    {"components": N, "dimension": n, "coordinates": ["u1", ...],
     "metrics": [[[ "expr", ...], ...], ...],      # [alpha][i][j]
     "b": [[[[ "expr", ...]]]]}                     # optional, [alpha][i][j][k]

Without "b" the coefficients are derived from the metrics (nondegenerate
metrics only).  A change file holds ``{"forward": [...], "inverse": [...]}``
with the inverse optional.  A constants file holds the data of a field-linear
bracket: ``{"b0": [alpha][i][j][k], "g0": optional [alpha][i][j]}`` with
rational entries given as numbers or strings such as ``"-3/2"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .bracket import HydroBracket
from .coordinates import CoordinateChange
from .errors import ShapeError
from .liealg import LinearBracketData, default_coordinates
from .symexpr import format_expr, parse


def fixture_path(name):
    """Path of a shipped fixture; ``name`` may omit the ``.json`` suffix."""
    if not name.endswith(".json"):
        name += ".json"
    return Path(str(resources.files("hydrobracket") / "fixtures" / name))


def read_json(source):
    """A dict from a dict, a path, or a shipped fixture name."""
    if isinstance(source, dict):
        return source
    path = Path(source)
    if not path.exists() and not path.suffix and fixture_path(str(source)).exists():
        path = fixture_path(str(source))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _expr_array(data, shape, coordinates, what):
    arr = np.empty(shape, dtype=object)
    try:
        src = np.asarray(data, dtype=object)
    except ValueError:
        raise ShapeError(f"{what} is ragged") from None
    if src.shape != shape:
        raise ShapeError(f"{what} has shape {src.shape}, expected {shape}")
    for idx in np.ndindex(*shape):
        arr[idx] = parse(str(src[idx]), coordinates)
    return arr


def bracket_from_dict(doc):
    for key in ("components", "dimension", "metrics"):
        if key not in doc:
            raise ShapeError(f"bracket file lacks {key!r}")
    N, n = int(doc["components"]), int(doc["dimension"])
    coordinates = tuple(doc.get("coordinates") or default_coordinates(N))
    if len(coordinates) != N:
        raise ShapeError(f"{len(coordinates)} coordinate names for {N} components")
    if len(doc["metrics"]) != n:
        raise ShapeError(f"{len(doc['metrics'])} metrics for dimension {n}")
    g = [_expr_array(m, (N, N), coordinates, f"metric {a}") for a, m in enumerate(doc["metrics"], start=1)]
    if doc.get("b") is None:
        return HydroBracket.from_metrics(g, coordinates)
    if len(doc["b"]) != n:
        raise ShapeError(f"{len(doc['b'])} b-arrays for dimension {n}")
    b = [_expr_array(t, (N, N, N), coordinates, f"b-array {a}") for a, t in enumerate(doc["b"], start=1)]
    return HydroBracket(g, b, coordinates)


def load_bracket(source):
    return bracket_from_dict(read_json(source))


def _strings(arr):
    return np.vectorize(format_expr, otypes=[object])(arr).tolist()


def bracket_to_dict(B, include_b=True):
    doc = {
        "components": B.N,
        "dimension": B.n,
        "coordinates": list(B.coordinates),
        "metrics": [_strings(m) for m in B.g],
    }
    if include_b:
        doc["b"] = [_strings(t) for t in B.b]
    return doc


def dumps(doc):
    """Deterministic JSON text."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_change(source, coordinates):
    doc = read_json(source)
    if "forward" not in doc:
        raise ShapeError("change file lacks 'forward'")
    return CoordinateChange.from_strings(doc["forward"], coordinates, doc.get("inverse"))


def _fraction(x):
    return Fraction(str(x)) if not isinstance(x, int) else Fraction(x)


def linear_data_from_dict(doc):
    if "b0" not in doc:
        raise ShapeError("constants file lacks 'b0'")
    b0 = [np.vectorize(_fraction, otypes=[object])(np.asarray(t, dtype=object)) for t in doc["b0"]]
    g0 = doc.get("g0")
    if g0 is not None:
        g0 = [np.vectorize(_fraction, otypes=[object])(np.asarray(m, dtype=object)) for m in g0]
    return LinearBracketData(b0, g0)


def is_constants_file(doc):
    return "b0" in doc and "metrics" not in doc

