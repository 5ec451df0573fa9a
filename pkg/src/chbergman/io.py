"""Lattice-spec JSON, table output and atomic file writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .group import GroupElement
from .orbit import LatticeSpec

__all__ = [
    "SpecParseError",
    "complex_to_str",
    "complex_from_str",
    "complex_to_pair",
    "complex_from_pair",
    "spec_from_json",
    "spec_to_json",
    "load_spec",
    "save_spec",
    "render_table",
    "parse_table",
    "atomic_write",
]


class SpecParseError(ValueError):
    """Malformed spec document; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


def _fmt(x: float) -> str:
    return repr(float(x))


def complex_to_str(z: complex) -> str:
    """``re+imj`` with round-trip precision, e.g. ``0.5-1.25j``."""
    z = complex(z)
    im = _fmt(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{_fmt(z.real)}{sign}{im}j"


def complex_from_str(text: str) -> complex:
    return complex(text.strip().replace("i", "j"))


def complex_to_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_pair(pair) -> complex:
    if isinstance(pair, (int, float)) and not isinstance(pair, bool):
        return complex(pair)
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
        raise ValueError(f"complex entry must be [re, im], got {pair!r}")
    return complex(pair[0], pair[1])


def _matrix_from_json(obj, idx: int) -> np.ndarray:
    if not (isinstance(obj, list) and len(obj) == 3 and all(isinstance(r, list) and len(r) == 3 for r in obj)):
        raise SpecParseError(f"generator {idx} must be a 3x3 array of [re, im] pairs")
    try:
        return np.array([[complex_from_pair(v) for v in row] for row in obj])
    except ValueError as exc:
        raise SpecParseError(f"generator {idx}: {exc}") from None


def spec_matrices_from_json(text: str) -> tuple[dict, list[np.ndarray]]:
    """Parse without membership validation (used by the validator)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise SpecParseError("spec must be a JSON object")
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        raise SpecParseError("spec needs a nonempty 'generators' list")
    return doc, [_matrix_from_json(g, i) for i, g in enumerate(gens)]


def spec_from_json(text: str) -> LatticeSpec:
    doc, mats = spec_matrices_from_json(text)
    override = doc.get("injectivity_radius_override")
    if override is not None and not (isinstance(override, (int, float)) and override > 0):
        raise SpecParseError("injectivity_radius_override must be a positive number")
    return LatticeSpec(
        name=str(doc.get("name", "unnamed")),
        generators=tuple(GroupElement(m) for m in mats),
        include_inverses=bool(doc.get("include_inverses", True)),
        injectivity_radius_override=None if override is None else float(override),
    )


def spec_to_json(spec: LatticeSpec) -> str:
    doc = {
        "name": spec.name,
        "generators": [[[complex_to_pair(v) for v in row] for row in g.matrix]
                       for g in spec.generators],
        "include_inverses": spec.include_inverses,
    }
    if spec.injectivity_radius_override is not None:
        doc["injectivity_radius_override"] = spec.injectivity_radius_override
    return json.dumps(doc, indent=2) + "\n"


def load_spec(path) -> LatticeSpec:
    return spec_from_json(Path(path).read_text())


def save_spec(spec: LatticeSpec, path) -> None:
    atomic_write(path, spec_to_json(spec))


def _cell_csv(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else ("true" if v else "false")
    if isinstance(v, (complex, np.complexfloating)):
        return complex_to_str(v)
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def _cell_json(v):
    if isinstance(v, (complex, np.complexfloating)):
        return complex_to_pair(v)
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str,
                 meta: dict | None = None) -> str:
    """Serialize rows as CSV (``#`` header comment lines) or JSON (same schema)."""
    meta = meta or {}
    if fmt == "json":
        doc = {
            "meta": {k: _cell_json(v) for k, v in meta.items()},
            "columns": list(columns),
            "rows": [{c: _cell_json(v) for c, v in zip(columns, row)} for row in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write("# columns: " + ",".join(columns) + "\n")
    for k, v in meta.items():
        buf.write(f"# {k}: {_cell_csv(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell_csv(v) for v in row])
    return buf.getvalue()


def parse_table(text: str, fmt: str) -> tuple[list[str], list[dict]]:
    """Read back a table written by :func:`render_table` (values stay as text in CSV)."""
    if fmt == "json":
        doc = json.loads(text)
        return doc["columns"], doc["rows"]
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [dict(zip(header, row)) for row in reader]


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
