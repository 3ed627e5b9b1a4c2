"""Frame files: JSON ``{"dim": n, "vectors": [[...], ...]}`` or headerless CSV.

Numbers are written with ``repr`` (shortest round-trip form), so a frame
written and parsed back is bit-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import IO, Union

import numpy as np

from .errors import DimensionMismatch, EmptyInput, FormatError
from .frame import Frame

PathOrStream = Union[str, os.PathLike, IO[str]]
FORMATS = ("json", "csv")


def detect_format(path, fmt: str | None = None) -> str:
    if fmt:
        if fmt not in FORMATS:
            raise FormatError(f"unknown frame format {fmt!r}")
        return fmt
    name = str(getattr(path, "name", path))
    return "csv" if name.lower().endswith(".csv") else "json"


def _reject_constant(token):
    raise FormatError(f"non-finite number {token} is not allowed")


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_json_frame(text: str) -> Frame:
    if not text.strip():
        raise EmptyInput("input is empty")
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object with 'dim' and 'vectors'")
    unknown = sorted(set(doc) - {"dim", "vectors"})
    if unknown:
        raise FormatError(f"unknown key(s): {', '.join(unknown)}")
    for key in ("dim", "vectors"):
        if key not in doc:
            raise FormatError(f"missing field '{key}'")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError("field 'dim' must be a positive integer")
    vectors = doc["vectors"]
    if not isinstance(vectors, list):
        raise FormatError("field 'vectors' must be an array")
    if not vectors:
        raise EmptyInput("field 'vectors' is empty")
    for j, vec in enumerate(vectors):
        if not isinstance(vec, list):
            raise FormatError(f"vectors[{j}] must be an array")
        if len(vec) != dim:
            raise DimensionMismatch(f"vectors[{j}] has {len(vec)} entries, expected dim={dim}")
        for i, x in enumerate(vec):
            if not _is_number(x):
                raise FormatError(f"vectors[{j}][{i}] is not a number")
    return Frame(np.array(vectors, dtype=float).reshape(len(vectors), dim))


def parse_csv_frame(text: str) -> Frame:
    rows = []
    dim = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        values = []
        for i, cell in enumerate(row, start=1):
            try:
                x = float(cell)
            except ValueError:
                raise FormatError(f"line {lineno}, field {i}: {cell.strip()!r} is not a number") from None
            if not math.isfinite(x):
                raise FormatError(f"line {lineno}, field {i}: non-finite value")
            values.append(x)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise DimensionMismatch(f"row {lineno} has {len(values)} values, expected {dim}")
        rows.append(values)
    if not rows:
        raise EmptyInput("input has no vectors")
    return Frame(np.array(rows, dtype=float))


def parse_frame_text(text: str, fmt: str = "json") -> Frame:
    return parse_csv_frame(text) if detect_format("", fmt) == "csv" else parse_json_frame(text)


def parse_frame_file(source: PathOrStream, fmt: str | None = None) -> Frame:
    fmt = detect_format(source, fmt)
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            with open(source, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise FormatError(f"cannot read {source}: {e.strerror}") from None
    return parse_frame_text(text, fmt)


def frame_to_json(F: Frame) -> str:
    rows = ",\n".join("    " + json.dumps([float(x) for x in v]) for v in F.vectors)
    return f'{{\n  "dim": {F.dim},\n  "vectors": [\n{rows}\n  ]\n}}\n'


def frame_to_csv(F: Frame) -> str:
    return "".join(",".join(repr(float(x)) for x in v) + "\n" for v in F.vectors)


def frame_to_dict(F: Frame) -> dict:
    return {"dim": F.dim, "vectors": F.vectors.tolist()}


def write_frame(F: Frame, target: PathOrStream, fmt: str | None = None) -> None:
    fmt = detect_format(target, fmt)
    text = frame_to_csv(F) if fmt == "csv" else frame_to_json(F)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8") as f:
            f.write(text)
