"""Reading and writing formal contexts: Burmeister (.cxt), binary CSV and JSON.

The Burmeister writer emits one strict form::

    B
    <context name, may be empty>
    <number of objects>
    <number of attributes>
    <empty line>
    <one object name per line>
    <one attribute name per line>
    <one incidence row per object over {X, .}>

with LF newlines and a trailing newline. The reader also accepts CRLF,
lowercase ``x``, a UTF-8 BOM, a missing name line and a missing blank
separator line; each of these is reported as a warning diagnostic.

Every parser takes an optional ``diagnostics`` list that receives warnings.
Errors are raised as :class:`~fcarepo.errors.ParseError`.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .context import FormalContext
from .errors import ContextError, ParseError

__all__ = [
    "ContextFormat",
    "ParseDiagnostic",
    "parse_burmeister",
    "serialize_burmeister",
    "parse_csv",
    "serialize_csv",
    "parse_json",
    "serialize_json",
    "parse",
    "serialize",
    "convert",
    "format_for_path",
    "read_context",
    "write_context",
]


class ContextFormat(str, enum.Enum):
    BURMEISTER = "burmeister"
    CSV = "csv"
    JSON = "json"

    @classmethod
    def coerce(cls, value) -> "ContextFormat":
        if isinstance(value, cls):
            return value
        key = str(value).lower().lstrip(".")
        if key == "cxt":
            return cls.BURMEISTER
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown context format {value!r}") from None

    @property
    def extension(self) -> str:
        return {"burmeister": ".cxt", "csv": ".csv", "json": ".json"}[self.value]


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" or "warning"
    line: int
    message: str
    column: Optional[int] = None
    unit: str = "line"  # CSV diagnostics count rows

    def __post_init__(self):
        if self.line < 1:
            raise ValueError("diagnostic line numbers are 1-based")

    def __str__(self):
        where = f"{self.unit} {self.line}"
        if self.column is not None:
            where += f", column {self.column}"
        return f"{self.severity}: {where}: {self.message}"


def _decode(text) -> str:
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8")
    return text[1:] if text.startswith("\ufeff") else text


# -- Burmeister -------------------------------------------------------------


def _int_line(lines, i):
    if i >= len(lines):
        return None
    s = lines[i].strip()
    return int(s) if s.isascii() and s.isdigit() else None


def _header(lines, has_name, has_sep):
    """Try one header layout; return (name, n_obj, n_att, body_start) or None."""
    i = 1
    name = ""
    if has_name:
        if i >= len(lines):
            return None
        name = lines[i]
        i += 1
    g = _int_line(lines, i)
    m = _int_line(lines, i + 1)
    if g is None or m is None:
        return None
    i += 2
    if has_sep:
        if i >= len(lines) or lines[i].strip():
            return None
        i += 1
    return name, g, m, i


def _fits(lines, header):
    _, g, m, start = header
    end = start + 2 * g + m
    return len(lines) >= end and not any(s.strip() for s in lines[end:])


_LAYOUTS = [
    (True, True, None),
    (False, True, "missing name line after 'B'"),
    (True, False, "missing blank line after the dimensions"),
    (False, False, "missing name line and blank line after the dimensions"),
]


def parse_burmeister(text, diagnostics: Optional[list] = None) -> FormalContext:
    """Parse a Burmeister ``.cxt`` document (str or UTF-8 bytes)."""
    text = _decode(text)
    warnings = []
    if "\r\n" in text:
        warnings.append(ParseDiagnostic("warning", 1, "CRLF line endings"))
        text = text.replace("\r\n", "\n")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [s.rstrip("\r") for s in lines]

    if not lines or lines[0].strip() != "B":
        raise ParseError([ParseDiagnostic("error", 1, "first line must be 'B'")])

    header = None
    for has_name, has_sep, note in _LAYOUTS:
        candidate = _header(lines, has_name, has_sep)
        if candidate is not None and _fits(lines, candidate):
            header = candidate
            if note:
                warnings.append(ParseDiagnostic("warning", 2, note))
            break

    if header is None:
        raise ParseError([_structure_error(lines)])

    name, g, m, start = header
    errors = []
    objects = [s.rstrip() for s in lines[start : start + g]]
    attributes = [s.rstrip() for s in lines[start + g : start + g + m]]
    for offset, label in enumerate(objects + attributes):
        if not label:
            kind = "object" if offset < g else "attribute"
            errors.append(ParseDiagnostic("error", start + offset + 1, f"empty {kind} name"))

    arr = np.zeros((g, m), dtype=bool)
    lowercase_seen = False
    row_start = start + g + m
    for r in range(g):
        lineno = row_start + r + 1
        row = lines[row_start + r].rstrip()
        if len(row) != m:
            errors.append(
                ParseDiagnostic(
                    "error", lineno, f"incidence row length mismatch (expected {m}, got {len(row)})"
                )
            )
            continue
        for c, ch in enumerate(row):
            if ch == "X":
                arr[r, c] = True
            elif ch == "x":
                arr[r, c] = True
                lowercase_seen = True
            elif ch != ".":
                errors.append(
                    ParseDiagnostic(
                        "error", lineno, f"illegal incidence character {ch!r}", column=c + 1
                    )
                )
    if lowercase_seen:
        warnings.append(ParseDiagnostic("warning", row_start + 1, "lowercase 'x' used as cross"))

    for kind, names, first in (("object", objects, start), ("attribute", attributes, start + g)):
        seen = {}
        for k, label in enumerate(names):
            if label and label in seen:
                errors.append(
                    ParseDiagnostic("error", first + k + 1, f"duplicate {kind} name {label!r}")
                )
            seen.setdefault(label, k)

    if errors:
        raise ParseError(sorted(errors, key=lambda d: d.line))
    try:
        ctx = FormalContext(objects, attributes, arr, name=name)
    except ContextError as exc:
        raise ParseError([ParseDiagnostic("error", 1, str(exc))]) from exc
    if diagnostics is not None:
        diagnostics.extend(warnings)
    return ctx


def _structure_error(lines) -> ParseDiagnostic:
    """Explain why no header layout fits, using the strict layout as reference."""
    g = _int_line(lines, 2)
    m = _int_line(lines, 3)
    if g is None and _int_line(lines, 1) is None:
        bad = 3 if len(lines) > 2 else min(len(lines), 3)
        return ParseDiagnostic("error", max(bad, 1), "object count must be a non-negative integer")
    if g is None or m is None:
        # maybe the name line is missing
        g2, m2 = _int_line(lines, 1), _int_line(lines, 2)
        if g2 is None or m2 is None:
            return ParseDiagnostic("error", 4, "attribute count must be a non-negative integer")
        g, m, start = g2, m2, 3
    else:
        start = 4
    if start < len(lines) and not lines[start].strip():
        start += 1
    expected = start + 2 * g + m
    if len(lines) < expected:
        return ParseDiagnostic(
            "error",
            max(len(lines), 1),
            f"unexpected end of file: expected {g} object names, {m} attribute names "
            f"and {g} incidence rows (wrong number of name lines?)",
        )
    return ParseDiagnostic("error", expected + 1, "unexpected content after the last incidence row")


def serialize_burmeister(ctx: FormalContext) -> str:
    out = ["B", ctx.name, str(len(ctx.objects)), str(len(ctx.attributes)), ""]
    out.extend(ctx.objects)
    out.extend(ctx.attributes)
    for row in ctx.incidence:
        out.append("".join("X" if x else "." for x in row))
    return "\n".join(out) + "\n"


# -- CSV --------------------------------------------------------------------

_TRUE_CELLS = {"1", "x"}
_FALSE_CELLS = {"0", ""}


def parse_csv(text, diagnostics: Optional[list] = None) -> FormalContext:
    """Parse a binary cross table: header ``<name>,m1,m2,...``, rows ``g,1,0,...``.

    The corner cell carries the context name and is normally empty.
    """
    text = _decode(text)
    rows = list(csv.reader(io.StringIO(text, newline="")))
    while rows and rows[-1] == []:
        rows.pop()
    if not rows:
        raise ParseError([ParseDiagnostic("error", 1, "missing header row", column=1, unit="row")])
    name, attributes = rows[0][0], rows[0][1:]
    width = len(rows[0])
    errors = []
    objects = []
    arr = np.zeros((len(rows) - 1, len(attributes)), dtype=bool)
    for r, row in enumerate(rows[1:]):
        rowno = r + 2
        if len(row) != width:
            errors.append(
                ParseDiagnostic(
                    "error",
                    rowno,
                    f"ragged row: expected {width} cells, got {len(row)}",
                    column=min(len(row), width) + 1,
                    unit="row",
                )
            )
            objects.append(row[0] if row else "")
            continue
        objects.append(row[0])
        for c, cell in enumerate(row[1:]):
            value = cell.strip().lower()
            if value in _TRUE_CELLS:
                arr[r, c] = True
            elif value not in _FALSE_CELLS:
                errors.append(
                    ParseDiagnostic(
                        "error", rowno, f"illegal cell value {cell!r}", column=c + 2, unit="row"
                    )
                )
    if errors:
        raise ParseError(errors)
    try:
        return FormalContext(objects, attributes, arr, name=name)
    except ContextError as exc:
        raise ParseError([ParseDiagnostic("error", 1, str(exc), column=1, unit="row")]) from exc


def serialize_csv(ctx: FormalContext) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([ctx.name, *ctx.attributes])
    for obj, row in zip(ctx.objects, ctx.incidence):
        writer.writerow([obj, *("1" if x else "0" for x in row)])
    return buf.getvalue()


# -- JSON -------------------------------------------------------------------

_JSON_KEYS = ("name", "objects", "attributes", "incidence")


def parse_json(text, diagnostics: Optional[list] = None) -> FormalContext:
    """Parse ``{"name", "objects", "attributes", "incidence": [[g, m], ...]}``."""
    text = _decode(text)

    def fail(msg, line=1):
        raise ParseError([ParseDiagnostic("error", line, msg)])

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        fail(f"malformed JSON: {exc.msg}", exc.lineno)
    if not isinstance(doc, dict):
        fail("top level must be an object")
    for key in _JSON_KEYS:
        if key not in doc:
            fail(f"missing key {key!r}")
    extra = sorted(set(doc) - set(_JSON_KEYS))
    if extra and diagnostics is not None:
        diagnostics.append(ParseDiagnostic("warning", 1, f"unknown keys ignored: {extra}"))
    name, objects, attributes, pairs = (doc[k] for k in _JSON_KEYS)
    if not isinstance(name, str):
        fail("'name' must be a string")
    for key, seq in (("objects", objects), ("attributes", attributes)):
        if not isinstance(seq, list) or not all(isinstance(s, str) for s in seq):
            fail(f"{key!r} must be an array of strings")
    if not isinstance(pairs, list):
        fail("'incidence' must be an array of [objectIndex, attributeIndex] pairs")
    arr = np.zeros((len(objects), len(attributes)), dtype=bool)
    for pair in pairs:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(i, int) and not isinstance(i, bool) for i in pair)
        ):
            fail(f"bad incidence entry {pair!r}")
        g, m = pair
        if not 0 <= g < len(objects):
            fail(f"object index out of range: {g}")
        if not 0 <= m < len(attributes):
            fail(f"attribute index out of range: {m}")
        if arr[g, m]:
            fail(f"duplicate incidence pair [{g}, {m}]")
        arr[g, m] = True
    try:
        return FormalContext(objects, attributes, arr, name=name)
    except ContextError as exc:
        fail(str(exc))


def serialize_json(ctx: FormalContext) -> str:
    doc = {
        "name": ctx.name,
        "objects": list(ctx.objects),
        "attributes": list(ctx.attributes),
        "incidence": [list(p) for p in ctx.pairs()],
    }
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


# -- dispatch ---------------------------------------------------------------

_PARSERS = {
    ContextFormat.BURMEISTER: parse_burmeister,
    ContextFormat.CSV: parse_csv,
    ContextFormat.JSON: parse_json,
}
_SERIALIZERS = {
    ContextFormat.BURMEISTER: serialize_burmeister,
    ContextFormat.CSV: serialize_csv,
    ContextFormat.JSON: serialize_json,
}


def parse(text, fmt, diagnostics: Optional[list] = None) -> FormalContext:
    return _PARSERS[ContextFormat.coerce(fmt)](text, diagnostics)


def serialize(ctx: FormalContext, fmt) -> str:
    return _SERIALIZERS[ContextFormat.coerce(fmt)](ctx)


def convert(data: bytes, from_format, to_format) -> bytes:
    """Parse ``data`` in one format and emit it, UTF-8 encoded, in another."""
    ctx = parse(data, from_format)
    return serialize(ctx, to_format).encode("utf-8")


def format_for_path(path) -> ContextFormat:
    ext = os.path.splitext(os.fspath(path))[1]
    if not ext:
        raise ValueError(f"cannot infer context format of {path!r}: no extension")
    return ContextFormat.coerce(ext)


def read_context(path, fmt=None, diagnostics: Optional[list] = None) -> FormalContext:
    fmt = ContextFormat.coerce(fmt) if fmt else format_for_path(path)
    with open(path, "rb") as fh:
        return parse(fh.read(), fmt, diagnostics)


def write_context(ctx: FormalContext, path, fmt=None) -> None:
    fmt = ContextFormat.coerce(fmt) if fmt else format_for_path(path)
    with open(path, "wb") as fh:
        fh.write(serialize(ctx, fmt).encode("utf-8"))
