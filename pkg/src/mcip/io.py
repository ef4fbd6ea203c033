"""Readers and writers for graph, independent-set, table and data files."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .gaussian import DataMatrix
from .graph import UndirectedGraph
from .loglinear import ContingencyTable

FIXTURE_ENV = "MCIP_FIXTURES"
CLASS_COLUMN_NAMES = {"class", "type", "label", "v8"}


def fixture_dir() -> Path:
    """Directory holding the bundled fixtures, overridable via ``MCIP_FIXTURES``."""
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("mcip") / "fixtures"))


def resolve_path(name: str | os.PathLike) -> Path:
    """``name`` itself if it exists, else the fixture of that name."""
    p = Path(name)
    if p.exists():
        return p
    candidate = fixture_dir() / p.name
    if candidate.exists():
        return candidate
    raise InputError(f"file not found: {name}")


def _read_text(path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return resolve_path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def parse_graph(text: str) -> UndirectedGraph:
    """Parse the line format (``vertices: A,B`` then ``edge: A B`` lines) or JSON."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
            return UndirectedGraph(doc["vertices"], doc.get("edges", []))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"malformed JSON graph: {exc}") from None
    vertices = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise InputError(f"expected 'vertices:' or 'edge:', got {raw.strip()!r}", line=lineno)
        if key == "vertices":
            if vertices is not None:
                raise InputError("second 'vertices:' line", line=lineno)
            vertices = [v.strip() for v in value.split(",") if v.strip()]
            try:
                UndirectedGraph(vertices)
            except InputError as exc:
                raise InputError(str(exc), line=lineno) from None
        elif key == "edge":
            ends = value.split()
            if len(ends) != 2:
                raise InputError(f"edge needs two endpoints, got {value.strip()!r}", line=lineno)
            if vertices is None:
                raise InputError("'edge:' before 'vertices:'", line=lineno)
            for end in ends:
                if end not in vertices:
                    raise InputError(f"edge uses unknown vertex label {end!r}", line=lineno)
            if ends[0] == ends[1]:
                raise InputError(f"self-loop on vertex {ends[0]!r}", line=lineno)
            if frozenset(ends) in seen:
                raise InputError(f"duplicate edge {ends[0]}-{ends[1]}", line=lineno)
            seen.add(frozenset(ends))
            edges.append(tuple(ends))
        else:
            raise InputError(f"unknown key {key!r}", line=lineno)
    if vertices is None:
        raise InputError("missing 'vertices:' line")
    return UndirectedGraph(vertices, edges)


def load_graph(path) -> UndirectedGraph:
    return parse_graph(_read_text(path))


def format_graph(g: UndirectedGraph) -> str:
    lines = ["vertices: " + ",".join(g.vertices)]
    lines += [f"edge: {x} {y}" for x, y in g.edge_list()]
    return "\n".join(lines) + "\n"


def graph_to_dict(g: UndirectedGraph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edge_list()]}


def parse_sets(text: str) -> list[list[str]]:
    """One comma-separated set per line, or JSON ``{"sets": [[...], ...]}`` / a bare list."""
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc}") from None
        sets = doc.get("sets") if isinstance(doc, dict) else doc
        if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
            raise InputError("JSON input must hold a list of label lists under 'sets'")
        return [[str(x) for x in s] for s in sets]
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        members = [x.strip() for x in line.strip("{}").split(",")]
        if not all(members):
            raise InputError(f"empty label in {raw.strip()!r}", line=lineno)
        out.append(members)
    return out


def load_sets(path) -> list[list[str]]:
    return parse_sets(_read_text(path))


def read_table_csv(path) -> ContingencyTable:
    """Long-form table: one column per variable, a final ``count`` column.

    Level order is order of first appearance; absent cells count 0.
    """
    rows = list(csv.reader(io.StringIO(_read_text(path))))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise InputError("table file is empty")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[-1].lower() != "count":
        raise InputError("header must name the variables and end with 'count'", line=1)
    labels = header[:-1]
    levels = [dict() for _ in labels]
    cells = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
        names = [c.strip() for c in row[:-1]]
        try:
            count = float(row[-1])
        except ValueError:
            raise InputError(f"count {row[-1]!r} is not a number", line=lineno) from None
        if count < 0 or not np.isfinite(count):
            raise InputError(f"count {count} must be finite and nonnegative", line=lineno)
        for lv, name in zip(levels, names):
            lv.setdefault(name, len(lv))
        cells.append((names, count, lineno))
    counts = np.zeros([len(lv) for lv in levels])
    seen = set()
    for names, count, lineno in cells:
        idx = tuple(lv[n] for lv, n in zip(levels, names))
        if idx in seen:
            raise InputError(f"duplicate cell {names}", line=lineno)
        seen.add(idx)
        counts[idx] = count
    return ContingencyTable([(name, list(lv)) for name, lv in zip(labels, levels)], counts)


def format_table_csv(t: ContingencyTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*t.labels, "count"])
    for names, count in t.cells():
        w.writerow([*names, repr(count) if count != int(count) else int(count)])
    return buf.getvalue()


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def read_data_csv(path) -> DataMatrix:
    """Numeric observations, one per row.

    Comma- or whitespace-separated; a header row is optional (columns default
    to ``V1 .. Vp``).  A trailing class column (named class/type/label/V8) is
    dropped with a warning.
    """
    text = _read_text(path)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("data file is empty")

    def split(line):
        return [c.strip() for c in line.split(",")] if "," in line else line.split()

    first = split(lines[0])
    if all(_is_number(c) for c in first):
        header = [f"V{i + 1}" for i in range(len(first))]
        body = lines
        offset = 1
    else:
        header = first
        body = lines[1:]
        offset = 2
    values = []
    for lineno, line in enumerate(body, start=offset):
        fields = split(line)
        if len(fields) != len(header):
            raise InputError(f"expected {len(header)} fields, got {len(fields)}", line=lineno)
        try:
            values.append([float(x) for x in fields])
        except ValueError:
            raise InputError(f"non-numeric value in {line.strip()!r}", line=lineno) from None
    arr = np.array(values, dtype=float).reshape(len(values), len(header))
    if len(header) > 1 and header[-1].lower() in CLASS_COLUMN_NAMES:
        warnings.warn(f"dropping class column {header[-1]!r}", stacklevel=2)
        header, arr = header[:-1], arr[:, :-1]
    return DataMatrix(tuple(header), arr)


__all__ = [
    "FIXTURE_ENV",
    "fixture_dir",
    "resolve_path",
    "parse_graph",
    "load_graph",
    "format_graph",
    "graph_to_dict",
    "parse_sets",
    "load_sets",
    "read_table_csv",
    "format_table_csv",
    "read_data_csv",
]
