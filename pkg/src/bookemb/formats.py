"""File formats: graphs, roles sidecars, constraint lists, certificates,
DIMACS and scenario reports.

All JSON outputs use one canonical byte form (sorted keys, no spaces, one
trailing LF) so identical values always serialize to identical bytes. Parsers
reject malformed input with a :class:`ParseError` carrying line and column;
they never repair (duplicate keys or edges are errors, not merged).
"""

from __future__ import annotations

import enum
import io
import json
import re
from pathlib import Path
from typing import Any, BinaryIO, Mapping

import numpy as np

from .constraints import (
    Arc,
    Before,
    CondColorFrom,
    ConstraintSet,
    EdgeColorIs,
    EdgeColorNot,
    ExitColored,
    InOpenInterval,
    Interval,
    OutsideClosedInterval,
)
from .embedding import BookEmbedding
from .graph import CompactGraph, Graph, GraphError
from .satenc import CnfInstance, DimacsError, emit_dimacs, parse_dimacs


class FileKind(str, enum.Enum):
    GRAPH_JSON = "graph-json"
    GRAPH_TEXT = "graph-text"
    ROLES = "roles"
    CONSTRAINTS = "constraints"
    CERTIFICATE = "certificate"
    DIMACS = "dimacs"
    REPORT = "report"


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {msg}")
        self.msg = msg
        self.line = line
        self.column = column


SUFFIXES = {
    ".graph.json": FileKind.GRAPH_JSON,
    ".roles.json": FileKind.ROLES,
    ".cons.json": FileKind.CONSTRAINTS,
    ".cert.json": FileKind.CERTIFICATE,
    ".report.json": FileKind.REPORT,
    ".graph.txt": FileKind.GRAPH_TEXT,
    ".cnf": FileKind.DIMACS,
}


def sniff(path: str | Path, head: bytes = b"") -> FileKind:
    """File kind from the documented suffixes, else from the two documented
    text headers (``bookemb `` and DIMACS ``c``/``p cnf``)."""
    name = str(path)
    for suf, kind in SUFFIXES.items():
        if name.endswith(suf):
            return kind
    if head.startswith(b"bookemb "):
        return FileKind.GRAPH_TEXT
    if head.startswith(b"p cnf") or head.startswith(b"c map"):
        return FileKind.DIMACS
    if name.endswith(".json"):
        return FileKind.GRAPH_JSON
    raise ParseError(f"cannot determine file kind of {name}")


# -- JSON plumbing ------------------------------------------------------------


def canonical_json(value: Any) -> bytes:
    return (json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n").encode()


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _DuplicateKey(Exception):
    def __init__(self, key: str) -> None:
        self.key = key


def _no_dupes(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise _DuplicateKey(k)
        out[k] = v
    return out


def _load_json(data: bytes | str) -> Any:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        return json.loads(text, object_pairs_hook=_no_dupes)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except _DuplicateKey as exc:
        needle = json.dumps(exc.key)
        first = text.find(needle)
        second = text.find(needle, first + 1)
        line, col = _position(text, second if second >= 0 else 0)
        raise ParseError(f"duplicate key {exc.key!r}", line, col) from None


def _need(obj: Any, key: str, typ, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    val = obj[key]
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ParseError(f"{where}: field {key!r} must be an integer")
    if typ is not int and not isinstance(val, typ):
        raise ParseError(f"{where}: field {key!r} has wrong type")
    return val


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected integer, got {x!r}")
    return x


def _extra_keys(obj: dict, allowed: set[str], where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ParseError(f"{where}: unknown field(s) {extra}")


# -- graphs -------------------------------------------------------------------


def graph_to_obj(g: Graph | CompactGraph) -> dict:
    edges = g.edge_array().tolist()
    tris = [list(map(int, t)) for t in g.triangle_array().tolist()]
    return {"n": int(g.n), "edges": edges, "roles": dict(g.roles), "triangles": tris}


def serialize_graph_json(g: Graph | CompactGraph) -> bytes:
    return canonical_json(graph_to_obj(g))


def parse_graph_json(data: bytes | str) -> Graph:
    obj = _load_json(data)
    if not isinstance(obj, dict):
        raise ParseError("graph file must be a JSON object")
    _extra_keys(obj, {"n", "edges", "roles", "triangles"}, "graph")
    n = _need(obj, "n", int, "graph")
    if n < 0:
        raise ParseError("graph: n must be non-negative")
    g = Graph(n)
    try:
        for i, e in enumerate(_need(obj, "edges", list, "graph")):
            if not isinstance(e, list) or len(e) != 2:
                raise ParseError(f"edge #{i} must be a pair")
            u, v = _int(e[0], f"edge #{i}"), _int(e[1], f"edge #{i}")
            if u >= v:
                raise ParseError(f"edge #{i} [{u},{v}] must have u < v")
            g.add_edge(u, v)
        for role, v in sorted(obj.get("roles", {}).items()):
            g.set_role(role, _int(v, f"role {role!r}"))
        for i, t in enumerate(obj.get("triangles", [])):
            if not isinstance(t, list) or len(t) != 3:
                raise ParseError(f"triangle #{i} must have three nodes")
            g.register_triangle(tuple(_int(x, f"triangle #{i}") for x in t))
    except GraphError as exc:
        raise ParseError(str(exc)) from None
    return g


def write_graph_text(g: Graph | CompactGraph, out: BinaryIO, chunk: int = 1 << 20) -> None:
    """Stream the text form to ``out``; memory stays bounded by ``chunk``."""
    e = g.edge_array()
    out.write(f"bookemb {int(g.n)} {len(e)}\n".encode())
    line = "e {} {}".format
    for start in range(0, len(e), chunk):
        part = e[start : start + chunk]
        out.write(("\n".join(map(line, part[:, 0].tolist(), part[:, 1].tolist())) + "\n").encode())


def serialize_graph_text(g: Graph | CompactGraph) -> bytes:
    buf = io.BytesIO()
    write_graph_text(g, buf)
    return buf.getvalue()


_TEXT_EDGE = re.compile(rb"e (0|[1-9][0-9]*) (0|[1-9][0-9]*)")


def parse_graph_text(data: bytes | str) -> CompactGraph:
    raw = data.encode() if isinstance(data, str) else data
    if not raw.endswith(b"\n"):
        raise ParseError("file must end with a newline", raw.count(b"\n") + 1)
    lines = raw[:-1].split(b"\n")
    m0 = re.fullmatch(rb"bookemb (0|[1-9][0-9]*) (0|[1-9][0-9]*)", lines[0])
    if not m0:
        raise ParseError("expected header 'bookemb <n> <m>'", 1)
    n, m = int(m0.group(1)), int(m0.group(2))
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header announces {m} edges, found {len(body)}", len(lines))
    edges = np.empty((m, 2), dtype=np.int64)
    for i, ln in enumerate(body):
        mt = _TEXT_EDGE.fullmatch(ln)
        if not mt:
            raise ParseError("expected 'e <u> <v>' with single spaces", i + 2)
        edges[i, 0] = int(mt.group(1))
        edges[i, 1] = int(mt.group(2))
    if m:
        bad = np.nonzero((edges[:, 0] >= edges[:, 1]) | (edges[:, 1] >= n))[0]
        if len(bad):
            i = int(bad[0])
            raise ParseError(f"edge {edges[i].tolist()} must satisfy u < v < n", i + 2)
        keys = edges[:, 0] * n + edges[:, 1]
        order = np.argsort(keys, kind="stable")
        dup = np.nonzero(keys[order][1:] == keys[order][:-1])[0]
        if len(dup):
            i = int(max(order[dup[0]], order[dup[0] + 1]))
            raise ParseError(f"duplicate edge {edges[i].tolist()}", i + 2)
    return CompactGraph(n, edges)


def parse_roles(data: bytes | str) -> dict[str, int]:
    obj = _load_json(data)
    if not isinstance(obj, dict):
        raise ParseError("roles file must be a JSON object")
    return {k: _int(v, f"role {k!r}") for k, v in obj.items()}


def serialize_roles(roles: Mapping[str, int]) -> bytes:
    return canonical_json({k: int(v) for k, v in roles.items()})


# -- constraints --------------------------------------------------------------


def _ref_out(x, names: Mapping[int, str] | None):
    if isinstance(x, str):
        return "marker:" + x
    if names and x in names:
        return "role:" + names[x]
    return f"id:{int(x)}"


def _ref_in(s: Any, roles: Mapping[str, int], where: str, allow_marker: bool = True):
    if not isinstance(s, str) or ":" not in s:
        raise ParseError(f"{where}: node reference must look like 'id:<n>', 'role:<name>' or 'marker:<name>', got {s!r}")
    tag, val = s.split(":", 1)
    if tag == "id":
        if not re.fullmatch(r"0|[1-9][0-9]*", val):
            raise ParseError(f"{where}: bad node id {val!r}")
        return int(val)
    if tag == "role":
        if val not in roles:
            raise ParseError(f"{where}: unknown role {val!r}")
        return roles[val]
    if tag == "marker" and allow_marker and val:
        return val
    raise ParseError(f"{where}: bad reference {s!r}")


def _arc_out(arc: Arc, names) -> dict:
    return {
        "a": _ref_out(arc.a, names),
        "b": _ref_out(arc.b, names),
        "arc_excluding": None if arc.excluding is None else _ref_out(arc.excluding, names),
    }


def _arc_in(obj: Any, roles, where: str, extra=frozenset()) -> Arc:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: arc must be an object")
    _extra_keys(obj, {"a", "b", "arc_excluding"} | set(extra), where)
    ex = obj.get("arc_excluding")
    try:
        return Arc(
            _ref_in(_need(obj, "a", str, where), roles, where),
            _ref_in(_need(obj, "b", str, where), roles, where),
            None if ex is None else _ref_in(ex, roles, where),
        )
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: {exc}") from None


def constraint_to_obj(c, names: Mapping[int, str] | None = None) -> dict:
    r = lambda x: _ref_out(x, names)  # noqa: E731
    if isinstance(c, Before):
        return {"type": "Before", "x": r(c.x), "y": r(c.y), "anchor": r(c.anchor)}
    if isinstance(c, (InOpenInterval, OutsideClosedInterval)):
        return {"type": type(c).__name__, "x": r(c.x), "arc": _arc_out(c.arc, names)}
    if isinstance(c, (EdgeColorIs, EdgeColorNot)):
        return {"type": type(c).__name__, "edge": [r(c.edge[0]), r(c.edge[1])], "color": c.color}
    if isinstance(c, CondColorFrom):
        iv = _arc_out(c.interval.arc, names)
        iv["closed"] = list(c.interval.closed)
        return {"type": "CondColorFrom", "source": r(c.source), "interval": iv, "color": c.color}
    if isinstance(c, ExitColored):
        ex = [r(v) for v in sorted(c.exempt)]
        return {"type": "ExitColored", "arc": _arc_out(c.arc, names), "exempt": ex, "color": c.color}
    raise TypeError(f"not a constraint: {c!r}")


def serialize_constraints(cs: ConstraintSet, names: Mapping[int, str] | None = None) -> bytes:
    return canonical_json([constraint_to_obj(c, names) for c in cs])


def parse_constraints(data: bytes | str, roles: Mapping[str, int] | None = None) -> ConstraintSet:
    obj = _load_json(data)
    roles = roles or {}
    if not isinstance(obj, list):
        raise ParseError("constraint file must be a JSON list")
    out = []
    for i, rec in enumerate(obj):
        where = f"constraint #{i}"
        t = _need(rec, "type", str, where)
        node = lambda key: _ref_in(_need(rec, key, str, where), roles, where, allow_marker=False)  # noqa: E731
        item = lambda key: _ref_in(_need(rec, key, str, where), roles, where)  # noqa: E731
        color = lambda: _need(rec, "color", int, where)  # noqa: E731
        if t == "Before":
            _extra_keys(rec, {"type", "x", "y", "anchor"}, where)
            out.append(Before(item("x"), item("y"), item("anchor")))
        elif t in ("InOpenInterval", "OutsideClosedInterval"):
            _extra_keys(rec, {"type", "x", "arc"}, where)
            cls = InOpenInterval if t == "InOpenInterval" else OutsideClosedInterval
            out.append(cls(item("x"), _arc_in(_need(rec, "arc", dict, where), roles, where)))
        elif t in ("EdgeColorIs", "EdgeColorNot"):
            _extra_keys(rec, {"type", "edge", "color"}, where)
            e = _need(rec, "edge", list, where)
            if len(e) != 2:
                raise ParseError(f"{where}: edge must be a pair")
            pair = tuple(_ref_in(x, roles, where, allow_marker=False) for x in e)
            cls = EdgeColorIs if t == "EdgeColorIs" else EdgeColorNot
            out.append(cls(pair, color()))
        elif t == "CondColorFrom":
            _extra_keys(rec, {"type", "source", "interval", "color"}, where)
            iv = _need(rec, "interval", dict, where)
            closed = iv.get("closed", [False, False])
            if not (isinstance(closed, list) and len(closed) == 2 and all(isinstance(b, bool) for b in closed)):
                raise ParseError(f"{where}: 'closed' must be two booleans")
            arc = _arc_in(iv, roles, where, extra={"closed"})
            out.append(CondColorFrom(node("source"), Interval(arc, tuple(closed)), color()))
        elif t == "ExitColored":
            _extra_keys(rec, {"type", "arc", "exempt", "color"}, where)
            ex = frozenset(_ref_in(x, roles, where, allow_marker=False) for x in _need(rec, "exempt", list, where))
            out.append(ExitColored(_arc_in(_need(rec, "arc", dict, where), roles, where), ex, color()))
        else:
            raise ParseError(f"{where}: unknown constraint type {t!r}")
    return ConstraintSet(out)


# -- certificates -------------------------------------------------------------

_KEY = re.compile(r"(0|[1-9][0-9]*)-(0|[1-9][0-9]*)")


def certificate_to_obj(emb: BookEmbedding) -> dict:
    obj: dict[str, Any] = {
        "k": emb.k,
        "order": list(emb.order),
        "pages": {f"{u}-{v}": c for (u, v), c in sorted(emb.pages.items())},
    }
    if emb.markers:
        obj["markers"] = {name: float(p) for name, p in sorted(emb.markers.items())}
    return obj


def serialize_certificate(emb: BookEmbedding) -> bytes:
    return canonical_json(certificate_to_obj(emb))


def parse_certificate(data: bytes | str) -> BookEmbedding:
    obj = _load_json(data)
    if not isinstance(obj, dict):
        raise ParseError("certificate must be a JSON object")
    _extra_keys(obj, {"k", "order", "pages", "markers"}, "certificate")
    k = _need(obj, "k", int, "certificate")
    order = [_int(v, "order") for v in _need(obj, "order", list, "certificate")]
    pages = {}
    for key, c in _need(obj, "pages", dict, "certificate").items():
        mt = _KEY.fullmatch(key)
        if not mt:
            raise ParseError(f"page key {key!r} must look like 'u-v'")
        u, v = int(mt.group(1)), int(mt.group(2))
        if u >= v:
            raise ParseError(f"page key {key!r} must have u < v")
        pages[(u, v)] = _int(c, f"page of {key}")
    markers = {}
    for name, p in obj.get("markers", {}).items():
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise ParseError(f"marker {name!r} position must be a number")
        markers[name] = float(p)
    try:
        return BookEmbedding.from_order(order, pages, k, markers)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# -- DIMACS and reports -------------------------------------------------------


def parse_dimacs_bytes(data: bytes | str) -> CnfInstance:
    text = data.decode() if isinstance(data, bytes) else data
    try:
        return parse_dimacs(text)
    except DimacsError as exc:
        raise ParseError(str(exc).split(": ", 1)[1], exc.line, exc.column) from None


REPORT_FIELDS = {"scenario", "verdict", "nodes_expanded"}
REPORT_OPTIONAL = {"wall_ms", "witness", "expected", "exhausted", "outcome", "fingerprint", "markers", "dimacs"}


def parse_report(data: bytes | str) -> dict:
    obj = _load_json(data)
    if not isinstance(obj, dict):
        raise ParseError("report must be a JSON object")
    for key in sorted(REPORT_FIELDS):
        if key not in obj:
            raise ParseError(f"report: missing field {key!r}")
    _extra_keys(obj, REPORT_FIELDS | REPORT_OPTIONAL, "report")
    if obj.get("witness") is not None:
        parse_certificate(json.dumps(obj["witness"]))
    return obj


def serialize_report(report: Mapping[str, Any]) -> bytes:
    return canonical_json(dict(report))


_PARSERS = {
    FileKind.GRAPH_JSON: parse_graph_json,
    FileKind.GRAPH_TEXT: parse_graph_text,
    FileKind.ROLES: parse_roles,
    FileKind.CONSTRAINTS: parse_constraints,
    FileKind.CERTIFICATE: parse_certificate,
    FileKind.DIMACS: parse_dimacs_bytes,
    FileKind.REPORT: parse_report,
}

_SERIALIZERS = {
    FileKind.GRAPH_JSON: serialize_graph_json,
    FileKind.GRAPH_TEXT: serialize_graph_text,
    FileKind.ROLES: serialize_roles,
    FileKind.CONSTRAINTS: serialize_constraints,
    FileKind.CERTIFICATE: serialize_certificate,
    FileKind.DIMACS: lambda cnf: emit_dimacs(cnf).encode(),
    FileKind.REPORT: serialize_report,
}


def parse(kind: FileKind | str, data: bytes | str):
    return _PARSERS[FileKind(kind)](data)


def serialize(kind: FileKind | str, value) -> bytes:
    return _SERIALIZERS[FileKind(kind)](value)


def load_graph(path: str | Path) -> Graph | CompactGraph:
    raw = Path(path).read_bytes()
    kind = sniff(path, raw[:16])
    if kind not in (FileKind.GRAPH_JSON, FileKind.GRAPH_TEXT):
        raise ParseError(f"{path} is not a graph file")
    return parse(kind, raw)
