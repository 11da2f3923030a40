"""Graph file formats.

JSON: ``{"n": 3, "edges": [[0, 1, 0], [1, 2, 1], [0, 2, 2]]}``.
Text: a header line ``n <count>`` followed by one ``u v color`` line per edge.
Blank lines and lines starting with ``#`` are ignored in text input.
"""

from __future__ import annotations

import json

from .core import ColoredGraph, GraphError, build_graph


class GraphFormatError(ValueError):
    pass


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"byte {exc.start}: input is not UTF-8") from None
    return data


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_graph(data: bytes | str, format: str = "json") -> ColoredGraph:
    text = _decode(data)
    if format == "json":
        return _parse_json(text)
    if format == "text":
        return _parse_text(text)
    raise GraphFormatError(f"unknown graph format {format!r}")


def _parse_json(text: str) -> ColoredGraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise GraphFormatError('expected an object with keys "n" and "edges"')
    n, edges = obj["n"], obj["edges"]
    if not _is_int(n) or n < 0:
        raise GraphFormatError(f'"n" must be a non-negative integer, got {n!r}')
    if not isinstance(edges, list):
        raise GraphFormatError('"edges" must be a list')
    triples = []
    for i, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 3 and all(_is_int(x) for x in e)):
            raise GraphFormatError(f"edges[{i}]: expected [u, v, color] integers, got {e!r}")
        triples.append(tuple(e))
    try:
        return build_graph(n, triples)
    except GraphError as exc:
        raise GraphFormatError(str(exc).replace("edge #", "edges[", 1).replace(":", "]:", 1)) from None


def _parse_text(text: str) -> ColoredGraph:
    n = None
    triples = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphFormatError(f"line {lineno}: expected header 'n <count>'")
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: vertex count is not an integer") from None
            if n < 0:
                raise GraphFormatError(f"line {lineno}: vertex count must be non-negative")
            continue
        if len(parts) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'u v color'")
        try:
            u, v, c = (int(p) for p in parts)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field") from None
        triples.append((u, v, c))
        lines.append(lineno)
    if n is None:
        raise GraphFormatError("missing header 'n <count>'")
    try:
        return build_graph(n, triples)
    except GraphError as exc:
        msg = str(exc)
        if msg.startswith("edge #"):
            idx = int(msg[len("edge #") : msg.index(":")])
            msg = f"line {lines[idx]}" + msg[msg.index(":") :]
        raise GraphFormatError(msg) from None


def graph_to_obj(G: ColoredGraph) -> dict:
    return {"n": G.n, "edges": [[u, v, c] for u, v, c in G.edges]}


def serialize_graph(G: ColoredGraph, format: str = "json") -> bytes:
    """Canonical bytes: edges with ``u < v`` in lexicographic order."""
    if format == "json":
        return json.dumps(graph_to_obj(G), separators=(",", ":")).encode("utf-8")
    if format == "text":
        lines = [f"n {G.n}"] + [f"{u} {v} {c}" for u, v, c in G.edges]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise GraphFormatError(f"unknown graph format {format!r}")


def read_graph(path: str) -> ColoredGraph:
    fmt = "text" if path.endswith((".txt", ".edges")) else "json"
    with open(path, "rb") as fh:
        return parse_graph(fh.read(), fmt)


def write_graph(G: ColoredGraph, path: str) -> None:
    fmt = "text" if path.endswith((".txt", ".edges")) else "json"
    with open(path, "wb") as fh:
        fh.write(serialize_graph(G, fmt))
