"""JSON interchange for graphs, colourings, separations and clique-cycle metadata.

Schemas::

    graph      {"n": int, "edges": [[u, v], ...]}
    colouring  {"r": int, "colours": [c_0, ..., c_{m-1}]}
    separation {"r": int, "parts": [[...], ...], "separator": [...]}
    clique-cycle metadata {"r", "k", "x", "cycle", "cliques", "b"}

Parse errors carry a JSON-path style location such as ``$.edges[3][1]``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import DiscLabError, ParseError
from .generators import CliqueCycleMeta
from .graph import EdgeColouring, Graph
from .separation import BalancedSeparation


def _int(value: Any, loc: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected integer, got {type(value).__name__}", loc)
    if minimum is not None and value < minimum:
        raise ParseError(f"expected integer >= {minimum}, got {value}", loc)
    return value


def _list(value: Any, loc: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"expected array, got {type(value).__name__}", loc)
    return value


def _obj(value: Any, loc: str, keys: tuple[str, ...]) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"expected object, got {type(value).__name__}", loc)
    for key in keys:
        if key not in value:
            raise ParseError(f"missing key {key!r}", loc)
    return value


def _int_list(value: Any, loc: str, minimum: int | None = None) -> list[int]:
    return [_int(v, f"{loc}[{i}]", minimum) for i, v in enumerate(_list(value, loc))]


# -- graphs -------------------------------------------------------------------


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges]}


def graph_from_json(data: Any) -> Graph:
    obj = _obj(data, "$", ("n", "edges"))
    n = _int(obj["n"], "$.n", 0)
    edges = []
    for i, e in enumerate(_list(obj["edges"], "$.edges")):
        loc = f"$.edges[{i}]"
        pair = _list(e, loc)
        if len(pair) != 2:
            raise ParseError(f"edge must have 2 endpoints, got {len(pair)}", loc)
        u, v = (_int(p, f"{loc}[{j}]", 0) for j, p in enumerate(pair))
        edges.append((u, v))
    try:
        return Graph(n, edges)
    except DiscLabError as exc:
        raise ParseError(str(exc), "$.edges") from exc


# -- colourings ---------------------------------------------------------------


def colouring_to_json(f: EdgeColouring) -> dict:
    return {"r": f.r, "colours": list(f.colours)}


def colouring_from_json(data: Any, g: Graph | None = None) -> EdgeColouring:
    obj = _obj(data, "$", ("r", "colours"))
    r = _int(obj["r"], "$.r", 2)
    colours = _int_list(obj["colours"], "$.colours")
    for i, c in enumerate(colours):
        if not 1 <= c <= r:
            raise ParseError(f"colour {c} outside 1..{r}", f"$.colours[{i}]")
    if g is not None and len(colours) != g.m:
        raise ParseError(f"{len(colours)} colours for a graph with {g.m} edges", "$.colours")
    return EdgeColouring(r, colours)


# -- separations --------------------------------------------------------------


def separation_to_json(sep: BalancedSeparation) -> dict:
    return {
        "r": sep.r,
        "parts": [sorted(p) for p in sep.parts],
        "separator": sorted(sep.separator),
    }


def separation_from_json(data: Any) -> BalancedSeparation:
    obj = _obj(data, "$", ("r", "parts", "separator"))
    r = _int(obj["r"], "$.r", 1)
    parts_raw = _list(obj["parts"], "$.parts")
    parts = [frozenset(_int_list(p, f"$.parts[{i}]", 0)) for i, p in enumerate(parts_raw)]
    if len(parts) != r:
        raise ParseError(f"expected {r} parts, got {len(parts)}", "$.parts")
    sep = frozenset(_int_list(obj["separator"], "$.separator", 0))
    return BalancedSeparation(r, tuple(parts), sep)


# -- clique-cycle metadata ----------------------------------------------------


def meta_to_json(meta: CliqueCycleMeta) -> dict:
    return {
        "r": meta.r,
        "k": meta.k,
        "x": list(meta.x),
        "cycle": list(meta.cycle),
        "cliques": [list(a) for a in meta.cliques],
        "b": list(meta.b),
    }


def meta_from_json(data: Any) -> CliqueCycleMeta:
    obj = _obj(data, "$", ("r", "k", "x", "cycle", "cliques", "b"))
    cliques = tuple(
        tuple(_int_list(a, f"$.cliques[{i}]", 0))
        for i, a in enumerate(_list(obj["cliques"], "$.cliques"))
    )
    return CliqueCycleMeta(
        _int(obj["r"], "$.r", 2),
        _int(obj["k"], "$.k", 1),
        tuple(_int_list(obj["x"], "$.x", 0)),
        tuple(_int_list(obj["cycle"], "$.cycle", 0)),
        cliques,
        tuple(_int_list(obj["b"], "$.b", 0)),
    )


# -- files ----------------------------------------------------------------------


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(dumps(data))


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def load_graph(path: str | Path) -> Graph:
    return graph_from_json(read_json(path))


def load_colouring(path: str | Path, g: Graph | None = None) -> EdgeColouring:
    return colouring_from_json(read_json(path), g)


def detect_kind(data: Any) -> str:
    if isinstance(data, dict):
        keys = set(data)
        if {"cliques", "cycle"} <= keys:
            return "clique-cycle-meta"
        if {"n", "edges"} <= keys:
            return "graph"
        if {"r", "colours"} <= keys:
            return "colouring"
        if {"parts", "separator"} <= keys:
            return "separation"
    raise ParseError("unrecognised document (not a graph, colouring, separation or metadata)")


_LOADERS = {
    "graph": (graph_from_json, graph_to_json),
    "colouring": (colouring_from_json, colouring_to_json),
    "separation": (separation_from_json, separation_to_json),
    "clique-cycle-meta": (meta_from_json, meta_to_json),
}


def io_roundtrip(path: str | Path):
    """Parse ``path``, re-serialise, re-parse and check equality; returns the object."""
    data = read_json(path)
    kind = detect_kind(data)
    load, dump = _LOADERS[kind]
    obj = load(data)
    again = load(json.loads(dumps(dump(obj))))
    if again != obj:
        raise ParseError(f"{kind} does not survive a serialisation round trip")
    return obj
