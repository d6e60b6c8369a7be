"""JSON and DOT serialisation for graphs, matchings and factors.

Graph documents look like::

    {"vertices": [{"id": 0, "side": "L", "boundary": false}, ...],
     "edges": [{"id": 0, "u": 0, "v": 3}, ...]}

A matching document is a graph document plus ``denominator``, ``k`` and
``weights`` (edge id -> numerator).  A factor document carries ``k``, the
selected ``edges`` and optionally the ``unresolved`` interior vertices.  A
forest document is a graph (or matching) document plus ``stubs``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import StructuralError
from .generators import BoundariedForest
from .graph import BipartiteMultigraph, FactorSubgraph, FractionalMatching, Side
from .pipeline import Multigraph


def graph_to_dict(G: BipartiteMultigraph) -> dict[str, Any]:
    verts = []
    for v in G.vertices:
        item: dict[str, Any] = {"id": v, "side": G.sides[v].value, "boundary": v in G.boundary}
        if G.labels is not None and v in G.labels:
            item["label"] = _jsonable(G.labels[v])
        verts.append(item)
    edges = [{"id": e, "u": u, "v": w} for e, (u, w) in sorted(G.edges.items())]
    return {"vertices": verts, "edges": edges}


def graph_from_dict(doc: dict[str, Any]) -> BipartiteMultigraph:
    try:
        sides: dict[int, Side] = {}
        boundary = []
        labels: dict[int, Any] = {}
        for item in doc["vertices"]:
            vid = int(item["id"])
            if vid in sides:
                raise StructuralError(f"duplicate vertex id {vid}")
            sides[vid] = Side(item["side"])
            if item.get("boundary", False):
                boundary.append(vid)
            if "label" in item:
                labels[vid] = _hashable(item["label"])
        edges: dict[int, tuple[int, int]] = {}
        for item in doc["edges"]:
            eid = int(item["id"])
            if eid in edges:
                raise StructuralError(f"duplicate edge id {eid}")
            edges[eid] = (int(item["u"]), int(item["v"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StructuralError):
            raise
        raise StructuralError(f"malformed graph document: {exc}") from exc
    return BipartiteMultigraph(sides, edges, boundary, labels or None)


def matching_to_dict(f: FractionalMatching) -> dict[str, Any]:
    doc = graph_to_dict(f.graph)
    doc["denominator"] = f.denominator
    doc["k"] = f.k
    doc["weights"] = {str(e): w for e, w in sorted(f.weights.items())}
    return doc


def matching_from_dict(doc: dict[str, Any], graph: BipartiteMultigraph | None = None) -> FractionalMatching:
    G = graph if graph is not None else graph_from_dict(doc)
    try:
        weights = {int(e): int(w) for e, w in doc["weights"].items()}
        return FractionalMatching(G, int(doc["denominator"]), weights, int(doc.get("k", 1)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StructuralError):
            raise
        raise StructuralError(f"malformed matching document: {exc}") from exc


def factor_to_dict(H: FactorSubgraph) -> dict[str, Any]:
    return {"k": H.k, "edges": sorted(H.edges), "unresolved": sorted(H.unresolved)}


def factor_from_dict(doc: dict[str, Any], graph: BipartiteMultigraph) -> FactorSubgraph:
    try:
        edges = frozenset(int(e) for e in doc["edges"])
        k = int(doc["k"])
        unresolved = frozenset(int(v) for v in doc.get("unresolved", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed factor document: {exc}") from exc
    missing = edges - graph.edges.keys()
    if missing:
        raise StructuralError(f"factor mentions unknown edges {sorted(missing)[:5]}")
    return FactorSubgraph(graph, edges, k, unresolved)


def forest_to_dict(F: BoundariedForest) -> dict[str, Any]:
    doc = matching_to_dict(F.matching) if F.matching is not None else graph_to_dict(F.graph)
    doc["stubs"] = sorted(F.stubs)
    if F.origin is not None:
        doc["origin"] = {str(v): o for v, o in sorted(F.origin.items())}
    return doc


def forest_from_dict(doc: dict[str, Any]) -> BoundariedForest:
    G = graph_from_dict(doc)
    m = matching_from_dict(doc, G) if "weights" in doc else None
    try:
        stubs = frozenset(int(v) for v in doc.get("stubs", ()))
        origin = {int(v): int(o) for v, o in doc["origin"].items()} if "origin" in doc else None
    except (TypeError, ValueError, AttributeError) as exc:
        raise StructuralError(f"malformed forest document: {exc}") from exc
    if not stubs <= G.boundary:
        raise StructuralError("stubs must be flagged as boundary vertices")
    F = BoundariedForest(G, stubs, m, origin)
    F.check()
    return F


def multigraph_to_dict(G: Multigraph) -> dict[str, Any]:
    return {"n": G.n, "edges": [{"id": e, "u": a, "v": b} for e, (a, b) in sorted(G.edges.items())]}


def multigraph_from_dict(doc: dict[str, Any]) -> Multigraph:
    try:
        n = int(doc["n"])
        edges = {int(x["id"]): (int(x["u"]), int(x["v"])) for x in doc["edges"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"malformed multigraph document: {exc}") from exc
    if any(not (0 <= a < n and 0 <= b < n) for a, b in edges.values()):
        raise StructuralError("multigraph edge mentions a vertex outside range(n)")
    return Multigraph(n, edges)


def to_dot(G: BipartiteMultigraph, f: FractionalMatching | None = None, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in G.vertices:
        shape = "box" if G.sides[v] is Side.LEFT else "ellipse"
        style = ', style="dashed"' if v in G.boundary else ""
        lines.append(f'  {v} [shape={shape}{style}];')
    for e, (u, w) in sorted(G.edges.items()):
        attrs = f'label="{f.weights[e]}/{f.denominator}"' if f is not None else f'label="e{e}"'
        lines.append(f"  {u} -- {w} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path}: not valid JSON ({exc})") from exc


def load_graph(path: str | Path) -> BipartiteMultigraph:
    return graph_from_dict(read_json(path))


def _jsonable(label: Any) -> Any:
    if isinstance(label, tuple):
        return [_jsonable(x) for x in label]
    if isinstance(label, Side):
        return label.value
    return label


def _hashable(label: Any) -> Any:
    if isinstance(label, list):
        return tuple(_hashable(x) for x in label)
    return label
