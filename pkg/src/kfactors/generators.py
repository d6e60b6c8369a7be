"""Test-graph sources: random regular bipartite multigraphs, lattice shift
oracles with finite windows, and boundaried forests.

An oracle graph lives on ``Z^m x {L, R}`` with ``(p, L) ~ (p + s_i, R)`` for
each shift ``s_i``.  It is never materialised; :func:`window` extracts the
induced subgraph on a box and flags the vertices that have neighbours
outside it.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping, Sequence

from .errors import StructuralError
from .graph import BipartiteMultigraph, FractionalMatching, Side

Point = tuple[int, ...]


def gen_random_regular_bipartite(n: int, d: int, seed: int) -> BipartiteMultigraph:
    """Union of ``d`` independent uniform perfect matchings on ``n + n`` vertices."""
    if n < 1 or d < 0:
        raise StructuralError("need n >= 1 and d >= 0")
    rng = random.Random(seed)
    pairs = []
    for _ in range(d):
        perm = list(range(n))
        rng.shuffle(perm)
        pairs.extend(enumerate(perm))
    return BipartiteMultigraph.from_pairs(n, n, pairs)


def complete_bipartite(n: int) -> BipartiteMultigraph:
    return BipartiteMultigraph.from_pairs(n, n, [(i, j) for i in range(n) for j in range(n)])


def even_cycle(length: int, multiplicity: int = 1) -> BipartiteMultigraph:
    """Cycle on ``length`` (even) vertices alternating sides; each edge repeated
    ``multiplicity`` times, copy by copy."""
    if length < 2 or length % 2:
        raise StructuralError("cycle length must be even and >= 2")
    half = length // 2
    ring = []
    for i in range(half):
        ring.append((i, i))
        ring.append((i, (i - 1) % half))
    if half == 1:
        ring = [(0, 0), (0, 0)]
    pairs = [p for _ in range(multiplicity) for p in ring]
    return BipartiteMultigraph.from_pairs(half, half, pairs)


@dataclass(frozen=True)
class OracleGraph:
    m: int
    shifts: tuple[Point, ...]

    @property
    def degree(self) -> int:
        return len(self.shifts)

    def neighbors(self, point: Point, side: Side | str) -> list[tuple[Point, Side]]:
        if Side(side) is Side.LEFT:
            return [(_add(point, s), Side.RIGHT) for s in self.shifts]
        return [(_sub(point, s), Side.LEFT) for s in self.shifts]

    def to_dict(self) -> dict[str, Any]:
        return {"family": "oracle", "m": self.m, "shifts": [list(s) for s in self.shifts]}


def gen_oracle(m: int, shifts: Sequence[Sequence[int]]) -> OracleGraph:
    if not shifts:
        raise StructuralError("an oracle needs at least one shift")
    norm = tuple(tuple(int(x) for x in s) for s in shifts)
    if any(len(s) != m for s in norm):
        raise StructuralError(f"every shift must have {m} coordinates")
    return OracleGraph(m, norm)


LINE_ORACLE = OracleGraph(1, ((0,), (1,)))
HEX_ORACLE = OracleGraph(2, ((0, 0), (1, 0), (0, 1)))
SQUARE4_ORACLE = OracleGraph(2, ((0, 0), (1, 0), (0, 1), (1, 1)))


@dataclass(frozen=True)
class Window:
    graph: BipartiteMultigraph
    oracle: OracleGraph
    center: Point
    radius: int
    edge_labels: Mapping[int, tuple[Point, int]] = field(repr=False)

    @property
    def boundary(self) -> frozenset[int]:
        return self.graph.boundary

    def vertex_of(self) -> dict[Hashable, int]:
        assert self.graph.labels is not None
        return {lab: v for v, lab in self.graph.labels.items()}


def label_rank_key(seed: int, label: Hashable) -> bytes:
    """Seeded pseudo-random sort key for a lattice label.

    Sorting by this key gives every window the same relative order on the
    labels it shares with another window, as a random labelling of the
    infinite graph would.
    """
    return hashlib.blake2b(repr((seed, label)).encode(), digest_size=8).digest()


def window(O: OracleGraph, center: Sequence[int], radius: int, seed: int | None = None) -> Window:
    """Induced subgraph on the box of L-infinity radius ``radius`` around ``center``.

    Without ``seed`` vertex and edge ids follow lexicographic label order.
    With a seed they follow :func:`label_rank_key`, so tie-breaking by id is
    consistent between overlapping windows but carries no lattice structure.
    """
    if radius < 0:
        raise StructuralError("radius must be >= 0")
    center = tuple(int(c) for c in center)
    ranges = [range(c - radius, c + radius + 1) for c in center]
    points = list(itertools.product(*ranges))
    inside = set(points)
    labels: dict[int, tuple[Point, str]] = {}
    ids: dict[tuple[Point, str], int] = {}
    for p in points:
        for side in ("L", "R"):
            ids[(p, side)] = len(labels)
            labels[ids[(p, side)]] = (p, side)
    sides = {v: Side(lab[1]) for v, lab in labels.items()}
    edges: dict[int, tuple[int, int]] = {}
    edge_labels: dict[int, tuple[Point, int]] = {}
    boundary = set()
    for p in points:
        for i, s in enumerate(O.shifts):
            q = _add(p, s)
            if q in inside:
                eid = len(edges)
                edges[eid] = (ids[(p, "L")], ids[(q, "R")])
                edge_labels[eid] = (p, i)
            else:
                boundary.add(ids[(p, "L")])
            if _sub(p, s) not in inside:
                boundary.add(ids[(p, "R")])
    if seed is not None:
        # renumber vertices and edges by their seeded rank
        vorder = sorted(labels, key=lambda v: label_rank_key(seed, labels[v]))
        vmap = {v: i for i, v in enumerate(vorder)}
        eorder = sorted(edges, key=lambda e: label_rank_key(seed, edge_labels[e]))
        labels = {vmap[v]: labels[v] for v in vorder}
        sides = {vmap[v]: sides[v] for v in vorder}
        edges = {i: (vmap[edges[e][0]], vmap[edges[e][1]]) for i, e in enumerate(eorder)}
        edge_labels = {i: edge_labels[e] for i, e in enumerate(eorder)}
        boundary = {vmap[v] for v in boundary}
    G = BipartiteMultigraph(sides, edges, boundary, labels)
    return Window(G, O, center, radius, edge_labels)


def torus(O: OracleGraph, size: int) -> BipartiteMultigraph:
    """Finite quotient of the oracle by ``(size Z)^m``: no boundary at all."""
    if size < 1:
        raise StructuralError("torus size must be >= 1")
    points = list(itertools.product(range(size), repeat=O.m))
    labels: dict[int, tuple[Point, str]] = {}
    ids = {}
    for p in points:
        for side in ("L", "R"):
            ids[(p, side)] = len(labels)
            labels[ids[(p, side)]] = (p, side)
    edges = {}
    for p in points:
        for s in O.shifts:
            q = tuple((a + b) % size for a, b in zip(p, s))
            edges[len(edges)] = (ids[(p, "L")], ids[(q, "R")])
    sides = {v: Side(lab[1]) for v, lab in labels.items()}
    return BipartiteMultigraph(sides, edges, (), labels)


@dataclass(frozen=True)
class BoundariedForest:
    """Acyclic graph whose stub leaves stand for infinite continuations.

    ``graph.boundary`` contains the stubs (and possibly other unconstrained
    vertices).  ``matching`` optionally carries a weight function on the
    forest's edges; ``origin`` maps forest vertex ids back to the vertices of
    the graph the forest was cut out of.
    """

    graph: BipartiteMultigraph
    stubs: frozenset[int]
    matching: FractionalMatching | None = None
    origin: Mapping[int, int] | None = None

    @classmethod
    def from_support(cls, f: FractionalMatching) -> "BoundariedForest":
        """Cut the support of ``f`` into a forest with stubs.

        Support edges between interior vertices are kept as they are; each
        support edge from an interior vertex to a boundary vertex ends in its
        own fresh stub, so cycles through the boundary are cut open.  Edges
        with both ends on the boundary are dropped.  Edge ids are preserved.
        """
        G = f.graph
        den = f.denominator
        next_id = max(G.sides, default=-1) + 1
        sides: dict[int, Side] = {}
        edges: dict[int, tuple[int, int]] = {}
        origin: dict[int, int] = {}
        stubs = []
        for e in sorted(G.edges):
            if not 0 < f.weights[e] < den:
                continue
            u, v = G.edges[e]
            ends = []
            for x in (u, v):
                if x in G.boundary:
                    ends.append(None)
                else:
                    ends.append(x)
                    sides[x] = G.sides[x]
                    origin[x] = x
            if ends == [None, None]:
                continue
            for i, x in enumerate((u, v)):
                if ends[i] is None:
                    sides[next_id] = G.sides[x]
                    origin[next_id] = x
                    stubs.append(next_id)
                    ends[i] = next_id
                    next_id += 1
            edges[e] = (ends[0], ends[1])
        H = BipartiteMultigraph(sides, edges, stubs)
        weights = {e: f.weights[e] for e in edges}
        return cls(H, frozenset(stubs), FractionalMatching(H, den, weights, f.k), origin)

    def components(self) -> list[tuple[set[int], set[int]]]:
        """(vertex set, edge set) per connected component, ordered by smallest vertex."""
        G = self.graph
        seen: set[int] = set()
        out = []
        for root in G.vertices:
            if root in seen:
                continue
            verts, edges = {root}, set()
            todo = [root]
            seen.add(root)
            while todo:
                v = todo.pop()
                for e in G.incident(v):
                    edges.add(e)
                    w = G.other(e, v)
                    if w not in seen:
                        seen.add(w)
                        verts.add(w)
                        todo.append(w)
            out.append((verts, edges))
        return out

    def is_path_component(self, verts: set[int]) -> bool:
        G = self.graph
        return all(G.degree(v) == 2 for v in verts if v not in self.stubs and v not in G.boundary)

    def path_components(self) -> list[set[int]]:
        """Edge sets of components whose constrained vertices all have degree 2."""
        return [edges for verts, edges in self.components() if edges and self.is_path_component(verts)]

    def restrict(self, vertices: set[int]) -> "BoundariedForest":
        G = self.graph
        edges = {e: uv for e, uv in G.edges.items() if uv[0] in vertices}
        H = BipartiteMultigraph(
            {v: s for v, s in G.sides.items() if v in vertices},
            edges,
            G.boundary & vertices,
        )
        m = None
        if self.matching is not None:
            m = FractionalMatching(H, self.matching.denominator, {e: self.matching.weights[e] for e in edges}, self.matching.k)
        return BoundariedForest(H, self.stubs & vertices, m, self.origin)

    def check(self) -> None:
        G = self.graph
        if not is_acyclic(G):
            raise StructuralError("forest contains a cycle")
        for v in G.vertices:
            if v not in self.stubs and v not in G.boundary and G.degree(v) < 2:
                raise StructuralError(f"non-stub vertex {v} has degree {G.degree(v)}")


def is_acyclic(G: BipartiteMultigraph) -> bool:
    parent = {v: v for v in G.sides}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in G.edges.values():
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def gen_boundaried_forest(spec: Mapping[str, Any], seed: int = 0) -> BoundariedForest:
    """Build a forest from a small description.

    Supported kinds:

    * ``{"kind": "spider", "legs": 3, "length": 4}`` -- a root with ``legs``
      degree-2 chains of ``length`` vertices, each ending in a stub.
    * ``{"kind": "path", "length": 10}`` -- a path window with stubs at both ends.
    * ``{"kind": "random", "size": 100, "p_chain": 0.4, "max_children": 3}`` --
      random tree grown breadth first; each vertex gets one child with
      probability ``p_chain`` (continuing a degree-2 chain) and otherwise 2 to
      ``max_children`` children.  Unexpanded frontier vertices become stubs.
    """
    kind = spec.get("kind")
    parent: list[int | None]
    if kind == "spider":
        legs, length = int(spec["legs"]), int(spec["length"])
        if legs < 2 or length < 1:
            raise StructuralError("a spider needs >= 2 legs of length >= 1")
        parent = [None]
        stubs = []
        for _ in range(legs):
            prev = 0
            for _ in range(length):
                parent.append(prev)
                prev = len(parent) - 1
            stubs.append(prev)
    elif kind == "path":
        length = int(spec["length"])
        if length < 2:
            raise StructuralError("a path window needs >= 2 vertices")
        parent = [None] + list(range(length - 1))
        stubs = [0, length - 1]
    elif kind == "random":
        size = int(spec.get("size", 100))
        p_chain = float(spec.get("p_chain", 0.4))
        max_children = int(spec.get("max_children", 3))
        if size < 3 or max_children < 2 or not 0 <= p_chain <= 1:
            raise StructuralError("random forest needs size >= 3, max_children >= 2, 0 <= p_chain <= 1")
        rng = random.Random(seed)
        parent = [None]
        frontier = [0]
        while frontier and len(parent) < size:
            v = frontier.pop(0)
            if v == 0:
                want = rng.randint(2, max_children)
            else:
                want = 1 if rng.random() < p_chain else rng.randint(2, max_children)
            for _ in range(min(want, size - len(parent))):
                parent.append(v)
                frontier.append(len(parent) - 1)
        # vertices that never got children are leaves: make them stubs
        has_child = {p for p in parent if p is not None}
        stubs = [v for v in range(len(parent)) if v not in has_child and v != 0]
    else:
        raise StructuralError(f"unknown forest kind {kind!r}")

    depth = [0] * len(parent)
    for v in range(1, len(parent)):
        depth[v] = depth[parent[v]] + 1  # type: ignore[index]
    sides = {v: Side.LEFT if depth[v] % 2 == 0 else Side.RIGHT for v in range(len(parent))}
    edges = {v - 1: (parent[v], v) for v in range(1, len(parent))}
    G = BipartiteMultigraph(sides, edges, stubs)  # type: ignore[arg-type]
    F = BoundariedForest(G, frozenset(stubs))
    F.check()
    return F


def _add(p: Point, s: Point) -> Point:
    return tuple(a + b for a, b in zip(p, s))


def _sub(p: Point, s: Point) -> Point:
    return tuple(a - b for a, b in zip(p, s))
