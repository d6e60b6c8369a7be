"""Bipartite multigraphs, grid-valued fractional matchings and factor subgraphs.

Weights are stored as integer numerators over a single shared denominator,
so every vertex-sum check is exact.  Vertices flagged as *boundary* stand
for window vertices whose neighbourhood continues outside the finite view;
degree and sum constraints are only imposed on the remaining (interior)
vertices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping

from .errors import InvariantViolation, StructuralError, WeightRangeError


class Side(str, enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class BipartiteMultigraph:
    """Finite bipartite multigraph with stable integer vertex and edge ids.

    ``edges`` maps an edge id to its endpoints; endpoints may be given in
    either order and are normalised to ``(left, right)``.  Parallel edges are
    distinct edge ids with the same endpoints.  Instances are not mutated
    after construction; derived graphs are new objects.
    """

    __slots__ = ("sides", "edges", "boundary", "labels", "_incident")

    def __init__(
        self,
        sides: Mapping[int, Side | str],
        edges: Mapping[int, tuple[int, int]],
        boundary: Iterable[int] = (),
        labels: Mapping[int, Hashable] | None = None,
    ) -> None:
        self.sides: dict[int, Side] = {int(v): Side(s) for v, s in sides.items()}
        incident: dict[int, list[int]] = {v: [] for v in self.sides}
        norm: dict[int, tuple[int, int]] = {}
        for e, (u, v) in sorted(edges.items()):
            if u not in self.sides or v not in self.sides:
                raise StructuralError(f"edge {e} has a dangling endpoint ({u}, {v})")
            if self.sides[u] is self.sides[v]:
                raise StructuralError(f"edge {e} joins two {self.sides[u].value} vertices")
            left, right = (u, v) if self.sides[u] is Side.LEFT else (v, u)
            norm[int(e)] = (left, right)
            incident[left].append(e)
            incident[right].append(e)
        self.edges = norm
        self.boundary = frozenset(boundary)
        unknown = self.boundary - self.sides.keys()
        if unknown:
            raise StructuralError(f"boundary flags on unknown vertices {sorted(unknown)[:5]}")
        self.labels = dict(labels) if labels is not None else None
        self._incident = {v: tuple(es) for v, es in incident.items()}

    @classmethod
    def from_pairs(
        cls, n_left: int, n_right: int, pairs: Iterable[tuple[int, int]]
    ) -> "BipartiteMultigraph":
        """Left vertices get ids ``0..n_left-1``, right ones ``n_left..``; pairs
        are (left index, right index)."""
        sides = {i: Side.LEFT for i in range(n_left)}
        sides.update({n_left + j: Side.RIGHT for j in range(n_right)})
        edges = {e: (a, n_left + b) for e, (a, b) in enumerate(pairs)}
        return cls(sides, edges)

    def __repr__(self) -> str:
        return (
            f"BipartiteMultigraph(|V|={len(self.sides)}, |E|={len(self.edges)}, "
            f"boundary={len(self.boundary)})"
        )

    @property
    def vertices(self) -> list[int]:
        return sorted(self.sides)

    def interior(self) -> list[int]:
        return [v for v in sorted(self.sides) if v not in self.boundary]

    def incident(self, v: int) -> tuple[int, ...]:
        return self._incident[v]

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def other(self, e: int, v: int) -> int:
        left, right = self.edges[e]
        return right if v == left else left

    def is_boundary(self, v: int) -> bool:
        return v in self.boundary

    def spanning(self, keep: Iterable[int]) -> "BipartiteMultigraph":
        """Same vertex set (and flags), only the listed edges."""
        keep = set(keep)
        return BipartiteMultigraph(
            self.sides,
            {e: uv for e, uv in self.edges.items() if e in keep},
            self.boundary,
            self.labels,
        )

    def same_shape(self, other: "BipartiteMultigraph") -> bool:
        return self.sides == other.sides and self.edges == other.edges and self.boundary == other.boundary


@dataclass(frozen=True)
class FractionalMatching:
    """Edge weights ``numerator / denominator`` with target vertex sum ``k``."""

    graph: BipartiteMultigraph
    denominator: int
    weights: Mapping[int, int]
    k: int = 1

    def __post_init__(self) -> None:
        if self.denominator < 1:
            raise StructuralError("denominator must be a positive integer")
        if set(self.weights) != set(self.graph.edges):
            raise StructuralError("weights must be defined on exactly the graph's edges")
        bad = [e for e, w in self.weights.items() if not 0 <= w <= self.denominator]
        if bad:
            raise WeightRangeError(f"weights outside [0, 1] on edges {sorted(bad)[:5]}")

    @classmethod
    def uniform(cls, graph: BipartiteMultigraph, denominator: int, k: int = 1) -> "FractionalMatching":
        """The constant ``k / denominator`` function (``f = 1/d`` for a d-regular graph)."""
        return cls(graph, denominator, {e: k for e in graph.edges}, k)

    @classmethod
    def indicator(cls, graph: BipartiteMultigraph, edges: Iterable[int], k: int = 1) -> "FractionalMatching":
        chosen = set(edges)
        return cls(graph, 1, {e: int(e in chosen) for e in graph.edges}, k)

    def value(self, e: int) -> Fraction:
        return Fraction(self.weights[e], self.denominator)

    def numerator_sum(self, v: int) -> int:
        return sum(self.weights[e] for e in self.graph.incident(v))

    def vertex_sum(self, v: int) -> Fraction:
        return Fraction(self.numerator_sum(v), self.denominator)

    def with_weights(self, weights: Mapping[int, int]) -> "FractionalMatching":
        return FractionalMatching(self.graph, self.denominator, dict(weights), self.k)

    def regrid(self, denominator: int) -> "FractionalMatching":
        """Re-express on another grid; fails unless every value is a grid point."""
        out = {}
        for e, w in self.weights.items():
            num, rem = divmod(w * denominator, self.denominator)
            if rem:
                raise StructuralError(
                    f"weight {w}/{self.denominator} on edge {e} is not on the 1/{denominator} grid"
                )
            out[e] = num
        return FractionalMatching(self.graph, denominator, out, self.k)

    def reduced(self) -> "FractionalMatching":
        """Smallest common denominator carrying the same values."""
        from math import gcd

        g = self.denominator
        for w in self.weights.values():
            g = gcd(g, w)
            if g == 1:
                return self
        return self.regrid(self.denominator // g)

    def values(self) -> set[Fraction]:
        return {self.value(e) for e in self.graph.edges}

    def is_integral(self) -> bool:
        return all(w in (0, self.denominator) for w in self.weights.values())

    def integral_edges(self) -> set[int]:
        return {e for e, w in self.weights.items() if w == self.denominator}


@dataclass(frozen=True)
class SupportSubgraph:
    graph: BipartiteMultigraph
    edges: frozenset[int]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.graph.incident(v) if e in self.edges)

    def vertices(self) -> set[int]:
        out: set[int] = set()
        for e in self.edges:
            out.update(self.graph.edges[e])
        return out


@dataclass(frozen=True)
class FactorSubgraph:
    graph: BipartiteMultigraph
    edges: frozenset[int]
    k: int
    unresolved: frozenset[int] = field(default=frozenset())

    def degree(self, v: int) -> int:
        return sum(1 for e in self.graph.incident(v) if e in self.edges)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.edges))

    def __len__(self) -> int:
        return len(self.edges)


def validate_regular_bipartite(G: BipartiteMultigraph, d: int, interior_only: bool = False) -> bool:
    """True iff every vertex (every interior vertex if ``interior_only``) has degree d.

    The bipartite side condition is enforced when the graph is built.
    """
    verts = G.interior() if interior_only else G.vertices
    return all(G.degree(v) == d for v in verts)


def support_edges(f: FractionalMatching) -> set[int]:
    return {e for e, w in f.weights.items() if 0 < w < f.denominator}


def support(f: FractionalMatching) -> SupportSubgraph:
    edges = frozenset(support_edges(f))
    G = f.graph
    for v in G.interior():
        if sum(1 for e in G.incident(v) if e in edges) == 1:
            raise InvariantViolation(
                f"interior vertex {v} has support degree 1; f is not a fractional matching"
            )
    return SupportSubgraph(G, edges)


def is_fractional_k_matching(f: FractionalMatching) -> bool:
    den = f.denominator
    if any(not 0 <= w <= den for w in f.weights.values()):
        return False
    target = f.k * den
    return all(f.numerator_sum(v) == target for v in f.graph.interior())


def subtract_factor(G: BipartiteMultigraph, H: FactorSubgraph) -> BipartiteMultigraph:
    """``G`` with the factor's edges removed; edge ids of the survivors are kept."""
    for e in H.edges:
        if e not in G.edges or G.edges[e] != H.graph.edges.get(e):
            raise StructuralError(f"factor edge {e} is not an edge of the graph")
    return G.spanning(e for e in G.edges if e not in H.edges)
