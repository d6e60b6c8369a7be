"""From fractional matchings to k-factors.

:func:`lemma_main` turns a grid-valued fractional perfect matching into one
with values in ``{0, 1}`` (odd grid) or ``{0, 1/2, 1}`` (even grid).
:func:`two_factor` builds the fractional 2-matching with values
``1/(d-1)``, ``(d/2)/(d-1)`` and ``1``, splits every vertex in two along a
partition of its edges whose weights sum to 1 on each side, and pulls back a
perfect matching of the split graph.  :func:`k_factor` peels off 1- and
2-factors until ``k`` is reached.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import InvariantViolation, StructuralError, UnsupportedParameters
from .generators import BoundariedForest
from .graph import (
    BipartiteMultigraph,
    FactorSubgraph,
    FractionalMatching,
    Side,
    is_fractional_k_matching,
    subtract_factor,
    validate_regular_bipartite,
)
from .rounding import TraceSink, resolve_path_components, round_to_acyclic, sigma_round
from .trees import BadRayReport, match_forest

PARITY_CONDITION = "a k-factor is only guaranteed when d is odd or k is even"


@dataclass(frozen=True)
class LValued:
    """An L-valued fractional perfect matching and what could not be certified.

    ``unresolved`` holds interior vertices whose constraint leans on an edge
    into the boundary, plus vertices of tree components the matcher could
    not cover.
    """

    matching: FractionalMatching
    unresolved: frozenset[int] = frozenset()
    reports: tuple[BadRayReport, ...] = ()


@dataclass(frozen=True)
class Schedule:
    """Optional pre-rounding: ``sigma`` rounds, on cycles through at most
    ``max_branch`` branch vertices when that is set, run before the
    saturating pass."""

    sigma: Sequence[tuple[int, int]] = ()
    max_branch: int | None = None


def lemma_main(
    f: FractionalMatching,
    trace: TraceSink | None = None,
    schedule: Schedule | None = None,
) -> LValued:
    if f.k != 1:
        raise StructuralError("lemma_main expects a fractional perfect matching (k = 1)")
    if not is_fractional_k_matching(f):
        raise InvariantViolation("input is not a fractional perfect matching")
    g = f
    if schedule is not None and schedule.sigma:
        g = sigma_round(g, schedule.sigma, max_branch=schedule.max_branch, trace=trace)
    g = round_to_acyclic(g, trace=trace)
    forest = BoundariedForest.from_support(g)
    g = resolve_path_components(g)
    den = g.denominator
    weights = dict(g.weights)
    G = g.graph
    for e, (u, v) in G.edges.items():
        if u in G.boundary and v in G.boundary and 0 < weights[e] < den:
            weights[e] = 0

    tree_vertices: set[int] = set()
    for verts, edges in forest.components():
        if edges and not forest.is_path_component(verts):
            tree_vertices |= verts
    unresolved: set[int] = set()
    reports: tuple[BadRayReport, ...] = ()
    if tree_vertices:
        trees = forest.restrict(tree_vertices)
        chosen, bad, reps = match_forest(trees)
        for e in trees.graph.edges:
            weights[e] = den if e in chosen else 0
        assert forest.origin is not None
        unresolved.update(forest.origin[v] for v in bad)
        reports = tuple(reps)
    out = g.with_weights(weights)
    for v in G.interior():
        if any(out.weights[e] and G.other(e, v) in G.boundary for e in G.incident(v)):
            unresolved.add(v)
    if not is_fractional_k_matching(out):
        raise InvariantViolation("rounding lost the perfect-matching sums")
    return LValued(out, frozenset(unresolved), reports)


def allowed_values(denominator: int) -> set:
    from fractions import Fraction

    if denominator % 2:
        return {Fraction(0), Fraction(1)}
    return {Fraction(0), Fraction(1, 2), Fraction(1)}


def perfect_matching(
    G: BipartiteMultigraph, d: int, schedule: Schedule | None = None, trace: TraceSink | None = None
) -> tuple[set[int], LValued]:
    """1-factor of a graph whose interior is d-regular, d odd."""
    if d % 2 == 0:
        raise UnsupportedParameters(PARITY_CONDITION)
    res = lemma_main(FractionalMatching.uniform(G, d), trace=trace, schedule=schedule)
    return res.matching.integral_edges(), res


@dataclass(frozen=True)
class IncidentPartition:
    """Per vertex two disjoint edge sets covering its incident edges."""

    matching: FractionalMatching
    parts: Mapping[int, tuple[frozenset[int], frozenset[int]]]

    def check(self) -> None:
        f = self.matching
        G = f.graph
        for v in G.vertices:
            p0, p1 = self.parts[v]
            if p0 & p1 or (p0 | p1) != set(G.incident(v)):
                raise InvariantViolation(f"parts at vertex {v} do not partition its edges")
            if v in G.boundary:
                continue
            for part in (p0, p1):
                if sum(f.weights[e] for e in part) != f.denominator:
                    raise InvariantViolation(f"a part at vertex {v} does not sum to 1")


def build_two_matching(g: FractionalMatching, d: int) -> IncidentPartition:
    """The fractional 2-matching on grid ``1/(d-1)`` and its witnessing partitions."""
    if d < 2 or d % 2:
        raise UnsupportedParameters("the 2-matching construction needs d even and >= 2")
    G = g.graph
    den = g.denominator
    half = den // 2 if den % 2 == 0 else None
    new = {}
    for e, w in g.weights.items():
        if w == 0:
            new[e] = 1
        elif w == den:
            new[e] = d - 1
        elif half is not None and w == half:
            new[e] = d // 2
        else:
            raise InvariantViolation(f"edge {e} has weight {w}/{den}, not in {{0, 1/2, 1}}")
    f2 = FractionalMatching(G, d - 1, new, 2)
    parts = {}
    for v in G.vertices:
        inc = sorted(G.incident(v))
        ones = [e for e in inc if g.weights[e] == den]
        halves = [e for e in inc if half is not None and g.weights[e] == half]
        zeros = [e for e in inc if g.weights[e] == 0]
        if v in G.boundary:
            p0 = frozenset(inc[: len(inc) // 2])
        elif len(inc) == d and len(ones) == 1 and len(zeros) == d - 1:
            p0 = frozenset(ones)
        elif len(inc) == d and len(halves) == 2 and len(zeros) == d - 2:
            p0 = frozenset([halves[0]] + zeros[: (d - 2) // 2])
        else:
            raise InvariantViolation(
                f"vertex {v}: pattern ones={len(ones)} halves={len(halves)} zeros={len(zeros)} "
                f"is neither (1, d-1 zeros) nor (2 halves, d-2 zeros)"
            )
        parts[v] = (p0, frozenset(inc) - p0)
    out = IncidentPartition(f2, parts)
    out.check()
    if not is_fractional_k_matching(f2):
        raise InvariantViolation("constructed function is not a fractional 2-matching")
    return out


@dataclass(frozen=True)
class SplitGraph:
    """Vertex ``(x, i)`` has id ``2 * x + i``; edge ids are shared with the original."""

    graph: BipartiteMultigraph
    matching: FractionalMatching
    original: BipartiteMultigraph

    @staticmethod
    def origin(v: int) -> tuple[int, int]:
        return divmod(v, 2)


def split_graph(G: BipartiteMultigraph, partition: IncidentPartition) -> SplitGraph:
    try:
        partition.check()
    except InvariantViolation as exc:
        raise StructuralError(f"partition rejected: {exc}") from exc
    f = partition.matching
    sides = {}
    labels = {} if G.labels is not None else None
    boundary = []
    for x in G.vertices:
        if x < 0:
            raise StructuralError("splitting needs non-negative vertex ids")
        for i in (0, 1):
            sides[2 * x + i] = G.sides[x]
            if x in G.boundary:
                boundary.append(2 * x + i)
            if labels is not None:
                labels[2 * x + i] = (G.labels[x], i)  # type: ignore[index]
    edges = {}
    for e, (x, y) in G.edges.items():
        i = 0 if e in partition.parts[x][0] else 1
        j = 0 if e in partition.parts[y][0] else 1
        edges[e] = (2 * x + i, 2 * y + j)
    S = BipartiteMultigraph(sides, edges, boundary, labels)
    h = FractionalMatching(S, f.denominator, dict(f.weights), 1)
    if not is_fractional_k_matching(h):
        raise InvariantViolation("transported weights are not a fractional perfect matching")
    return SplitGraph(S, h, G)


def two_factor(
    G: BipartiteMultigraph, d: int, schedule: Schedule | None = None, trace: TraceSink | None = None
) -> FactorSubgraph:
    if d % 2:
        raise UnsupportedParameters("two_factor handles even d; odd d goes through a (d-1)-factor")
    if d == 0:
        raise UnsupportedParameters("a 0-regular graph has no 2-factor")
    first = lemma_main(FractionalMatching.uniform(G, d), trace=trace, schedule=schedule)
    part = build_two_matching(first.matching, d)
    S = split_graph(G, part)
    if S.matching.denominator % 2 == 0:
        raise InvariantViolation("split graph landed on an even grid")
    second = lemma_main(S.matching, trace=trace, schedule=schedule)
    chosen = second.matching.integral_edges()
    unresolved = set(first.unresolved) | {v // 2 for v in second.unresolved}
    H = FactorSubgraph(G, frozenset(chosen), 2, frozenset(unresolved))
    _assert_factor(H)
    return H


def _assert_factor(H: FactorSubgraph) -> None:
    G = H.graph
    for v in G.interior():
        if H.degree(v) != H.k:
            raise InvariantViolation(f"vertex {v} has degree {H.degree(v)} in a claimed {H.k}-factor")


def k_factor(
    G: BipartiteMultigraph, d: int, k: int, schedule: Schedule | None = None, trace: TraceSink | None = None
) -> FactorSubgraph:
    """A k-factor of a graph whose interior vertices all have degree ``d``."""
    if not 0 <= k <= d:
        raise StructuralError(f"need 0 <= k <= d, got k={k}, d={d}")
    if k % 2 and d % 2 == 0:
        raise UnsupportedParameters(f"d={d}, k={k}: {PARITY_CONDITION}")
    if not validate_regular_bipartite(G, d, interior_only=True):
        raise StructuralError(f"graph is not {d}-regular on its interior")
    if k == 0:
        return FactorSubgraph(G, frozenset(), 0)
    if k == d:
        return FactorSubgraph(G, frozenset(G.edges), k)
    if d % 2:
        chosen, res = perfect_matching(G, d, schedule, trace)
        M = FactorSubgraph(G, frozenset(chosen), 1, res.unresolved)
        rest = subtract_factor(G, M)
        sub = k_factor(rest, d - 1, k - 1 if k % 2 else k, schedule, trace)
        if k % 2:
            H = FactorSubgraph(G, M.edges | sub.edges, k, M.unresolved | sub.unresolved)
        else:
            H = FactorSubgraph(G, sub.edges, k, M.unresolved | sub.unresolved)
    else:
        H2 = two_factor(G, d, schedule, trace)
        rest = subtract_factor(G, H2)
        sub = k_factor(rest, d - 2, k - 2, schedule, trace)
        H = FactorSubgraph(G, H2.edges | sub.edges, k, H2.unresolved | sub.unresolved)
    _assert_factor(H)
    return H


# --- balanced orientations and the auxiliary-graph corollary ---------------


@dataclass(frozen=True)
class Multigraph:
    """Undirected multigraph (loops allowed; a loop adds 2 to the degree)."""

    n: int
    edges: Mapping[int, tuple[int, int]]

    def degree(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges.values())

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for a, b in self.edges.values():
            deg[a] += 1
            deg[b] += 1
        return deg

    @classmethod
    def from_bipartite(cls, G: BipartiteMultigraph) -> "Multigraph":
        index = {v: i for i, v in enumerate(G.vertices)}
        return cls(len(index), {e: (index[u], index[v]) for e, (u, v) in G.edges.items()})


@dataclass(frozen=True)
class Orientation:
    """``heads[e]`` is the vertex edge ``e`` points to."""

    graph: Multigraph
    heads: Mapping[int, int]

    def tail(self, e: int) -> int:
        a, b = self.graph.edges[e]
        return a if self.heads[e] == b else b

    def is_balanced(self) -> bool:
        indeg = [0] * self.graph.n
        outdeg = [0] * self.graph.n
        for e in self.graph.edges:
            indeg[self.heads[e]] += 1
            outdeg[self.tail(e)] += 1
        return indeg == outdeg


def random_even_regular(n: int, half_degree: int, seed: int) -> Multigraph:
    """Union of ``half_degree`` random fixed-point-free permutations on ``n`` vertices."""
    if n < 2:
        raise StructuralError("need at least 2 vertices")
    rng = random.Random(seed)
    edges = {}
    for _ in range(half_degree):
        while True:
            perm = list(range(n))
            rng.shuffle(perm)
            if all(perm[i] != i for i in range(n)):
                break
        for i in range(n):
            edges[len(edges)] = (i, perm[i])
    return Multigraph(n, edges)


def balanced_orientation(G: Multigraph) -> Orientation:
    """Orient every component along an Euler circuit (Hierholzer)."""
    deg = G.degrees()
    odd = [v for v in range(G.n) if deg[v] % 2]
    if odd:
        raise StructuralError(f"vertices {odd[:5]} have odd degree; no balanced orientation")
    inc: list[list[int]] = [[] for _ in range(G.n)]
    for e, (a, b) in sorted(G.edges.items()):
        inc[a].append(e)
        if b != a:
            inc[b].append(e)
    used: set[int] = set()
    ptr = [0] * G.n
    heads: dict[int, int] = {}
    for start in range(G.n):
        if ptr[start] >= len(inc[start]):
            continue
        # iterative Hierholzer: stack of (vertex, edge used to arrive)
        stack: list[tuple[int, int]] = [(start, -1)]
        circuit: list[tuple[int, int]] = []
        while stack:
            v, via = stack[-1]
            while ptr[v] < len(inc[v]) and inc[v][ptr[v]] in used:
                ptr[v] += 1
            if ptr[v] == len(inc[v]):
                circuit.append(stack.pop())
                continue
            e = inc[v][ptr[v]]
            used.add(e)
            a, b = G.edges[e]
            w = b if a == v else a
            stack.append((w, e))
        # circuit is reversed: each entry (w, e) was reached through e
        for w, e in circuit:
            if e >= 0:
                heads[e] = w
    return Orientation(G, heads)


def auxiliary_graph(O: Orientation) -> BipartiteMultigraph:
    """``v -> (v_1 on the left, v_2 on the right)``, one edge ``u_1 v_2`` per arc ``u -> v``."""
    G = O.graph
    sides = {}
    for v in range(G.n):
        sides[2 * v] = Side.LEFT
        sides[2 * v + 1] = Side.RIGHT
    edges = {e: (2 * O.tail(e), 2 * O.heads[e] + 1) for e in G.edges}
    return BipartiteMultigraph(sides, edges)


@dataclass(frozen=True)
class CorollaryFactor:
    graph: Multigraph
    edges: frozenset[int]
    k: int

    def degrees(self) -> list[int]:
        deg = [0] * self.graph.n
        for e in self.edges:
            a, b = self.graph.edges[e]
            deg[a] += 1
            deg[b] += 1
        return deg


def corollary_factor(G: Multigraph, O: Orientation, schedule: Schedule | None = None) -> CorollaryFactor:
    """2-factor (half-degree odd) or 4-factor (half-degree even) via the auxiliary graph."""
    if O.graph is not G and O.graph != G:
        raise StructuralError("orientation belongs to another graph")
    if not O.is_balanced():
        raise StructuralError("orientation is not balanced")
    degs = set(G.degrees())
    if len(degs) != 1 or next(iter(degs)) % 2:
        raise StructuralError("corollary needs a 2k-regular graph")
    half = next(iter(degs)) // 2
    if half == 0:
        raise StructuralError("corollary needs positive degree")
    aux = auxiliary_graph(O)
    target = 1 if half % 2 else 2
    H = k_factor(aux, half, target, schedule)
    return CorollaryFactor(G, H.edges, 2 * target)
