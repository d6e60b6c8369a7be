"""Independent checks: factor verification, brute-force factor enumeration and a
König edge colouring built from augmenting-path matchings.

Nothing here calls into the rounding pipeline, so these can serve as oracles
for it.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import SizeGuardError, StructuralError
from .graph import BipartiteMultigraph, FactorSubgraph, Side

MAX_ENUMERATION_EDGES = 30


def verify_factor(G: BipartiteMultigraph, H: FactorSubgraph | Iterable[int], k: int | None = None) -> bool:
    """Every interior vertex has exactly ``k`` selected edges, and the selection lies in G."""
    if isinstance(H, FactorSubgraph):
        chosen = set(H.edges)
        k = H.k if k is None else k
    else:
        chosen = set(H)
    if k is None:
        raise StructuralError("k is required when H is a bare edge set")
    if not chosen <= G.edges.keys():
        return False
    for v in G.interior():
        if sum(1 for e in G.incident(v) if e in chosen) != k:
            return False
    return True


def iter_k_factors(G: BipartiteMultigraph, k: int, max_edges: int = MAX_ENUMERATION_EDGES) -> Iterator[frozenset[int]]:
    """All edge sets giving every interior vertex degree ``k``.

    Edges are decided in id order; a branch dies as soon as some vertex has
    more than ``k`` chosen edges or too few undecided ones left to reach ``k``.
    """
    if len(G.edges) > max_edges:
        raise SizeGuardError(f"{len(G.edges)} edges exceeds the enumeration guard of {max_edges}")
    order = sorted(G.edges)
    constrained = {v for v in G.vertices if v not in G.boundary}
    deg = {v: 0 for v in G.vertices}
    left = {v: G.degree(v) for v in G.vertices}
    chosen: list[int] = []

    def feasible(v: int) -> bool:
        return v not in constrained or deg[v] <= k <= deg[v] + left[v]

    def rec(i: int) -> Iterator[frozenset[int]]:
        if i == len(order):
            if all(deg[v] == k for v in constrained):
                yield frozenset(chosen)
            return
        e = order[i]
        u, v = G.edges[e]
        for take in (1, 0):
            left[u] -= 1
            left[v] -= 1
            deg[u] += take
            deg[v] += take
            if take:
                chosen.append(e)
            if feasible(u) and feasible(v):
                yield from rec(i + 1)
            if take:
                chosen.pop()
            deg[u] -= take
            deg[v] -= take
            left[u] += 1
            left[v] += 1

    yield from rec(0)


def enumerate_k_factors(G: BipartiteMultigraph, k: int, max_edges: int = MAX_ENUMERATION_EDGES) -> int:
    return sum(1 for _ in iter_k_factors(G, k, max_edges))


def _perfect_matching_kuhn(G: BipartiteMultigraph, available: set[int]) -> set[int] | None:
    """Augmenting-path perfect matching on the ``available`` edges, or None."""
    left = [v for v in G.vertices if G.sides[v] is Side.LEFT]
    right = [v for v in G.vertices if G.sides[v] is Side.RIGHT]
    if len(left) != len(right):
        return None
    adj = {u: [e for e in G.incident(u) if e in available] for u in left}
    match_edge: dict[int, int] = {}  # right vertex -> edge

    def augment(u: int, seen: set[int]) -> bool:
        # iterative DFS over alternating paths starting at left vertex u
        stack = [(u, iter(adj[u]))]
        path: list[int] = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for e in it:
                r = G.edges[e][1]
                if r in seen:
                    continue
                seen.add(r)
                if r not in match_edge:
                    path.append(e)
                    for pe in path:
                        match_edge[G.edges[pe][1]] = pe
                    return True
                path.append(e)
                nxt = G.edges[match_edge[r]][0]
                stack.append((nxt, iter(adj[nxt])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    for u in left:
        if not augment(u, set()):
            return None
    return set(match_edge.values())


def edge_color_regular_bipartite(G: BipartiteMultigraph, d: int) -> list[set[int]]:
    """Split a d-regular bipartite multigraph into d perfect matchings."""
    if any(G.degree(v) != d for v in G.vertices):
        raise StructuralError(f"graph is not {d}-regular")
    remaining = set(G.edges)
    classes = []
    for _ in range(d):
        M = _perfect_matching_kuhn(G, remaining)
        if M is None:  # pragma: no cover - regular bipartite graphs always have one
            raise StructuralError("no perfect matching found in a regular bipartite graph")
        classes.append(M)
        remaining -= M
    return classes
