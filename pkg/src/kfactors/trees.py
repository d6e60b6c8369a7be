"""Perfect matchings of acyclic supports.

A *bad ray* is a ray of the support with degree 2 at every other vertex.
Rays of a windowed forest end in stubs.  The matching is built in three
passes: truncate each canonical bad-ray tail after its first vertex, match
the remaining forest by a leaf-to-root dynamic program in which stubs and
truncation points are optional, then walk back out along each tail with the
parity fixed by whether its root edge was used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .generators import BoundariedForest
from .graph import BipartiteMultigraph, FractionalMatching


@dataclass(frozen=True)
class BadRayReport:
    """A windowed bad ray ending in a stub.

    ``ray`` runs from ``ray[0]`` to the stub ``ray[-1]``; ``edges[i]`` joins
    ``ray[i]`` and ``ray[i + 1]``; ``degrees`` are forest degrees.  Vertices at
    even positions have degree 2 (stubs excepted).  ``root_index`` points at
    the canonical representative's first vertex: the last vertex of degree
    other than 2 before the stub, after which every vertex has degree 2.
    """

    ray: tuple[int, ...]
    edges: tuple[int, ...]
    degrees: tuple[int, ...]
    root_index: int
    stub: int
    profile: tuple[Fraction, ...] = field(default=())

    @property
    def representative(self) -> tuple[int, ...]:
        return self.ray[self.root_index :]

    @property
    def rep_edges(self) -> tuple[int, ...]:
        return self.edges[self.root_index :]

    @property
    def root(self) -> int:
        return self.ray[self.root_index]

    @property
    def first(self) -> int:
        """``x_1`` of the representative: the vertex kept as a pendant when pruning."""
        return self.ray[self.root_index + 1]

    def to_dict(self) -> dict:
        return {
            "ray": list(self.ray),
            "edges": list(self.edges),
            "degrees": list(self.degrees),
            "root_index": self.root_index,
            "stub": self.stub,
            "profile": [f"{w.numerator}/{w.denominator}" for w in self.profile],
        }


def _constrained(F: BoundariedForest, v: int) -> bool:
    return v not in F.stubs and v not in F.graph.boundary


def find_bad_ray_reps(F: BoundariedForest) -> list[BadRayReport]:
    """One report per stub reached from a branching vertex through degree-2 vertices.

    Stub-to-stub chains (path components) produce nothing.  The ray is then
    extended backwards past the representative root for as long as the
    every-other-vertex pattern allows, choosing the smallest-id degree-2
    neighbour at each branch, so the report also carries the non-stabilised
    part of a bad ray.
    """
    G = F.graph
    f = F.matching
    reports = []
    for stub in sorted(F.stubs):
        if G.degree(stub) != 1:
            continue
        (e0,) = G.incident(stub)
        chain = [stub]
        chain_e: list[int] = []
        prev_e, v = e0, G.other(e0, stub)
        chain_e.append(prev_e)
        while _constrained(F, v) and G.degree(v) == 2:
            chain.append(v)
            (nxt,) = [e for e in G.incident(v) if e != prev_e]
            chain_e.append(nxt)
            prev_e, v = nxt, G.other(nxt, v)
        if not _constrained(F, v) or len(chain) < 2:
            # reached another stub (a path component) or no degree-2 vertex before the stub
            continue
        root = v
        # chain = [stub, ..., x_1] reversed representative; extend past the root
        rep = [root] + chain[::-1]
        rep_e = chain_e[::-1]
        prefix: list[int] = []
        prefix_e: list[int] = []
        cur, after = root, rep_e[0]
        while True:
            cands = sorted(
                (G.other(e, cur), e)
                for e in G.incident(cur)
                if e != after and _constrained(F, G.other(e, cur)) and G.degree(G.other(e, cur)) == 2
            )
            if not cands:
                break
            p, pe = cands[0]
            (back,) = [e for e in G.incident(p) if e != pe]
            q = G.other(back, p)
            prefix[:0] = [p]
            prefix_e[:0] = [pe]
            if not _constrained(F, q):
                break
            prefix[:0] = [q]
            prefix_e[:0] = [back]
            cur, after = q, back
        if len(prefix) % 2 == 0 and prefix:
            # the ray must open on a degree-2 vertex; drop the dangling branch vertex
            prefix, prefix_e = prefix[1:], prefix_e[1:]
        ray = prefix + rep
        edges = prefix_e + rep_e
        root_index = len(prefix)
        degrees = tuple(G.degree(x) for x in ray)
        profile: tuple[Fraction, ...] = ()
        if f is not None:
            start = 0 if degrees[0] == 2 else 1
            profile = tuple(f.value(edges[i]) for i in range(start, len(edges), 2))
        reports.append(BadRayReport(tuple(ray), tuple(edges), degrees, root_index, stub, profile))
    return reports


def weight_profile_check(f: FractionalMatching, report: BadRayReport) -> bool:
    """Check the monotone weight law along a bad ray.

    With ``x_{2n}`` the degree-2 vertices and ``w(n) = f(x_{2n}, x_{2n+1})``:
    ``w`` stays constant across a degree-2 odd vertex and strictly increases
    across a branching one.  Steps touching a stub are skipped because their
    sums are not constrained.
    """
    ray, edges, deg = report.ray, report.edges, report.degrees
    stub_at = len(ray) - 1
    start = 0 if deg[0] == 2 else 1
    den = f.denominator
    if any(deg[i] != 2 for i in range(start, stub_at, 2)):
        return False
    w = [f.weights[edges[i]] for i in range(start, stub_at, 2)]
    if any(not 0 < x < den for x in w):
        return False
    increases = 0
    for n in range(len(w) - 1):
        odd = start + 2 * n + 1
        if odd + 1 >= stub_at:
            break
        if deg[odd] == 2:
            if w[n + 1] != w[n]:
                return False
        elif w[n + 1] > w[n]:
            increases += 1
        else:
            return False
    return increases <= den - 2


def prune_bad_rays(
    F: BoundariedForest, reps: Iterable[BadRayReport]
) -> tuple[BoundariedForest, frozenset[int]]:
    """Drop every representative after its ``x_1``; return the forest and the ``x_1``'s."""
    G = F.graph
    drop_v: set[int] = set()
    drop_e: set[int] = set()
    Y = set()
    for r in reps:
        rep = r.representative
        Y.add(rep[1])
        drop_v.update(rep[2:])
        drop_e.update(r.rep_edges[1:])
    sides = {v: s for v, s in G.sides.items() if v not in drop_v}
    edges = {e: uv for e, uv in G.edges.items() if e not in drop_e}
    stubs = F.stubs - drop_v
    H = BipartiteMultigraph(sides, edges, (set(G.boundary) - drop_v) | Y)
    m = None
    if F.matching is not None:
        m = FractionalMatching(H, F.matching.denominator, {e: F.matching.weights[e] for e in edges}, F.matching.k)
    return BoundariedForest(H, frozenset(stubs), m, F.origin), frozenset(Y)


@dataclass
class ForestMatching:
    edges: set[int]
    unresolved: set[int]


def match_leafless_forest(H: BoundariedForest, Y: Iterable[int] = ()) -> ForestMatching:
    """Matching covering every vertex outside ``Y``, the stubs and the boundary.

    Each component is rooted at its smallest vertex id and solved leaf to
    root.  Per vertex two flags are kept: *free* (its subtree can be served
    without it) and *covered* (its subtree can be served with it matched to a
    child).  Reconstruction runs top down; optional vertices take a partner
    when they can, and among children the smallest edge id wins.  A component
    with no solution contributes its constrained vertices to ``unresolved``.
    """
    G = H.graph
    optional = set(Y) | set(H.stubs) | set(G.boundary)
    matched: set[int] = set()
    unresolved: set[int] = set()
    seen: set[int] = set()
    for root in G.vertices:
        if root in seen:
            continue
        order = [root]
        parent_edge = {root: -1}
        seen.add(root)
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for e in G.incident(v):
                w = G.other(e, v)
                if w not in seen:
                    seen.add(w)
                    parent_edge[w] = e
                    order.append(w)
        children: dict[int, list[tuple[int, int]]] = {v: [] for v in order}
        for v in order[1:]:
            e = parent_edge[v]
            children[G.other(e, v)].append((e, v))
        free: dict[int, bool] = {}
        covered: dict[int, bool] = {}
        ok: dict[int, bool] = {}
        for v in reversed(order):
            kids = children[v]
            bad = [c for _, c in kids if not ok[c]]
            free[v] = not bad
            if not bad:
                covered[v] = any(free[c] for _, c in kids)
            elif len(bad) == 1:
                covered[v] = free[bad[0]]
            else:
                covered[v] = False
            ok[v] = covered[v] or (v in optional and free[v])
        if not ok[root]:
            unresolved.update(v for v in order if v not in optional)
            continue
        # top-down reconstruction: state[v] = True if v is already matched to its parent
        todo = [(root, False)]
        while todo:
            v, taken = todo.pop()
            kids = sorted(children[v])
            partner = None
            if not taken and (v not in optional or covered[v]):
                bad = [c for _, c in kids if not ok[c]]
                for e, c in kids:
                    if free[c] and all(b == c for b in bad):
                        partner = (e, c)
                        break
            if partner is not None:
                matched.add(partner[0])
            for e, c in kids:
                todo.append((c, partner is not None and partner[1] == c))
    return ForestMatching(matched, unresolved)


def extend_along_rays(M: Iterable[int], reps: Iterable[BadRayReport]) -> set[int]:
    """Walk each pruned representative out to its stub with the forced parity."""
    out = set(M)
    for r in reps:
        rep_e = r.rep_edges
        start = 2 if rep_e[0] in out else 1
        for i in range(start, len(rep_e), 2):
            out.add(rep_e[i])
    return out


def match_forest(F: BoundariedForest) -> tuple[set[int], set[int], list[BadRayReport]]:
    """Prune, match and extend: the full forest pass.  Returns (edges, unresolved, reports)."""
    reps = find_bad_ray_reps(F)
    H, Y = prune_bad_rays(F, reps)
    fm = match_leafless_forest(H, Y)
    return extend_along_rays(fm.edges, reps), fm.unresolved, reps


def augment_matching(
    G: BipartiteMultigraph, start: Iterable[int], optional: Iterable[int] = ()
) -> tuple[set[int], set[int]]:
    """Grow the matching ``start`` until it covers every non-optional vertex.

    Uncovered vertices are handled in id order; each is joined by the
    shortest alternating path (edge ids break ties) to an uncovered vertex
    or to the partner of an optional vertex, which is then released.  Vertices
    with no such path are returned as unresolved.
    """
    optional = set(optional)
    mate: dict[int, int] = {}  # vertex -> matched edge
    for e in start:
        u, v = G.edges[e]
        if u in mate or v in mate:
            raise ValueError("start is not a matching")
        mate[u] = mate[v] = e
    unresolved = set()
    for u in G.vertices:
        if u in mate or u in optional:
            continue
        # parent[x] = (non-matching edge, previous vertex) for each odd vertex x
        parent: dict[int, tuple[int, int]] = {}
        frontier = [u]
        seen = {u}
        end = None
        while frontier and end is None:
            nxt = []
            for a in frontier:
                for e in sorted(G.incident(a)):
                    x = G.other(e, a)
                    if mate.get(a) == e or x in seen:
                        continue
                    seen.add(x)
                    parent[x] = (e, a)
                    if x not in mate or G.other(mate[x], x) in optional:
                        end = x
                        break
                    y = G.other(mate[x], x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                if end is not None:
                    break
            frontier = nxt
        if end is None:
            unresolved.add(u)
            continue
        x = end
        if x in mate:
            del mate[G.other(mate[x], x)]
            del mate[x]
        while True:
            e, a = parent[x]
            prev = mate.get(a)
            mate[x] = mate[a] = e
            if a == u:
                break
            x = G.other(prev, a)
            del mate[x]
    return set(mate.values()), unresolved

