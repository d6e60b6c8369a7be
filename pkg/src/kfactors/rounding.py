"""Cycle rounding of grid-valued fractional matchings.

Alternating ``+delta, -delta`` around an even cycle of the support leaves
every vertex sum unchanged and never enlarges the support.  Two drivers are
provided:

* :func:`round_to_acyclic` saturates one cycle at a time (largest step that
  keeps weights in ``[0, 1]``) until no eligible cycle remains;
* :func:`sigma_round` follows a schedule of ``(color, bit)`` pairs, moving a
  maximal vertex-disjoint family of support cycles by a single grid step per
  round.

Cycles through boundary vertices are never touched: on a window only cycles
made of interior vertices are eligible.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Literal, Mapping, Sequence

from .errors import InvariantViolation, WeightRangeError
from .graph import BipartiteMultigraph, FractionalMatching, support_edges

Direction = Literal["increase", "decrease"]
TraceSink = Callable[[dict[str, Any]], None]


@dataclass(frozen=True)
class CycleUpdate:
    """Alternating update around ``vertices[0] -e0- vertices[1] -e1- ... -> vertices[0]``."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    selected: int
    direction: Direction
    step: int = 1

    def signs(self) -> dict[int, int]:
        j = self.edges.index(self.selected)
        base = 1 if self.direction == "increase" else -1
        return {e: base if (i - j) % 2 == 0 else -base for i, e in enumerate(self.edges)}


def _check_cycle(G: BipartiteMultigraph, u: CycleUpdate) -> None:
    n = len(u.edges)
    if n < 2 or n % 2 or len(u.vertices) != n or len(set(u.edges)) != n or len(set(u.vertices)) != n:
        raise InvariantViolation("cycle must be a simple closed walk of even length")
    for i, e in enumerate(u.edges):
        if set(G.edges[e]) != {u.vertices[i], u.vertices[(i + 1) % n]}:
            raise InvariantViolation(f"edge {e} does not join consecutive cycle vertices")
    if u.selected not in u.edges or u.step < 1:
        raise InvariantViolation("selected edge must lie on the cycle and step must be >= 1")


def apply_cycle_update(f: FractionalMatching, u: CycleUpdate) -> FractionalMatching:
    _check_cycle(f.graph, u)
    den = f.denominator
    weights = dict(f.weights)
    for e, s in u.signs().items():
        if not 0 < weights[e] < den:
            raise InvariantViolation(f"cycle edge {e} is not in the support")
        w = weights[e] + s * u.step
        if not 0 <= w <= den:
            raise WeightRangeError(f"step {u.step}/{den} pushes edge {e} out of [0, 1]")
        weights[e] = w
    return f.with_weights(weights)


def saturating_step(f: FractionalMatching, edges: Sequence[int], selected: int, direction: Direction) -> int:
    """Largest ``t`` such that the alternating ``+-t/den`` update stays in range."""
    j = edges.index(selected)
    base = 1 if direction == "increase" else -1
    den = f.denominator
    room = []
    for i, e in enumerate(edges):
        s = base if (i - j) % 2 == 0 else -base
        room.append(den - f.weights[e] if s > 0 else f.weights[e])
    return min(room)


def _support_adjacency(
    G: BipartiteMultigraph, edges: Iterable[int], avoid: frozenset[int] | set[int]
) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in sorted(edges):
        u, v = G.edges[e]
        if u in avoid or v in avoid:
            continue
        adj.setdefault(u, []).append((e, v))
        adj.setdefault(v, []).append((e, u))
    return adj


def _dfs_cycle(
    adj: dict[int, list[tuple[int, int]]], blocked: set[int] | None = None
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """First cycle met by a smallest-id-first depth-first search."""
    blocked = blocked or set()
    state: dict[int, int] = {}  # 1 = on stack, 2 = finished
    for root in sorted(adj):
        if root in state or root in blocked:
            continue
        stack_v = [root]
        stack_e: list[int] = [-1]
        cursor = [0]
        pos = {root: 0}
        state[root] = 1
        while stack_v:
            v = stack_v[-1]
            nbrs = adj[v]
            i = cursor[-1]
            advanced = False
            while i < len(nbrs):
                e, w = nbrs[i]
                i += 1
                if e == stack_e[-1] or w in blocked:
                    continue
                st = state.get(w)
                if st == 1:
                    k = pos[w]
                    verts = tuple(stack_v[k:])
                    edges = tuple(stack_e[k + 1 :]) + (e,)
                    return verts, edges
                if st is None:
                    cursor[-1] = i
                    stack_v.append(w)
                    stack_e.append(e)
                    cursor.append(0)
                    pos[w] = len(stack_v) - 1
                    state[w] = 1
                    advanced = True
                    break
            if not advanced:
                state[v] = 2
                stack_v.pop()
                stack_e.pop()
                cursor.pop()
                del pos[v]
    return None


def find_support_cycle(f: FractionalMatching, direction: Direction = "decrease") -> CycleUpdate | None:
    """A cycle of the support avoiding boundary vertices, with a saturating step.

    The selected edge is the smallest edge id on the cycle.
    """
    adj = _support_adjacency(f.graph, support_edges(f), f.graph.boundary)
    found = _dfs_cycle(adj)
    if found is None:
        return None
    verts, edges = found
    sel = min(edges)
    return CycleUpdate(verts, edges, sel, direction, saturating_step(f, edges, sel, direction))


class _ResumableCycleSearch:
    """Depth-first cycle search that survives edge deletions.

    After a cycle is reported and some of its edges die, the search unwinds
    only past the first dead tree edge.  Finished vertices stay finished:
    their subtrees hang off a bridge and can never lie on a cycle again.
    """

    def __init__(self, adj: dict[int, list[tuple[int, int]]]):
        self.adj = adj
        self.alive = {e for nbrs in adj.values() for e, _ in nbrs}
        self.state: dict[int, int] = {}
        self.roots = iter(sorted(adj))
        self.stack_v: list[int] = []
        self.stack_e: list[int] = []
        self.cursor: list[int] = []
        self.pos: dict[int, int] = {}

    def kill(self, dead: Iterable[int]) -> None:
        dead = set(dead)
        self.alive -= dead
        cut = None
        for i in range(1, len(self.stack_e)):
            if self.stack_e[i] in dead:
                cut = i
                break
        if cut is not None:
            for v in self.stack_v[cut:]:
                del self.state[v]
                del self.pos[v]
            del self.stack_v[cut:], self.stack_e[cut:], self.cursor[cut:]

    def next_cycle(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        adj, state, alive = self.adj, self.state, self.alive
        while True:
            if not self.stack_v:
                for root in self.roots:
                    if root not in state:
                        break
                else:
                    return None
                self.stack_v, self.stack_e, self.cursor = [root], [-1], [0]
                self.pos = {root: 0}
                state[root] = 1
            v = self.stack_v[-1]
            nbrs = adj[v]
            i = self.cursor[-1]
            descended = False
            while i < len(nbrs):
                e, w = nbrs[i]
                i += 1
                if e == self.stack_e[-1] or e not in alive:
                    continue
                st = state.get(w)
                if st == 1:
                    self.cursor[-1] = i - 1
                    k = self.pos[w]
                    return tuple(self.stack_v[k:]), tuple(self.stack_e[k + 1 :]) + (e,)
                if st is None:
                    self.cursor[-1] = i
                    self.stack_v.append(w)
                    self.stack_e.append(e)
                    self.cursor.append(0)
                    self.pos[w] = len(self.stack_v) - 1
                    state[w] = 1
                    descended = True
                    break
            if not descended:
                state[v] = 2
                del self.pos[v]
                self.stack_v.pop()
                self.stack_e.pop()
                self.cursor.pop()


def round_to_acyclic(f: FractionalMatching, trace: TraceSink | None = None) -> FractionalMatching:
    """Saturate eligible support cycles until none is left.

    Each update drives at least one edge to 0 or 1, so at most ``|E|``
    updates happen.
    """
    G = f.graph
    den = f.denominator
    weights = dict(f.weights)
    supp = {e for e, w in weights.items() if 0 < w < den}
    search = _ResumableCycleSearch(_support_adjacency(G, supp, G.boundary))
    updates = 0
    while True:
        found = search.next_cycle()
        if found is None:
            break
        verts, edges = found
        sel = min(edges)
        j = edges.index(sel)
        # decrease at the selected edge
        signs = [-1 if (i - j) % 2 == 0 else 1 for i in range(len(edges))]
        t = min(weights[e] if s < 0 else den - weights[e] for e, s in zip(edges, signs))
        dropped = []
        for e, s in zip(edges, signs):
            weights[e] += s * t
            if weights[e] in (0, den):
                dropped.append(e)
        supp.difference_update(dropped)
        search.kill(dropped)
        updates += 1
        if updates > len(G.edges):
            raise InvariantViolation("cycle saturation exceeded |E| updates")
        if trace is not None:
            trace({
                "round": updates,
                "cycle": list(edges),
                "selected": sel,
                "direction": "decrease",
                "step": t,
                "support_size": len(supp),
            })
    return f.with_weights(weights)


def random_sigma(seed: int, steps: int, colors: int = 1 << 30) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    return [(rng.randrange(colors), rng.randrange(2)) for _ in range(steps)]


def _vertex_keys(G: BipartiteMultigraph) -> dict[int, str]:
    return {v: repr(G.labels[v]) if G.labels else str(v) for v in G.vertices}


def _cycle_priority(color: int, keys: Mapping[int, str], verts: Iterable[int]) -> bytes:
    """Pseudo-random rank of a cycle, a function of its vertex labels and the color only."""
    joined = "|".join(sorted(keys[v] for v in verts))
    return hashlib.blake2b(f"{color}|{joined}".encode(), digest_size=8).digest()


def short_support_cycles(
    G: BipartiteMultigraph, supp: set[int], max_len: int
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every simple support cycle of length <= ``max_len`` avoiding the boundary.

    Each cycle is reported once, rooted at its smallest vertex id.
    """
    adj = _support_adjacency(G, supp, G.boundary)
    out = []
    seen: set[frozenset[int]] = set()
    for root in sorted(adj):
        stack = [(root, -1, (root,), ())]
        while stack:
            v, via, verts, edges = stack.pop()
            for e, w in adj[v]:
                if e == via:
                    continue
                if w == root and len(edges) + 1 >= 2:
                    key = frozenset(edges + (e,))
                    if key not in seen:
                        seen.add(key)
                        out.append((verts, edges + (e,)))
                    continue
                if w < root or w in verts or len(edges) + 1 >= max_len:
                    continue
                stack.append((w, e, verts + (w,), edges + (e,)))
    return out


def branch_cycles(
    G: BipartiteMultigraph, supp: set[int], max_branch: int
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Support cycles through at most ``max_branch`` vertices of support degree >= 3.

    Maximal runs of degree-2 vertices are contracted to single links, so the
    search cost depends on the number of branch vertices, not on how long
    the runs between them are.  Components that are plain cycles are
    returned whole.  Boundary vertices are excluded.
    """
    adj = _support_adjacency(G, supp, G.boundary)
    branch = sorted(v for v, nb in adj.items() if len(nb) >= 3)
    is_branch = set(branch)
    # links: walk from each branch vertex along each incident edge
    links: dict[int, list[tuple[int, int, tuple[int, ...], tuple[int, ...]]]] = {b: [] for b in branch}
    for b in branch:
        for e, w in adj[b]:
            verts, edges = [b], [e]
            prev, cur = e, w
            while cur not in is_branch and len(adj[cur]) == 2:
                verts.append(cur)
                (nxt,) = [x for x in adj[cur] if x[0] != prev]
                edges.append(nxt[0])
                prev, cur = nxt
            if cur not in is_branch:
                continue  # dead end next to the boundary
            links[b].append((min(edges), cur, tuple(verts), tuple(edges)))
    out: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    path: list[tuple[int, int, tuple[int, ...], tuple[int, ...]]] = []
    on_path: set[int] = set()

    def close(last: tuple[int, int, tuple[int, ...], tuple[int, ...]]) -> None:
        # each cycle is met once per direction; keep the one whose first link is smaller
        first = path[0] if path else last
        if path and first[0] > last[0]:
            return
        verts: list[int] = []
        edges: list[int] = []
        for lk in path + [last]:
            verts.extend(lk[2])
            edges.extend(lk[3])
        if len(set(edges)) == len(edges):
            out.append((tuple(verts), tuple(edges)))

    def grow(root: int, node: int, via: int) -> None:
        for lk in links[node]:
            lid, nxt = lk[0], lk[1]
            if lid == via:
                continue
            if nxt == root:
                close(lk)
            elif nxt > root and nxt not in on_path and len(path) + 1 < max_branch:
                path.append(lk)
                on_path.add(nxt)
                grow(root, nxt, lid)
                on_path.discard(nxt)
                path.pop()

    for root in branch:
        loops = set()
        for lk in links[root]:
            if lk[1] == root and lk[0] not in loops:
                # a run leaving and re-entering the same branch vertex
                loops.add(lk[0])
                out.append((lk[2], lk[3]))
        on_path.add(root)
        for lk in links[root]:
            lid, nxt = lk[0], lk[1]
            if nxt > root:
                path.append(lk)
                on_path.add(nxt)
                grow(root, nxt, lid)
                on_path.discard(nxt)
                path.pop()
        on_path.discard(root)
    # plain cycle components
    done: set[int] = set(is_branch)
    for start in sorted(adj):
        if start in done or len(adj[start]) != 2:
            continue
        verts, edges = [start], []
        prev, cur = -1, start
        closed = False
        while True:
            done.add(cur)
            nxts = [x for x in adj[cur] if x[0] != prev]
            if len(adj[cur]) != 2 or not nxts:
                break
            e, w = nxts[0]
            edges.append(e)
            if w == start:
                closed = True
                break
            if w in done or len(adj[w]) != 2:
                break
            verts.append(w)
            prev, cur = e, w
        if closed and len(edges) >= 2:
            out.append((tuple(verts), tuple(edges)))
    return out


def sigma_round(
    f: FractionalMatching,
    sigma: Sequence[tuple[int, int]],
    steps: int | None = None,
    max_branch: int | None = None,
    trace: TraceSink | None = None,
) -> FractionalMatching:
    """Run ``steps`` scheduled rounds of single-step cycle alternation.

    Round ``i`` uses ``sigma[i] = (color, bit)``.  The color seeds a priority
    order on cycles; cycles are packed greedily in that order into a maximal
    vertex-disjoint family.  With ``max_branch`` set, the candidates are the
    cycles through at most that many branch vertices (:func:`branch_cycles`),
    which keeps every round local; otherwise the
    packing is completed by depth-first search so that it is maximal among
    all support cycles.  ``bit == 0`` raises the selected (smallest-id) edge of
    each cycle by ``1/den``, ``bit == 1`` lowers it.
    """
    G = f.graph
    den = f.denominator
    weights = dict(f.weights)
    steps = len(sigma) if steps is None else steps
    if steps > len(sigma):
        raise ValueError("schedule shorter than the requested number of rounds")
    keys = _vertex_keys(G)
    for i in range(steps):
        color, bit = sigma[i]
        supp = {e for e, w in weights.items() if 0 < w < den}
        if max_branch is not None:
            cands = branch_cycles(G, supp, max_branch)
        else:
            cands = short_support_cycles(G, supp, 4)
        cands.sort(key=lambda c: _cycle_priority(color, keys, c[0]))
        used: set[int] = set()
        chosen = []
        for verts, edges in cands:
            if used.isdisjoint(verts):
                used.update(verts)
                chosen.append(edges)
        if max_branch is None:
            adj = _support_adjacency(G, supp, G.boundary)
            while True:
                found = _dfs_cycle(adj, used)
                if found is None:
                    break
                used.update(found[0])
                chosen.append(found[1])
        for edges in chosen:
            sel = min(edges)
            j = edges.index(sel)
            base = 1 if bit == 0 else -1
            for k, e in enumerate(edges):
                weights[e] += base if (k - j) % 2 == 0 else -base
        if trace is not None:
            trace({
                "round": i + 1,
                "color": color,
                "bit": bit,
                "cycles": [list(c) for c in chosen],
                "selected": [min(c) for c in chosen],
                "direction": "increase" if bit == 0 else "decrease",
                "step": 1,
                "support_size": sum(1 for w in weights.values() if 0 < w < den),
            })
        if not chosen:
            break
    return f.with_weights(weights)


def resolve_path_components(f: FractionalMatching, odd: bool | None = None) -> FractionalMatching:
    """Round support components that are paths.

    A path component is a component of the (boundary-split) support whose
    interior vertices all have support degree 2.  With an odd grid the path
    weights alternate around 1/2 and are rounded to the nearest integer; with
    an even grid every path edge is set to 1/2.
    """
    from .generators import BoundariedForest

    den = f.denominator
    odd = den % 2 == 1 if odd is None else odd
    if not odd and den % 2:
        f = f.regrid(2 * den)
        den = f.denominator
    forest = BoundariedForest.from_support(f)
    weights = dict(f.weights)
    for comp_edges in forest.path_components():
        for e in comp_edges:
            w = weights[e]
            if odd:
                if 2 * w == den:
                    raise InvariantViolation(f"edge {e} has weight exactly 1/2 on an odd grid")
                weights[e] = den if 2 * w > den else 0
            else:
                weights[e] = den // 2
    return f.with_weights(weights)
