"""Forests seen through a smaller box than the one they were rounded on."""

from kfactors.generators import BoundariedForest, window
from kfactors.graph import BipartiteMultigraph, FractionalMatching
from kfactors.rounding import round_to_acyclic


def inner_view(g: FractionalMatching, center, radius: int) -> BoundariedForest:
    """Support of ``g`` restricted to the box of ``radius`` around ``center``.

    Vertices outside the box join the boundary, so support chains leaving the
    box end in stubs exactly as an infinite support would look from inside.
    """
    G = g.graph
    outside = {v for v, (p, _) in G.labels.items() if max(abs(a - b) for a, b in zip(p, center)) > radius}
    H = BipartiteMultigraph(G.sides, G.edges, set(G.boundary) | outside, G.labels)
    return BoundariedForest.from_support(FractionalMatching(H, g.denominator, g.weights, g.k))


def rounded_views(O, seed: int, outer: int = 12, inner: int = 6):
    center = tuple(seed * (i + 3) % 97 for i in range(O.m))
    W = window(O, center, outer, seed)
    g = round_to_acyclic(FractionalMatching.uniform(W.graph, O.degree))
    return g, inner_view(g, center, inner)
