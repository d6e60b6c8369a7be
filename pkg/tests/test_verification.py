from itertools import combinations
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfactors.errors import SizeGuardError
from kfactors.generators import complete_bipartite, even_cycle, gen_random_regular_bipartite
from kfactors.graph import FactorSubgraph
from kfactors.pipeline import k_factor
from kfactors.verification import (
    edge_color_regular_bipartite,
    enumerate_k_factors,
    iter_k_factors,
    verify_factor,
)

K33 = complete_bipartite(3)
C4 = even_cycle(4)


def naive_factors(G, k):
    """Every k-subset per vertex, by trying all edge subsets of the right size."""
    m = len(G.vertices) * k // 2
    out = set()
    for sub in combinations(sorted(G.edges), m):
        deg = {v: 0 for v in G.vertices}
        for e in sub:
            for v in G.edges[e]:
                deg[v] += 1
        if all(x == k for x in deg.values()):
            out.add(frozenset(sub))
    return out


# --- verify_factor --------------------------------------------------------------------


def test_empty_is_a_zero_factor():
    assert verify_factor(K33, set(), 0)


def test_whole_graph_is_a_d_factor():
    assert verify_factor(K33, set(K33.edges), 3)


def test_k33_perfect_matching():
    assert verify_factor(K33, FactorSubgraph(K33, frozenset({0, 4, 8}), 1))
    assert not verify_factor(K33, {0, 4, 7}, 1)


def test_foreign_edges_fail():
    assert not verify_factor(C4, {0, 2, 99}, 1)


# --- enumerate_k_factors --------------------------------------------------------------


def test_k33_has_six_perfect_matchings():
    assert enumerate_k_factors(K33, 1) == factorial(3) == 6


def test_c4_counts():
    assert enumerate_k_factors(C4, 1) == 2
    assert enumerate_k_factors(C4, 2) == 1


def test_size_guard():
    with pytest.raises(SizeGuardError):
        enumerate_k_factors(gen_random_regular_bipartite(10, 4, 0), 2)


@settings(max_examples=40)
@given(n=st.integers(1, 4), d=st.integers(1, 4), seed=st.integers(0, 10**6), data=st.data())
def test_enumeration_matches_naive(n, d, seed, data):
    k = data.draw(st.integers(0, d))
    G = gen_random_regular_bipartite(n, d, seed)
    assert set(iter_k_factors(G, k)) == naive_factors(G, k)


# --- edge_color_regular_bipartite --------------------------------------------------------


def test_k33_colouring():
    classes = edge_color_regular_bipartite(K33, 3)
    assert len(classes) == 3
    assert all(verify_factor(K33, c, 1) for c in classes)
    assert set().union(*classes) == set(K33.edges)


def test_even_cycle_colouring():
    G = even_cycle(8)
    a, b = edge_color_regular_bipartite(G, 2)
    assert a | b == set(G.edges) and not a & b


def test_bundle_colouring():
    G = gen_random_regular_bipartite(1, 3, 0)
    assert sorted(map(len, edge_color_regular_bipartite(G, 3))) == [1, 1, 1]


@given(n=st.integers(1, 25), d=st.integers(1, 6), seed=st.integers(0, 10**6), data=st.data())
def test_unions_of_colour_classes_are_factors(n, d, seed, data):
    G = gen_random_regular_bipartite(n, d, seed)
    classes = edge_color_regular_bipartite(G, d)
    picks = data.draw(st.sets(st.integers(0, d - 1)))
    union = set().union(*(classes[i] for i in picks))
    assert verify_factor(G, union, len(picks))


# --- pipeline against the oracles ---------------------------------------------------------


@settings(max_examples=40)
@given(n=st.integers(1, 5), d=st.integers(1, 4), seed=st.integers(0, 10**6), data=st.data())
def test_pipeline_output_is_enumerated(n, d, seed, data):
    G = gen_random_regular_bipartite(n, d, seed)
    if len(G.edges) > 20:
        return
    k = data.draw(st.sampled_from([k for k in range(d + 1) if k % 2 == 0 or d % 2]))
    H = k_factor(G, d, k)
    assert H.edges in set(iter_k_factors(G, k))
