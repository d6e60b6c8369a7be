import pytest
from hypothesis import given
from hypothesis import strategies as st

from kfactors import io
from kfactors.errors import StructuralError
from kfactors.generators import (
    HEX_ORACLE,
    LINE_ORACLE,
    SQUARE4_ORACLE,
    BoundariedForest,
    gen_boundaried_forest,
    gen_oracle,
    gen_random_regular_bipartite,
    is_acyclic,
    torus,
    window,
)
from kfactors.graph import FractionalMatching, validate_regular_bipartite

ORACLES = [LINE_ORACLE, HEX_ORACLE, SQUARE4_ORACLE]


def test_random_d0_is_edgeless():
    G = gen_random_regular_bipartite(3, 0, 1)
    assert len(G.sides) == 6 and not G.edges


def test_random_n1_is_a_bundle():
    G = gen_random_regular_bipartite(1, 3, 5)
    assert len(G.sides) == 2 and len(G.edges) == 3
    assert set(G.edges.values()) == {(0, 1)}


def test_random_n50_d4():
    assert validate_regular_bipartite(gen_random_regular_bipartite(50, 4, 7), 4)


@given(n=st.integers(1, 30), d=st.integers(0, 6), seed=st.integers(0, 10**6))
def test_random_is_regular_and_seeded(n, d, seed):
    G = gen_random_regular_bipartite(n, d, seed)
    assert validate_regular_bipartite(G, d)
    assert gen_random_regular_bipartite(n, d, seed).edges == G.edges


def test_oracle_degrees():
    assert [O.degree for O in ORACLES] == [2, 3, 4]
    O = gen_oracle(2, [(0, 0), (1, 0), (0, 1)])
    assert O == HEX_ORACLE


def test_oracle_rejects_bad_shifts():
    with pytest.raises(StructuralError):
        gen_oracle(2, [])
    with pytest.raises(StructuralError):
        gen_oracle(2, [(1,)])


def test_line_window_is_a_path():
    W = window(LINE_ORACLE, (0,), 5)
    G = W.graph
    assert len(G.sides) == 22
    degs = sorted(G.degree(v) for v in G.vertices)
    assert degs == [1, 1] + [2] * 20
    assert W.boundary == {v for v in G.vertices if G.degree(v) == 1}


def test_radius_zero_is_all_boundary():
    for O in ORACLES:
        W = window(O, (0,) * O.m, 0)
        assert W.boundary == set(W.graph.vertices)


@pytest.mark.parametrize("O", ORACLES)
@pytest.mark.parametrize("radius", [1, 3, 6])
def test_window_interior_has_full_degree(O, radius):
    W = window(O, (2,) * O.m, radius)
    G = W.graph
    assert validate_regular_bipartite(G, O.degree, interior_only=True)
    # boundary exactly = vertices missing a neighbour
    missing = {v for v in G.vertices if G.degree(v) < O.degree}
    assert missing == W.boundary


def test_boundary_band_shrinks():
    fracs = []
    for r in (4, 8, 16):
        W = window(SQUARE4_ORACLE, (0, 0), r)
        frac = len(W.boundary) / len(W.graph.sides)
        assert frac <= 2.0 / r  # each side loses at most one row and one column
        fracs.append(frac)
    assert fracs == sorted(fracs, reverse=True)


@given(r=st.integers(1, 5), extra=st.integers(1, 4), cx=st.integers(-50, 50), cy=st.integers(-50, 50))
def test_nested_windows_agree(r, extra, cx, cy):
    small = window(HEX_ORACLE, (cx, cy), r)
    big = window(HEX_ORACLE, (cx, cy), r + extra)

    def edge_set(W):
        lab = W.graph.labels
        return {(lab[u], lab[v]) for u, v in W.graph.edges.values()}

    assert set(small.graph.labels.values()) <= set(big.graph.labels.values())
    inside = set(small.graph.labels.values())
    big_inside = {(a, b) for a, b in edge_set(big) if a in inside and b in inside}
    assert edge_set(small) == big_inside


@given(seed=st.integers(0, 1000), shift=st.integers(-3, 3))
def test_seeded_ids_order_consistently(seed, shift):
    A = window(HEX_ORACLE, (0, 0), 3, seed)
    B = window(HEX_ORACLE, (shift, 0), 3, seed)
    ia = {lab: v for v, lab in A.graph.labels.items()}
    ib = {lab: v for v, lab in B.graph.labels.items()}
    common = sorted(set(ia) & set(ib), key=lambda lab: ia[lab])
    assert [ib[lab] for lab in common] == sorted(ib[lab] for lab in common)


def test_torus_is_regular_without_boundary():
    for O in ORACLES:
        G = torus(O, 4)
        assert not G.boundary
        assert validate_regular_bipartite(G, O.degree)


def test_spider():
    F = gen_boundaried_forest({"kind": "spider", "legs": 3, "length": 4})
    assert len(F.graph.sides) == 13 and len(F.stubs) == 3
    assert F.graph.degree(0) == 3


def test_path_forest():
    F = gen_boundaried_forest({"kind": "path", "length": 10})
    assert len(F.stubs) == 2 and F.is_path_component(set(F.graph.vertices))


@given(seed=st.integers(0, 10**6), size=st.integers(3, 120), p=st.floats(0, 1))
def test_random_forest_invariants(seed, size, p):
    F = gen_boundaried_forest({"kind": "random", "size": size, "p_chain": p}, seed)
    F.check()
    assert is_acyclic(F.graph)
    assert all(F.graph.degree(s) == 1 for s in F.stubs)


def test_random_forest_100_seed_3():
    F = gen_boundaried_forest({"kind": "random", "size": 100}, 3)
    F.check()
    assert len(F.graph.sides) == 100


def test_bad_forest_spec():
    with pytest.raises(StructuralError):
        gen_boundaried_forest({"kind": "spider", "legs": 1, "length": 2})
    with pytest.raises(StructuralError):
        gen_boundaried_forest({"kind": "lattice"})


def test_from_support_cuts_boundary_edges_into_stubs():
    W = window(LINE_ORACLE, (0,), 3)
    f = FractionalMatching.uniform(W.graph, 2)
    F = BoundariedForest.from_support(f)
    F.check()
    # a path: both boundary vertices become stubs, edge ids are kept
    assert len(F.stubs) == 2
    assert set(F.graph.edges) == set(W.graph.edges)
    assert all(F.origin[s] in W.boundary for s in F.stubs)


def test_forest_document_roundtrip():
    F = gen_boundaried_forest({"kind": "random", "size": 40}, 9)
    G = io.forest_from_dict(io.forest_to_dict(F))
    assert G.stubs == F.stubs and G.graph.edges == F.graph.edges
