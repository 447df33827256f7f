import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from crown.decompose import edge_key, is_star_forest, maximum_matching
from crown.gen import gen_random
from crown.planar import (
    EmbeddingInvalid, canonical_three_forests, check_embedding, is_valid_r_division, planar_separator,
    planar_star_forest_cover, r_division, triangulate,
)


def rotation(g):
    ok, emb = nx.check_planarity(g)
    assert ok
    return {v: list(emb.neighbors_cw_order(v)) for v in g.nodes}


def assert_cover(g, forests):
    assert len(forests) == 6
    seen = []
    for f in forests:
        assert is_star_forest(f)
        seen.extend(edge_key(*e) for e in f.edges())
    assert len(seen) == len(set(seen))
    assert set(seen) == {edge_key(u, v) for u, v in g.edges}


def test_k4_cover_uses_six_forests():
    g = nx.complete_graph(4)
    assert_cover(g, planar_star_forest_cover(g, rotation(g)))


def test_tree_uses_at_most_two_forests():
    g = nx.balanced_tree(2, 3)
    forests = planar_star_forest_cover(g, rotation(g))
    assert_cover(g, forests)
    assert sum(not f.is_empty() for f in forests) <= 2


def test_triangle_cover():
    g = nx.cycle_graph(3)
    assert_cover(g, planar_star_forest_cover(g, rotation(g)))


def test_euler_check_rejects_bad_rotation():
    g = nx.complete_graph(4)
    good = rotation(g)
    check_embedding(g, good)
    bad = dict(good)
    bad[0] = [bad[0][1], bad[0][0], bad[0][2]]
    bad[1] = [bad[1][1], bad[1][0], bad[1][2]]
    with pytest.raises(EmbeddingInvalid):
        check_embedding(g, bad)


def test_rotation_must_match_neighbourhood():
    g = nx.path_graph(3)
    with pytest.raises(EmbeddingInvalid):
        check_embedding(g, {0: [1], 1: [0], 2: []})


def test_canonical_forests_are_spanning_trees_of_triangulation():
    inst = gen_random("planar-triangulation", 30, seed=5)
    g = inst.graph()
    t = triangulate(g, inst.embedding)
    forests = canonical_three_forests(t)
    covered = set()
    for parent in forests:
        h = nx.Graph(list(parent.items()))
        assert nx.is_forest(h)
        covered |= {edge_key(c, p) for c, p in parent.items()}
    assert covered == {edge_key(u, v) for u, v in g.edges}


def test_icosahedron_matching_exceeds_size_bound():
    g = nx.icosahedral_graph()
    bound = (g.number_of_edges() - 2 * g.number_of_nodes()) / 3
    assert bound == 2
    assert len(maximum_matching(g)) == 6


def test_small_graph_is_one_region():
    g = nx.cycle_graph(5)
    div = r_division(g, rotation(g), 5)
    assert div.boundary == frozenset() and len(div.regions) == 1


def test_grid_division():
    g = nx.grid_2d_graph(10, 10)
    div = r_division(g, rotation(g), 25)
    assert is_valid_r_division(g, div, 25)
    assert max(len(r) for r in div.regions) <= 25
    assert len(div.boundary) < 100


def test_path_of_nine():
    g = nx.path_graph(9)
    div = r_division(g, rotation(g), 3)
    assert len(div.boundary) <= 2
    assert is_valid_r_division(g, div, 3)


def separator_ok(g, emb):
    n = g.number_of_nodes()
    a, b, s = planar_separator(g, emb)
    assert a | b | s == set(g.nodes) and not (a & b or a & s or b & s)
    assert not any((u in a and v in b) or (u in b and v in a) for u, v in g.edges)
    return len(s) <= 4 * math.sqrt(n) and max(len(a), len(b)) <= 2 * n / 3


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 200), st.integers(0, 10**6))
def test_separator_contract_on_triangulations(n, seed):
    inst = gen_random("planar-triangulation", n, seed=seed)
    assert separator_ok(inst.graph(), inst.embedding)


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 80), st.integers(0, 10**6))
def test_planar_cover_on_triangulations(n, seed):
    inst = gen_random("planar-triangulation", n, seed=seed)
    g = inst.graph()
    assert g.number_of_edges() == 3 * n - 6
    assert_cover(g, planar_star_forest_cover(g, inst.embedding))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 120), st.integers(3, 30), st.integers(0, 10**6))
def test_r_division_contract(n, r, seed):
    inst = gen_random("planar-triangulation", n, seed=seed)
    g = inst.graph()
    assert is_valid_r_division(g, r_division(g, inst.embedding, r), r)
