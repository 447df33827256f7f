import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from crown.decompose import (
    NotATree, NotDegenerate, StarForest, anchored_star_peel, edge_key, is_matching,
    is_star_forest, maximal_matching, maximum_matching, outerplanar_to_three_star_forests, paths_and_cycles,
    tree_to_two_star_forests,
)
from crown.gen import gen_random


def assert_partition(g, forests):
    """Forests are star forests whose edge sets partition E(g) exactly."""
    seen = []
    for f in forests:
        assert is_star_forest(f)
        seen.extend(edge_key(*e) for e in f.edges())
    assert len(seen) == len(set(seen))
    assert set(seen) == {edge_key(u, v) for u, v in g.edges}


def stars(f: StarForest):
    return {c: set(leaves) for c, leaves in f.nonempty_stars()}


def test_path_of_three_rooted_at_middle():
    f0, f1 = tree_to_two_star_forests(nx.path_graph("abc"), root="b")
    assert stars(f0) == {"b": {"a", "c"}} and f1.is_empty()


def test_path_of_four_parity_split():
    f0, f1 = tree_to_two_star_forests(nx.path_graph("abcd"), root="b")
    assert stars(f0) == {"b": {"a", "c"}} and stars(f1) == {"c": {"d"}}


def test_single_edge_tree():
    f0, f1 = tree_to_two_star_forests(nx.path_graph("ab"))
    assert len(f0.edges()) == 1 and f1.is_empty()


def test_tree_cover_rejects_cycles():
    with pytest.raises(NotATree):
        tree_to_two_star_forests(nx.cycle_graph(4))


def test_peel_star_is_one_root_star():
    (s,) = anchored_star_peel(nx.star_graph(3))
    assert s.center == 0 and set(s.leaves) == {1, 2, 3} and s.anchor is None


def test_peel_path_of_five():
    out = anchored_star_peel(nx.path_graph("abcde"), root="c")
    by_center = {s.center: s for s in out}
    assert by_center["b"].anchor == ("b", "c") and by_center["d"].anchor == ("d", "c")
    assert by_center["c"].anchor is None and out[-1].center == "c"


def test_peel_path_of_three():
    (s,) = anchored_star_peel(nx.path_graph("abc"))
    assert s.center == "b" and s.anchor is None


def test_triangle_gives_one_edge_per_forest():
    g = nx.cycle_graph("abc")
    forests = outerplanar_to_three_star_forests(g)
    assert [len(f.edges()) for f in forests] == [1, 1, 1]
    centers = [c for f in forests for c, _ in f.nonempty_stars()]
    assert sorted(centers) == ["a", "b", "c"]
    assert_partition(g, forests)


def test_single_edge_outerplanar():
    forests = outerplanar_to_three_star_forests(nx.path_graph("ab"))
    assert sum(not f.is_empty() for f in forests) == 1


def test_fan_on_five_vertices():
    g = nx.Graph([(0, i) for i in range(1, 5)] + [(i, i + 1) for i in range(1, 4)])
    assert g.number_of_edges() == 7
    forests = outerplanar_to_three_star_forests(g)
    assert len(forests) == 3
    assert_partition(g, forests)


def test_outerplanar_rejects_k4():
    with pytest.raises(NotDegenerate):
        outerplanar_to_three_star_forests(nx.complete_graph(4))


def brute_max_matching(g):
    edges = list(g.edges)
    for r in range(len(edges) // 2 + 1, 0, -1):
        for sub in combinations(edges, r):
            ends = [v for e in sub for v in e]
            if len(ends) == len(set(ends)):
                return r
    return 0


@pytest.mark.parametrize("g, size", [(nx.path_graph(4), 2), (nx.cycle_graph(3), 1)])
def test_maximum_matching_small(g, size):
    m = maximum_matching(g)
    assert is_matching(g, m) and len(m) == size


def test_petersen_matching_against_enumeration():
    g = nx.petersen_graph()
    assert brute_max_matching(g) == 5
    m = maximum_matching(g)
    assert is_matching(g, m) and len(m) == 5


def test_maximal_matching_is_greedy_and_maximal():
    g = nx.path_graph(4)
    m = maximal_matching(g)
    assert [set(e) for e in m] == [{0, 1}, {2, 3}]
    rnd = random.Random(3)
    for _ in range(50):
        h = nx.gnp_random_graph(9, 0.3, seed=rnd.randrange(10**6))
        m = maximal_matching(h)
        assert is_matching(h, m)
        covered = {v for e in m for v in e}
        assert all(u in covered or v in covered for u, v in h.edges)


def test_paths_and_cycles_split():
    paths, cycles = paths_and_cycles([("a", "b"), ("b", "c"), ("x", "y"), ("y", "z"), ("z", "x")])
    assert paths == [["a", "b", "c"]] and len(cycles) == 1 and set(cycles[0]) == {"x", "y", "z"}


# --- properties --------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_random_trees_split_into_two_star_forests(n, seed):
    g = gen_random("tree", n, seed=seed).graph()
    forests = tree_to_two_star_forests(g)
    assert len(forests) == 2
    assert_partition(g, forests)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 40), st.integers(0, 10**6))
def test_random_outerplanar_split_into_three_star_forests(n, seed):
    g = gen_random("outerplanar", n, seed=seed).graph()
    forests = outerplanar_to_three_star_forests(g)
    assert len(forests) == 3
    assert_partition(g, forests)
    # within one forest a vertex centers at most one star
    for f in forests:
        centers = [c for c, _ in f.nonempty_stars()]
        assert len(centers) == len(set(centers))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 30), st.integers(0, 10**6))
def test_peel_covers_all_non_anchor_edges(n, seed):
    g = gen_random("tree", n, seed=seed).graph()
    if max(d for _, d in g.degree) < 2:
        return
    out = anchored_star_peel(g)
    star_edges = [edge_key(s.center, leaf) for s in out for leaf in s.leaves]
    anchors = [edge_key(*s.anchor) for s in out if s.anchor]
    assert len(star_edges) == len(set(star_edges))
    assert set(star_edges) | set(anchors) == {edge_key(u, v) for u, v in g.edges}
    assert not set(star_edges) & set(anchors)
    centers = [s.center for s in out]
    assert len(centers) == len(set(centers))


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 60), st.integers(0, 10**6))
def test_matching_size_bound_on_triangulations(n, seed):
    g = gen_random("planar-triangulation", n, seed=seed).graph()
    m = maximum_matching(g)
    assert is_matching(g, m)
    assert 3 * len(m) >= g.number_of_edges() - 2 * g.number_of_nodes()
