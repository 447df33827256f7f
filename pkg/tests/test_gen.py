from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from crown.gen import (
    ELEMENT_SIDE, GEN_CLASSES, PETAL_SIDE, STAR_SIDE, GadgetSpec, cooccurrences_from_sentences, gadget_layout,
    gen_from_text, gen_gadget, gen_random, planted_gadget, read_cooccurrences, read_frequencies,
)
from crown.model import POINT, PROPER, SemanticError, evaluate, write_instance
from crown.planar import check_embedding


def test_generation_is_deterministic():
    assert write_instance(gen_random("path", 5, seed=1)) == write_instance(gen_random("path", 5, seed=1))
    assert write_instance(gen_random("path", 5, seed=1)) != write_instance(gen_random("path", 5, seed=2))


def test_triangulation_has_valid_embedding():
    inst = gen_random("planar-triangulation", 12, seed=0)
    g = inst.graph()
    check_embedding(g, inst.embedding)
    assert g.number_of_edges() == 30


def test_bipartite_is_two_colorable():
    assert nx.is_bipartite(gen_random("bipartite", 6, seed=0).graph())


def test_unsupported_class():
    with pytest.raises(SemanticError):
        gen_random("hypercube", 4)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(GEN_CLASSES), st.integers(3, 30), st.integers(0, 10**6), st.booleans())
def test_random_instances_match_their_class(cls, n, seed, unweighted):
    inst = gen_random(cls, n, seed=seed, unweighted=unweighted)
    g = inst.graph()
    assert g.number_of_nodes() == n
    assert all(1 <= d.width <= 20 and 1 <= d.height <= 20 for d in inst.dims.values())
    if unweighted:
        assert all(e.profit == 1 for e in inst.edges)
    if cls in ("path", "tree", "star"):
        assert nx.is_tree(g)
    if cls == "cycle":
        assert all(d == 2 for _, d in g.degree)
    if cls == "bipartite":
        assert nx.is_bipartite(g)
    if cls in ("outerplanar", "planar-triangulation"):
        check_embedding(g, inst.embedding)


def test_single_hyperedge_gadget_counts():
    inst = gen_gadget(GadgetSpec(1, ((0, 0, 0),)))
    assert len(inst.ids) == 12 and len(inst.edges) == 11


def test_gadget_structure():
    spec, _ = planted_gadget(3, extra=4, seed=1)
    g = gen_gadget(spec).graph()
    assert nx.is_bipartite(g)
    # hub: eight petals plus three elements
    assert max(d for _, d in g.degree) == 11
    sides = {d.width for d in gen_gadget(spec).dims.values()}
    assert sides == {ELEMENT_SIDE, STAR_SIDE, PETAL_SIDE}


@pytest.mark.parametrize("model", [PROPER, POINT])
@pytest.mark.parametrize("k, extra", [(1, 0), (2, 2), (3, 3), (3, 6)])
def test_planted_layout_profit(k, extra, model):
    spec, matching = planted_gadget(k, extra, seed=k)
    inst = gen_gadget(spec, model)
    _, profit = evaluate(inst, gadget_layout(spec, matching))
    assert profit == 23 * len(spec.hyperedges) + k


def test_empty_gadget():
    spec = GadgetSpec(2, ())
    inst = gen_gadget(spec)
    assert len(inst.ids) == 6 and not inst.edges
    assert evaluate(inst, gadget_layout(spec, []))[1] == 0


def test_gadget_spec_validation():
    with pytest.raises(SemanticError):
        GadgetSpec(1, ((0, 0, 1),))
    with pytest.raises(SemanticError):
        GadgetSpec(1, ((0, 0, 0), (0, 0, 0)))


def test_two_words_one_edge():
    inst = gen_from_text({"alpha": 2, "beta": 1}, {("alpha", "beta"): 3})
    assert [(e.u, e.v, e.profit) for e in inst.edges] == [("alpha", "beta", 3)]


def test_box_size_arithmetic():
    inst = gen_from_text({"word": 5}, {}, scale=2)
    d = inst.dims["word"]
    assert (d.width, d.height) == (8, 2)


def test_importance_factor_spans_three_levels():
    inst = gen_from_text({"aa": 1, "bb": 5, "cc": 9}, {})
    assert [inst.dims[w].height for w in ("aa", "bb", "cc")] == [1, 2, 3]


def test_empty_text_rejected():
    with pytest.raises(SemanticError):
        gen_from_text({}, {})


CORPUS = """
graphs model relations between words in a document
a word cloud draws each word as a box
boxes touch when words appear together in one sentence
contact layouts maximize total profit of touching pairs
rectangles never overlap but share segments
""".strip().splitlines()


def test_small_corpus_pipeline():
    sentences = [line.split() for line in CORPUS]
    freq, pairs = cooccurrences_from_sentences(sentences)
    inst = gen_from_text(freq, pairs)
    words = {w for s in sentences for w in s}
    assert len(inst.ids) == len(words) == 35
    expected = {frozenset(p) for s in sentences for p in combinations(set(s), 2)}
    assert {e.key for e in inst.edges} == expected


def test_text_file_readers():
    freq = read_frequencies("alpha 3\n# comment\n\nbeta 1/2\n")
    assert freq == {"alpha": 3, "beta": 0.5}
    assert read_cooccurrences("alpha beta 2\n") == {("alpha", "beta"): 2}
    with pytest.raises(SemanticError):
        read_frequencies("alpha\n")
