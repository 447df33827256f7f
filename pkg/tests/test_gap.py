from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from crown.gap import (
    Bin, BudgetExceeded, GapInstance, Item, SizeExceeded, assignment_profit, check_feasible,
    gap_brute_force, gap_iterative_knapsack, gap_star_exact, knapsack_exact, star_gap_instance,
)


def enumerate_knapsack(cap, items):
    best = (Fraction(-1), None)
    for r in range(len(items) + 1):
        for sub in combinations(range(len(items)), r):
            if sum(items[i][0] for i in sub) <= cap:
                p = sum((Fraction(items[i][1]) for i in sub), Fraction(0))
                if p > best[0]:
                    best = (p, sub)
    return best


def test_knapsack_example_matches_enumeration():
    items = [(3, 4), (2, 3), (4, 5)]
    profit, subset = enumerate_knapsack(5, items)
    assert (profit, subset) == (7, (0, 1))
    assert knapsack_exact(5, items) == [0, 1]


def test_knapsack_zero_capacity_and_exact_fit():
    assert knapsack_exact(0, [(1, 5), (2, 1)]) == []
    assert knapsack_exact(10, [(10, 1)]) == [0]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 12), st.lists(st.tuples(st.integers(1, 6), st.integers(0, 9)), max_size=7))
def test_knapsack_optimal(cap, items):
    chosen = knapsack_exact(cap, items)
    assert sum(items[i][0] for i in chosen) <= cap
    assert sum(items[i][1] for i in chosen) == enumerate_knapsack(cap, items)[0]


def _uniform(bins, items):
    """bins: [(id, cap)], items: [(id, size, {bin: profit})]"""
    return GapInstance(
        tuple(Bin(b, c) for b, c in bins),
        tuple(Item(i, {b: s for b in prof}, {b: Fraction(p) for b, p in prof.items()}) for i, s, prof in items),
    )


def test_iterative_single_bin_is_knapsack():
    g = _uniform([("b", 5)], [(f"i{k}", s, {"b": p}) for k, (s, p) in enumerate([(3, 4), (2, 3), (4, 5)])])
    assert gap_iterative_knapsack(g) == {"i0": "b", "i1": "b"}


def test_iterative_moves_item_to_better_bin():
    g = _uniform([("first", 1), ("second", 1)], [("x", 1, {"first": 1, "second": 9})])
    assert gap_iterative_knapsack(g) == {"x": "second"}


def test_iterative_empty():
    assert gap_iterative_knapsack(GapInstance((), ())) == {}


def random_gap(draw_bins, draw_items, rnd):
    bins = [(f"b{k}", rnd.randint(0, 6)) for k in range(draw_bins)]
    items = []
    for k in range(draw_items):
        prof = {b: rnd.randint(0, 9) for b, _ in bins if rnd.random() < 0.8}
        size = rnd.randint(1, 4)
        items.append((f"i{k}", size, prof))
    return _uniform(bins, items)


def test_iterative_ratio_against_brute_force():
    import random

    rnd = random.Random(7)
    for _ in range(300):
        g = random_gap(rnd.randint(1, 3), rnd.randint(0, 8), rnd)
        approx = gap_iterative_knapsack(g)
        assert check_feasible(g, approx)
        opt = assignment_profit(g, gap_brute_force(g))
        got = assignment_profit(g, approx)
        assert 2 * got >= opt  # exact knapsack => factor 2 (3 is the weaker bound)


def test_brute_force_small_cases():
    g = _uniform([("b", 1)], [("a", 1, {"b": 2}), ("c", 1, {"b": 3})])
    assert gap_brute_force(g) == {"c": "b"}
    g = GapInstance((Bin("b", 3),), (Item("lonely", {}, {}),))
    assert gap_brute_force(g) == {}
    big = _uniform([(f"b{k}", 1) for k in range(9)], [(f"i{k}", 1, {"b0": 1}) for k in range(8)])
    with pytest.raises(SizeExceeded):
        gap_brute_force(big)


def test_brute_force_monotone_in_items():
    import random

    rnd = random.Random(3)
    for _ in range(100):
        g = random_gap(rnd.randint(1, 3), rnd.randint(1, 6), rnd)
        smaller = GapInstance(g.bins, g.items[:-1])
        assert assignment_profit(g, gap_brute_force(g)) >= assignment_profit(smaller, gap_brute_force(smaller))


def test_star_exact_four_unit_leaves():
    g = star_gap_instance("c", 3, 3, [(f"l{k}", 1, 1, 1) for k in range(4)])
    a = gap_star_exact(g)
    assert len(a) == 4 and assignment_profit(g, a) == 4


def test_star_exact_large_leaves_use_corners_only():
    g = star_gap_instance("c", 2, 2, [(f"l{k}", 3, 3, 1) for k in range(5)])
    a = gap_star_exact(g)
    assert assignment_profit(g, a) == 4 == assignment_profit(g, gap_brute_force(g))
    assert all(b[1] in ("NE", "NW", "SE", "SW") for b in a.values())


def test_star_exact_empty_and_budget():
    assert gap_star_exact(star_gap_instance("c", 3, 3, [])) == {}
    g = star_gap_instance("c", 100, 100, [("a", 1, 1, 1)])
    with pytest.raises(BudgetExceeded):
        gap_star_exact(g, budget=1000)


def test_star_exact_matches_brute_force_random():
    import random

    rnd = random.Random(11)
    for _ in range(150):
        W, H = rnd.randint(1, 6), rnd.randint(1, 6)
        leaves = [(f"l{k}", rnd.randint(1, 6), rnd.randint(1, 6), rnd.randint(0, 9))
                  for k in range(rnd.randint(0, 6))]
        g = star_gap_instance("c", W, H, leaves)
        a = gap_star_exact(g)
        assert check_feasible(g, a)
        assert assignment_profit(g, a) == assignment_profit(g, gap_brute_force(g))
