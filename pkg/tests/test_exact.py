import random
from fractions import Fraction
from itertools import combinations

import pytest

from crown.exact import grid_oracle, signed_subset_sums, solve_exact
from crown.model import POINT, PROPER, Instance, evaluate


def units(ids, edges, model=PROPER):
    return Instance.build([(v, 1, 1) for v in ids], edges, model)


def random_instance(rnd, n, model, dims=6, profits=9, density=0.7):
    vs = [(f"b{i}", rnd.randint(1, dims), rnd.randint(1, dims)) for i in range(n)]
    es = [(f"b{i}", f"b{j}", rnd.randint(1, profits)) for i, j in combinations(range(n), 2)
          if rnd.random() < density]
    return Instance.build(vs, es, model)


def test_two_boxes():
    inst = units("ab", [("a", "b", 7)])
    rep = solve_exact(inst)
    assert rep.profit == 7 and rep.certified_ratio == "exact"
    assert grid_oracle(inst) == 7


def test_single_box_oracle():
    assert grid_oracle(units("a", [])) == 0


def test_unit_triangle():
    inst = units("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert solve_exact(inst).profit == 3 == grid_oracle(inst)


@pytest.mark.parametrize("model, value", [(PROPER, 5), (POINT, 6)])
def test_k4_unit_squares_against_four_box_oracle(model, value):
    inst = units("abcd", list(combinations("abcd", 2)), model)
    oracle = grid_oracle(inst, allow_four=True)
    assert oracle == value
    assert solve_exact(inst).profit == oracle


def test_signed_subset_sums():
    assert signed_subset_sums([1, 2]) == [-3, -2, -1, 0, 1, 2, 3]


def test_exact_matches_oracle_on_random_triples():
    rnd = random.Random(2024)
    for k in range(60):
        inst = random_instance(rnd, 3, (PROPER, POINT)[k % 2])
        rep = solve_exact(inst)
        assert evaluate(inst, rep.layout)[1] == rep.profit
        assert rep.profit == grid_oracle(inst)


def test_budget_exhaustion_reports_incumbent():
    inst = units("abcdef", list(combinations("abcdef", 2)))
    rep = solve_exact(inst, budget=50)
    assert rep.certified_ratio == "incumbent"
    assert evaluate(inst, rep.layout)[1] == rep.profit


def test_unit_profit_lower_bound():
    """Unit profits: the optimum is at least 2|E| / (max degree + 1)."""
    rnd = random.Random(7)
    for _ in range(40):
        n = rnd.randint(2, 4)
        inst = random_instance(rnd, n, PROPER, dims=4, profits=1)
        if not inst.edges:
            continue
        deg = max(sum(1 for e in inst.edges if v in (e.u, e.v)) for v in inst.ids)
        assert solve_exact(inst).profit >= Fraction(2 * len(inst.edges), deg + 1)
