"""Approximation algorithms per graph class, the cover-combination step, the
planar r-division scheme and automatic algorithm selection.

Every solver returns a :class:`SolveReport` for the whole instance: all boxes
are placed, the profit is recomputed by :func:`crown.model.evaluate`, and the
certified ratio is a bound the run can actually guarantee. Where possible the
certificate is data-dependent: an upper bound on the optimum derived from the
subproblem values of this very run, divided by the achieved profit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import networkx as nx

from .decompose import (
    StarForest, anchored_star_peel, forest_to_two_star_forests, maximal_matching, maximum_matching,
    outerplanar_to_three_star_forests, paths_and_cycles, sorted_nodes,
)
from .exact import DEFAULT_EXACT_BUDGET, solve_exact
from .gap import (
    CORNERS, DEFAULT_STAR_BUDGET, BudgetExceeded, GapInstance, Item, assignment_profit,
    gap_iterative_knapsack, gap_local_ratio, gap_star_exact, star_gap_instance,
)
from .model import (
    POINT, PROPER, CrownError, Instance, Layout, Ratio, SemanticError, SolveReport, make_report,
)
from .planar import planar_star_forest_cover, r_division
from .realize import (
    HORIZONTAL, VERTICAL, StarPlan, assemble, plans_from_assignment, post_process_bipartite,
    realize_assignment, realize_cycle, realize_path, realize_star,
)

ALGORITHMS = (
    "auto", "star", "tree", "outerplanar", "planar", "bipartite", "general-rand", "general-det",
    "unweighted-tree", "unweighted-general", "ptas", "exact", "path-cycle",
)


class ClassMismatch(CrownError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    epsilon: Fraction = Fraction(1, 2)
    seed: int = 0
    trials: int = 8
    exact_budget: int = DEFAULT_EXACT_BUDGET
    star_budget: int = DEFAULT_STAR_BUDGET
    region_cap: int = 4

    def __post_init__(self):
        if Fraction(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


DEFAULT_CONFIG = SolverConfig()


def _ratio(x: Fraction) -> Ratio:
    return "exact" if x == 1 else Fraction(x)


def _bound_ratio(bound: Fraction, profit: Fraction) -> Ratio:
    """Certificate ``bound / profit`` for an upper bound on the optimum."""
    if bound <= 0:
        return "exact"
    if profit <= 0:
        return "unbounded"
    return _ratio(max(Fraction(bound) / profit, Fraction(1)))


# --- stars ----------------------------------------------------------------------

def _leaf_tuples(instance: Instance, center: str, leaves: Sequence[str]):
    dims = instance.dims
    return [(v, dims[v].width, dims[v].height, instance.profit(center, v)) for v in leaves]


def _solve_gap_star(g: GapInstance, budget: int) -> tuple[dict, int]:
    try:
        return gap_star_exact(g, budget), 1
    except BudgetExceeded:
        return gap_iterative_knapsack(g), 2


def star_plan(instance: Instance, center: str, leaves: Sequence[str],
              budget: int = DEFAULT_STAR_BUDGET) -> tuple[StarPlan, str, int]:
    """Best star plan for one center; returns (plan, axis, GAP ratio used).

    Point model: one eight-bin GAP. Proper model: the better of the two
    instances with the horizontal or the vertical sides shrunk by 1/2.
    """
    d = instance.dims[center]
    tuples = _leaf_tuples(instance, center, [v for v in leaves if instance.profit(center, v) > 0])
    if instance.model == POINT:
        variants = [(HORIZONTAL, d.width, d.height)]
    else:
        # integral sizes turn a capacity of c - 1/2 into c - 1
        variants = [(HORIZONTAL, d.width - 1, d.height), (VERTICAL, d.width, d.height - 1)]
    best = None
    for axis, top, side in variants:
        g = star_gap_instance(center, top, side, tuples)
        assign, beta = _solve_gap_star(g, budget)
        value = assignment_profit(g, assign)
        if best is None or value > best[0]:
            best = (value, axis, assign, beta)
        elif value == best[0]:
            best = (value, best[1], best[2], max(best[3], beta))
    _, axis, assign, beta = best
    plan = plans_from_assignment(assign).get(center, StarPlan(center))
    return plan, axis, beta


def _star_center(instance: Instance) -> str:
    g = instance.graph()
    if g.number_of_edges() == 0:
        return instance.ids[0]
    common = None
    for e in instance.edges:
        common = {e.u, e.v} if common is None else common & {e.u, e.v}
    if not common:
        raise ClassMismatch("edges do not share a common vertex (not a star)")
    return max(sorted(common), key=g.degree)


def solve_star(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    if not instance.ids:
        return make_report(instance, {}, "exact", "star")
    center = _star_center(instance)
    leaves = [v for v in instance.ids if instance.has_edge(center, v)]
    plan, axis, beta = star_plan(instance, center, leaves, config.star_budget)
    frag = realize_star(plan, instance.dims, instance.model, axis)
    return make_report(instance, assemble([frag], instance), _ratio(Fraction(beta)), "star")


def solve_star_forest(instance: Instance, forest: StarForest, budget: int = DEFAULT_STAR_BUDGET) -> tuple[list, int]:
    """Fragments realizing every star of a forest independently, plus the
    worst ratio among the star subproblems."""
    frags, worst = [], 1
    for center, leaves in forest.nonempty_stars():
        plan, axis, beta = star_plan(instance, center, leaves, budget)
        worst = max(worst, beta)
        if plan.items():
            frags.append(realize_star(plan, instance.dims, instance.model, axis))
    return frags, worst


# --- combination ------------------------------------------------------------------

def combine(instance: Instance, parts: Sequence[SolveReport], algorithm: str,
            covered: Optional[Sequence[Sequence[tuple]]] = None) -> SolveReport:
    """Best part report; the certificate is the sum of the part certificates.

    ``covered`` optionally lists the edge set of each part so the cover can
    be checked against the instance.
    """
    if not parts:
        raise CrownError("nothing to combine")
    if covered is not None:
        union = {frozenset(e) for part in covered for e in part}
        missing = [e for e in instance.edges if e.key not in union]
        if missing:
            raise CrownError(f"cover misses edge ({missing[0].u}, {missing[0].v})")
    total = Fraction(0)
    for r in parts:
        v = r.ratio_value()
        if v is None:
            total = None
            break
        total += v
    best = max(parts, key=lambda r: r.profit)
    ratio: Ratio = "unbounded" if total is None else _ratio(total)
    return make_report(instance, best.layout, ratio, algorithm, best.seed, best.trace)


def _forest_cover_solve(instance: Instance, forests: Sequence[StarForest], algorithm: str,
                        config: SolverConfig) -> SolveReport:
    reports = []
    for f in forests:
        frags, beta = solve_star_forest(instance, f, config.star_budget)
        reports.append(make_report(instance, assemble(frags, instance), _ratio(Fraction(beta)), algorithm))
    return combine(instance, reports, algorithm, [f.edges() for f in forests])


def solve_tree(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    g = instance.graph()
    if g.number_of_edges() and not nx.is_forest(g):
        raise ClassMismatch("input is not a tree")
    return _forest_cover_solve(instance, forest_to_two_star_forests(g), "tree", config)


def solve_outerplanar(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    try:
        forests = outerplanar_to_three_star_forests(instance.graph())
    except CrownError as exc:
        raise ClassMismatch(str(exc)) from exc
    return _forest_cover_solve(instance, forests, "outerplanar", config)


def solve_planar(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    if instance.embedding is None:
        raise ClassMismatch("planar solver needs an embedding")
    forests = planar_star_forest_cover(instance.graph(), instance.embedding)
    return _forest_cover_solve(instance, forests, "planar", config)


# --- GAP over many centers ----------------------------------------------------------

def _multi_center_gap(instance: Instance, centers: Sequence[str], items: Sequence[str],
                      budget: int) -> tuple[dict, Fraction, int]:
    """Point-model GAP with eight bins per center; returns the assignment
    ``item -> (center, kind)``, its GAP profit and the ratio ``beta``."""
    dims = instance.dims
    bins = []
    for c in centers:
        star = star_gap_instance(c, dims[c].width, dims[c].height, [])
        bins.extend(star.bins)
    gitems = []
    for v in items:
        sizes, profits = {}, {}
        for b in bins:
            c, kind = b.id
            p = instance.profit(c, v)
            if c == v or p <= 0:
                continue
            sizes[b.id] = 1 if kind in CORNERS else (dims[v].width if kind in ("top", "bottom") else dims[v].height)
            profits[b.id] = p
        if sizes:
            gitems.append(Item(v, sizes, profits))
    g = GapInstance(tuple(bins), tuple(gitems))
    active = [c for c in centers if any(it.eligible((c, "NE")) for it in gitems)]
    groups = [[(c, k) for k in ("NE", "NW", "SE", "SW", "top", "bottom", "left", "right")] for c in active]
    fell_back = False

    def solve_group(sub: GapInstance) -> dict:
        nonlocal fell_back
        try:
            return gap_star_exact(sub, budget)
        except BudgetExceeded:
            fell_back = True
            return gap_iterative_knapsack(sub)

    assign = gap_local_ratio(g, groups, solve_group)
    # local ratio over groups solved within factor a gives 1 + a
    if fell_back:
        beta = 3
    else:
        beta = 1 if len(groups) <= 1 else 2
    return assign, assignment_profit(g, assign), beta


def _star_fragments(instance: Instance, assign: Mapping, budget: int = DEFAULT_STAR_BUDGET) -> list[Layout]:
    """One fragment per center. Without point contacts each center keeps the
    better of the post-processed plan and an exact shrunk-star plan over the
    items it was given."""
    plans = plans_from_assignment(assign)
    frags = []
    for center in sorted_nodes(plans):
        plan, axis = plans[center], HORIZONTAL
        if instance.model == PROPER:
            adj = post_process_bipartite(plan, instance.dims, instance)
            plan, axis = adj.plan, adj.axis
            alt, alt_axis, _ = star_plan(instance, center, plans[center].items(), budget)
            if alt.profit(instance) > plan.profit(instance):
                plan, axis = alt, alt_axis
        if plan.items():
            frags.append(realize_star(plan, instance.dims, instance.model, axis))
    return frags


def bipartition(instance: Instance) -> tuple[list[str], list[str]]:
    g = instance.graph()
    side: dict = {}
    for start in instance.ids:
        if start in side:
            continue
        side[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for w in sorted_nodes(g.neighbors(u)):
                if w not in side:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    raise ClassMismatch("graph has an odd cycle (not bipartite)")
    return [v for v in instance.ids if side[v] == 0], [v for v in instance.ids if side[v] == 1]


def _bipartite_factor(model: str) -> int:
    # stars centered on one side cover an optimum in 4 (planar) or 6 (point contacts) forests
    return 6 if model == POINT else 4


def _bipartite_core(instance: Instance, sides: tuple[Sequence[str], Sequence[str]], config: SolverConfig):
    """Best side's layout, the larger GAP value and the worst beta."""
    best, gap_max, beta_max = None, Fraction(0), 1
    for centers, items in (sides, sides[::-1]):
        assign, value, beta = _multi_center_gap(instance, centers, items, config.star_budget)
        gap_max = max(gap_max, value)
        beta_max = max(beta_max, beta)
        layout = assemble(_star_fragments(instance, assign, config.star_budget), instance)
        rep = make_report(instance, layout, "exact", "bipartite")
        if best is None or rep.profit > best.profit:
            best = rep
    return best, gap_max, beta_max


def solve_bipartite(instance: Instance, config: SolverConfig = DEFAULT_CONFIG,
                    sides: Optional[tuple[Sequence[str], Sequence[str]]] = None) -> SolveReport:
    if sides is None:
        sides = bipartition(instance)
    best, gap_max, beta = _bipartite_core(instance, sides, config)
    bound = _bipartite_factor(instance.model) * beta * gap_max
    return make_report(instance, best.layout, _bound_ratio(bound, best.profit), "bipartite",
                       trace=(f"beta={beta}", f"gap={gap_max}"))


def static_bipartite_ratio(model: str, beta: int) -> Fraction:
    """Worst-case bipartite certificate: 4 * 4/3 * beta (proper) or 6 * beta (point)."""
    return Fraction(16, 3) * beta if model == PROPER else Fraction(6 * beta)


def solve_general_randomized(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Best of ``config.trials`` random bipartitions; the certificate is the
    expectation bound 2x the worst-case bipartite ratio."""
    best, beta_max = None, 1
    for t in range(config.trials):
        rnd = random.Random(f"crown:{config.seed}:{t}")
        left = [v for v in instance.ids if rnd.random() < 0.5]
        lset = set(left)
        right = [v for v in instance.ids if v not in lset]
        cross = [e for e in instance.edges if (e.u in lset) != (e.v in lset)]
        sub = instance.with_edges(cross, keep_embedding=False)
        rep, _, beta = _bipartite_core(sub, (left, right), config)
        beta_max = max(beta_max, beta)
        full = make_report(instance, rep.layout, "exact", "general-rand", config.seed)
        if best is None or full.profit > best.profit:
            best = full
    ratio = 2 * static_bipartite_ratio(instance.model, beta_max)
    return make_report(instance, best.layout, _ratio(ratio), "general-rand", config.seed,
                       (f"trials={config.trials}", f"beta={beta_max}"))


def _general_factor(model: str) -> int:
    # star arboricity bound for optimum contact graphs: planar 5, 1-planar 7
    return 7 if model == POINT else 5


def solve_general_deterministic(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Every vertex is both a center with eight bins and an item. The item ->
    center digraph splits into trees and 1-trees, each realized by its heavier
    half."""
    ids = instance.ids
    assign, value, beta = _multi_center_gap(instance, ids, ids, config.star_budget)
    frags = realize_assignment(assign, instance, instance.model)
    layout = assemble(frags, instance)
    rep = make_report(instance, layout, "exact", "general-det")
    bound = _general_factor(instance.model) * beta * value
    return make_report(instance, layout, _bound_ratio(bound, rep.profit), "general-det",
                       trace=(f"beta={beta}", f"gap={value}"))


# --- unweighted ---------------------------------------------------------------------

def _require_unweighted(instance: Instance):
    if not instance.is_unweighted():
        raise ClassMismatch("instance is not unweighted (profits differ)")


def solve_tree_unweighted(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Peel stars bottom-up, drop each star's anchor edge and solve the
    remaining vertex-disjoint stars exactly."""
    _require_unweighted(instance)
    g = instance.graph()
    if g.number_of_edges() and not nx.is_forest(g):
        raise ClassMismatch("input is not a tree")
    frags, worst = [], 1
    for comp in sorted((sorted_nodes(c) for c in nx.connected_components(g)), key=lambda c: c[0]):
        if len(comp) < 2:
            continue
        for star in anchored_star_peel(g.subgraph(comp).copy()):
            if not star.leaves:
                continue
            plan, axis, beta = star_plan(instance, star.center, star.leaves, config.star_budget)
            worst = max(worst, beta)
            if plan.items():
                frags.append(realize_star(plan, instance.dims, instance.model, axis))
    return make_report(instance, assemble(frags, instance), _ratio(Fraction(2 * worst)), "unweighted-tree")


def solve_path_cycle(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Graphs of maximum degree 2 are realized completely."""
    g = instance.graph()
    if any(d > 2 for _, d in g.degree):
        raise ClassMismatch("a vertex has degree above 2")
    paths, cycles = paths_and_cycles([(e.u, e.v) for e in instance.edges])
    frags = [realize_path(p, instance.dims) for p in paths] + [realize_cycle(c, instance.dims) for c in cycles]
    return make_report(instance, assemble(frags, instance), "exact", "path-cycle")


def solve_general_unweighted(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """A maximal matching M splits the graph: edges touching an unmatched
    vertex form a bipartite graph, and M plus a maximum matching of the rest
    among matched vertices forms disjoint paths and cycles. That set is
    extended greedily by edges that keep every degree at most 2."""
    _require_unweighted(instance)
    g = instance.graph()
    m = maximal_matching(g)
    matched = {v for e in m for v in e}
    inner = g.subgraph(matched).copy()
    inner.remove_edges_from(m)
    m2 = maximum_matching(inner)
    chosen = list(m) + list(m2)
    # any edge keeping all degrees <= 2 still leaves paths and cycles
    deg = {v: 0 for v in instance.ids}
    present = set()
    for u, v in chosen:
        deg[u] += 1
        deg[v] += 1
        present.add(frozenset((u, v)))
    for e in instance.edges:
        if e.key not in present and deg[e.u] < 2 and deg[e.v] < 2:
            chosen.append((e.u, e.v))
            deg[e.u] += 1
            deg[e.v] += 1
    paths, cycles = paths_and_cycles(chosen)
    frags = [realize_path(p, instance.dims) for p in paths] + [realize_cycle(c, instance.dims) for c in cycles]
    rep_a = make_report(instance, assemble(frags, instance), "exact", "unweighted-general")

    outer = [e for e in instance.edges if e.u not in matched or e.v not in matched]
    sub = instance.with_edges(outer, keep_embedding=False)
    unmatched = [v for v in instance.ids if v not in matched]
    matched_ids = [v for v in instance.ids if v in matched]
    if outer:
        rep_b = solve_bipartite(sub, config, (matched_ids, unmatched))
        cert_b = rep_b.ratio_value()
        rep_b = make_report(instance, rep_b.layout, "exact", "unweighted-general")
    else:
        rep_b, cert_b = None, Fraction(0)
    best = rep_a if rep_b is None or rep_a.profit >= rep_b.profit else rep_b
    if cert_b is None:
        ratio: Ratio = "unbounded"
    else:
        ratio = _ratio(_general_factor(instance.model) + cert_b)
    return make_report(instance, best.layout, ratio, "unweighted-general",
                       trace=(f"matching={len(m)}+{len(m2)}",))


# --- planar r-division scheme ----------------------------------------------------------

def ptas_region_size(instance: Instance, config: SolverConfig) -> int:
    g = instance.graph()
    delta = max((d for _, d in g.degree), default=0)
    eps = Fraction(config.epsilon)
    want = math.ceil(Fraction(max(delta, 1) ** 4) / (eps * eps))
    return max(1, min(config.region_cap, want))


def solve_planar_ptas(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    """Cut the graph into small regions with an r-division, solve every region
    exactly and drop the boundary. The certificate is ``rho + B / ALG`` with
    ``B`` the profit on edges touching the boundary."""
    if instance.embedding is None:
        raise ClassMismatch("planar scheme needs an embedding")
    g = instance.graph()
    r = ptas_region_size(instance, config)
    div = r_division(g, instance.embedding, r)
    frags, alg_sum = [], Fraction(0)
    rho: Optional[Fraction] = Fraction(1)
    for region in div.regions:
        sub = instance.induced(region)
        rep = solve_exact(sub, config.exact_budget)
        if rep.ratio_value() is None:
            rep = solve_general_deterministic(sub, config)
        v = rep.ratio_value()
        if v is None:
            rho = None
        elif rho is not None:
            rho = max(rho, v)
        alg_sum += rep.profit
        frags.append(dict(rep.layout))
    boundary = sum((e.profit for e in instance.edges if e.u in div.boundary or e.v in div.boundary), Fraction(0))
    layout = assemble(frags, instance)
    rep = make_report(instance, layout, "exact", "ptas")
    if rho is None:
        ratio: Ratio = "unbounded"
    elif boundary == 0 and rho == 1:
        ratio = "exact"
    elif rep.profit == 0:
        ratio = "unbounded" if boundary > 0 else "exact"
    else:
        ratio = _ratio(max(Fraction(1), (rho * alg_sum + boundary) / rep.profit))
    return make_report(instance, layout, ratio, "ptas", trace=(f"r={r}", f"boundary={len(div.boundary)}"))


def solve_exact_report(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    return solve_exact(instance, config.exact_budget)


# --- dispatch --------------------------------------------------------------------------

SOLVERS: dict[str, Callable[[Instance, SolverConfig], SolveReport]] = {
    "star": solve_star,
    "tree": solve_tree,
    "outerplanar": solve_outerplanar,
    "planar": solve_planar,
    "bipartite": solve_bipartite,
    "general-rand": solve_general_randomized,
    "general-det": solve_general_deterministic,
    "unweighted-tree": solve_tree_unweighted,
    "unweighted-general": solve_general_unweighted,
    "ptas": solve_planar_ptas,
    "exact": solve_exact_report,
    "path-cycle": solve_path_cycle,
}


def _is_star(g: nx.Graph) -> bool:
    m = g.number_of_edges()
    return m > 0 and max(d for _, d in g.degree) == m


_BY_HINT = {
    "path": "path-cycle", "cycle": "path-cycle", "star": "star", "tree": "tree",
    "outerplanar": "outerplanar", "planar": "planar", "bipartite": "bipartite", "general": "general-det",
}


def choose_algorithm(instance: Instance) -> str:
    """Algorithm picked by ``auto``.

    Maximum degree 2 always selects the complete path and cycle realization.
    Otherwise a class hint is trusted; without one the first matching class
    wins among star, forest, bipartite, embedded planar and general.
    Equal profits select the unweighted variants for trees and general graphs.
    """
    g = instance.graph()
    unweighted = instance.is_unweighted() and bool(instance.edges)
    algo = _BY_HINT.get(instance.class_hint)
    if max((d for _, d in g.degree), default=0) <= 2:
        algo = "path-cycle"  # realized completely, whatever the hint says
    elif algo is None:
        if _is_star(g):
            algo = "star"
        elif nx.is_forest(g):
            algo = "tree"
        elif nx.is_bipartite(g):
            algo = "bipartite"
        elif instance.embedding is not None:
            algo = "planar"
        else:
            algo = "general-det"
    if algo == "planar" and instance.embedding is None:
        algo = "general-det"
    if unweighted and algo in ("tree", "general-det"):
        algo = "unweighted-" + ("tree" if algo == "tree" else "general")
    return algo


def solve(instance: Instance, algorithm: str = "auto", config: SolverConfig = DEFAULT_CONFIG) -> SolveReport:
    if algorithm == "auto":
        algorithm = choose_algorithm(instance)
    if algorithm not in SOLVERS:
        raise SemanticError(f"unknown algorithm {algorithm!r}")
    return SOLVERS[algorithm](instance, config)
