"""Generalized Assignment Problem machinery.

A GAP instance has capacitated bins and items whose size and profit depend
on the bin. Besides a generic exact knapsack DP and the knapsack-iteration
(local ratio) approximation, this module has an exact DP for the eight-bin
instances that model a single star center: four corner bins of capacity 1,
two horizontal bins (top/bottom) and two vertical bins (left/right).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Optional, Sequence

from .model import CrownError

CORNERS = ("NE", "NW", "SE", "SW")
SIDES = ("top", "bottom", "left", "right")
STAR_KINDS = CORNERS + SIDES

DEFAULT_STAR_BUDGET = 10**8

GapAssignment = dict  # item id -> bin id


class BudgetExceeded(CrownError):
    pass


class SizeExceeded(CrownError):
    pass


@dataclass(frozen=True)
class Bin:
    id: Hashable
    capacity: int
    kind: Optional[str] = None  # one of STAR_KINDS for star-shaped instances


@dataclass(frozen=True)
class Item:
    id: Hashable
    sizes: Mapping[Hashable, int]
    profits: Mapping[Hashable, Fraction]

    def eligible(self, bin_id) -> bool:
        return bin_id in self.sizes


@dataclass(frozen=True)
class GapInstance:
    bins: tuple[Bin, ...]
    items: tuple[Item, ...]

    def __post_init__(self):
        for b in self.bins:
            if b.capacity < 0:
                raise ValueError(f"bin {b.id!r} has negative capacity")
        for it in self.items:
            for b, s in it.sizes.items():
                if s < 1:
                    raise ValueError(f"item {it.id!r} has size {s} in bin {b!r}")

    def bin(self, bin_id) -> Bin:
        for b in self.bins:
            if b.id == bin_id:
                return b
        raise KeyError(bin_id)


def assignment_profit(g: GapInstance, assign: Mapping) -> Fraction:
    items = {it.id: it for it in g.items}
    return sum((Fraction(items[i].profits[b]) for i, b in assign.items()), Fraction(0))


def check_feasible(g: GapInstance, assign: Mapping) -> bool:
    items = {it.id: it for it in g.items}
    loads = {b.id: 0 for b in g.bins}
    for i, b in assign.items():
        if b not in loads or not items[i].eligible(b):
            return False
        loads[b] += items[i].sizes[b]
    return all(loads[b.id] <= b.capacity for b in g.bins)


def knapsack_exact(capacity: int, items: Sequence[tuple[int, Fraction]]) -> list[int]:
    """Indices of a maximum-profit subset fitting in ``capacity``.

    Among optimal subsets the lexicographically smallest sorted index tuple
    is returned. Items with non-positive profit are never chosen.
    """
    n = len(items)
    cap = max(int(capacity), 0)
    # best[i][c]: optimum over items i.. with capacity c
    best = [[Fraction(0)] * (cap + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        size, profit = items[i]
        row, nxt = best[i], best[i + 1]
        for c in range(cap + 1):
            v = nxt[c]
            if profit > 0 and size <= c:
                take = profit + nxt[c - size]
                if take > v:
                    v = take
            row[c] = v
    chosen = []
    c = cap
    for i in range(n):
        size, profit = items[i]
        if profit > 0 and size <= c and profit + best[i + 1][c - size] == best[i][c]:
            chosen.append(i)
            c -= size
    return chosen


def gap_local_ratio(g: GapInstance, groups: Sequence[Sequence[Hashable]],
                    solve_group: Callable[[GapInstance], Mapping]) -> GapAssignment:
    """Knapsack-iteration for GAP over groups of bins, processed in order.

    For each group the residual profit of an item is its profit there minus
    what it currently earns elsewhere; the group subproblem is solved on the
    positive residuals and the winners are moved into the group. With an
    exact group solver the result is a 2-approximation.
    """
    by_id = {b.id: b for b in g.bins}
    assign: dict = {}
    earned: dict = {}
    for group in groups:
        bins = tuple(by_id[b] for b in group)
        sub_items = []
        for it in g.items:
            sizes, profits = {}, {}
            for b in group:
                if it.eligible(b):
                    r = Fraction(it.profits[b]) - earned.get(it.id, 0)
                    if r > 0:
                        sizes[b] = it.sizes[b]
                        profits[b] = r
            if sizes:
                sub_items.append(Item(it.id, sizes, profits))
        if not sub_items:
            continue
        chosen = solve_group(GapInstance(bins, tuple(sub_items)))
        items = {it.id: it for it in g.items}
        for i, b in chosen.items():
            assign[i] = b
            earned[i] = Fraction(items[i].profits[b])
    return assign


def _single_bin_knapsack(g: GapInstance) -> dict:
    (b,) = g.bins
    elig = [it for it in g.items if it.eligible(b.id)]
    picked = knapsack_exact(b.capacity, [(it.sizes[b.id], it.profits[b.id]) for it in elig])
    return {elig[k].id: b.id for k in picked}


def gap_iterative_knapsack(g: GapInstance) -> GapAssignment:
    """Combinatorial GAP approximation: one exact knapsack per bin, in input order."""
    return gap_local_ratio(g, [[b.id] for b in g.bins], _single_bin_knapsack)


def star_gap_instance(center, top_capacity: int, side_capacity: int,
                      leaves: Sequence[tuple[Hashable, int, int, Fraction]]) -> GapInstance:
    """Eight-bin instance for one star center.

    ``leaves`` holds ``(item id, width, height, profit)``. Bin ids are
    ``(center, kind)``.
    """
    bins = tuple(Bin((center, k), 1, k) for k in CORNERS) + (
        Bin((center, "top"), top_capacity, "top"),
        Bin((center, "bottom"), top_capacity, "bottom"),
        Bin((center, "left"), side_capacity, "left"),
        Bin((center, "right"), side_capacity, "right"),
    )
    items = []
    for iid, w, h, p in leaves:
        sizes = {}
        for b in bins:
            if b.kind in CORNERS:
                sizes[b.id] = 1
            elif b.kind in ("top", "bottom"):
                sizes[b.id] = w
            else:
                sizes[b.id] = h
        items.append(Item(iid, sizes, {b.id: Fraction(p) for b in bins}))
    return GapInstance(bins, tuple(items))


def _star_bins(g: GapInstance) -> dict:
    kinds = {}
    for b in g.bins:
        if b.kind not in STAR_KINDS or b.kind in kinds:
            raise ValueError("not an eight-bin star instance")
        kinds[b.kind] = b
    if set(kinds) != set(STAR_KINDS):
        raise ValueError("not an eight-bin star instance")
    for k in CORNERS:
        if kinds[k].capacity != 1:
            raise ValueError("corner bins must have capacity 1")
    return kinds


def star_dp_cost(g: GapInstance) -> int:
    kinds = _star_bins(g)
    w = max(kinds["top"].capacity, kinds["bottom"].capacity, 1)
    h = max(kinds["left"].capacity, kinds["right"].capacity, 1)
    return w * w * h * h * 16 * max(len(g.items), 1)


def gap_star_exact(g: GapInstance, budget: int = DEFAULT_STAR_BUDGET) -> GapAssignment:
    """Optimal assignment for an eight-bin star instance.

    Dynamic program over (top, bottom, left, right loads, corner occupancy).
    Items may be ineligible for some bins and may have bin-dependent profit.
    Raises :class:`BudgetExceeded` when ``W^2 H^2 16 n`` exceeds ``budget``.
    """
    kinds = _star_bins(g)
    if star_dp_cost(g) > budget:
        raise BudgetExceeded(f"star DP cost {star_dp_cost(g)} exceeds budget {budget}")
    side_bins = [kinds[k] for k in SIDES]
    corner_bins = [kinds[k] for k in CORNERS]
    start = (0, 0, 0, 0, 0)
    layer = {start: Fraction(0)}
    history = []
    for it in g.items:
        nxt: dict = {}
        back: dict = {}

        def offer(state, value, prev, choice):
            old = nxt.get(state)
            if old is None or value > old:
                nxt[state] = value
                back[state] = (prev, choice)

        for state, value in layer.items():
            offer(state, value, state, None)
            loads, mask = state[:4], state[4]
            for k, b in enumerate(side_bins):
                if it.eligible(b.id) and it.profits[b.id] > 0:
                    nl = loads[k] + it.sizes[b.id]
                    if nl <= b.capacity:
                        ns = loads[:k] + (nl,) + loads[k + 1:] + (mask,)
                        offer(ns, value + it.profits[b.id], state, b.id)
            for k, b in enumerate(corner_bins):
                bit = 1 << k
                if not mask & bit and it.eligible(b.id) and it.profits[b.id] > 0 and it.sizes[b.id] <= 1:
                    offer(loads + (mask | bit,), value + it.profits[b.id], state, b.id)
        history.append(back)
        layer = nxt
    state = max(layer, key=lambda s: (layer[s], [-x for x in s]))
    picks = {}
    for it, back in zip(reversed(g.items), reversed(history)):
        prev, choice = back[state]
        if choice is not None:
            picks[it.id] = choice
        state = prev
    return {it.id: picks[it.id] for it in g.items if it.id in picks}


def gap_brute_force(g: GapInstance, limit: int = 10**7) -> GapAssignment:
    """Exhaustive optimum; a test oracle for small instances."""
    if (len(g.bins) + 1) ** len(g.items) > limit:
        raise SizeExceeded(f"{len(g.bins) + 1}^{len(g.items)} assignments exceed {limit}")
    caps = {b.id: b.capacity for b in g.bins}
    items = list(g.items)
    best = [Fraction(-1), {}]
    cur: dict = {}

    def rec(k, value):
        if k == len(items):
            if value > best[0]:
                best[0] = value
                best[1] = dict(cur)
            return
        it = items[k]
        rec(k + 1, value)
        for b in g.bins:
            if it.eligible(b.id) and it.sizes[b.id] <= caps[b.id]:
                caps[b.id] -= it.sizes[b.id]
                cur[it.id] = b.id
                rec(k + 1, value + Fraction(it.profits[b.id]))
                del cur[it.id]
                caps[b.id] += it.sizes[b.id]

    rec(0, Fraction(0))
    return best[1]


def floor_capacity(cap) -> int:
    """Integral capacity equivalent to a rational one for integer item sizes."""
    return max(math.floor(Fraction(cap)), 0)
