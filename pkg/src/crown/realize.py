"""Geometric constructions: stars from bin plans, paths, cycles, the
components of a GAP item-to-center digraph, and assembling fragments into
one layout.

A fragment is a partial layout (id -> lower-left corner) that is valid on
its own; :func:`assemble` places fragments side by side with gaps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from .gap import CORNERS, STAR_KINDS
from .model import POINT, PROPER, BoxDim, CrownError, Instance, Layout

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


class InfeasiblePlan(CrownError):
    pass


@dataclass(frozen=True)
class StarPlan:
    center: str
    bins: Mapping[str, tuple] = field(default_factory=dict)  # kind -> item ids in order

    def __post_init__(self):
        for k in self.bins:
            if k not in STAR_KINDS:
                raise ValueError(f"unknown bin kind {k!r}")
            if k in CORNERS and len(self.bins[k]) > 1:
                raise InfeasiblePlan(f"corner {k} holds more than one item")

    def get(self, kind: str) -> tuple:
        return tuple(self.bins.get(kind, ()))

    def items(self) -> list:
        return [i for k in STAR_KINDS for i in self.get(k)]

    def load(self, kind: str, dims: Mapping[str, BoxDim]) -> int:
        if kind in ("top", "bottom"):
            return sum(dims[i].width for i in self.get(kind))
        if kind in ("left", "right"):
            return sum(dims[i].height for i in self.get(kind))
        return len(self.get(kind))

    def without(self, item) -> StarPlan:
        return StarPlan(self.center, {k: tuple(i for i in v if i != item) for k, v in self.bins.items()})

    def profit(self, instance: Instance) -> Fraction:
        return sum((instance.profit(self.center, i) for i in self.items()), Fraction(0))


def plans_from_assignment(assign: Mapping[Hashable, tuple]) -> dict[str, StarPlan]:
    """Group an assignment ``item -> (center, kind)`` into plans per center,
    keeping item order."""
    grouped: dict = {}
    for item, (center, kind) in assign.items():
        grouped.setdefault(center, {}).setdefault(kind, []).append(item)
    return {c: StarPlan(c, {k: tuple(v) for k, v in bins.items()}) for c, bins in grouped.items()}


def shrink_for_proper_model(center: BoxDim, axis: str) -> tuple[Fraction, Fraction]:
    """Capacities (top/bottom, left/right) after shrinking one pair of sides by 1/2."""
    w, h = Fraction(center.width), Fraction(center.height)
    if axis == HORIZONTAL:
        return w - Fraction(1, 2), h
    if axis == VERTICAL:
        return w, h - Fraction(1, 2)
    raise ValueError(f"unknown axis {axis!r}")


def _trio_span(length: int, load: int, first: bool, last: bool, eps: Fraction, shifted: bool):
    """Start offset of a side's items and the shifts of its low and high
    corner items along that side. ``first``/``last`` tell whether those
    corners are occupied. Lengths and loads are integral and ``eps <= 1/4``."""
    if load > length:
        raise InfeasiblePlan("side load exceeds side length")
    zero = Fraction(0)
    if not shifted:
        return zero, zero, zero
    if load < length:
        return eps, eps, -eps
    if first and last:
        raise InfeasiblePlan("side and both corners are full")
    if first:
        return eps, eps, zero
    if last:
        return -eps, zero, -eps
    return zero, zero, zero


def realize_star(plan: StarPlan, dims: Mapping[str, BoxDim], model: str = POINT,
                 axis: str = HORIZONTAL) -> Layout:
    """Place a star with its center at the origin.

    Side items are packed along their side. Corner items touch the corner in
    the point model; in the proper model they are pushed inward by a small
    epsilon along the sides of ``axis`` so that they share a segment with the
    center.
    """
    c = dims[plan.center]
    w, h = Fraction(c.width), Fraction(c.height)
    n_items = len(plan.items())
    eps = Fraction(1, 2 * (n_items + 1))
    proper = model == PROPER
    has = {k: bool(plan.get(k)) for k in CORNERS}
    out: Layout = {plan.center: (Fraction(0), Fraction(0))}

    hshift = proper and axis == HORIZONTAL
    vshift = proper and axis == VERTICAL
    starts = {}
    corner_dx = {k: Fraction(0) for k in CORNERS}
    corner_dy = {k: Fraction(0) for k in CORNERS}
    for side, lo, hi in (("top", "NW", "NE"), ("bottom", "SW", "SE")):
        s, dlo, dhi = _trio_span(c.width, plan.load(side, dims), has[lo], has[hi], eps, hshift)
        starts[side] = s
        if hshift:
            corner_dx[lo], corner_dx[hi] = dlo, dhi
    for side, lo, hi in (("left", "SW", "NW"), ("right", "SE", "NE")):
        s, dlo, dhi = _trio_span(c.height, plan.load(side, dims), has[lo], has[hi], eps, vshift)
        starts[side] = s
        if vshift:
            corner_dy[lo], corner_dy[hi] = dlo, dhi

    x = starts["top"]
    for i in plan.get("top"):
        out[i] = (x, h)
        x += dims[i].width
    x = starts["bottom"]
    for i in plan.get("bottom"):
        out[i] = (x, -Fraction(dims[i].height))
        x += dims[i].width
    y = starts["left"]
    for i in plan.get("left"):
        out[i] = (-Fraction(dims[i].width), y)
        y += dims[i].height
    y = starts["right"]
    for i in plan.get("right"):
        out[i] = (w, y)
        y += dims[i].height
    for k in CORNERS:
        for i in plan.get(k):
            d = dims[i]
            cx = w if k in ("NE", "SE") else -Fraction(d.width)
            cy = h if k in ("NE", "NW") else -Fraction(d.height)
            out[i] = (cx + corner_dx[k], cy + corner_dy[k])
    return out


@dataclass(frozen=True)
class Adjusted:
    plan: StarPlan
    axis: str
    dropped: tuple = ()


def _drop_full_trios(plan: StarPlan, dims, weight, axis: str) -> tuple[StarPlan, list]:
    c = dims[plan.center]
    if axis == HORIZONTAL:
        trios = (("top", "NW", "NE", c.width), ("bottom", "SW", "SE", c.width))
    else:
        trios = (("left", "SW", "NW", c.height), ("right", "SE", "NE", c.height))
    dropped = []
    for side, a, b, length in trios:
        if plan.get(a) and plan.get(b) and plan.load(side, dims) == length:
            pool = [*plan.get(a), *plan.get(side), *plan.get(b)]
            victim = min(pool, key=lambda i: (weight(i), str(i)))
            plan = plan.without(victim)
            dropped.append(victim)
    return plan, dropped


def post_process_bipartite(plan: StarPlan, dims: Mapping[str, BoxDim], instance: Instance) -> Adjusted:
    """Turn a point-contact plan into one realizable without point contacts.

    Variant A drops the lightest item of every completely full top or bottom
    trio (two corners plus a side loaded to its full length) and shifts the
    corners horizontally; variant B does the same for left and right. The
    heavier variant wins, keeping at least 3/4 of the plan's profit.
    """
    weight = lambda i: instance.profit(plan.center, i)  # noqa: E731
    best = None
    for axis in (HORIZONTAL, VERTICAL):
        p, dropped = _drop_full_trios(plan, dims, weight, axis)
        cand = Adjusted(p, axis, tuple(dropped))
        if best is None or p.profit(instance) > best.plan.profit(instance):
            best = cand
    return best


def realize_path(ids: Sequence[str], dims: Mapping[str, BoxDim]) -> Layout:
    """Staircase: each box starts at its predecessor's right side, raised so
    the two share half of the smaller height."""
    out: Layout = {}
    x, y = Fraction(0), Fraction(0)
    for k, v in enumerate(ids):
        if k:
            prev = dims[ids[k - 1]]
            x += prev.width
            y += prev.height - Fraction(min(prev.height, dims[v].height), 2)
        out[v] = (x, y)
    return out


def _frame_split(ws: Sequence[int]) -> int:
    """Top-chain length ``a`` for a cycle frame v0 | v1..va | v_{a+1} | rest."""
    k = len(ws)
    for a in range(1, k - 2):
        top = sum(ws[1:a + 1])
        bottom = sum(ws[a + 2:])
        if top >= bottom:
            return a
    return k - 3


def realize_cycle(ids: Sequence[str], dims: Mapping[str, BoxDim]) -> Layout:
    """Realize every edge of a cycle (given in cyclic order) by proper contacts."""
    k = len(ids)
    if k < 2:
        raise ValueError("a cycle needs at least two boxes")
    if len(set(ids)) != k:
        raise ValueError("cycle repeats a vertex")
    if k == 2:
        return realize_path(ids, dims)
    if k == 3:
        a, b, c = ids
        da, db, dc = dims[a], dims[b], dims[c]
        if da.height == db.height:
            # the third box spans both tops
            return {a: (Fraction(0), Fraction(0)), b: (Fraction(da.width), Fraction(0)),
                    c: (da.width - Fraction(dc.width, 2), Fraction(da.height))}
        s, t = (a, b) if (da.height, a) < (db.height, b) else (b, a)
        ds = dims[s]
        return {s: (Fraction(0), Fraction(0)), t: (Fraction(ds.width), Fraction(0)),
                c: (Fraction(ds.width - dc.width), Fraction(ds.height))}
    ws = [dims[v].width for v in ids]
    a = _frame_split(ws)
    g = Fraction(1, 2)
    out: Layout = {}
    top = ids[1:a + 1]
    right = ids[a + 1]
    bottom = list(reversed(ids[a + 2:]))  # left to right
    x = Fraction(0)
    for v in top:
        out[v] = (x, g)
        x += dims[v].width
    xt = x
    x = Fraction(0)
    for v in bottom:
        out[v] = (x, -Fraction(dims[v].height))
        x += dims[v].width
    xb = x
    d0, dr = dims[ids[0]], dims[right]
    out[ids[0]] = (-Fraction(d0.width), g / 2 - Fraction(d0.height, 2))
    if xt == xb:
        out[right] = (xt, g / 2 - Fraction(dr.height, 2))
    elif xt > xb:
        out[right] = (xb, g - dr.height)
    else:
        out[right] = (xt, Fraction(0))
    return out


# --- GAP digraph components -------------------------------------------------

def _component_arcs(arcs: Mapping[str, tuple]) -> list[dict]:
    """Split ``item -> (center, kind)`` arcs into weakly connected components."""
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v, (u, _) in arcs.items():
        parent[find(v)] = find(u)
    comps: dict = {}
    for v, target in arcs.items():
        comps.setdefault(find(v), {})[v] = target
    return [comps[r] for r in sorted(comps, key=str)]


def _realize_plans(plans: Sequence[StarPlan], instance: Instance, model: str) -> tuple[list[Layout], Fraction]:
    frags, value = [], Fraction(0)
    for plan in plans:
        if not plan.items():
            continue
        if model == PROPER:
            adj = post_process_bipartite(plan, instance.dims, instance)
            plan, axis = adj.plan, adj.axis
        else:
            axis = HORIZONTAL
        if plan.items():
            frags.append(realize_star(plan, instance.dims, model, axis))
            value += plan.profit(instance)
    return frags, value


def realize_one_tree(arcs: Mapping[str, tuple], instance: Instance, model: str) -> tuple[list[Layout], Fraction]:
    """Realize one weakly connected component of an item -> bin digraph.

    Each vertex points to at most one center, so the component is a tree or
    has exactly one directed cycle. Arcs are split by the parity of their
    target's distance to the root (or the cycle) into two star forests; the
    cycle joins the odd side and is realized as a cycle. The heavier side is
    returned as fragments with its planned profit.
    """
    succ = {v: u for v, (u, _) in arcs.items()}
    nodes = set(succ) | set(succ.values())
    if len(succ) > len(nodes):
        raise CrownError("component is not a tree or 1-tree")
    cycle: list = []
    for start in sorted(nodes, key=str):
        seen, v = [], start
        while v in succ and v not in seen:
            seen.append(v)
            v = succ[v]
        if v in seen:
            cycle = seen[seen.index(v):]
            break
    on_cycle = set(cycle)
    preds: dict = {}
    for v, u in succ.items():
        if v not in on_cycle:
            preds.setdefault(u, []).append(v)
    roots = list(cycle) if cycle else [v for v in nodes if v not in succ]
    depth = {r: 0 for r in roots}
    stack = list(roots)
    while stack:
        u = stack.pop()
        for v in preds.get(u, ()):
            depth[v] = depth[u] + 1
            stack.append(v)
    sides: tuple[dict, dict] = ({}, {})
    for v, (u, kind) in arcs.items():
        if v in on_cycle:
            continue
        sides[depth[u] % 2].setdefault(u, {}).setdefault(kind, []).append(v)
    best = None
    for parity in (0, 1):
        plans = [StarPlan(c, {k: tuple(v) for k, v in bins.items()}) for c, bins in sides[parity].items()]
        frags, value = _realize_plans(plans, instance, model)
        if parity == 1 and cycle:
            ring = list(reversed(cycle))  # any cyclic order works
            frags.append(realize_cycle(ring, instance.dims))
            pairs = {frozenset((ring[i], ring[(i + 1) % len(ring)])) for i in range(len(ring))}
            value += sum((instance.profit(*tuple(p)) for p in pairs), Fraction(0))
        if best is None or value > best[1]:
            best = (frags, value)
    return best


def realize_assignment(arcs: Mapping[str, tuple], instance: Instance, model: str) -> list[Layout]:
    """Fragments for every component of an item -> (center, kind) assignment."""
    frags: list = []
    for comp in _component_arcs(arcs):
        frags.extend(realize_one_tree(comp, instance, model)[0])
    return frags


# --- assembly ------------------------------------------------------------------

def bounding_box(fragment: Layout, dims: Mapping[str, BoxDim]) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    xs = [x for x, _ in fragment.values()]
    ys = [y for _, y in fragment.values()]
    x2 = [x + dims[v].width for v, (x, _) in fragment.items()]
    y2 = [y + dims[v].height for v, (_, y) in fragment.items()]
    return min(xs), min(ys), max(x2), max(y2)


def assemble(fragments: Sequence[Layout], instance: Instance, gap: int = 1) -> Layout:
    """Lay fragments out in a row separated by ``gap`` and put every vertex
    not covered by a fragment in a separated row underneath."""
    dims = instance.dims
    out: Layout = {}
    cursor = Fraction(0)
    for frag in fragments:
        if not frag:
            continue
        for v in frag:
            if v in out:
                raise CrownError(f"vertex {v!r} appears in two fragments")
        x1, y1, x2, _ = bounding_box(frag, dims)
        for v, (x, y) in frag.items():
            out[v] = (x - x1 + cursor, y - y1)
        cursor += x2 - x1 + gap
    rest = [v for v in instance.ids if v not in out]
    if rest:
        top = -Fraction(gap)
        x = Fraction(0)
        for v in rest:
            d = dims[v]
            out[v] = (x, top - d.height)
            x += d.width + gap
    return out
