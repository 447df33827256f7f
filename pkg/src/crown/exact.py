"""Exact exponential solver and an independent brute-force grid oracle.

The solver branches, for every desired contact, over how the two boxes
touch (or that they do not), then over how every remaining pair is kept
apart. Each choice is a set of difference constraints per axis, so
feasibility is a shortest-path question: a system is infeasible exactly when
some cycle has negative weight, or zero weight through a strict edge. Strict
edges are encoded symbolically as ``c*K - 1`` in integer arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

from .model import POINT, CrownError, Instance, SolveReport, evaluate, make_report
from .realize import assemble

K = 64  # strict-edge scale; must exceed the number of boxes
INF = float("inf")
DEFAULT_EXACT_BUDGET = 2_000_000


class SizeExceeded(CrownError):
    pass


def _add(d, u, v, w):
    """Add ``x_v - x_u <= w`` to a closed distance matrix; None if infeasible."""
    if d[v][u] + w < 0:
        return None
    if d[u][v] <= w:
        return d
    n = len(d)
    nd = [row[:] for row in d]
    du = [d[i][u] for i in range(n)]
    dv = d[v]
    for i in range(n):
        if du[i] == INF:
            continue
        base = du[i] + w
        row = nd[i]
        for j in range(n):
            if dv[j] != INF and base + dv[j] < row[j]:
                row[j] = base + dv[j]
    return nd


def _add_all(d, cons):
    for u, v, w in cons:
        d = _add(d, u, v, w)
        if d is None:
            return None
    return d


def _eq(u, v, c):
    """x_v - x_u == c"""
    return [(u, v, c * K), (v, u, -c * K)]


def _overlap(u, v, su, sv):
    """Open intervals [x_u, x_u+su] and [x_v, x_v+sv] overlap strictly."""
    return [(u, v, su * K - 1), (v, u, sv * K - 1)]


def _relations(u, v, du, dv, model):
    """(label, x constraints, y constraints) for each way u and v can touch."""
    rel = [
        ("R", _eq(u, v, du.width), _overlap(u, v, du.height, dv.height)),
        ("L", _eq(v, u, dv.width), _overlap(u, v, du.height, dv.height)),
        ("T", _overlap(u, v, du.width, dv.width), _eq(u, v, du.height)),
        ("B", _overlap(u, v, du.width, dv.width), _eq(v, u, dv.height)),
    ]
    if model == POINT:
        rel += [
            ("NE", _eq(u, v, du.width), _eq(u, v, du.height)),
            ("NW", _eq(v, u, dv.width), _eq(u, v, du.height)),
            ("SE", _eq(u, v, du.width), _eq(v, u, dv.height)),
            ("SW", _eq(v, u, dv.width), _eq(v, u, dv.height)),
        ]
    return rel


def _separations(i, j, di, dj):
    """Four ways to keep boxes i and j interior-disjoint: (axis, u, v, w)."""
    return [
        (0, j, i, -di.width * K),   # i left of j
        (0, i, j, -dj.width * K),   # j left of i
        (1, j, i, -di.height * K),  # i below j
        (1, i, j, -dj.height * K),  # j below i
    ]


def _decode(d, n):
    """Coordinates from a feasible closed system (virtual zero source)."""
    delta = Fraction(1, 4 * K)
    out = []
    for i in range(n):
        v = min([0] + [d[j][i] for j in range(n) if d[j][i] != INF])
        a = -((-v) // K)
        b = v - a * K
        out.append(a + b * delta)
    lo = min(out) if out else 0
    return [c - lo for c in out]


def solve_exact(instance: Instance, budget: int = DEFAULT_EXACT_BUDGET) -> SolveReport:
    """Optimal layout by branch and bound; certificate ``"incumbent"`` when the
    node budget runs out before the search completes."""
    ids = instance.ids
    n = len(ids)
    if n >= K:
        raise SizeExceeded(f"exact solver supports fewer than {K} boxes")
    idx = {v: k for k, v in enumerate(ids)}
    dims = [instance.dims[v] for v in ids]
    edges = sorted((e for e in instance.edges if e.profit > 0), key=lambda e: (-e.profit, idx[e.u], idx[e.v]))
    suffix = [Fraction(0)] * (len(edges) + 1)
    for k in range(len(edges) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + edges[k].profit
    total = suffix[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    base = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    best: dict = {"profit": Fraction(-1), "layout": None}
    nodes = [0]
    exhausted = [False]

    def leaf(dx, dy):
        xs, ys = _decode(dx, n), _decode(dy, n)
        layout = {ids[i]: (xs[i], ys[i]) for i in range(n)}
        _, profit = evaluate(instance, layout)
        if profit > best["profit"]:
            best["profit"], best["layout"] = profit, layout

    def separate(p, dx, dy, touching):
        nodes[0] += 1
        if nodes[0] > budget:
            exhausted[0] = True
            return
        while p < len(pairs) and pairs[p] in touching:
            p += 1
        if p == len(pairs):
            leaf(dx, dy)
            return
        i, j = pairs[p]
        opts = _separations(i, j, dims[i], dims[j])
        for axis, u, v, w in opts:
            d = dx if axis == 0 else dy
            if d[u][v] <= w:  # already implied
                separate(p + 1, dx, dy, touching)
                return
        for axis, u, v, w in opts:
            if exhausted[0] or best["profit"] == total:
                return
            if axis == 0:
                nd = _add(dx, u, v, w)
                if nd is not None:
                    separate(p + 1, nd, dy, touching)
            else:
                nd = _add(dy, u, v, w)
                if nd is not None:
                    separate(p + 1, dx, nd, touching)

    def branch(k, dx, dy, value, touching):
        nodes[0] += 1
        if nodes[0] > budget:
            exhausted[0] = True
            return
        if value + suffix[k] <= best["profit"]:
            return
        if k == len(edges):
            separate(0, dx, dy, touching)
            return
        e = edges[k]
        u, v = idx[e.u], idx[e.v]
        rels = _relations(u, v, dims[u], dims[v], instance.model)
        if k == 0:
            # reflections map every relation of the first edge to R, T or NE
            rels = [r for r in rels if r[0] in ("R", "T", "NE")]
        pair = (min(u, v), max(u, v))
        for _, cx, cy in rels:
            if exhausted[0] or best["profit"] == total:
                return
            nx_ = _add_all(dx, cx)
            if nx_ is None:
                continue
            ny_ = _add_all(dy, cy)
            if ny_ is None:
                continue
            branch(k + 1, nx_, ny_, value + e.profit, touching | {pair})
        if not exhausted[0] and best["profit"] < total:
            branch(k + 1, dx, dy, value, touching)

    if n == 0:
        return make_report(instance, {}, "exact", "exact")
    branch(0, base, base, Fraction(0), frozenset())
    if best["layout"] is None:
        # budget ran out before any leaf: a separated row is always valid
        return make_report(instance, assemble([], instance), "incumbent", "exact")
    ratio = "incumbent" if exhausted[0] and best["profit"] < total else "exact"
    return make_report(instance, best["layout"], ratio, "exact", trace=(f"nodes={nodes[0]}",))


def signed_subset_sums(values) -> list[int]:
    sums = {0}
    for v in values:
        sums = {s + d for s in sums for d in (-v, 0, v)}
    return sorted(sums)


def grid_oracle(instance: Instance, allow_four: bool = False) -> Fraction:
    """Brute-force optimum for at most three boxes.

    Box 0 stays at the origin; every other box ranges over signed subset sums
    of the widths (heights for y) and those sums shifted by 1/2. All values
    are doubled so the search runs on integers.
    """
    import numpy as np

    ids = instance.ids
    n = len(ids)
    if n > 4 or (n == 4 and not allow_four):
        raise SizeExceeded("grid oracle supports at most three boxes")
    if n <= 1 or not instance.edges:
        return Fraction(0)
    dims = [instance.dims[v] for v in ids]
    den = math.lcm(*(e.profit.denominator for e in instance.edges))
    prof = np.zeros((n, n), dtype=np.int64)
    for e in instance.edges:
        i, j = ids.index(e.u), ids.index(e.v)
        prof[i, j] = prof[j, i] = int(e.profit * den)
    total = int(prof.sum() // 2)
    xs = sorted({2 * s + t for s in signed_subset_sums([d.width for d in dims]) for t in (0, 1)})
    ys = sorted({2 * s + t for s in signed_subset_sums([d.height for d in dims]) for t in (0, 1)})
    grid = np.array(list(product(xs, ys)), dtype=np.int64)
    W = np.array([2 * d.width for d in dims], dtype=np.int64)
    H = np.array([2 * d.height for d in dims], dtype=np.int64)
    point = instance.model == POINT

    def gains(px, py, i, qx, qy, j):
        """Validity mask and profit of the pair (i at p, j at q), vectorised."""
        ox = np.minimum(px + W[i], qx + W[j]) - np.maximum(px, qx)
        oy = np.minimum(py + H[i], qy + H[j]) - np.maximum(py, qy)
        ok = ~((ox > 0) & (oy > 0))
        proper = ((ox == 0) & (oy > 0)) | ((oy == 0) & (ox > 0))
        hit = proper | ((ox == 0) & (oy == 0)) if point else proper
        return ok, np.where(hit, prof[i, j], 0)

    best = 0
    if n == 2:
        ok, g = gains(0, 0, 0, grid[:, 0], grid[:, 1], 1)
        return Fraction(int(g[ok].max()), den)
    gx, gy = grid[:, 0], grid[:, 1]
    for p1 in grid:
        ok01, g01 = gains(0, 0, 0, p1[0], p1[1], 1)
        if not ok01:
            continue
        ok02, g02 = gains(0, 0, 0, gx, gy, 2)
        ok12, g12 = gains(p1[0], p1[1], 1, gx, gy, 2)
        if n == 3:
            mask = ok02 & ok12
            if mask.any():
                best = max(best, int(g01) + int((g02 + g12)[mask].max()))
        else:
            for p3 in grid:
                ok03, g03 = gains(0, 0, 0, p3[0], p3[1], 3)
                ok13, g13 = gains(p1[0], p1[1], 1, p3[0], p3[1], 3)
                if not (ok03 and ok13):
                    continue
                ok23, g23 = gains(gx, gy, 2, p3[0], p3[1], 3)
                mask = ok02 & ok12 & ok23
                if mask.any():
                    best = max(best, int(g01 + g03 + g13) + int((g02 + g12 + g23)[mask].max()))
        if best == total:
            break
    return Fraction(best, den)
