"""Graph decompositions used by the solvers: star-forest covers of trees and
outerplanar graphs, anchored star peeling, and matchings.

Graphs are :class:`networkx.Graph` objects with string vertex ids. Planar
covers, separators and r-divisions live in :mod:`crown.planar`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence

import networkx as nx

from .model import CrownError


class NotATree(CrownError):
    pass


class NotDegenerate(CrownError):
    """Raised when degree-2 peeling gets stuck (input not outerplanar)."""


def _key(v):
    return (str(type(v)), v) if not isinstance(v, str) else ("", v)


def sorted_nodes(nodes: Iterable) -> list:
    return sorted(nodes, key=_key)


def edge_key(u, v) -> frozenset:
    return frozenset((u, v))


@dataclass(frozen=True)
class StarForest:
    stars: tuple[tuple[Hashable, tuple[Hashable, ...]], ...] = ()

    def edges(self) -> list[tuple]:
        return [(c, leaf) for c, leaves in self.stars for leaf in leaves]

    def edge_set(self) -> set[frozenset]:
        return {edge_key(c, leaf) for c, leaf in self.edges()}

    def is_empty(self) -> bool:
        return not any(leaves for _, leaves in self.stars)

    def nonempty_stars(self):
        return [(c, leaves) for c, leaves in self.stars if leaves]


def is_star_forest(forest: StarForest) -> bool:
    """Stars are vertex-disjoint, so every component is a star."""
    seen = set()
    for c, leaves in forest.stars:
        members = [c, *leaves]
        if len(set(members)) != len(members) or seen & set(members):
            return False
        seen.update(members)
    return True


def _from_buckets(buckets: Mapping) -> StarForest:
    return StarForest(tuple((c, tuple(leaves)) for c, leaves in buckets.items()))


def default_root(g: nx.Graph, nodes=None):
    nodes = list(g.nodes) if nodes is None else list(nodes)
    return min(nodes, key=lambda v: (-g.degree(v), _key(v)))


def _bfs_parents(g: nx.Graph, root) -> tuple[dict, dict, list]:
    parent = {root: None}
    depth = {root: 0}
    order = [root]
    q = deque([root])
    while q:
        u = q.popleft()
        for w in sorted_nodes(g.neighbors(u)):
            if w not in parent:
                parent[w] = u
                depth[w] = depth[u] + 1
                order.append(w)
                q.append(w)
    return parent, depth, order


def forest_to_two_star_forests(g: nx.Graph, roots: Optional[Sequence] = None) -> tuple[StarForest, StarForest]:
    """Split a forest by parent-depth parity; each component is rooted at
    its maximum-degree vertex unless ``roots`` are given."""
    if g.number_of_edges() and not nx.is_forest(g):
        raise NotATree("input is not a forest")
    buckets = ({}, {})
    comps = [sorted_nodes(c) for c in nx.connected_components(g)]
    comps.sort(key=lambda c: _key(c[0]))
    given = set(roots or ())
    for comp in comps:
        root = next((v for v in comp if v in given), None)
        if root is None:
            root = default_root(g, comp)
        parent, depth, order = _bfs_parents(g, root)
        for v in order[1:]:
            u = parent[v]
            buckets[depth[u] % 2].setdefault(u, []).append(v)
    return _from_buckets(buckets[0]), _from_buckets(buckets[1])


def tree_to_two_star_forests(tree: nx.Graph, root=None) -> tuple[StarForest, StarForest]:
    """Cover a tree by two star forests: the edge from a parent at depth d
    goes to forest ``d % 2`` with the parent as center."""
    if tree.number_of_nodes() == 0 or not nx.is_tree(tree):
        raise NotATree("input is not a tree")
    return forest_to_two_star_forests(tree, [root] if root is not None else None)


@dataclass(frozen=True)
class PeeledStar:
    center: Hashable
    leaves: tuple
    anchor: Optional[tuple] = None  # (center, parent) edge removed from the star


def anchored_star_peel(tree: nx.Graph, root=None) -> list[PeeledStar]:
    """Decompose a tree into edge-disjoint stars with anchor edges.

    Repeatedly take a deepest vertex whose children are all leaves and emit
    its star; unless it is the root, the edge to its parent is the anchor.
    The returned stars (anchors excluded) cover every non-anchor edge.
    """
    if tree.number_of_nodes() == 0 or not nx.is_tree(tree):
        raise NotATree("input is not a tree")
    n = tree.number_of_nodes()
    if n == 1:
        return []
    if root is None:
        root = default_root(tree)
    if n > 2 and tree.degree(root) < 2:
        raise NotATree("root must be a non-leaf vertex")
    parent, depth, order = _bfs_parents(tree, root)
    children = {v: [] for v in order}
    for v in order[1:]:
        children[parent[v]].append(v)
    alive = set(order)
    out = []
    while True:
        internal = [v for v in alive if any(c in alive for c in children[v])]
        if not internal:
            break
        deepest = max(depth[v] for v in internal)
        u = min((v for v in internal if depth[v] == deepest), key=_key)
        kids = tuple(c for c in children[u] if c in alive)
        anchor = None if u == root else (u, parent[u])
        out.append(PeeledStar(u, kids, anchor))
        alive.difference_update(kids)
        alive.discard(u)
        if u == root:
            break
    if root in alive:
        out.append(PeeledStar(root, (), None))
    return out


def outerplanar_to_three_star_forests(g: nx.Graph) -> tuple[StarForest, StarForest, StarForest]:
    """Partition an outerplanar graph into three star forests in which every
    vertex is the center of at most one star.

    Vertices of degree at most 2 are peeled off; when a peeled vertex has two
    non-adjacent remaining neighbours a virtual edge joins them (the remaining
    graph stays an outerplanar minor). Re-inserting in reverse order, each
    vertex takes the smallest forest index not owned by its two neighbours and
    hangs as a leaf off their stars.
    """
    rem = {v: set(g.neighbors(v)) for v in g.nodes}
    peel = []
    while rem:
        v = min(rem, key=lambda x: (len(rem[x]), _key(x)))
        if len(rem[v]) > 2:
            raise NotDegenerate(f"no vertex of degree <= 2 left (min degree {len(rem[v])})")
        nbrs = sorted_nodes(rem[v])
        peel.append((v, nbrs))
        for u in nbrs:
            rem[u].discard(v)
        if len(nbrs) == 2:
            a, b = nbrs
            rem[a].add(b)
            rem[b].add(a)
        del rem[v]
    owner = {}
    buckets = ({}, {}, {})
    order = list(reversed(peel))
    base = [v for v, _ in order[:3]]
    if len(base) == 3 and all(g.has_edge(a, b) for a, b in ((base[0], base[1]), (base[1], base[2]), (base[2], base[0]))):
        # a 3-cycle seeds one edge per forest, each vertex owning one star
        for k, v in enumerate(base):
            owner[v] = k
            buckets[k][v] = [base[(k + 1) % 3]]
        order = order[3:]
    for v, nbrs in order:
        used = {owner[u] for u in nbrs}
        owner[v] = min(k for k in range(3) if k not in used)
        buckets[owner[v]].setdefault(v, [])
        for u in nbrs:
            if g.has_edge(u, v):
                buckets[owner[u]].setdefault(u, []).append(v)
    forests = tuple(_from_buckets(b) for b in buckets)
    return forests  # type: ignore[return-value]


def maximal_matching(g: nx.Graph) -> list[tuple]:
    """Greedy maximal matching over edges in id-lexicographic order."""
    edges = sorted((tuple(sorted_nodes((u, v))) for u, v in g.edges), key=lambda e: (_key(e[0]), _key(e[1])))
    matched = set()
    out = []
    for u, v in edges:
        if u not in matched and v not in matched:
            out.append((u, v))
            matched.update((u, v))
    return out


def maximum_matching(g: nx.Graph) -> list[tuple]:
    """Maximum-cardinality matching (Edmonds' blossom algorithm)."""
    h = nx.Graph()
    h.add_nodes_from(sorted_nodes(g.nodes))
    h.add_edges_from(sorted((tuple(sorted_nodes(e)) for e in g.edges), key=lambda e: (_key(e[0]), _key(e[1]))))
    m = nx.max_weight_matching(h, maxcardinality=True)
    return sorted((tuple(sorted_nodes(e)) for e in m), key=lambda e: (_key(e[0]), _key(e[1])))


def is_matching(g: nx.Graph, m: Iterable[tuple]) -> bool:
    seen = set()
    for u, v in m:
        if not g.has_edge(u, v) or u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def paths_and_cycles(edges: Iterable[tuple]) -> tuple[list[list], list[list]]:
    """Split a max-degree-2 edge set into vertex sequences of paths and cycles."""
    g = nx.Graph()
    g.add_edges_from(edges)
    if any(d > 2 for _, d in g.degree):
        raise ValueError("edge set has a vertex of degree > 2")
    paths, cycles = [], []
    for comp in sorted((sorted_nodes(c) for c in nx.connected_components(g)), key=lambda c: _key(c[0])):
        ends = [v for v in comp if g.degree(v) == 1]
        start = min(ends, key=_key) if ends else comp[0]
        seq, seen = [start], {start}
        while True:
            nxt = [w for w in sorted_nodes(g.neighbors(seq[-1])) if w not in seen]
            if not nxt:
                break
            seq.append(nxt[0])
            seen.add(nxt[0])
        (paths if ends else cycles).append(seq)
    return paths, cycles
