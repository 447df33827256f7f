"""Instance generators: seeded random instances per graph class, the
three-dimensional-matching hardness gadget with a well-formed layout, and
word-cloud instances built from word frequencies and co-occurrence counts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence


from .model import PROPER, BoxDim, Edge, Instance, Layout, SemanticError, as_fraction

GEN_CLASSES = ("path", "cycle", "star", "tree", "outerplanar", "planar-triangulation", "bipartite", "general")

_HINT = {
    "path": "path", "cycle": "cycle", "star": "star", "tree": "tree", "outerplanar": "outerplanar",
    "planar-triangulation": "planar", "bipartite": "bipartite", "general": "general",
}


def _ids(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"v{i:0{width}d}" for i in range(n)]


def _apollonian(n: int, rnd: random.Random) -> tuple[list[tuple[int, int]], dict]:
    """Random stacked triangulation and its rotation system."""
    faces = [(0, 1, 2), (0, 2, 1)]
    edges = [(0, 1), (1, 2), (0, 2)]
    for v in range(3, n):
        a, b, c = faces.pop(rnd.randrange(len(faces)))
        faces += [(a, b, v), (b, c, v), (c, a, v)]
        edges += [(a, v), (b, v), (c, v)]
    succ: dict = {}
    for a, b, c in faces:
        succ.setdefault(a, {})[b] = c
        succ.setdefault(b, {})[c] = a
        succ.setdefault(c, {})[a] = b
    rot = {}
    for v in range(n):
        s = succ[v]
        start = min(s)
        order, x = [start], s[start]
        while x != start:
            order.append(x)
            x = s[x]
        rot[v] = order
    return edges, rot


def _polygon_triangulation(n: int, rnd: random.Random) -> list[tuple[int, int]]:
    edges = [(i, (i + 1) % n) for i in range(n)] if n >= 3 else [(0, 1)][: n - 1]
    stack = [list(range(n))] if n > 3 else []
    while stack:
        poly = stack.pop()
        if len(poly) <= 3:
            continue
        # cut off a random chord from the first vertex or between two others
        i = rnd.randrange(len(poly))
        j = (i + rnd.randrange(2, len(poly) - 1)) % len(poly)
        a, b = sorted((i, j))
        edges.append((poly[a], poly[b]))
        stack.append(poly[a:b + 1])
        stack.append(poly[b:] + poly[:a + 1])
    return edges


def _angular_embedding(n: int, edges) -> dict:
    """Rotation system for vertices placed on a circle (convex position)."""
    pts = [(math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n)) for i in range(n)]
    nbrs: dict = {i: [] for i in range(n)}
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    return {v: sorted(ws, key=lambda w: math.atan2(pts[w][1] - pts[v][1], pts[w][0] - pts[v][0]))
            for v, ws in nbrs.items()}


def _random_tree(n: int, rnd: random.Random) -> list[tuple[int, int]]:
    return [(rnd.randrange(v), v) for v in range(1, n)]


def gen_random(cls: str, n: int, dim_range: tuple[int, int] = (1, 20),
               profit_range: tuple = (1, 9), seed: int = 0, unweighted: bool = False,
               model: str = PROPER, profit_denominator: int = 1) -> Instance:
    """Seeded random instance of a graph class.

    Profits are uniform over multiples of ``1/profit_denominator`` inside
    ``profit_range``; ``unweighted`` forces every profit to 1. Planar classes
    come with their embedding.
    """
    if cls not in GEN_CLASSES:
        raise SemanticError(f"unsupported class {cls!r}; expected one of {', '.join(GEN_CLASSES)}")
    if n < 1:
        raise SemanticError("n must be positive")
    rnd = random.Random(f"{cls}:{n}:{seed}")
    ids = _ids(n)
    emb_idx = None
    if cls == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif cls == "cycle":
        if n < 3:
            raise SemanticError("a cycle needs at least 3 vertices")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif cls == "star":
        edges = [(0, i) for i in range(1, n)]
    elif cls == "tree":
        edges = _random_tree(n, rnd)
    elif cls == "outerplanar":
        edges = _polygon_triangulation(n, rnd) if n >= 2 else []
        edges = sorted({tuple(sorted(e)) for e in edges})
        emb_idx = _angular_embedding(n, edges)
    elif cls == "planar-triangulation":
        if n < 3:
            raise SemanticError("a triangulation needs at least 3 vertices")
        edges, emb_idx = _apollonian(n, rnd)
    elif cls == "bipartite":
        left = max(1, n // 2)
        p = min(1.0, 3.0 / max(left, 1))
        edges = [(i, j) for i in range(left) for j in range(left, n) if rnd.random() < p]
    else:
        p = min(1.0, 4.0 / max(n, 1))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rnd.random() < p]
    lo, hi = dim_range
    verts = [(vid, rnd.randint(lo, hi), rnd.randint(lo, hi)) for vid in ids]
    plo, phi = (as_fraction(x) for x in profit_range)
    d = profit_denominator
    es = []
    for u, v in edges:
        p = Fraction(1) if unweighted else Fraction(rnd.randint(math.ceil(plo * d), math.floor(phi * d)), d)
        es.append((ids[u], ids[v], p))
    emb = None if emb_idx is None else {ids[v]: [ids[w] for w in ws] for v, ws in emb_idx.items()}
    return Instance.build(verts, es, model=model, embedding=emb, class_hint=_HINT[cls])


# --- hardness gadget ----------------------------------------------------------

ELEMENT_SIDE = 2
STAR_SIDE = 7
PETAL_SIDE = 6
PETAL_PROFITS = (2, 3, 3, 3, 3, 3, 3, 3)


@dataclass(frozen=True)
class GadgetSpec:
    """A three-dimensional matching instance over X, Y, Z of size ``k``;
    hyperedges are index triples ``(x, y, z)``."""

    k: int
    hyperedges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.k < 1:
            raise SemanticError("k must be positive")
        seen = set()
        load: dict = {}
        for e in self.hyperedges:
            if len(e) != 3 or not all(0 <= i < self.k for i in e):
                raise SemanticError(f"hyperedge {e!r} out of range")
            if tuple(e) in seen:
                raise SemanticError(f"duplicate hyperedge {e!r}")
            seen.add(tuple(e))
            for side, i in zip("xyz", e):
                load[(side, i)] = load.get((side, i), 0) + 1
                if load[(side, i)] > 3:
                    raise SemanticError(f"element {side}{i} lies in more than three hyperedges")
        if len(self.hyperedges) > 3 * self.k:
            raise SemanticError("more than 3k hyperedges")


def element_id(side: str, i: int) -> str:
    return f"{side}{i}"


def star_id(j: int) -> str:
    return f"e{j}s"


def petal_id(j: int, i: int) -> str:
    return f"e{j}p{i}"


def gen_gadget(spec: GadgetSpec, model: str = PROPER) -> Instance:
    """Contact instance of a 3DM gadget: a 2x2 box per element, and per
    hyperedge a 7x7 hub with eight 6x6 petals (profit 2 for the first, 3 for
    the others) plus profit-1 edges to its three elements."""
    verts = [(element_id(s, i), ELEMENT_SIDE, ELEMENT_SIDE) for s in "xyz" for i in range(spec.k)]
    edges = []
    for j, (x, y, z) in enumerate(spec.hyperedges):
        verts.append((star_id(j), STAR_SIDE, STAR_SIDE))
        for i, p in enumerate(PETAL_PROFITS, start=1):
            verts.append((petal_id(j, i), PETAL_SIDE, PETAL_SIDE))
            edges.append((star_id(j), petal_id(j, i), p))
        for s, idx in zip("xyz", (x, y, z)):
            edges.append((star_id(j), element_id(s, idx), 1))
    return Instance.build(verts, edges, model=model, class_hint="bipartite")


# petal lower-left corners around a hub at [0, 7]^2; petal 1 is the profit-2 one
_PETALS_FULL = {
    1: (1, 7), 2: (-5, 7), 3: (7, 6), 4: (7, 0),
    5: (6, -6), 6: (0, -6), 7: (-6, -5), 8: (-6, 1),
}
_ELEMENT_SLOTS = ((1, 7), (3, 7), (5, 7))
_SPACING = 40


def gadget_layout(spec: GadgetSpec, matching: Sequence[int]) -> Layout:
    """Well-formed layout: hyperedges in ``matching`` touch their three
    elements (dropping petal 1), all others realize all eight petals.
    Profit is ``23|E| + |matching|``."""
    chosen = list(dict.fromkeys(matching))
    used: set = set()
    for j in chosen:
        if not 0 <= j < len(spec.hyperedges):
            raise SemanticError(f"matching refers to unknown hyperedge {j}")
        for s, i in zip("xyz", spec.hyperedges[j]):
            if (s, i) in used:
                raise SemanticError("matching hyperedges share an element")
            used.add((s, i))
    layout: Layout = {}
    for j in range(len(spec.hyperedges)):
        ox = Fraction(_SPACING * j)
        layout[star_id(j)] = (ox, Fraction(0))
        in_m = j in chosen
        for i, (px, py) in _PETALS_FULL.items():
            if i == 1 and in_m:
                layout[petal_id(j, i)] = (ox, Fraction(-3 * _SPACING))
            else:
                layout[petal_id(j, i)] = (ox + px, Fraction(py))
        if in_m:
            for (s, idx), (ex, ey) in zip(zip("xyz", spec.hyperedges[j]), _ELEMENT_SLOTS):
                layout[element_id(s, idx)] = (ox + ex, Fraction(ey))
    # parked boxes share a far row, spaced apart
    park = [v for j in chosen for v in [petal_id(j, 1)]]
    park += [element_id(s, i) for s in "xyz" for i in range(spec.k) if (s, i) not in used]
    for n, v in enumerate(park):
        layout[v] = (Fraction(10 * n), Fraction(-3 * _SPACING))
    return layout


def planted_gadget(k: int, extra: int = 0, seed: int = 0) -> tuple[GadgetSpec, list[int]]:
    """Gadget spec with a planted perfect matching (returned indices) plus
    ``extra`` random hyperedges respecting the degree-3 limit."""
    rnd = random.Random(f"gadget:{k}:{extra}:{seed}")
    ys, zs = list(range(k)), list(range(k))
    rnd.shuffle(ys)
    rnd.shuffle(zs)
    hyper = [(i, ys[i], zs[i]) for i in range(k)]
    load = {(s, i): 1 for s in "xyz" for i in range(k)}
    tries = 0
    while len(hyper) < k + extra and tries < 1000:
        tries += 1
        e = (rnd.randrange(k), rnd.randrange(k), rnd.randrange(k))
        if e in hyper or any(load[(s, i)] >= 3 for s, i in zip("xyz", e)):
            continue
        hyper.append(e)
        for s, i in zip("xyz", e):
            load[(s, i)] += 1
    order = list(range(len(hyper)))
    rnd.shuffle(order)
    spec = GadgetSpec(k, tuple(hyper[i] for i in order))
    matching = sorted(order.index(i) for i in range(k))
    return spec, matching


# --- word clouds ----------------------------------------------------------------

def gen_from_text(frequencies: Mapping[str, object], cooccurrences: Mapping[tuple[str, str], object],
                  scale: int = 1, model: str = PROPER) -> Instance:
    """Word-cloud instance: a box per word sized by a monospace model and an
    importance factor in {1, 2, 3}; edge profits are co-occurrence counts."""
    if not frequencies:
        raise SemanticError("no words given")
    freq = {w: as_fraction(f) for w, f in frequencies.items()}
    if any(f <= 0 for f in freq.values()):
        raise SemanticError("word frequencies must be positive")
    fmin, fmax = min(freq.values()), max(freq.values())
    verts = []
    for w, f in freq.items():
        factor = 1 if fmax == fmin else 1 + math.floor(2 * (f - fmin) / (fmax - fmin))
        verts.append((w, math.ceil(len(w) * scale * factor), math.ceil(scale * factor)))
    edges = {}
    for (a, b), c in cooccurrences.items():
        for w in (a, b):
            if w not in freq:
                raise SemanticError(f"co-occurrence mentions unknown word {w!r}")
        c = as_fraction(c)
        if a == b or c <= 0:
            continue
        key = frozenset((a, b))
        edges[key] = edges.get(key, Fraction(0)) + c
    es = [Edge(*sorted(k), p) for k, p in sorted(edges.items(), key=lambda kv: sorted(kv[0]))]
    return Instance(tuple((w, BoxDim(wd, ht)) for w, wd, ht in verts), tuple(es), model, None, "general")


def read_frequencies(text: str) -> dict[str, Fraction]:
    """``word frequency`` per line; blank lines and ``#`` comments ignored."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SemanticError(f"line {n}: expected 'word frequency'")
        out[parts[0]] = as_fraction(parts[1])
    return out


def read_cooccurrences(text: str) -> dict[tuple[str, str], Fraction]:
    """``word word count`` per line."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise SemanticError(f"line {n}: expected 'word word count'")
        out[(parts[0], parts[1])] = as_fraction(parts[2])
    return out


def cooccurrences_from_sentences(sentences: Sequence[Sequence[str]], vocabulary: Optional[set] = None):
    """Word frequencies and same-sentence pair counts from tokenized text."""
    freq: dict = {}
    pairs: dict = {}
    for sent in sentences:
        words = [w for w in dict.fromkeys(sent) if vocabulary is None or w in vocabulary]
        for w in sent:
            if vocabulary is None or w in vocabulary:
                freq[w] = freq.get(w, 0) + 1
        for i, a in enumerate(words):
            for b in words[i + 1:]:
                key = tuple(sorted((a, b)))
                pairs[key] = pairs.get(key, 0) + 1
    return freq, pairs
