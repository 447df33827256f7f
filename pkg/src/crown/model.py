"""Core domain types: boxes, instances, layouts, the contact predicate,
profit evaluation, validation and JSON (de)serialization.

All geometry is exact: coordinates are :class:`fractions.Fraction` and box
dimensions are positive integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

PROPER = "proper"
POINT = "point"
MODELS = (PROPER, POINT)

CLASS_HINTS = (
    "path", "cycle", "star", "tree", "outerplanar", "planar", "bipartite", "general",
)

# contact kinds
NONE = "none"

Point = tuple[Fraction, Fraction]
Layout = dict[str, Point]
Ratio = Union[Fraction, str]  # Fraction, "exact", "incumbent" or "unbounded"


class CrownError(Exception):
    """Base class for errors raised by this package."""


class OverlapError(CrownError):
    pass


class ValidationError(CrownError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class ParseError(CrownError):
    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)


class SemanticError(CrownError):
    pass


@dataclass(frozen=True)
class BoxDim:
    width: int
    height: int

    def __post_init__(self):
        for name in ("width", "height"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"box {name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    profit: Fraction

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))


def as_fraction(value) -> Fraction:
    """Parse an int, a float (via its decimal repr) or a ``"p/q"`` string."""
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"not a number: {value!r}")


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Instance:
    vertices: tuple[tuple[str, BoxDim], ...]
    edges: tuple[Edge, ...]
    model: str = PROPER
    embedding: Optional[Mapping[str, tuple[str, ...]]] = None
    class_hint: Optional[str] = None
    _dims: dict = field(init=False, repr=False, compare=False)
    _profit: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise SemanticError(f"unknown contact model {self.model!r}")
        if self.class_hint is not None and self.class_hint not in CLASS_HINTS:
            raise SemanticError(f"unknown class hint {self.class_hint!r}")
        dims = {}
        for vid, dim in self.vertices:
            if vid in dims:
                raise SemanticError(f"duplicate vertex id {vid!r}")
            dims[vid] = dim
        profit = {}
        for e in self.edges:
            for end in (e.u, e.v):
                if end not in dims:
                    raise SemanticError(f"edge ({e.u!r}, {e.v!r}) references unknown vertex {end!r}")
            if e.u == e.v:
                raise SemanticError(f"self-loop at {e.u!r}")
            if e.key in profit:
                raise SemanticError(f"duplicate edge ({e.u!r}, {e.v!r})")
            if e.profit < 0:
                raise SemanticError(f"negative profit on edge ({e.u!r}, {e.v!r})")
            profit[e.key] = e.profit
        if self.embedding is not None:
            _check_embedding(self.embedding, dims, profit)
        object.__setattr__(self, "_dims", dims)
        object.__setattr__(self, "_profit", profit)

    @classmethod
    def build(cls, vertices, edges, model=PROPER, embedding=None, class_hint=None) -> Instance:
        """Convenience constructor.

        ``vertices`` is an iterable of ``(id, w, h)`` or ``(id, BoxDim)``;
        ``edges`` an iterable of ``(u, v)`` or ``(u, v, profit)``.
        """
        vs = []
        for item in vertices:
            if len(item) == 2:
                vid, dim = item
            else:
                vid, w, h = item
                dim = BoxDim(w, h)
            vs.append((str(vid), dim))
        es = []
        for item in edges:
            u, v = str(item[0]), str(item[1])
            p = as_fraction(item[2]) if len(item) > 2 else Fraction(1)
            es.append(Edge(u, v, p))
        emb = None
        if embedding is not None:
            emb = {str(k): tuple(str(x) for x in nbrs) for k, nbrs in embedding.items()}
        return cls(tuple(vs), tuple(es), model, emb, class_hint)

    @property
    def dims(self) -> Mapping[str, BoxDim]:
        return self._dims

    @property
    def ids(self) -> list[str]:
        return [vid for vid, _ in self.vertices]

    def profit(self, u: str, v: str) -> Fraction:
        return self._profit.get(frozenset((u, v)), Fraction(0))

    def has_edge(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self._profit

    def total_profit(self) -> Fraction:
        return sum((e.profit for e in self.edges), Fraction(0))

    def neighbors(self) -> dict[str, list[str]]:
        nbrs = {vid: [] for vid in self._dims}
        for e in self.edges:
            nbrs[e.u].append(e.v)
            nbrs[e.v].append(e.u)
        return nbrs

    def graph(self):
        """The desired-contact graph as a :class:`networkx.Graph`."""
        import networkx as nx

        g = nx.Graph()
        for vid, dim in self.vertices:
            g.add_node(vid, dim=dim)
        for e in self.edges:
            g.add_edge(e.u, e.v, profit=e.profit)
        return g

    def is_unweighted(self) -> bool:
        return len({e.profit for e in self.edges}) <= 1

    def with_edges(self, edges: Iterable[Edge], class_hint=None, keep_embedding=True) -> Instance:
        """Same vertex set and model, different edge set."""
        edges = tuple(edges)
        emb = None
        if keep_embedding and self.embedding is not None:
            keys = {e.key for e in edges}
            emb = {v: tuple(u for u in nbrs if frozenset((u, v)) in keys)
                   for v, nbrs in self.embedding.items()}
        return Instance(self.vertices, edges, self.model, emb, class_hint)

    def induced(self, keep: Iterable[str]) -> Instance:
        keep = set(keep)
        vs = tuple((vid, d) for vid, d in self.vertices if vid in keep)
        es = tuple(e for e in self.edges if e.u in keep and e.v in keep)
        emb = None
        if self.embedding is not None:
            emb = {v: tuple(u for u in nbrs if u in keep)
                   for v, nbrs in self.embedding.items() if v in keep}
        return Instance(vs, es, self.model, emb, None)

    def with_model(self, model: str) -> Instance:
        return Instance(self.vertices, self.edges, model, self.embedding, self.class_hint)


def _check_embedding(embedding, dims, profit):
    for v, nbrs in embedding.items():
        if v not in dims:
            raise SemanticError(f"embedding mentions unknown vertex {v!r}")
        if len(set(nbrs)) != len(nbrs):
            raise SemanticError(f"embedding rotation of {v!r} repeats a neighbor")
        for u in nbrs:
            if u not in dims:
                raise SemanticError(f"embedding mentions unknown vertex {u!r}")
            if v not in embedding.get(u, ()):
                raise SemanticError(f"asymmetric embedding: {u!r} in rotation of {v!r} but not vice versa")
            if frozenset((u, v)) not in profit:
                raise SemanticError(f"embedding pair ({v!r}, {u!r}) is not an edge")
    for key in profit:
        a, b = tuple(key)
        if a not in embedding or b not in embedding[a]:
            raise SemanticError(f"edge ({a!r}, {b!r}) missing from embedding")


@dataclass(frozen=True)
class PlacedBox:
    x: Fraction
    y: Fraction
    w: int
    h: int

    @property
    def x2(self):
        return self.x + self.w

    @property
    def y2(self):
        return self.y + self.h


def contact(a: PlacedBox, b: PlacedBox, model: str = PROPER) -> str:
    """Classify the touching of two placed boxes.

    Returns ``"proper"`` for a shared boundary segment of positive length,
    ``"point"`` for a single shared corner and ``"none"`` otherwise. The
    classification does not depend on ``model``; use :func:`realizes` to ask
    whether a kind counts under a model. Raises :class:`OverlapError` if the
    interiors intersect.
    """
    ox = min(a.x2, b.x2) - max(a.x, b.x)
    oy = min(a.y2, b.y2) - max(a.y, b.y)
    if ox > 0 and oy > 0:
        raise OverlapError(f"boxes overlap on [{max(a.x, b.x)}, {min(a.x2, b.x2)}] x "
                           f"[{max(a.y, b.y)}, {min(a.y2, b.y2)}]")
    if ox < 0 or oy < 0:
        return NONE
    if ox == 0 and oy == 0:
        return POINT
    return PROPER


def realizes(kind: str, model: str) -> bool:
    return kind == PROPER or (kind == POINT and model == POINT)


def placed(instance: Instance, layout: Mapping[str, Point], vid: str) -> PlacedBox:
    x, y = layout[vid]
    d = instance.dims[vid]
    return PlacedBox(Fraction(x), Fraction(y), d.width, d.height)


@dataclass(frozen=True)
class Violation:
    kind: str  # "overlap" | "unplaced" | "unknown"
    ids: tuple[str, ...]
    witness: Optional[Point] = None

    def __str__(self):
        if self.kind == "overlap":
            wx, wy = self.witness
            return (f"interiors of {self.ids[0]!r} and {self.ids[1]!r} overlap "
                    f"(witness point ({wx}, {wy}))")
        if self.kind == "unplaced":
            return f"vertex {self.ids[0]!r} is not placed"
        return f"placement for unknown vertex {self.ids[0]!r}"


def validate(instance: Instance, layout: Mapping[str, Point]) -> list[Violation]:
    """Every overlapping pair and every unplaced vertex; empty list means ok."""
    out = []
    for vid in instance.ids:
        if vid not in layout:
            out.append(Violation("unplaced", (vid,)))
    for vid in layout:
        if vid not in instance.dims:
            out.append(Violation("unknown", (vid,)))
    boxes = [(vid, placed(instance, layout, vid)) for vid in instance.ids if vid in layout]
    boxes.sort(key=lambda t: (t[1].x, t[0]))
    # sweep over x: only boxes whose x-interval strictly intersects can overlap
    active: list[tuple[str, PlacedBox]] = []
    for vid, b in boxes:
        active = [(u, a) for u, a in active if a.x2 > b.x]
        for u, a in active:
            ox = min(a.x2, b.x2) - max(a.x, b.x)
            oy = min(a.y2, b.y2) - max(a.y, b.y)
            if ox > 0 and oy > 0:
                wit = ((max(a.x, b.x) + min(a.x2, b.x2)) / 2, (max(a.y, b.y) + min(a.y2, b.y2)) / 2)
                pair = tuple(sorted((u, vid)))
                out.append(Violation("overlap", pair, wit))
        active.append((vid, b))
    return out


def evaluate(instance: Instance, layout: Mapping[str, Point]) -> tuple[list[tuple[str, str]], Fraction]:
    """Realized instance edges (in instance order) and their total profit."""
    problems = validate(instance, layout)
    if problems:
        raise ValidationError(problems)
    realized = []
    total = Fraction(0)
    for e in instance.edges:
        kind = contact(placed(instance, layout, e.u), placed(instance, layout, e.v), instance.model)
        if realizes(kind, instance.model):
            realized.append((e.u, e.v))
            total += e.profit
    return realized, total


@dataclass(frozen=True)
class SolveReport:
    layout: Layout
    realized_edges: tuple[tuple[str, str], ...]
    profit: Fraction
    certified_ratio: Ratio
    algorithm: str
    seed: Optional[int] = None
    trace: tuple[str, ...] = ()

    def ratio_value(self) -> Optional[Fraction]:
        """Certificate as a number (1 for ``exact``), ``None`` if no bound holds."""
        return ratio_value(self.certified_ratio)


def ratio_value(r: Ratio) -> Optional[Fraction]:
    if r == "exact":
        return Fraction(1)
    if isinstance(r, str):
        return None
    return Fraction(r)


def make_report(instance: Instance, layout: Mapping[str, Point], ratio: Ratio,
                algorithm: str, seed=None, trace=()) -> SolveReport:
    layout = {vid: (Fraction(layout[vid][0]), Fraction(layout[vid][1])) for vid in instance.ids}
    realized, total = evaluate(instance, layout)
    return SolveReport(layout, tuple(realized), total, ratio, algorithm, seed, tuple(trace))


# -- serialization ---------------------------------------------------------

def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _expect(cond, msg):
    if not cond:
        raise ParseError(msg)


def read_instance(text: str) -> Instance:
    data = _loads(text)
    _expect(isinstance(data, dict), "instance must be a JSON object")
    model = data.get("model", PROPER)
    _expect(model in MODELS, f"model must be one of {MODELS}, got {model!r}")
    raw_vs = data.get("vertices")
    _expect(isinstance(raw_vs, list), "'vertices' must be a list")
    vs = []
    for i, rv in enumerate(raw_vs):
        _expect(isinstance(rv, dict) and {"id", "w", "h"} <= rv.keys(),
                f"vertex #{i} must be an object with id, w, h")
        _expect(isinstance(rv["id"], str), f"vertex #{i}: id must be a string")
        try:
            vs.append((rv["id"], BoxDim(rv["w"], rv["h"])))
        except ValueError as exc:
            raise ParseError(f"vertex {rv['id']!r}: {exc}") from None
    raw_es = data.get("edges", [])
    _expect(isinstance(raw_es, list), "'edges' must be a list")
    es = []
    for i, re_ in enumerate(raw_es):
        _expect(isinstance(re_, dict) and {"u", "v"} <= re_.keys(), f"edge #{i} must have u and v")
        _expect(isinstance(re_["u"], str) and isinstance(re_["v"], str), f"edge #{i}: endpoints must be strings")
        try:
            p = as_fraction(re_.get("p", 1))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"edge #{i}: bad profit {re_.get('p')!r}") from None
        es.append(Edge(re_["u"], re_["v"], p))
    emb = data.get("embedding")
    if emb is not None:
        _expect(isinstance(emb, dict) and all(isinstance(x, list) for x in emb.values()),
                "'embedding' must map ids to lists")
        emb = {k: tuple(v) for k, v in emb.items()}
    return Instance(tuple(vs), tuple(es), model, emb, data.get("class_hint"))


def write_instance(instance: Instance) -> str:
    data = {
        "model": instance.model,
        "vertices": [{"id": vid, "w": d.width, "h": d.height} for vid, d in instance.vertices],
        "edges": [{"u": e.u, "v": e.v, "p": format_fraction(e.profit)} for e in instance.edges],
    }
    if instance.embedding is not None:
        data["embedding"] = {v: list(instance.embedding[v]) for v in instance.ids if v in instance.embedding}
    if instance.class_hint is not None:
        data["class_hint"] = instance.class_hint
    return json.dumps(data, indent=1) + "\n"


def write_layout(report: SolveReport) -> str:
    ratio = report.certified_ratio
    data = {
        "algorithm": report.algorithm,
        "profit": format_fraction(report.profit),
        "certified_ratio": ratio if isinstance(ratio, str) else format_fraction(ratio),
    }
    if report.seed is not None:
        data["seed"] = report.seed
    data["placements"] = [{"id": vid, "x": format_fraction(x), "y": format_fraction(y)}
                          for vid, (x, y) in report.layout.items()]
    data["realized_edges"] = [list(e) for e in report.realized_edges]
    if report.trace:
        data["trace"] = list(report.trace)
    return json.dumps(data, indent=1) + "\n"


def read_layout(text: str) -> SolveReport:
    data = _loads(text)
    _expect(isinstance(data, dict) and "placements" in data, "layout must be an object with placements")
    layout = {}
    for i, p in enumerate(data["placements"]):
        _expect(isinstance(p, dict) and {"id", "x", "y"} <= p.keys(), f"placement #{i} needs id, x, y")
        try:
            layout[p["id"]] = (as_fraction(p["x"]), as_fraction(p["y"]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"placement #{i}: bad coordinate") from None
    ratio = data.get("certified_ratio", "unbounded")
    if ratio not in ("exact", "incumbent", "unbounded"):
        ratio = as_fraction(ratio)
    return SolveReport(
        layout,
        tuple(tuple(e) for e in data.get("realized_edges", [])),
        as_fraction(data.get("profit", 0)),
        ratio,
        data.get("algorithm", ""),
        data.get("seed"),
        tuple(data.get("trace", ())),
    )
