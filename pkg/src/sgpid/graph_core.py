"""Mixed graphs and the genealogical relations used by every other module.

A single immutable :class:`MixedGraph` carries every graph role in the
package (DAG, MRF, CG, ADMG, SG and their conditional variants).  The role is
never stored; it is recomputed by :func:`classify` from the edge kinds.

All collections iterate in lexicographic name order so that partitions,
orders and everything derived from them are reproducible.
"""

from __future__ import annotations

import heapq
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import networkx as nx

__all__ = [
    "EdgeKind",
    "VertexInfo",
    "Edge",
    "MixedGraph",
    "Block",
    "GraphKind",
    "GraphClass",
    "GraphError",
    "RELATION_KINDS",
    "relatives",
    "blocks",
    "districts",
    "classify",
    "augmented_graph",
    "cliques",
    "induced_subgraph",
    "block_topological_order",
    "topological_vertex_order",
    "graph_from_dict",
    "graph_from_text",
    "graph_to_dict",
    "load_graph",
    "save_graph",
]


class GraphError(ValueError):
    """Raised for malformed graphs or invalid graph queries."""


class EdgeKind(str, Enum):
    DIRECTED = "directed"
    BIDIRECTED = "bidirected"
    UNDIRECTED = "undirected"

    @property
    def symmetric(self) -> bool:
        return self is not EdgeKind.DIRECTED


@dataclass(frozen=True, order=True)
class VertexInfo:
    """A named vertex with its latency flag and state-space size."""

    name: str
    latent: bool = False
    cardinality: int = 2

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise GraphError("vertex names must be nonempty strings")
        if self.cardinality < 1:
            raise GraphError(f"vertex {self.name!r}: cardinality must be positive")


@dataclass(frozen=True, order=True)
class Edge:
    """An edge ``tail -> head`` (directed) or an unordered pair (other kinds).

    Symmetric kinds are normalised so that ``tail < head``.
    """

    tail: str
    head: str
    kind: EdgeKind

    def __post_init__(self) -> None:
        kind = EdgeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.tail == self.head:
            raise GraphError(f"self-loop on {self.tail!r}")
        if kind.symmetric and self.head < self.tail:
            tail, head = self.head, self.tail
            object.__setattr__(self, "tail", tail)
            object.__setattr__(self, "head", head)

    @classmethod
    def directed(cls, tail: str, head: str) -> "Edge":
        return cls(tail, head, EdgeKind.DIRECTED)

    @classmethod
    def bidirected(cls, a: str, b: str) -> "Edge":
        return cls(a, b, EdgeKind.BIDIRECTED)

    @classmethod
    def undirected(cls, a: str, b: str) -> "Edge":
        return cls(a, b, EdgeKind.UNDIRECTED)

    def __str__(self) -> str:
        arrow = {"directed": "->", "bidirected": "<->", "undirected": "--"}[self.kind.value]
        return f"{self.tail} {arrow} {self.head}"


def _freeze(names: Iterable[str]) -> frozenset[str]:
    if isinstance(names, str):
        return frozenset([names])
    return frozenset(names)


class MixedGraph:
    """Immutable mixed graph over the three edge kinds of ``EdgeKind``.

    ``fixed`` is the optional context: a set of fixed vertices ``W``.  When it
    is given, the remaining vertices are random, and no edge may point from a
    random vertex into a fixed one (the conditional-graph convention).
    """

    __slots__ = (
        "_vertices",
        "_edges",
        "_edge_set",
        "_fixed",
        "_pa",
        "_ch",
        "_nb",
        "_sib",
        "_hash",
    )

    def __init__(
        self,
        vertices: Iterable[VertexInfo | str],
        edges: Iterable[Edge | tuple[str, str, str]] = (),
        fixed: Iterable[str] | None = None,
    ) -> None:
        infos: dict[str, VertexInfo] = {}
        for v in vertices:
            info = VertexInfo(v) if isinstance(v, str) else v
            if info.name in infos:
                raise GraphError(f"duplicate vertex {info.name!r}")
            infos[info.name] = info
        self._vertices = {k: infos[k] for k in sorted(infos)}

        edge_set: set[Edge] = set()
        for e in edges:
            edge = e if isinstance(e, Edge) else Edge(e[0], e[1], EdgeKind(e[2]))
            for end in (edge.tail, edge.head):
                if end not in self._vertices:
                    raise GraphError(f"edge {edge} references unknown vertex {end!r}")
            edge_set.add(edge)
        self._edges = tuple(sorted(edge_set))
        self._edge_set = frozenset(edge_set)

        if fixed is None:
            self._fixed = None
        else:
            fx = _freeze(fixed)
            unknown = fx - self._vertices.keys()
            if unknown:
                raise GraphError(f"fixed vertices not in graph: {sorted(unknown)}")
            self._fixed = fx

        pa: dict[str, set[str]] = {v: set() for v in self._vertices}
        ch: dict[str, set[str]] = {v: set() for v in self._vertices}
        nb: dict[str, set[str]] = {v: set() for v in self._vertices}
        sib: dict[str, set[str]] = {v: set() for v in self._vertices}
        for edge in self._edges:
            if edge.kind is EdgeKind.DIRECTED:
                pa[edge.head].add(edge.tail)
                ch[edge.tail].add(edge.head)
            elif edge.kind is EdgeKind.BIDIRECTED:
                sib[edge.head].add(edge.tail)
                sib[edge.tail].add(edge.head)
            else:
                nb[edge.head].add(edge.tail)
                nb[edge.tail].add(edge.head)
        self._pa = {k: frozenset(v) for k, v in pa.items()}
        self._ch = {k: frozenset(v) for k, v in ch.items()}
        self._nb = {k: frozenset(v) for k, v in nb.items()}
        self._sib = {k: frozenset(v) for k, v in sib.items()}
        self._hash: int | None = None

        if self._fixed is not None:
            for edge in self._edges:
                t_fixed = edge.tail in self._fixed
                h_fixed = edge.head in self._fixed
                if edge.kind is EdgeKind.DIRECTED:
                    if h_fixed and not t_fixed:
                        raise GraphError(f"edge {edge} points into fixed vertex {edge.head!r}")
                elif t_fixed != h_fixed:
                    raise GraphError(f"edge {edge} joins a fixed and a random vertex")

    # -- basic accessors -------------------------------------------------
    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._vertices)

    @property
    def vertices(self) -> tuple[VertexInfo, ...]:
        return tuple(self._vertices.values())

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def fixed(self) -> frozenset[str]:
        return self._fixed if self._fixed is not None else frozenset()

    @property
    def has_context(self) -> bool:
        return self._fixed is not None

    @property
    def random(self) -> frozenset[str]:
        return frozenset(self._vertices) - self.fixed

    @property
    def observed(self) -> frozenset[str]:
        return frozenset(v for v, info in self._vertices.items() if not info.latent)

    @property
    def latent(self) -> frozenset[str]:
        return frozenset(v for v, info in self._vertices.items() if info.latent)

    def vertex(self, name: str) -> VertexInfo:
        try:
            return self._vertices[name]
        except KeyError:
            raise GraphError(f"unknown vertex {name!r}") from None

    def cardinality(self, name: str) -> int:
        return self.vertex(name).cardinality

    def __contains__(self, name: object) -> bool:
        return name in self._vertices

    def __len__(self) -> int:
        return len(self._vertices)

    def parents(self, v: str) -> frozenset[str]:
        return self._pa[self._check(v)]

    def children(self, v: str) -> frozenset[str]:
        return self._ch[self._check(v)]

    def neighbors(self, v: str) -> frozenset[str]:
        return self._nb[self._check(v)]

    def siblings(self, v: str) -> frozenset[str]:
        return self._sib[self._check(v)]

    def has_edge(self, a: str, b: str, kind: EdgeKind | str) -> bool:
        return Edge(a, b, EdgeKind(kind)) in self._edge_set

    def edges_of_kind(self, kind: EdgeKind | str) -> tuple[Edge, ...]:
        kind = EdgeKind(kind)
        return tuple(e for e in self._edges if e.kind is kind)

    def _check(self, v: str) -> str:
        if v not in self._vertices:
            raise GraphError(f"unknown vertex {v!r}")
        return v

    def check_subset(self, s: Iterable[str]) -> frozenset[str]:
        s = _freeze(s)
        unknown = s - self._vertices.keys()
        if unknown:
            raise GraphError(f"unknown vertices: {sorted(unknown)}")
        return s

    # -- derived graphs --------------------------------------------------
    def replace(
        self,
        *,
        vertices: Iterable[VertexInfo] | None = None,
        edges: Iterable[Edge] | None = None,
        fixed: Iterable[str] | None | bool = False,
    ) -> "MixedGraph":
        """Copy with some parts replaced.  ``fixed=False`` keeps the context."""
        new_fixed = self._fixed if fixed is False else fixed
        return MixedGraph(
            self.vertices if vertices is None else vertices,
            self._edges if edges is None else edges,
            new_fixed,
        )

    # -- equality ----------------------------------------------------------
    def _key(self) -> tuple[Any, ...]:
        return (tuple(self._vertices.values()), self._edges, self._fixed)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(str(e) for e in self._edges)
        ctx = f"; fixed={sorted(self._fixed)}" if self._fixed is not None else ""
        return f"MixedGraph([{', '.join(self.names)}]; {body}{ctx})"


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------

RELATION_KINDS = (
    "parents",
    "children",
    "ancestors",
    "descendants",
    "neighbors",
    "siblings",
    "non-descendants",
    "district",
    "anterior",
    "exterior",
    "strict-exterior",
)


def _closure(g: MixedGraph, start: frozenset[str], steps: tuple[str, ...]) -> frozenset[str]:
    adjacency = {"pa": g._pa, "ch": g._ch, "nb": g._nb, "sib": g._sib}
    seen = set(start)
    stack = list(start)
    while stack:
        v = stack.pop()
        for step in steps:
            for w in adjacency[step][v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return frozenset(seen)


def relatives(g: MixedGraph, s: Iterable[str] | str, kind: str) -> frozenset[str]:
    """Set-valued relations, extended disjunctively to sets.

    Closure relations contain ``s`` itself.  One-step relations such as
    parents do not, and neither does the strict exterior.
    The anterior follows directed edges backwards and undirected edges either
    way; the exterior follows directed edges forwards and undirected edges
    either way.  The strict exterior drops ``s`` and its undirected
    components from the exterior.
    """
    s = g.check_subset(s)
    if kind == "parents":
        return frozenset().union(*(g._pa[v] for v in s))
    if kind == "children":
        return frozenset().union(*(g._ch[v] for v in s))
    if kind == "neighbors":
        return frozenset().union(*(g._nb[v] for v in s))
    if kind == "siblings":
        return frozenset().union(*(g._sib[v] for v in s))
    if kind == "ancestors":
        return _closure(g, s, ("pa",))
    if kind == "descendants":
        return _closure(g, s, ("ch",))
    if kind == "non-descendants":
        return frozenset(g.names) - _closure(g, s, ("ch",))
    if kind == "district":
        return _closure(g, s, ("sib",))
    if kind == "anterior":
        return _closure(g, s, ("pa", "nb"))
    if kind == "exterior":
        return _closure(g, s, ("ch", "nb"))
    if kind == "strict-exterior":
        return _closure(g, s, ("ch", "nb")) - _closure(g, s, ("nb",))
    raise GraphError(f"unknown relation kind {kind!r}")


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    """A connected component under undirected edges."""

    members: tuple[str, ...]

    @property
    def nontrivial(self) -> bool:
        return len(self.members) > 1

    @property
    def as_set(self) -> frozenset[str]:
        return frozenset(self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def _components(nodes: Iterable[str], adjacency: Mapping[str, frozenset[str]]) -> list[tuple[str, ...]]:
    nodes = set(nodes)
    out: list[tuple[str, ...]] = []
    seen: set[str] = set()
    for v in sorted(nodes):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adjacency[u]:
                if w in nodes and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append(tuple(sorted(comp)))
    return out


def blocks(g: MixedGraph) -> list[Block]:
    """Undirected components of the random vertices, ordered by first member."""
    return [Block(c) for c in _components(g.random, g._nb)]


def districts(g: MixedGraph) -> list[frozenset[str]]:
    """Bidirected components of the random vertices outside nontrivial blocks."""
    in_blocks = frozenset().union(*(b.as_set for b in blocks(g) if b.nontrivial))
    nodes = g.random - in_blocks
    return [frozenset(c) for c in _components(nodes, g._sib)]


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


class GraphKind(str, Enum):
    DAG = "DAG"
    MRF = "MRF"
    CG = "CG"
    ADMG = "ADMG"
    CADMG = "CADMG"
    CCG = "CCG"
    SG = "SG"


@dataclass(frozen=True)
class GraphClass:
    """Predicates describing a graph, plus the set of classes it belongs to."""

    segregated: bool
    partially_directed_cycle: bool
    directed_acyclic: bool
    has_directed: bool
    has_bidirected: bool
    has_undirected: bool
    conditional: bool
    memberships: frozenset[GraphKind] = field(default_factory=frozenset)
    segregation_witness: str | None = None

    @property
    def kind(self) -> GraphKind | None:
        """The most specific class, or ``None`` for graphs outside the lattice."""
        order = [
            GraphKind.DAG,
            GraphKind.MRF,
            GraphKind.CADMG,
            GraphKind.ADMG,
            GraphKind.CCG,
            GraphKind.CG,
            GraphKind.SG,
        ]
        for k in order:
            if k in self.memberships:
                return k
        return None

    @property
    def is_sg(self) -> bool:
        return GraphKind.SG in self.memberships

    def __contains__(self, kind: object) -> bool:
        return kind in self.memberships


def _relevant_edges(g: MixedGraph) -> tuple[Edge, ...]:
    """Edges touching at least one random vertex (fixed-side edges are display only)."""
    if not g.has_context:
        return g.edges
    rnd = g.random
    return tuple(e for e in g.edges if e.tail in rnd or e.head in rnd)


def _supernode_cycle(g: MixedGraph, edges: tuple[Edge, ...]) -> bool:
    undirected = {v: set() for v in g.names}
    for e in edges:
        if e.kind is EdgeKind.UNDIRECTED:
            undirected[e.tail].add(e.head)
            undirected[e.head].add(e.tail)
    comp_of: dict[str, int] = {}
    for i, comp in enumerate(_components(g.names, {k: frozenset(v) for k, v in undirected.items()})):
        for v in comp:
            comp_of[v] = i
    dg = nx.DiGraph()
    dg.add_nodes_from(set(comp_of.values()))
    for e in edges:
        if e.kind is EdgeKind.DIRECTED:
            a, b = comp_of[e.tail], comp_of[e.head]
            if a == b:
                return True
            dg.add_edge(a, b)
    return not nx.is_directed_acyclic_graph(dg)


def classify(g: MixedGraph) -> GraphClass:
    """Report the structural properties and class memberships of ``g``."""
    edges = _relevant_edges(g)
    kinds = {e.kind for e in edges}
    has_d = EdgeKind.DIRECTED in kinds
    has_b = EdgeKind.BIDIRECTED in kinds
    has_u = EdgeKind.UNDIRECTED in kinds

    und_touch: set[str] = set()
    bi_touch: set[str] = set()
    for e in edges:
        if e.kind is EdgeKind.UNDIRECTED:
            und_touch.update((e.tail, e.head))
        elif e.kind is EdgeKind.BIDIRECTED:
            bi_touch.update((e.tail, e.head))
    clash = sorted(und_touch & bi_touch)
    segregated = not clash

    dg = nx.DiGraph()
    dg.add_nodes_from(g.names)
    dg.add_edges_from((e.tail, e.head) for e in edges if e.kind is EdgeKind.DIRECTED)
    directed_acyclic = nx.is_directed_acyclic_graph(dg)
    pd_cycle = _supernode_cycle(g, edges)

    members: set[GraphKind] = set()
    if not has_b and not has_u and directed_acyclic:
        members.add(GraphKind.DAG)
    if not has_d and not has_b:
        members.add(GraphKind.MRF)
    if not has_b and not pd_cycle:
        members.add(GraphKind.CCG if g.has_context else GraphKind.CG)
        if g.has_context:
            members.add(GraphKind.CG)
    if not has_u and directed_acyclic:
        members.add(GraphKind.CADMG if g.has_context else GraphKind.ADMG)
        if g.has_context:
            members.add(GraphKind.ADMG)
    if segregated and not pd_cycle:
        members.add(GraphKind.SG)
    return GraphClass(
        segregated=segregated,
        partially_directed_cycle=pd_cycle,
        directed_acyclic=directed_acyclic,
        has_directed=has_d,
        has_bidirected=has_b,
        has_undirected=has_u,
        conditional=g.has_context,
        memberships=frozenset(members),
        segregation_witness=clash[0] if clash else None,
    )


# ---------------------------------------------------------------------------
# Augmented graphs and cliques
# ---------------------------------------------------------------------------


def augmented_graph(g: MixedGraph, b: Iterable[str]) -> MixedGraph:
    """Undirected graph on ``b`` and its parents used by the block factorization."""
    b = g.check_subset(b)
    if b not in {blk.as_set for blk in blocks(g)}:
        raise GraphError(f"{sorted(b)} is not a block of the graph")
    parents = relatives(g, b, "parents") - b
    edges: set[Edge] = set()
    for v in b:
        for w in g.neighbors(v):
            edges.add(Edge.undirected(v, w))
        for p in g.parents(v):
            edges.add(Edge.undirected(p, v))
    ps = sorted(parents)
    for i, p in enumerate(ps):
        for q in ps[i + 1 :]:
            edges.add(Edge.undirected(p, q))
    return MixedGraph([g.vertex(v) for v in b | parents], edges)


def cliques(g: MixedGraph) -> list[frozenset[str]]:
    """Maximal cliques of an undirected graph, sorted by their sorted members."""
    bad = [e for e in g.edges if e.kind is not EdgeKind.UNDIRECTED]
    if bad:
        raise GraphError(f"cliques() needs an undirected graph; found {bad[0]}")
    ug = nx.Graph()
    ug.add_nodes_from(g.names)
    ug.add_edges_from((e.tail, e.head) for e in g.edges)
    found = [tuple(sorted(c)) for c in nx.find_cliques(ug)]
    return [frozenset(c) for c in sorted(found)]


def induced_subgraph(g: MixedGraph, s: Iterable[str]) -> MixedGraph:
    """Subgraph on ``s`` keeping every edge with both endpoints in ``s``."""
    s = g.check_subset(s)
    edges = [e for e in g.edges if e.tail in s and e.head in s]
    fixed = None if not g.has_context else g.fixed & s
    return MixedGraph([g.vertex(v) for v in sorted(s)], edges, fixed)


# ---------------------------------------------------------------------------
# Orders
# ---------------------------------------------------------------------------


def block_topological_order(g: MixedGraph) -> list[Block]:
    """Order all undirected components so directed edges point forwards.

    Ties are broken by the lexicographically smallest member name.  The order
    covers every vertex, fixed ones included.
    """
    comps = [Block(c) for c in _components(g.names, g._nb)]
    comp_of = {v: i for i, c in enumerate(comps) for v in c.members}
    succ: dict[int, set[int]] = {i: set() for i in range(len(comps))}
    indeg = [0] * len(comps)
    for e in g.edges:
        if e.kind is not EdgeKind.DIRECTED:
            continue
        a, b = comp_of[e.tail], comp_of[e.head]
        if a == b:
            raise GraphError(f"partially directed cycle through {e}")
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    heap = [(comps[i].members[0], i) for i in range(len(comps)) if indeg[i] == 0]
    heapq.heapify(heap)
    out: list[Block] = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(comps[i])
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (comps[j].members[0], j))
    if len(out) != len(comps):
        raise GraphError("graph has a partially directed cycle")
    return out


def topological_vertex_order(g: MixedGraph) -> list[str]:
    """Flatten :func:`block_topological_order`, members sorted within blocks."""
    return [v for b in block_topological_order(g) for v in b.members]


# ---------------------------------------------------------------------------
# JSON format
# ---------------------------------------------------------------------------


def graph_to_dict(g: MixedGraph) -> dict[str, Any]:
    out: dict[str, Any] = {
        "vertices": [
            {"name": v.name, "latent": v.latent, "cardinality": v.cardinality} for v in g.vertices
        ],
        "edges": [{"tail": e.tail, "head": e.head, "kind": e.kind.value} for e in g.edges],
    }
    if g.has_context:
        out["fixed"] = sorted(g.fixed)
    return out


def graph_from_dict(doc: Mapping[str, Any]) -> MixedGraph:
    try:
        raw_vertices = doc["vertices"]
        raw_edges = doc.get("edges", [])
    except (KeyError, AttributeError, TypeError) as exc:
        raise GraphError("graph document needs a 'vertices' list") from exc
    vertices = []
    for item in raw_vertices:
        if isinstance(item, str):
            vertices.append(VertexInfo(item))
            continue
        vertices.append(
            VertexInfo(
                str(item["name"]),
                bool(item.get("latent", False)),
                int(item.get("cardinality", 2)),
            )
        )
    edges = []
    for item in raw_edges:
        try:
            edges.append(Edge(str(item["tail"]), str(item["head"]), EdgeKind(item["kind"])))
        except (KeyError, ValueError, TypeError) as exc:
            raise GraphError(f"malformed edge entry {item!r}") from exc
    return MixedGraph(vertices, edges, doc.get("fixed"))


_ARROWS = (("<->", EdgeKind.BIDIRECTED), ("->", EdgeKind.DIRECTED), ("--", EdgeKind.UNDIRECTED))


def graph_from_text(
    text: str,
    *,
    latent: Iterable[str] = (),
    fixed: Iterable[str] | None = None,
    vertices: Iterable[str] = (),
    cardinality: int = 2,
) -> MixedGraph:
    """Build a graph from comma or newline separated edges such as ``"A->B, B<->C, C--D"``.

    Chains like ``"A->B->C"`` are accepted.  Isolated vertices go in ``vertices``.
    """
    names: set[str] = set(vertices)
    edges: list[Edge] = []
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        tokens: list[str] = []
        kinds: list[EdgeKind] = []
        rest = item
        while True:
            hits = [(rest.find(sym), sym, kind) for sym, kind in _ARROWS if sym in rest]
            if not hits:
                tokens.append(rest.strip())
                break
            pos, sym, kind = min(hits, key=lambda h: (h[0], -len(h[1])))
            tokens.append(rest[:pos].strip())
            kinds.append(kind)
            rest = rest[pos + len(sym) :]
        if not kinds or any(not t for t in tokens):
            raise GraphError(f"cannot parse edge {item!r}")
        for (a, b), kind in zip(zip(tokens, tokens[1:]), kinds):
            edges.append(Edge(a, b, kind))
        names.update(tokens)
    hidden = frozenset(latent)
    infos = [VertexInfo(v, v in hidden, cardinality) for v in sorted(names | hidden)]
    return MixedGraph(infos, edges, fixed)


def load_graph(path: str | Path) -> MixedGraph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_dict(json.load(fh))


def save_graph(g: MixedGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, indent=2)
        fh.write("\n")
