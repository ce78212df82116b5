"""Latent projection and the segregated decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graph_core import (
    Edge,
    EdgeKind,
    GraphError,
    MixedGraph,
    blocks,
    classify,
    relatives,
)

__all__ = [
    "BlockSafety",
    "SegregatedDecomposition",
    "is_block_safe",
    "latent_project",
    "decompose",
]


@dataclass(frozen=True)
class BlockSafety:
    """Result of :func:`is_block_safe`; truthy iff the graph is block-safe."""

    safe: bool
    witness: Edge | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.safe


def is_block_safe(g: MixedGraph) -> BlockSafety:
    """Check that latents only feed trivial blocks and never touch ``--`` edges."""
    latent = g.latent
    for e in g.edges_of_kind(EdgeKind.UNDIRECTED):
        if e.tail in latent or e.head in latent:
            return BlockSafety(False, e, "latent vertex has an undirected edge")
    in_nontrivial = frozenset().union(*(b.as_set for b in blocks(g) if b.nontrivial))
    for e in g.edges_of_kind(EdgeKind.DIRECTED):
        if e.tail in latent and e.head not in latent and e.head in in_nontrivial:
            return BlockSafety(False, e, "observed vertex in a nontrivial block has a latent parent")
    return BlockSafety(True)


def latent_project(g: MixedGraph) -> MixedGraph:
    """Project out latent vertices.

    ``A -> B`` appears when a directed path from A to B has only latent
    intermediates.  ``A <-> B`` appears when A and B share a latent source
    reachable through latent-only directed paths, or when an existing
    bidirected edge joins two such sources.  Undirected edges among observed
    vertices are kept as they are.
    """
    safety = is_block_safe(g)
    if not safety:
        raise GraphError(f"graph is not block-safe: {safety.reason} ({safety.witness})")
    latent = g.latent
    if not latent:
        return g
    observed = sorted(g.observed)

    @lru_cache(maxsize=None)
    def latent_down(h: str) -> frozenset[str]:
        """Observed vertices reached from ``h`` by directed paths through latents."""
        out: set[str] = set()
        for c in g.children(h):
            if c in latent:
                out |= latent_down(c)
            else:
                out.add(c)
        return frozenset(out)

    @lru_cache(maxsize=None)
    def latent_sources(v: str) -> frozenset[str]:
        """``v`` itself plus latents with a latent-only directed path into ``v``."""
        out = {v}
        for p in g.parents(v):
            if p in latent:
                out |= latent_sources(p)
        return frozenset(out)

    edges: set[Edge] = set()
    for e in g.edges:
        if e.tail in latent or e.head in latent:
            continue
        edges.add(e)
    for a in observed:
        for c in g.children(a):
            if c in latent:
                for b in latent_down(c):
                    if b != a:
                        edges.add(Edge.directed(a, b))
    sources = {v: latent_sources(v) for v in observed}
    for i, a in enumerate(observed):
        for b in observed[i + 1 :]:
            shared = (sources[a] & sources[b]) & latent
            linked = any(
                sb in g.siblings(sa) for sa in sources[a] for sb in sources[b]
            )
            if shared or linked:
                edges.add(Edge.bidirected(a, b))
    fixed = None if not g.has_context else g.fixed & frozenset(observed)
    return MixedGraph([g.vertex(v) for v in observed], edges, fixed)


@dataclass(frozen=True)
class SegregatedDecomposition:
    """The block part and district part of a segregated graph."""

    b_star: frozenset[str]
    d_star: frozenset[str]
    ccg: MixedGraph
    cadmg: MixedGraph


def _component(g: MixedGraph, random: frozenset[str], drop: EdgeKind | None) -> MixedGraph:
    fixed = relatives(g, random, "parents") - random
    keep = random | fixed
    edges = []
    for e in g.edges:
        if e.tail not in keep or e.head not in keep:
            continue
        t_rand, h_rand = e.tail in random, e.head in random
        if t_rand and h_rand:
            edges.append(e)
        elif e.kind is EdgeKind.DIRECTED and h_rand:
            edges.append(e)
        elif not t_rand and not h_rand and e.kind is not drop:
            edges.append(e)
    context = fixed if (fixed or g.has_context) else None
    return MixedGraph([g.vertex(v) for v in sorted(keep)], edges, context)


def decompose(g: MixedGraph) -> SegregatedDecomposition:
    """Split an SG into its conditional chain graph and conditional ADMG.

    Both components keep the edges among their random vertices, the directed
    edges from their fixed vertices into them, and the edges among the fixed
    vertices, except that the chain-graph part never carries a bidirected
    edge.  Edges from a random vertex into a fixed one are dropped.
    """
    cls = classify(g)
    if not cls.is_sg:
        raise GraphError(
            "decompose() needs a segregated graph"
            + (f"; {cls.segregation_witness!r} violates segregation" if cls.segregation_witness else "")
        )
    b_star = frozenset().union(*(b.as_set for b in blocks(g) if b.nontrivial))
    d_star = g.random - b_star
    return SegregatedDecomposition(
        b_star=b_star,
        d_star=d_star,
        ccg=_component(g, b_star, EdgeKind.BIDIRECTED),
        cadmg=_component(g, d_star, None),
    )
