"""Kernel algebra: the fixing operation and the moves it is built from."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from ..graph_core import (
    EdgeKind,
    GraphError,
    MixedGraph,
    districts,
    relatives,
    topological_vertex_order,
)
from .expr import Conditional, Expr, Fix, Marginal, Product, SumOver, p, product
from .simplify import canonicalize

__all__ = [
    "NotFixable",
    "fix_graph",
    "fixable",
    "fix_vertex",
    "simplify_fix",
    "reachable",
    "fix_sequence",
    "district_kernel",
    "markov_pillow",
    "base_kernel",
    "kernel_condition",
    "kernel_marginalize",
]


class NotFixable(GraphError):
    """Raised when fixing is requested for a vertex that is not fixable."""


def fix_graph(g: MixedGraph, v: str) -> MixedGraph:
    """Remove directed and bidirected edges into ``v`` and make ``v`` fixed."""
    edges = [
        e
        for e in g.edges
        if not (
            (e.kind is EdgeKind.DIRECTED and e.head == v)
            or (e.kind is EdgeKind.BIDIRECTED and v in (e.tail, e.head))
        )
    ]
    return g.replace(edges=edges, fixed=g.fixed | {v})


def fixable(v: str, g: MixedGraph) -> bool:
    """``v`` is fixable when no other member of its district descends from it."""
    if v not in g:
        raise GraphError(f"unknown vertex {v!r}")
    if v not in g.random:
        raise GraphError(f"vertex {v!r} is fixed")
    if g.neighbors(v):
        return False
    return relatives(g, {v}, "descendants") & relatives(g, {v}, "district") == {v}


def reachable(s: Iterable[str], g: MixedGraph) -> tuple[str, ...] | None:
    """Greedy fixing sequence turning ``g`` into a CADMG with random set ``s``.

    Each step fixes the lexicographically first fixable vertex outside ``s``.
    ``None`` means ``random(g) - s`` cannot be fixed away.
    """
    target = frozenset(s)
    cur = g
    seq: list[str] = []
    while True:
        todo = sorted(cur.random - target)
        if not todo:
            return tuple(seq)
        for v in todo:
            if fixable(v, cur):
                seq.append(v)
                cur = fix_graph(cur, v)
                break
        else:
            return None


def fix_sequence(g: MixedGraph, seq: Sequence[str]) -> MixedGraph:
    """Apply :func:`fix_graph` along ``seq``, checking fixability at each step."""
    cur = g
    for v in seq:
        if not fixable(v, cur):
            raise NotFixable(f"{v!r} is not fixable")
        cur = fix_graph(cur, v)
    return cur


def _flatten(e: Expr) -> list[Expr]:
    return list(e.factors) if isinstance(e, Product) else [e]


def _tian_split(e: Expr, rest: frozenset[str], g2: MixedGraph) -> list[Expr] | None:
    """Factor ``e = Q[rest]`` over the districts of ``rest`` in ``g2``."""
    parts = [d for d in districts(g2) if d <= rest]
    if frozenset().union(*parts) != rest:
        return None
    if len(parts) == 1:
        return [e]
    order = [u for u in topological_vertex_order(g2) if u in rest]
    position = {u: i for i, u in enumerate(order)}
    out = []
    for d in parts:
        pieces = []
        for u in sorted(d, key=position.__getitem__):
            i = position[u]
            prefix = frozenset(order[: i + 1])
            pieces.append(Conditional(Marginal(e, prefix), prefix - {u}))
        out.append(canonicalize(product(pieces), merge_chains=False))
    return out


def fix_vertex(q: Expr, v: str, g: MixedGraph) -> tuple[Expr, MixedGraph]:
    """Fix ``v`` in kernel ``q`` associated with CADMG ``g``.

    The kernel is split into district factors.  The factor of ``v``'s district
    is replaced by its sum over ``v``; if the remaining members fall apart
    into several districts of the new graph, that sum is split further into
    one factor per new district.  When the factors of ``q`` cannot be
    attributed to districts, an unsimplified :class:`Fix` node is returned.
    """
    if not fixable(v, g):
        raise NotFixable(f"{v!r} is not fixable in {g!r}")
    g2 = fix_graph(g, v)
    q = canonicalize(q, merge_chains=False)
    dist = {u: i for i, d in enumerate(districts(g)) for u in d}
    groups: dict[int, list[Expr]] = {}
    others: list[Expr] = []
    for f in _flatten(q):
        rnd = f.random_vars()
        if not rnd:
            others.append(f)
            continue
        ids = {dist.get(u) for u in rnd}
        if len(ids) != 1 or None in ids:
            return Fix(q, v, g), g2
        groups.setdefault(ids.pop(), []).append(f)
    dv = dist[v]
    members = [d for d in districts(g) if v in d][0]
    group = product(groups.pop(dv, []))
    if group.random_vars() != members:
        return Fix(q, v, g), g2
    rest = members - {v}
    if rest:
        summed = canonicalize(SumOver(group, frozenset({v})))
        split = _tian_split(summed, rest, g2)
        if split is None:
            return Fix(q, v, g), g2
    else:
        split = []
    factors = others + [f for fs in groups.values() for f in fs] + split
    return canonicalize(product(factors), merge_chains=False), g2


def simplify_fix(child: Expr, v: str, g: MixedGraph) -> Expr:
    """Canonical form of ``Fix(child, v, g)``."""
    out, _ = fix_vertex(child, v, g)
    if isinstance(out, Fix):
        return Fix(child, v, g)
    return out


def district_kernel(q: Expr, g: MixedGraph, d: Iterable[str]) -> tuple[Expr, MixedGraph] | None:
    """``Q[d]`` obtained from ``q`` by fixing everything else in ``g``."""
    seq = reachable(d, g)
    if seq is None:
        return None
    cur_q, cur_g = q, g
    for v in seq:
        cur_q, cur_g = fix_vertex(cur_q, v, cur_g)
    return cur_q, cur_g


def markov_pillow(g: MixedGraph, v: str, pred: Iterable[str]) -> frozenset[str]:
    """District of ``v`` among ``pred`` and ``v`` plus that district's parents, minus ``v``."""
    sub = frozenset(pred) | {v}
    dis = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.siblings(u):
            if w in sub and w not in dis:
                dis.add(w)
                stack.append(w)
    return (frozenset(dis) | relatives(g, dis, "parents")) - {v}


def base_kernel(g: MixedGraph, vertices: Iterable[str] | None = None) -> Expr:
    """Observed-data kernel as a product of ``p(V | pillow(V))``.

    Predecessors follow the block topological order of ``g`` with members
    sorted inside blocks.  For a distribution in the model of ``g`` each
    factor equals ``p(V | all predecessors)``.
    """
    if g.latent:
        raise GraphError("base_kernel() needs a graph without latent vertices")
    keep = g.random if vertices is None else frozenset(vertices)
    order = topological_vertex_order(g)
    factors = []
    for i, v in enumerate(order):
        if v in keep:
            factors.append(p(v, markov_pillow(g, v, order[:i])))
    return product(factors)


def kernel_condition(e: Expr, vars: Iterable[str]) -> Expr:
    """``e(random - vars | vars)``."""
    w = frozenset(vars)
    if not w <= e.random_vars():
        raise ValueError(f"cannot condition on {sorted(w - e.random_vars())}: not random in the kernel")
    return canonicalize(Conditional(e, w))


def kernel_marginalize(e: Expr, vars: Iterable[str]) -> Expr:
    """Sum ``e`` over ``vars``."""
    s = frozenset(vars)
    if not s <= e.random_vars():
        raise ValueError(f"cannot marginalise {sorted(s - e.random_vars())}: not random in the kernel")
    return canonicalize(Marginal(e, e.random_vars() - s))
