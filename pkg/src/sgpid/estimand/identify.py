"""Identification of node and policy interventions.

Five algorithms share one skeleton.  Pick the vertices the outcome depends
on after intervening, compute a kernel for each relevant district by fixing,
multiply in the block terms and sum out everything that is not the outcome.

* :func:`g_formula_dag` and :func:`g_formula_cg` cover fully observed DAGs
  and chain graphs.
* :func:`id_admg` and :func:`policy_id_admg` cover ADMGs.
* :func:`id_sg` and :func:`policy_id_sg` cover segregated graphs.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Union

from ..graph_core import (
    GraphError,
    GraphKind,
    MixedGraph,
    blocks,
    classify,
    districts,
    induced_subgraph,
    relatives,
)
from ..intervention import (
    ConstMechanism,
    PolicyError,
    PolicySet,
    intervene_graph,
    apply_procedure,
    is_segregation_preserving,
    node_intervention,
)
from ..projection import decompose
from .expr import (
    Assignment,
    BlockEquilibrium,
    Const,
    Expr,
    ObservedRef,
    PolicyFactor,
    PolicyRef,
    p,
    product,
    substitute,
    sum_over,
)
from .kernel import base_kernel, district_kernel, reachable
from .render import render
from .simplify import canonicalize

__all__ = [
    "Identified",
    "NotIdentified",
    "IdResult",
    "g_formula_dag",
    "g_formula_cg",
    "id_admg",
    "id_sg",
    "policy_id_admg",
    "policy_id_sg",
    "as_assignment",
]


@dataclass(frozen=True)
class Identified:
    """An identified functional together with the sets it was built from."""

    expr: Expr
    y_star: frozenset[str] = frozenset()
    graph: MixedGraph | None = field(default=None, compare=False)

    identified = True

    def __bool__(self) -> bool:
        return True

    def render(self, format: str = "text") -> str:
        return render(self.expr, format)


@dataclass(frozen=True)
class NotIdentified:
    """Failure certificate: ``district`` cannot be reached by fixing in ``graph``."""

    district: frozenset[str]
    graph: MixedGraph
    reason: str = ""

    identified = False

    def __bool__(self) -> bool:
        return False

    def verify(self) -> bool:
        """Re-check that the witness district is unreachable."""
        return reachable(self.district, self.graph) is None


IdResult = Union[Identified, NotIdentified]


def as_assignment(a: Mapping[str, int] | Iterable[str]) -> dict[str, int]:
    """Normalise ``a`` to a name-to-value map; bare names get the value 1."""
    if isinstance(a, Mapping):
        return {str(k): int(v) for k, v in a.items()}
    return {str(k): 1 for k in a}


def _check_query(g: MixedGraph, y: Iterable[str], a: Iterable[str]) -> frozenset[str]:
    ys = frozenset(y)
    if not ys:
        raise GraphError("outcome set is empty")
    g.check_subset(ys | frozenset(a))
    if ys & frozenset(a):
        raise GraphError(f"outcome and intervention sets overlap: {sorted(ys & frozenset(a))}")
    bad = (ys | frozenset(a)) - g.observed
    if bad:
        raise GraphError(f"vertices {sorted(bad)} are latent")
    bad = ys - g.random
    if bad:
        raise GraphError(f"outcomes {sorted(bad)} are fixed")
    return ys


def _require(g: MixedGraph, *kinds: GraphKind) -> None:
    cls = classify(g)
    if not any(k in cls for k in kinds):
        names = "/".join(k.value for k in kinds)
        raise GraphError(f"expected a {names}, got {cls.kind.value if cls.kind else 'unclassified graph'}")


def _finish(body: Expr, summed: Iterable[str], ys: frozenset[str]) -> Expr:
    """Sum out ``summed`` and average away context the functional is constant in.

    A district kernel can mention fixed vertices that are not parents of the
    district in the final graph.  The model makes it constant in them, so
    weighting by their observed margin leaves its value unchanged and yields a
    function of the outcome alone.
    """
    expr = canonicalize(sum_over(body, summed))
    extra = expr.free_vars() - ys
    if extra:
        expr = canonicalize(sum_over(product([p(extra), expr]), extra))
    return expr


def _consts(values: Mapping[str, int]) -> dict[str, Assignment]:
    return {k: Const(v) for k, v in values.items()}


# ---------------------------------------------------------------------------
# Fully observed graphs
# ---------------------------------------------------------------------------


def g_formula_dag(
    g: MixedGraph, a: Mapping[str, int] | Iterable[str], outcome: Iterable[str] | None = None
) -> Expr:
    """Truncated factorisation in a DAG, optionally summed down to ``outcome``.

    With an outcome only the factors of its ancestors in the graph without
    the intervened vertices are kept; the others sum to one.
    """
    _require(g, GraphKind.DAG)
    values = as_assignment(a)
    g.check_subset(values)
    keep = g.random - values.keys()
    if outcome is not None:
        ys = _check_query(g, outcome, values)
        keep = relatives(induced_subgraph(g, keep), ys, "ancestors")
    factors = [p(v, g.parents(v)) for v in sorted(keep)]
    body = substitute(product(factors), _consts(values))
    if outcome is not None:
        body = sum_over(body, keep - ys)
    return canonicalize(body)


def g_formula_cg(
    g: MixedGraph, a: Mapping[str, int] | Iterable[str], outcome: Iterable[str] | None = None
) -> Expr:
    """Chain-graph g-formula: one factor ``p(B - A | pa(B), B & A)`` per block."""
    _require(g, GraphKind.CG, GraphKind.DAG, GraphKind.MRF)
    values = as_assignment(a)
    g.check_subset(values)
    av = frozenset(values)
    keep = g.random - av
    if outcome is not None:
        ys = _check_query(g, outcome, values)
        keep = relatives(induced_subgraph(g, keep), ys, "anterior")
    factors = []
    heads: set[str] = set()
    for b in blocks(g):
        bs = b.as_set
        if bs & keep:
            factors.append(p(bs - av, relatives(g, bs, "parents") | (bs & av)))
            heads |= bs - av
    body = substitute(product(factors), _consts(values))
    if outcome is not None:
        body = sum_over(body, heads - ys)
    return canonicalize(body)


# ---------------------------------------------------------------------------
# ADMGs
# ---------------------------------------------------------------------------


def _district_part(
    q: Expr, fix_in: MixedGraph, s: frozenset[str], district_graph: MixedGraph
) -> list[Expr] | NotIdentified:
    out = []
    for d in districts(induced_subgraph(district_graph, s)):
        res = district_kernel(q, fix_in, d)
        if res is None:
            return NotIdentified(d, fix_in, f"district {sorted(d)} is not reachable")
        out.append(res[0])
    return out


def id_admg(g: MixedGraph, y: Iterable[str], a: Mapping[str, int] | Iterable[str]) -> IdResult:
    """Node-intervention identification in an ADMG by fixing."""
    _require(g, GraphKind.ADMG, GraphKind.DAG)
    values = as_assignment(a)
    ys = _check_query(g, y, values)
    av = frozenset(values)
    y_star = relatives(induced_subgraph(g, g.random - av), ys, "ancestors")
    part = _district_part(base_kernel(g), g, y_star, g)
    if isinstance(part, NotIdentified):
        return part
    body = substitute(product(part), _consts(values))
    return Identified(_finish(body, y_star - ys, ys), y_star, g)


def _precedence_check(g: MixedGraph, ps: PolicySet) -> None:
    for pol in ps:
        late = pol.inputs & relatives(g, {pol.target}, "descendants")
        if late:
            raise PolicyError(
                f"inputs {sorted(late)} of f_{pol.target} are descendants of {pol.target!r}"
            )


def _policy_assignments(
    ps: PolicySet, relevant: frozenset[str]
) -> tuple[dict[str, Assignment], list[Expr]]:
    """Substitutions for deterministic policies, weight factors for stochastic ones.

    Constants are substituted whether or not their target is relevant, so a
    node intervention written as constant policies yields the same functional
    as the node-intervention algorithms.
    """
    subst: dict[str, Assignment] = {}
    weights: list[Expr] = []
    for pol in ps:
        if isinstance(pol.mechanism, ConstMechanism):
            subst[pol.target] = Const(pol.mechanism.value)
        elif pol.target not in relevant:
            continue
        elif pol.deterministic:
            subst[pol.target] = PolicyFactor(pol)
        else:
            weights.append(PolicyFactor(pol))
    return subst, weights


def policy_id_admg(g: MixedGraph, y: Iterable[str], ps: PolicySet) -> IdResult:
    """Policy identification in an ADMG.

    The policy inputs must precede their targets: an input that descends from
    its target in ``g`` is rejected.
    """
    _require(g, GraphKind.ADMG, GraphKind.DAG)
    ps.check_against(g)
    ys = _check_query(g, y, ps.targets)
    _precedence_check(g, ps)
    gfa = apply_procedure(g, ps)
    cls = classify(gfa)
    if cls.partially_directed_cycle or cls.has_undirected:
        raise PolicyError("policies create a cycle in the post-intervention graph")
    av = ps.targets
    anc = relatives(gfa, ys, "ancestors")
    y_star = anc - av
    part = _district_part(base_kernel(g), g, y_star, g)
    if isinstance(part, NotIdentified):
        return part
    subst, weights = _policy_assignments(ps, anc & av)
    body = substitute(product(part + weights), subst)
    summed = (y_star | (anc & av)) - ys - subst.keys()
    return Identified(_finish(body, summed, ys), y_star, gfa)


# ---------------------------------------------------------------------------
# Segregated graphs
# ---------------------------------------------------------------------------


def _sg_district_part(g: MixedGraph, s: frozenset[str]) -> tuple[list[Expr] | NotIdentified, MixedGraph]:
    dec = decompose(g)
    q = base_kernel(g, dec.d_star)
    return _district_part(q, dec.cadmg, s, g), dec.cadmg


def id_sg(g: MixedGraph, y: Iterable[str], a: Mapping[str, int] | Iterable[str]) -> IdResult:
    """Node-intervention identification in a segregated graph.

    Block vertices of the outcome's anterior contribute their observed block
    conditional given the block's parents and any intervened neighbours.
    District vertices contribute kernels obtained by fixing in the district
    part of ``g``.
    """
    _require(g, GraphKind.SG)
    if g.latent:
        raise GraphError("id_sg() needs a graph without latent vertices; project first")
    values = as_assignment(a)
    ys = _check_query(g, y, values)
    av = frozenset(values)
    y_star = relatives(induced_subgraph(g, g.random - av), ys, "anterior")
    dec = decompose(g)
    block_vertices = y_star & dec.b_star
    factors: list[Expr] = []
    for comp in blocks(induced_subgraph(g, block_vertices)):
        bs = comp.as_set
        given = relatives(g, bs, "parents") | (relatives(g, bs, "neighbors") & av)
        factors.append(p(bs, given))
    part, _ = _sg_district_part(g, y_star & dec.d_star)
    if isinstance(part, NotIdentified):
        return part
    body = substitute(product(factors + part), _consts(values))
    return Identified(_finish(body, y_star - ys, ys), y_star, g)


def policy_id_sg(g: MixedGraph, y: Iterable[str], ps: PolicySet) -> IdResult:
    """Identification of a segregation-preserving policy set in a segregated graph.

    With ``G_f`` the post-intervention graph and ``T`` the anterior of the
    outcome in ``G_f``:

    * every nontrivial block of ``G_f`` inside ``T`` contributes its
      equilibrium ``p*(B | pa(B))`` under the modified equations;
    * a block vertex of ``g`` left alone in ``G_f`` contributes its observed
      full conditional;
    * district vertices of ``g`` inside ``T`` contribute kernels found by
      fixing in the district part of ``g``;
    * a target left alone in ``G_f`` is substituted by its policy when the
      policy is deterministic and weighted by it otherwise.

    Everything in ``T`` outside the outcome is summed out.
    """
    _require(g, GraphKind.SG)
    if g.latent:
        raise GraphError("policy_id_sg() needs a graph without latent vertices; project first")
    ys = _check_query(g, y, ps.targets)
    check = is_segregation_preserving(ps, g)
    if not check:
        raise PolicyError(
            f"policy set is not segregation preserving (clause {check.clause}): {check.message}"
        )
    gfa = intervene_graph(g, ps)
    av = ps.targets
    t = relatives(gfa, ys, "anterior")
    y_star = t - av
    dec = decompose(g)

    factors: list[Expr] = []
    block_targets: set[str] = set()
    for b in blocks(gfa):
        if not b.nontrivial or not (b.as_set & t):
            continue
        mechs = []
        for m in b.members:
            if m in av:
                mechs.append(PolicyRef(ps[m]))
                block_targets.add(m)
            else:
                mechs.append(ObservedRef(m, g.parents(m) | g.neighbors(m)))
        parents = relatives(gfa, b.as_set, "parents") - b.as_set
        factors.append(BlockEquilibrium(b.as_set, parents, tuple(mechs)))
    in_gfa_blocks = frozenset().union(*(b.as_set for b in blocks(gfa) if b.nontrivial))
    for v in sorted((y_star & dec.b_star) - in_gfa_blocks):
        factors.append(p(v, g.parents(v) | g.neighbors(v)))

    part, _ = _sg_district_part(g, y_star & dec.d_star)
    if isinstance(part, NotIdentified):
        return part
    subst, weights = _policy_assignments(ps, (t & av) - block_targets)
    body = substitute(product(factors + part + weights), subst)
    return Identified(_finish(body, t - ys - subst.keys(), ys), y_star, gfa)


def node_policy_set(a: Mapping[str, int] | Iterable[str]) -> PolicySet:
    """Constant policies for a node intervention."""
    return node_intervention(as_assignment(a))
