"""Seeded random instances for property tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph_core import Edge, MixedGraph, VertexInfo, blocks, relatives
from ..intervention import (
    ConstMechanism,
    CPTMechanism,
    ParamMechanism,
    Policy,
    PolicySet,
    apply_procedure,
    is_segregation_preserving,
)
from ..projection import latent_project
from .model import StructuralModel, VertexMechanism

__all__ = [
    "OracleInstance",
    "random_chain_components",
    "random_cg_lv_graph",
    "random_sg",
    "random_admg",
    "random_dag",
    "random_cg",
    "random_cg_model",
    "random_policy_set",
    "random_oracle_instance",
    "random_positive_cpt",
]


def _names(n: int, prefix: str = "V") -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def random_chain_components(
    rng: np.random.Generator, n: int, p_undirected: float = 0.6, max_block: int = 3
) -> tuple[list[str], list[list[str]], list[Edge]]:
    """Vertices split into consecutive groups with random undirected edges inside."""
    names = _names(n)
    comps: list[list[str]] = []
    for v in names:
        if comps and len(comps[-1]) < max_block and rng.random() < 0.5:
            comps[-1].append(v)
        else:
            comps.append([v])
    edges = []
    for comp in comps:
        for i, a in enumerate(comp):
            for b in comp[i + 1 :]:
                if rng.random() < p_undirected:
                    edges.append(Edge.undirected(a, b))
    return names, comps, edges


def _forward_directed(
    rng: np.random.Generator, comps: list[list[str]], p_directed: float
) -> list[Edge]:
    edges = []
    for i, ci in enumerate(comps):
        for cj in comps[i + 1 :]:
            for a in ci:
                for b in cj:
                    if rng.random() < p_directed:
                        edges.append(Edge.directed(a, b))
    return edges


def _trivial(names: list[str], edges: list[Edge]) -> list[str]:
    touched = {x for e in edges if e.kind.value == "undirected" for x in (e.tail, e.head)}
    return [v for v in names if v not in touched]


def random_cg_lv_graph(
    rng: np.random.Generator,
    n_observed: int,
    n_latent: int = 2,
    p_directed: float = 0.4,
    p_undirected: float = 0.6,
) -> MixedGraph:
    """Block-safe latent-variable chain graph.

    Observed vertices form chain components with directed edges pointing
    forwards.  Each latent points at two or three vertices outside nontrivial
    blocks, so the graph is block-safe by construction.
    """
    names, comps, und = random_chain_components(rng, n_observed, p_undirected)
    edges = und + _forward_directed(rng, comps, p_directed)
    trivial = _trivial(names, und)
    vertices = [VertexInfo(v) for v in names]
    for i in range(n_latent):
        if len(trivial) < 2:
            break
        k = int(rng.integers(2, min(3, len(trivial)) + 1))
        kids = rng.choice(trivial, size=k, replace=False)
        h = f"H{i}"
        vertices.append(VertexInfo(h, latent=True))
        edges.extend(Edge.directed(h, str(c)) for c in kids)
    return MixedGraph(vertices, edges)


def random_sg(
    rng: np.random.Generator,
    n: int,
    p_directed: float = 0.4,
    p_undirected: float = 0.5,
    p_bidirected: float = 0.4,
) -> MixedGraph:
    """Segregated graph: chain components plus bidirected edges among vertices without undirected edges."""
    names, comps, und = random_chain_components(rng, n, p_undirected)
    edges = und + _forward_directed(rng, comps, p_directed)
    trivial = _trivial(names, und)
    for i, a in enumerate(trivial):
        for b in trivial[i + 1 :]:
            if rng.random() < p_bidirected:
                edges.append(Edge.bidirected(a, b))
    return MixedGraph(names, edges)


def random_admg(
    rng: np.random.Generator, n: int, p_directed: float = 0.4, p_bidirected: float = 0.3
) -> MixedGraph:
    """ADMG over ``V0..`` with directed edges following the index order."""
    names = _names(n)
    edges = []
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            if rng.random() < p_directed:
                edges.append(Edge.directed(a, b))
            if rng.random() < p_bidirected:
                edges.append(Edge.bidirected(a, b))
    return MixedGraph(names, edges)


def random_dag(rng: np.random.Generator, n: int, p_directed: float = 0.4) -> MixedGraph:
    return random_admg(rng, n, p_directed, 0.0)


def random_cg(rng: np.random.Generator, n: int, p_directed: float = 0.4, p_undirected: float = 0.5) -> MixedGraph:
    return random_sg(rng, n, p_directed, p_undirected, 0.0)


def random_positive_cpt(rng: np.random.Generator, shape: tuple[int, ...], floor: float = 0.05) -> np.ndarray:
    """Conditional table with entries at least ``floor`` times uniform."""
    raw = rng.dirichlet(np.ones(shape[-1]) * 2.0, size=shape[:-1])
    k = shape[-1]
    return (1 - floor * k) * raw + floor


def random_cg_model(rng: np.random.Generator, g: MixedGraph, coupling: float = 1.0) -> StructuralModel:
    """Positive structural model on a chain graph with latents.

    Nontrivial blocks get pairwise log-linear full conditionals, which are
    always compatible; other vertices get random positive tables.
    """
    cards = {v: g.cardinality(v) for v in g.names}
    mechs: dict[str, VertexMechanism] = {}
    nontrivial = {v for b in blocks(g) if b.nontrivial for v in b.members}
    unary = {}
    pair = {}
    for v in sorted(nontrivial):
        pa = tuple(sorted(g.parents(v)))
        unary[v] = rng.normal(0.0, 1.0, size=tuple(cards[p] for p in pa) + (cards[v],))
        for w in sorted(g.neighbors(v)):
            if v < w:
                pair[(v, w)] = rng.normal(0.0, coupling, size=(cards[v], cards[w]))
    for v in sorted(g.random):
        args = tuple(sorted(g.parents(v) | g.neighbors(v)))
        shape = tuple(cards[a] for a in args) + (cards[v],)
        if v not in nontrivial:
            mechs[v] = VertexMechanism(v, args, random_positive_cpt(rng, shape))
            continue
        pa = tuple(sorted(g.parents(v)))
        logits = np.zeros(shape)
        for idx in np.ndindex(*shape):
            state = dict(zip(args + (v,), idx))
            x = state[v]
            total = unary[v][tuple(state[p] for p in pa) + (x,)]
            for w in g.neighbors(v):
                key = (v, w) if v < w else (w, v)
                total += pair[key][x, state[w]] if v < w else pair[key][state[w], x]
            logits[idx] = total
        logits -= logits.max(axis=-1, keepdims=True)
        table = np.exp(logits)
        mechs[v] = VertexMechanism(v, args, table / table.sum(axis=-1, keepdims=True))
    return StructuralModel(g, mechs)


def random_policy_set(
    rng: np.random.Generator,
    g: MixedGraph,
    *,
    max_targets: int = 2,
    exclude: frozenset[str] = frozenset(),
    p_input: float = 0.5,
    p_deterministic: float = 0.4,
    tries: int = 50,
) -> PolicySet | None:
    """A segregation-preserving policy set with explicit tables.

    Inputs are drawn outside the target's strict exterior.  Targets that end
    up in a nontrivial block of the post-intervention graph get positive
    tables; the others are deterministic with probability ``p_deterministic``.
    """
    candidates = sorted(g.observed - g.fixed - exclude)
    if not candidates:
        return None
    cards = {v: g.cardinality(v) for v in g.names}
    for _ in range(tries):
        k = int(rng.integers(1, min(max_targets, len(candidates)) + 1))
        targets = sorted(str(t) for t in rng.choice(candidates, size=k, replace=False))
        draft = []
        for a in targets:
            pool = sorted(g.observed - {a} - relatives(g, {a}, "strict-exterior"))
            inputs = [z for z in pool if rng.random() < p_input]
            draft.append(Policy(a, inputs, ParamMechanism(f"f_{a}", False)))
        ps = PolicySet(draft)
        if not is_segregation_preserving(ps, g):
            continue
        post = apply_procedure(g, ps)
        in_blocks = {v for b in blocks(post) if b.nontrivial for v in b.members}
        final = []
        for pol in ps:
            shape = tuple(cards[z] for z in pol.sorted_inputs) + (cards[pol.target],)
            if pol.target not in in_blocks and rng.random() < p_deterministic:
                if not pol.inputs:
                    mech = ConstMechanism(int(rng.integers(cards[pol.target])))
                else:
                    choice = rng.integers(cards[pol.target], size=shape[:-1])
                    table = np.eye(cards[pol.target])[choice]
                    mech = CPTMechanism.from_array(table)
            else:
                mech = CPTMechanism.from_array(random_positive_cpt(rng, shape))
            final.append(Policy(pol.target, pol.inputs, mech))
        return PolicySet(final)
    return None


@dataclass(frozen=True, eq=False)
class OracleInstance:
    """A latent-variable model with its projection, plus a query to pose on it."""

    seed: int
    model: StructuralModel
    graph: MixedGraph
    policies: PolicySet
    outcome: frozenset[str]


def random_oracle_instance(seed: int, max_observed: int = 6, max_latent: int = 2) -> OracleInstance:
    """Deterministic in ``seed``; retries internally until a policy set exists."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(3, max_observed + 1))
        lv = random_cg_lv_graph(rng, n, int(rng.integers(0, max_latent + 1)))
        g = latent_project(lv)
        ps = random_policy_set(rng, g)
        if ps is None:
            continue
        rest = sorted(g.observed - ps.targets)
        if not rest:
            continue
        k = int(rng.integers(1, min(2, len(rest)) + 1))
        y = frozenset(str(v) for v in rng.choice(rest, size=k, replace=False))
        return OracleInstance(seed, random_cg_model(rng, lv), g, ps, y)
