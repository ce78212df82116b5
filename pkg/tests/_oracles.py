"""Reference computations written independently of the package internals.

Each helper here re-derives a quantity from first principles (brute-force
path enumeration, dense linear algebra, direct table division) so that the
tests compare two separate implementations.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter

import numpy as np

from sgpid.graph_core import Edge, EdgeKind, MixedGraph, VertexInfo
from sgpid.evaluation import Factor, StructuralModel, VertexMechanism
from sgpid.evaluation.random_instances import random_positive_cpt


# ---------------------------------------------------------------------------
# Latent projection by explicit path enumeration
# ---------------------------------------------------------------------------


def brute_projection_edges(g: MixedGraph) -> set[tuple[str, str, str]]:
    """Projected edges of an LV-DAG found by enumerating simple paths."""
    latent = g.latent
    obs = sorted(g.observed)
    ch = {v: sorted(g.children(v)) for v in g.names}

    def directed_path(a: str, b: str) -> bool:
        stack = [(a, (a,))]
        while stack:
            v, path = stack.pop()
            for w in ch[v]:
                if w == b:
                    return True
                if w in latent and w not in path:
                    stack.append((w, path + (w,)))
        return False

    def latent_down(h: str) -> set[str]:
        """Observed vertices reached from latent ``h`` along latent-only directed paths."""
        seen, out, stack = {h}, set(), [h]
        while stack:
            v = stack.pop()
            for w in ch[v]:
                if w in latent:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
                else:
                    out.add(w)
        return out

    edges: set[tuple[str, str, str]] = set()
    for a in obs:
        for b in obs:
            if a != b and directed_path(a, b):
                edges.add((a, b, "directed"))
    # a <-> b iff some latent h has latent-only directed paths to both a and b
    for h in sorted(latent):
        reach = sorted(latent_down(h))
        for a, b in itertools.combinations(reach, 2):
            edges.add((min(a, b), max(a, b), "bidirected"))
    for e in g.edges:
        if e.kind is EdgeKind.UNDIRECTED:
            edges.add((min(e.tail, e.head), max(e.tail, e.head), "undirected"))
    return edges


def edge_triples(g: MixedGraph) -> set[tuple[str, str, str]]:
    out = set()
    for e in g.edges:
        if e.kind is EdgeKind.DIRECTED:
            out.add((e.tail, e.head, "directed"))
        else:
            out.add((min(e.tail, e.head), max(e.tail, e.head), e.kind.value))
    return out


# ---------------------------------------------------------------------------
# Gibbs equilibrium by a dense eigen-solve
# ---------------------------------------------------------------------------


def two_site_scan_matrix(p_a: np.ndarray, p_b: np.ndarray) -> np.ndarray:
    """Scan matrix for binary ``(A, B)``: update ``A`` then ``B``.

    ``p_a[b, a] = P(A = a | B = b)`` and ``p_b[a, b] = P(B = b | A = a)``.
    States are ordered ``(0,0), (0,1), (1,0), (1,1)``.
    """
    states = [(0, 0), (0, 1), (1, 0), (1, 1)]
    m = np.zeros((4, 4))
    for i, (a, b) in enumerate(states):
        for j, (a2, b2) in enumerate(states):
            m[i, j] = p_a[b, a2] * p_b[a2, b2]
    return m


def dense_stationary(m: np.ndarray) -> np.ndarray:
    """Left eigenvector for eigenvalue one, via a least-squares linear solve."""
    n = m.shape[0]
    lhs = np.vstack([m.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return sol


# ---------------------------------------------------------------------------
# Kernel fixing on explicit tables
# ---------------------------------------------------------------------------


def district_of(g: MixedGraph, v: str, random: frozenset[str]) -> frozenset[str]:
    seen, stack = {v}, [v]
    while stack:
        x = stack.pop()
        for y in g.siblings(x):
            if y in random and y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def fix_table(q: Factor, v: str, g: MixedGraph, random: frozenset[str]) -> Factor:
    """``q / q(v | mb(v))`` with ``mb(v) = dis(v) + pa(dis(v))`` minus ``v``.

    ``q`` keeps an axis for every variable, random or fixed.
    """
    d = district_of(g, v, random)
    blanket = (d | frozenset().union(*(g.parents(x) for x in d))) - {v}
    local = q.sum_out([x for x in random if x not in blanket and x != v])
    cond = local / local.sum_out([v])
    return q / cond


# ---------------------------------------------------------------------------
# Random LV-DAG structural models for a given ADMG
# ---------------------------------------------------------------------------


def lv_dag_for_admg(g: MixedGraph) -> MixedGraph:
    """One binary latent parent per bidirected edge."""
    vertices = [VertexInfo(v) for v in g.names]
    edges = [e for e in g.edges if e.kind is EdgeKind.DIRECTED]
    for i, e in enumerate(sorted(g.edges_of_kind("bidirected"), key=str)):
        h = f"U{i}"
        vertices.append(VertexInfo(h, latent=True))
        edges += [Edge.directed(h, e.tail), Edge.directed(h, e.head)]
    return MixedGraph(vertices, edges)


def random_dag_model(rng: np.random.Generator, g: MixedGraph) -> StructuralModel:
    mechs = []
    for v in sorted(g.random):
        args = tuple(sorted(g.parents(v)))
        shape = tuple(g.cardinality(a) for a in args) + (g.cardinality(v),)
        mechs.append(VertexMechanism(v, args, random_positive_cpt(rng, shape, floor=0.1)))
    return StructuralModel(g, mechs)


# ---------------------------------------------------------------------------
# Factor multisets of printed formulas
# ---------------------------------------------------------------------------


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [x.strip() for x in out if x.strip()]


def formula_shape(text: str) -> tuple[Counter, Counter]:
    """Multisets of ``(star, head, given)`` factors and of summation sets in a text formula."""
    factors: Counter = Counter()
    i = 0
    while True:
        m = re.compile(r"p(\*?)\(").search(text, i)
        if not m:
            break
        depth, j = 1, m.end()
        while depth:
            depth += {"(": 1, ")": -1}.get(text[j], 0)
            j += 1
        body = text[m.end() : j - 1]
        parts = _split_top(body, "|")
        head = frozenset(_split_top(parts[0], ","))
        given = frozenset(_split_top(parts[1], ",")) if len(parts) > 1 else frozenset()
        factors[(m.group(1), head, given)] += 1
        i = j
    sums = Counter(frozenset(_split_top(s, ",")) for s in re.findall(r"Σ_\{([^}]*)\}", text))
    return factors, sums


def aligned_max_diff(a: Factor, b: Factor) -> float:
    """Largest absolute difference after broadcasting both factors to the union of their variables."""
    names = tuple(sorted(set(a.vars) | set(b.vars)))
    cards = {**a.cards, **b.cards}
    shape = tuple(cards[v] for v in names)
    ta = np.broadcast_to(a.expand(names), shape)
    tb = np.broadcast_to(b.expand(names), shape)
    return float(np.max(np.abs(ta - tb))) if ta.size else 0.0


# ---------------------------------------------------------------------------
# Fixed models for equilibrium and sampler checks
# ---------------------------------------------------------------------------


def _fixed_models():
    from sgpid.corpus import load_corpus_graph
    from sgpid.evaluation.random_instances import random_cg_lv_graph, random_cg_model
    from sgpid.graph_core import graph_from_text

    return {
        "elections_cg": lambda: random_cg_model(np.random.default_rng(101), load_corpus_graph("elections_cg")),
        "triangle_block": lambda: random_cg_model(
            np.random.default_rng(102), graph_from_text("P->X, X--Y, Y--Z, X--Z, Z->W, P->W")
        ),
        "latent_cg": lambda: random_cg_model(
            np.random.default_rng(103), random_cg_lv_graph(np.random.default_rng(7), 5, 2)
        ),
    }


FIXED_MODELS = _fixed_models()


def equilibrium_residual(sm: StructuralModel, block) -> float:
    """L1 change of the block equilibrium after one more scan, worst over parent states."""
    from sgpid.evaluation import block_factor, scan_operator

    members = tuple(sorted(block))
    f = block_factor(sm, members)
    parents = tuple(v for v in f.vars if v not in members)
    facs = {m: sm.mechanisms[m].factor() for m in members}
    cards = {v: sm.graph.cardinality(v) for v in sm.graph.names}
    worst = 0.0
    for idx in itertools.product(*(range(cards[v]) for v in parents)):
        state = dict(zip(parents, idx))
        pi = f.restrict(state).axes(members).reshape(-1)
        op = scan_operator(members, facs, cards, state)
        worst = max(worst, float(np.abs(pi @ op - pi).sum()))
    return worst


def total_variation(a, b) -> float:
    """Total variation between two distributions over the same variables."""
    assert a.factor.vars == b.factor.vars
    return 0.5 * float(np.abs(a.factor.table - b.factor.table).sum())
