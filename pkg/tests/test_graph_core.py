from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sgpid.corpus import load_corpus_graph, load_corpus_policy
from sgpid.evaluation.random_instances import random_admg, random_dag, random_sg
from sgpid.graph_core import (
    Edge,
    EdgeKind,
    GraphError,
    GraphKind,
    MixedGraph,
    augmented_graph,
    block_topological_order,
    blocks,
    classify,
    cliques,
    districts,
    graph_from_dict,
    graph_from_text,
    graph_to_dict,
    induced_subgraph,
    relatives,
)
from sgpid.intervention import apply_procedure

REFLEXIVE = ("ancestors", "descendants", "district", "anterior", "exterior")
ALL_KINDS = REFLEXIVE + ("parents", "children", "neighbors", "non-descendants", "strict-exterior")

seeds = st.integers(0, 2**32 - 1)


def sg_from(seed: int, n: int = 7) -> MixedGraph:
    return random_sg(np.random.default_rng(seed), n)


@pytest.fixture(scope="module")
def three_unit() -> MixedGraph:
    return load_corpus_graph("three_unit")


# -- construction -------------------------------------------------------------


def test_edges_reject_self_loops():
    with pytest.raises(GraphError):
        Edge.directed("A", "A")


def test_unknown_endpoint_rejected():
    with pytest.raises(GraphError):
        MixedGraph(["A"], [Edge.directed("A", "B")])


def test_parallel_edges_of_different_kinds_coexist(three_unit):
    assert three_unit.has_edge("A1", "Y1", "directed")
    assert three_unit.has_edge("A1", "Y1", "bidirected")


def test_symmetric_edges_are_unordered():
    g = MixedGraph(["A", "B"], [Edge.undirected("B", "A")])
    assert g.has_edge("A", "B", EdgeKind.UNDIRECTED)
    assert g == MixedGraph(["A", "B"], [Edge.undirected("A", "B")])


def test_context_forbids_edges_from_random_into_fixed():
    with pytest.raises(GraphError):
        MixedGraph(["A", "W"], [Edge.directed("A", "W")], fixed=["W"])


def test_json_round_trip(three_unit):
    doc = json.loads(json.dumps(graph_to_dict(three_unit)))
    assert graph_from_dict(doc) == three_unit


def test_text_parser_accepts_chains():
    g = graph_from_text("A->B->C, C--D, D<->E")
    assert g.parents("C") == {"B"} and g.neighbors("D") == {"C"} and g.siblings("E") == {"D"}


# -- relatives -------------------------------------------------------------------


def test_district_of_y2_in_three_unit(three_unit):
    assert relatives(three_unit, {"Y2"}, "district") == {"A2", "Y2", "Y3"}


def test_y_star_of_three_unit_policy(three_unit):
    ps = load_corpus_policy("three_unit_policies")
    post = apply_procedure(three_unit, ps)
    assert relatives(post, {"Y2", "Y3"}, "anterior") - ps.targets == {"C2", "C3", "M3", "Y2", "Y3"}


def test_isolated_vertex_district():
    assert relatives(MixedGraph(["X"], []), {"X"}, "district") == {"X"}


@pytest.mark.parametrize("kind", [k for k in ALL_KINDS if k != "non-descendants"])
def test_empty_set_has_no_relatives(three_unit, kind):
    assert relatives(three_unit, set(), kind) == frozenset()


def test_non_descendants_of_nothing_is_everything(three_unit):
    assert relatives(three_unit, set(), "non-descendants") == frozenset(three_unit.names)


def test_unknown_relation_kind(three_unit):
    with pytest.raises(GraphError):
        relatives(three_unit, {"Y2"}, "cousins")


def test_unknown_vertex(three_unit):
    with pytest.raises(GraphError):
        relatives(three_unit, {"Q"}, "parents")


def test_strict_exterior_drops_block():
    g = graph_from_text("X--Y, Y->Z, X->W")
    assert relatives(g, {"X"}, "exterior") == {"X", "Y", "Z", "W"}
    assert relatives(g, {"X"}, "strict-exterior") == {"Z", "W"}


@given(seeds, st.sampled_from(REFLEXIVE))
def test_reflexive_relations_contain_the_vertex(seed, kind):
    g = sg_from(seed)
    for v in g.names:
        assert v in relatives(g, {v}, kind)
        assert v not in relatives(g, {v}, "strict-exterior")


@given(seeds, st.sampled_from(("ancestors", "descendants", "anterior", "district", "exterior")))
def test_closures_are_idempotent(seed, kind):
    g = sg_from(seed)
    for v in g.names:
        once = relatives(g, {v}, kind)
        assert relatives(g, once, kind) == once


@given(seeds, st.sampled_from(ALL_KINDS), st.data())
def test_subgraph_monotonicity(seed, kind, data):
    g = sg_from(seed)
    s = data.draw(st.sets(st.sampled_from(g.names), min_size=1))
    sub = induced_subgraph(g, s)
    v = data.draw(st.sampled_from(sorted(s)))
    if kind in ("non-descendants",):
        # complements are not monotone; check the descendants they complement
        kind = "descendants"
    if kind == "strict-exterior":
        # removing vertices can only shrink the exterior, but may also shrink the removed block
        assert relatives(sub, {v}, "exterior") <= relatives(g, {v}, "exterior")
        return
    assert relatives(sub, {v}, kind) <= relatives(g, {v}, kind)


# -- partitions ------------------------------------------------------------------


def test_three_unit_blocks_and_districts(three_unit):
    nontrivial = {b.as_set for b in blocks(three_unit) if b.nontrivial}
    assert nontrivial == {frozenset({"M1", "M2", "M3"}), frozenset({"C2", "C3"})}
    assert set(districts(three_unit)) == {
        frozenset({"Y2", "Y3", "A2"}),
        frozenset({"Y1", "A1", "C1"}),
        frozenset({"A3"}),
    }


def test_three_unit_ystar_districts():
    assert set(districts(load_corpus_graph("three_unit_ystar"))) == {frozenset({"M3"}), frozenset({"Y2", "Y3"})}


def test_blocks_without_undirected_edges_are_trivial():
    g = graph_from_text("A->B, B<->C")
    assert all(not b.nontrivial for b in blocks(g))
    assert len(blocks(g)) == 3


def test_path_is_one_block():
    assert [b.as_set for b in blocks(graph_from_text("A--B--C"))] == [frozenset("ABC")]


def test_dag_districts_are_singletons():
    g = graph_from_text("A->B, B->C, A->C")
    assert sorted(map(sorted, districts(g))) == [["A"], ["B"], ["C"]]


@given(seeds, st.integers(1, 9))
def test_districts_and_blocks_partition_random_vertices(seed, n):
    g = random_sg(np.random.default_rng(seed), n)
    parts = list(districts(g)) + [b.as_set for b in blocks(g) if b.nontrivial]
    union = frozenset().union(*parts) if parts else frozenset()
    assert union == g.random
    assert sum(len(p) for p in parts) == len(g.random)


# -- classification --------------------------------------------------------------


def test_three_unit_is_sg(three_unit):
    cls = classify(three_unit)
    assert cls.is_sg and not cls.partially_directed_cycle


def test_partially_directed_cycle_detected():
    cls = classify(graph_from_text("W->X, X--Y, Y->W"))
    assert cls.partially_directed_cycle and not cls.is_sg


def test_segregation_violation_detected():
    cls = classify(graph_from_text("A--B, A<->C"))
    assert not cls.segregated and cls.segregation_witness == "A"


@given(seeds, st.integers(1, 7))
def test_dag_belongs_to_every_super_class(seed, n):
    cls = classify(random_dag(np.random.default_rng(seed), n))
    for kind in (GraphKind.DAG, GraphKind.CG, GraphKind.ADMG, GraphKind.SG):
        assert kind in cls


@given(seeds, st.integers(1, 7))
def test_admg_is_sg(seed, n):
    cls = classify(random_admg(np.random.default_rng(seed), n))
    assert GraphKind.ADMG in cls and cls.is_sg


# -- augmented graphs and cliques --------------------------------------------------


def test_augmented_graph_moralizes_parents():
    g = graph_from_text("A->B, B--C, D->C")
    aug = augmented_graph(g, {"B", "C"})
    pairs = {frozenset((e.tail, e.head)) for e in aug.edges}
    assert pairs == {frozenset(p) for p in ("AB", "BC", "CD", "AD")}
    assert all(e.kind is EdgeKind.UNDIRECTED for e in aug.edges)


def test_augmented_trivial_block():
    aug = augmented_graph(graph_from_text("P->X"), {"X"})
    assert {frozenset((e.tail, e.head)) for e in aug.edges} == {frozenset("PX")}


def test_augmented_three_unit_c_block(three_unit):
    aug = augmented_graph(three_unit, {"C2", "C3"})
    assert set(aug.names) == {"C2", "C3"}
    assert [(e.tail, e.head, e.kind) for e in aug.edges] == [("C2", "C3", EdgeKind.UNDIRECTED)]


def test_augmented_graph_rejects_non_block(three_unit):
    with pytest.raises(GraphError):
        augmented_graph(three_unit, {"C2"})


def test_cliques():
    assert cliques(graph_from_text("A--B, B--C, A--C")) == [frozenset("ABC")]
    assert cliques(graph_from_text("A--B, B--C")) == [frozenset("AB"), frozenset("BC")]
    assert cliques(MixedGraph(["A", "B"], [])) == [frozenset("A"), frozenset("B")]
    with pytest.raises(GraphError):
        cliques(graph_from_text("A->B"))


# -- subgraphs and orders ----------------------------------------------------------


def test_induced_subgraph_identity_and_empty(three_unit):
    assert induced_subgraph(three_unit, three_unit.names) == three_unit
    assert len(induced_subgraph(three_unit, [])) == 0


def test_induced_subgraph_gives_three_unit_ystar():
    post = load_corpus_graph("three_unit_post")
    assert induced_subgraph(post, {"C2", "C3", "M3", "Y2", "Y3"}) == load_corpus_graph("three_unit_ystar")


def test_block_order_chain():
    order = block_topological_order(graph_from_text("C->A->Y"))
    assert [b.as_set for b in order] == [{"C"}, {"A"}, {"Y"}]


def test_block_order_elections_sg_puts_outcome_block_last():
    order = block_topological_order(load_corpus_graph("elections_sg"))
    assert order[-1].as_set == {"Y_l", "Y_r"}
    assert [b.as_set for b in order] == [{"C_l"}, {"C_r"}, {"A_l"}, {"A_r"}, {"Y_l", "Y_r"}]


def test_block_order_rejects_cycle():
    with pytest.raises(GraphError):
        block_topological_order(graph_from_text("W->X, X--Y, Y->W"))


@given(seeds, st.integers(1, 9))
def test_block_order_respects_directed_edges(seed, n):
    g = sg_from(seed, n)
    pos = {v: i for i, b in enumerate(block_topological_order(g)) for v in b.members}
    for e in g.edges_of_kind("directed"):
        assert pos[e.tail] < pos[e.head]
