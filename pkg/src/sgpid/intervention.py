"""Policy interventions and the graph they induce.

A policy replaces the structural equation of its target ``A`` by a function
``f_A(Z_A)`` of an input set ``Z_A``.  Node interventions are constant
policies with no inputs, so one code path covers both kinds.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .graph_core import (
    Edge,
    EdgeKind,
    MixedGraph,
    classify,
    relatives,
)

__all__ = [
    "PolicyError",
    "CPTMechanism",
    "ParamMechanism",
    "ConstMechanism",
    "Mechanism",
    "Policy",
    "PolicySet",
    "SegregationCheck",
    "induced_dependence",
    "is_segregation_preserving",
    "intervene_graph",
    "apply_procedure",
    "node_intervention",
    "induce_direct_cause",
    "modify_block_equation",
    "add_undirected_edge",
    "partial_removal",
    "complete_removal",
    "policy_set_from_json",
    "policy_set_to_json",
    "load_policy_set",
    "save_policy_set",
]


class PolicyError(ValueError):
    """Raised for malformed or inapplicable policy sets."""


# ---------------------------------------------------------------------------
# Mechanisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CPTMechanism:
    """Conditional probability table ``f_A(A | Z_A)``.

    ``values`` is the flattened table whose shape is ``shape``: one axis per
    input (lexicographic input order) followed by the target's own axis.
    """

    values: tuple[float, ...]
    shape: tuple[int, ...]

    kind = "cpt"

    def __post_init__(self) -> None:
        if int(np.prod(self.shape)) != len(self.values):
            raise PolicyError(f"CPT has {len(self.values)} entries but shape {self.shape}")
        if not self.shape:
            raise PolicyError("CPT needs at least the target axis")
        arr = self.array()
        if np.any(arr < 0):
            raise PolicyError("CPT entries must be nonnegative")
        if not np.allclose(arr.sum(axis=-1), 1.0, atol=1e-9):
            raise PolicyError("CPT rows must sum to one")

    @classmethod
    def from_array(cls, table: Any) -> "CPTMechanism":
        arr = np.asarray(table, dtype=float)
        return cls(tuple(float(x) for x in arr.ravel()), tuple(arr.shape))

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float).reshape(self.shape)

    @property
    def deterministic(self) -> bool:
        arr = self.array()
        return bool(np.all((arr == 0.0) | (arr == 1.0)))

    def to_json(self) -> dict[str, Any]:
        return {"kind": "cpt", "table": self.array().tolist()}


@dataclass(frozen=True)
class ParamMechanism:
    """A named parametric policy resolved by the numeric modules.

    The symbolic layer only needs to know whether the policy is deterministic.
    """

    tag: str
    deterministic: bool = True
    params: tuple[tuple[str, float], ...] = ()

    kind = "param"

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": "param", "tag": self.tag, "deterministic": self.deterministic}
        if self.params:
            out["params"] = dict(self.params)
        return out


@dataclass(frozen=True)
class ConstMechanism:
    """Node intervention ``A := value``."""

    value: int

    kind = "const"

    @property
    def deterministic(self) -> bool:
        return True

    def to_json(self) -> dict[str, Any]:
        return {"kind": "const", "value": self.value}


Mechanism = Union[CPTMechanism, ParamMechanism, ConstMechanism]


def _mechanism_from_json(doc: Mapping[str, Any]) -> Mechanism:
    kind = doc.get("kind")
    if kind == "cpt":
        return CPTMechanism.from_array(doc["table"])
    if kind == "param":
        params = tuple(sorted((str(k), float(v)) for k, v in doc.get("params", {}).items()))
        return ParamMechanism(str(doc["tag"]), bool(doc.get("deterministic", True)), params)
    if kind == "const":
        return ConstMechanism(int(doc["value"]))
    raise PolicyError(f"unknown mechanism kind {kind!r}")


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Policy:
    target: str
    inputs: frozenset[str]
    mechanism: Mechanism

    def __init__(self, target: str, inputs: Iterable[str], mechanism: Mechanism) -> None:
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "inputs", frozenset(inputs))
        object.__setattr__(self, "mechanism", mechanism)
        if target in self.inputs:
            raise PolicyError(f"policy on {target!r} lists its own target among its inputs")
        if isinstance(mechanism, ConstMechanism) and self.inputs:
            raise PolicyError(f"constant policy on {target!r} cannot have inputs")
        if isinstance(mechanism, CPTMechanism) and len(mechanism.shape) != len(self.inputs) + 1:
            raise PolicyError(
                f"CPT for {target!r} has {len(mechanism.shape) - 1} input axes, "
                f"expected {len(self.inputs)}"
            )

    @property
    def sorted_inputs(self) -> tuple[str, ...]:
        return tuple(sorted(self.inputs))

    @property
    def deterministic(self) -> bool:
        return self.mechanism.deterministic

    @property
    def is_constant(self) -> bool:
        return isinstance(self.mechanism, ConstMechanism)

    def check_against(self, g: MixedGraph) -> None:
        """Raise if the policy does not fit ``g`` (names, latency, table shape)."""
        if self.target not in g:
            raise PolicyError(f"unknown policy target {self.target!r}")
        info = g.vertex(self.target)
        if info.latent:
            raise PolicyError(f"policy target {self.target!r} is latent")
        if self.target in g.fixed:
            raise PolicyError(f"policy target {self.target!r} is a fixed vertex")
        for z in self.sorted_inputs:
            if z not in g:
                raise PolicyError(f"policy on {self.target!r} uses unknown input {z!r}")
            if g.vertex(z).latent:
                raise PolicyError(f"policy on {self.target!r} uses latent input {z!r}")
        mech = self.mechanism
        if isinstance(mech, CPTMechanism):
            expected = tuple(g.cardinality(z) for z in self.sorted_inputs) + (info.cardinality,)
            if mech.shape != expected:
                raise PolicyError(f"CPT for {self.target!r} has shape {mech.shape}, expected {expected}")
        if isinstance(mech, ConstMechanism) and not 0 <= mech.value < info.cardinality:
            raise PolicyError(f"constant {mech.value} out of range for {self.target!r}")

    def to_json(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "inputs": list(self.sorted_inputs),
            "mechanism": self.mechanism.to_json(),
        }


@dataclass(frozen=True)
class PolicySet:
    """A collection of policies with distinct targets, kept sorted by target."""

    policies: tuple[Policy, ...] = field(default_factory=tuple)

    def __init__(self, policies: Iterable[Policy] = ()) -> None:
        items = sorted(policies, key=lambda p: p.target)
        seen: set[str] = set()
        for p in items:
            if p.target in seen:
                raise PolicyError(f"two policies target {p.target!r}")
            seen.add(p.target)
        object.__setattr__(self, "policies", tuple(items))

    @property
    def targets(self) -> frozenset[str]:
        return frozenset(p.target for p in self.policies)

    def __getitem__(self, target: str) -> Policy:
        for p in self.policies:
            if p.target == target:
                return p
        raise KeyError(target)

    def __contains__(self, target: object) -> bool:
        return any(p.target == target for p in self.policies)

    def __iter__(self) -> Iterator[Policy]:
        return iter(self.policies)

    def __len__(self) -> int:
        return len(self.policies)

    @property
    def deterministic(self) -> bool:
        return all(p.deterministic for p in self.policies)

    @property
    def all_constant(self) -> bool:
        return all(p.is_constant for p in self.policies)

    def assignment(self) -> dict[str, int]:
        """Values of constant policies (node interventions)."""
        return {p.target: p.mechanism.value for p in self.policies if isinstance(p.mechanism, ConstMechanism)}

    def check_against(self, g: MixedGraph) -> None:
        for p in self.policies:
            p.check_against(g)


def node_intervention(assignment: Mapping[str, int]) -> PolicySet:
    """``do(A = a)`` expressed as constant policies."""
    return PolicySet(Policy(a, (), ConstMechanism(int(v))) for a, v in assignment.items())


# ---------------------------------------------------------------------------
# Induced dependence and segregation-preserving validation
# ---------------------------------------------------------------------------


def _dependency_map(ps: PolicySet, g: MixedGraph) -> dict[str, frozenset[str]]:
    """Arguments of every post-intervention structural equation."""
    deps: dict[str, frozenset[str]] = {}
    targets = ps.targets
    for v in g.names:
        if v in targets:
            deps[v] = ps[v].inputs
        else:
            deps[v] = g.parents(v) | g.neighbors(v)
    return deps


def induced_dependence(ps: PolicySet, g: MixedGraph) -> frozenset[tuple[str, str]]:
    """Pairs ``(Ai, Aj)`` such that ``Ai`` is made a function of ``Aj``.

    Computed as reachability in the dependency digraph of the
    post-intervention structural equations: targets depend on their inputs,
    all other vertices on their parents and neighbours.  Bidirected edges
    carry no functional dependence.  Self-pairs are omitted.
    """
    for p in ps:
        if p.target not in g:
            raise PolicyError(f"unknown policy target {p.target!r}")
    deps = _dependency_map(ps, g)
    out: set[tuple[str, str]] = set()
    targets = sorted(ps.targets)
    for a in targets:
        seen: set[str] = set()
        stack = list(deps[a])
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(deps.get(v, ()))
        for b in targets:
            if b != a and b in seen:
                out.add((a, b))
    return frozenset(out)


@dataclass(frozen=True)
class SegregationCheck:
    """Outcome of :func:`is_segregation_preserving`; truthy when valid."""

    ok: bool
    clause: str | None = None
    witness: tuple[str, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_segregation_preserving(ps: PolicySet, g: MixedGraph) -> SegregationCheck:
    """Check the two clauses of the segregation-preserving definition.

    Clause (a): no input of ``f_A`` lies in the strict exterior of ``A``.
    Clause (b): mutual induced dependence needs mutual input membership.
    The post-intervention graph is also classified as a final guard.
    """
    try:
        ps.check_against(g)
    except PolicyError as exc:
        return SegregationCheck(False, "inputs", (), str(exc))
    for p in ps:
        bad = sorted(p.inputs & relatives(g, {p.target}, "strict-exterior"))
        if bad:
            return SegregationCheck(
                False,
                "a",
                (p.target, bad[0]),
                f"input {bad[0]!r} of f_{p.target} lies in the strict exterior of {p.target!r}",
            )
    rel = induced_dependence(ps, g)
    for a, b in sorted(rel):
        if a < b and (b, a) in rel:
            if not (a in ps[b].inputs and b in ps[a].inputs):
                return SegregationCheck(
                    False,
                    "b",
                    (a, b),
                    f"{a!r} and {b!r} depend on each other but are not inputs of each other's policy",
                )
    post = apply_procedure(g, ps)
    cls = classify(post)
    if not cls.is_sg:
        detail = (
            f"vertex {cls.segregation_witness!r} has both -- and <-> edges"
            if cls.segregation_witness
            else "partially directed cycle"
        )
        return SegregationCheck(False, "post", (), f"post-intervention graph is not segregated: {detail}")
    return SegregationCheck(True)


# ---------------------------------------------------------------------------
# Procedure for the post-intervention graph
# ---------------------------------------------------------------------------


def apply_procedure(g: MixedGraph, ps: PolicySet) -> MixedGraph:
    """Edge surgery without validation.

    For every target ``A`` in name order: each ``V -- A`` becomes ``A -> V``,
    edges ``. -> A`` and ``. <-> A`` are removed and ``Z_A -> A`` is added.
    Afterwards every pair joined in both directions becomes undirected.
    """
    edges = set(g.edges)
    for p in ps:
        a = p.target
        for e in list(edges):
            if a not in (e.tail, e.head):
                continue
            if e.kind is EdgeKind.UNDIRECTED:
                edges.discard(e)
                other = e.head if e.tail == a else e.tail
                edges.add(Edge.directed(a, other))
            elif e.kind is EdgeKind.BIDIRECTED or e.head == a:
                edges.discard(e)
        for z in p.inputs:
            edges.add(Edge.directed(z, a))
    directed = {(e.tail, e.head) for e in edges if e.kind is EdgeKind.DIRECTED}
    for t, h in sorted(directed):
        if t < h and (h, t) in directed:
            edges.discard(Edge.directed(t, h))
            edges.discard(Edge.directed(h, t))
            edges.add(Edge.undirected(t, h))
    return g.replace(edges=edges)


def intervene_graph(g: MixedGraph, ps: PolicySet, *, validate: bool = True) -> MixedGraph:
    """Post-intervention graph ``G_fA``.

    With ``validate`` the policy set must be segregation preserving, and the
    result is checked to be a segregated graph.
    """
    if validate:
        check = is_segregation_preserving(ps, g)
        if not check:
            raise PolicyError(f"policy set is not segregation preserving (clause {check.clause}): {check.message}")
    else:
        ps.check_against(g)
    post = apply_procedure(g, ps)
    if validate:
        assert classify(post).is_sg, "post-intervention graph must be segregated"
    return post


# ---------------------------------------------------------------------------
# Intervention taxonomy helpers
# ---------------------------------------------------------------------------


def _tag(target: str) -> ParamMechanism:
    return ParamMechanism(f"f_{target}")


def _keep_inputs(g: MixedGraph, v: str) -> frozenset[str]:
    return g.parents(v) | g.neighbors(v)


def induce_direct_cause(g: MixedGraph, target: str, cause: str) -> PolicySet:
    """Make ``cause`` a direct cause of ``target`` keeping its other arguments."""
    g.check_subset({target, cause})
    return PolicySet([Policy(target, _keep_inputs(g, target) | {cause}, _tag(target))])


def modify_block_equation(g: MixedGraph, target: str) -> PolicySet:
    """Replace ``target``'s equation by another over the same arguments."""
    g.check_subset({target})
    return PolicySet([Policy(target, _keep_inputs(g, target), _tag(target))])


def add_undirected_edge(
    g: MixedGraph, a: str, b: str, intervene: Sequence[str] | None = None
) -> PolicySet:
    """Create ``a -- b`` by making each endpoint a function of the other.

    Both endpoints have to be intervened on; ``intervene`` exists so callers
    can state which ones they meant to change, and anything short of both is
    rejected.
    """
    g.check_subset({a, b})
    chosen = {a, b} if intervene is None else set(intervene)
    if chosen != {a, b}:
        raise PolicyError("adding an undirected edge requires policies on both endpoints")
    return PolicySet(
        [
            Policy(a, _keep_inputs(g, a) | {b}, _tag(a)),
            Policy(b, _keep_inputs(g, b) | {a}, _tag(b)),
        ]
    )


def _require_undirected(g: MixedGraph, a: str, b: str) -> None:
    g.check_subset({a, b})
    if not g.has_edge(a, b, EdgeKind.UNDIRECTED):
        raise PolicyError(f"no undirected edge {a} -- {b}")


def partial_removal(g: MixedGraph, edge: tuple[str, str], survivor: str) -> PolicySet:
    """Turn ``a -- b`` into a directed edge pointing at ``survivor``.

    The other endpoint stops depending on ``survivor``; ``survivor`` keeps
    depending on it.
    """
    a, b = edge
    _require_undirected(g, a, b)
    if survivor not in (a, b):
        raise PolicyError(f"{survivor!r} is not an endpoint of {a} -- {b}")
    other = b if survivor == a else a
    return PolicySet([Policy(other, _keep_inputs(g, other) - {survivor}, _tag(other))])


def complete_removal(g: MixedGraph, edge: tuple[str, str]) -> PolicySet:
    """Remove all dependence between the endpoints of ``a -- b``."""
    a, b = edge
    _require_undirected(g, a, b)
    return PolicySet(
        [
            Policy(a, _keep_inputs(g, a) - {b}, _tag(a)),
            Policy(b, _keep_inputs(g, b) - {a}, _tag(b)),
        ]
    )


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def policy_set_to_json(ps: PolicySet) -> list[dict[str, Any]]:
    return [p.to_json() for p in ps]


def policy_set_from_json(doc: Any) -> PolicySet:
    if not isinstance(doc, list):
        raise PolicyError("policy file must hold a JSON list")
    out = []
    for item in doc:
        try:
            out.append(
                Policy(
                    str(item["target"]),
                    [str(z) for z in item.get("inputs", [])],
                    _mechanism_from_json(item["mechanism"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise PolicyError(f"malformed policy entry {item!r}") from exc
    return PolicySet(out)


def load_policy_set(path: str | Path) -> PolicySet:
    with open(path, encoding="utf-8") as fh:
        return policy_set_from_json(json.load(fh))


def save_policy_set(ps: PolicySet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(policy_set_to_json(ps), fh, indent=2)
        fh.write("\n")
