"""Structural models over chain graphs, solved exactly or sampled.

Each vertex ``V`` carries a mechanism ``f_V(V | args)`` whose arguments are
its parents and neighbours.  A nontrivial block is generated by running
systematic-scan Gibbs sampling over its members' mechanisms until
equilibrium; the exact equilibrium is the stationary distribution of the
scan operator.
"""

from __future__ import annotations

import csv
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..graph_core import MixedGraph, block_topological_order
from ..intervention import (
    ConstMechanism,
    CPTMechanism,
    Policy,
    PolicyError,
    PolicySet,
    intervene_graph,
)
from .factor import DiscreteDistribution, Factor

__all__ = [
    "EquilibriumError",
    "VertexMechanism",
    "StructuralModel",
    "PolicyResolver",
    "Dataset",
    "gibbs_equilibrium",
    "scan_operator",
    "block_equilibrium_exact",
    "block_factor",
    "cg_joint_exact",
    "cg_sample",
    "policy_table",
    "intervened_model",
    "intervened_joint_exact",
]

EQUILIBRIUM_TOL = 1e-12
EQUILIBRIUM_MAX_ITER = 1_000_000


class EquilibriumError(RuntimeError):
    """Non-positive block mechanisms or a power iteration that did not settle."""


@dataclass(frozen=True, eq=False)
class VertexMechanism:
    """Conditional table ``f_V(V | args)``; axes are ``args`` (sorted) then ``V``."""

    var: str
    args: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        args = tuple(self.args)
        if list(args) != sorted(args):
            raise ValueError(f"mechanism arguments for {self.var!r} must be sorted")
        arr = np.asarray(self.table, dtype=float)
        if arr.ndim != len(args) + 1:
            raise ValueError(f"mechanism for {self.var!r} needs {len(args) + 1} axes, got {arr.ndim}")
        if np.any(arr < 0) or not np.allclose(arr.sum(axis=-1), 1.0, atol=1e-9):
            raise ValueError(f"mechanism for {self.var!r} is not a conditional distribution")
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "table", arr)

    def factor(self) -> Factor:
        return Factor.from_axes(self.args + (self.var,), self.table)

    @property
    def positive(self) -> bool:
        return bool(np.all(self.table > 0))


class StructuralModel:
    """A graph together with one mechanism per vertex.

    Mechanism arguments must equal the vertex's parents and neighbours.
    """

    def __init__(self, graph: MixedGraph, mechanisms: Mapping[str, VertexMechanism] | Iterable[VertexMechanism]):
        mechs = dict(mechanisms) if isinstance(mechanisms, Mapping) else {m.var: m for m in mechanisms}
        for v in graph.random:
            if v not in mechs:
                raise ValueError(f"no mechanism for {v!r}")
            m = mechs[v]
            expected = tuple(sorted(graph.parents(v) | graph.neighbors(v)))
            if m.args != expected:
                raise ValueError(f"mechanism for {v!r} has arguments {m.args}, expected {expected}")
            shape = tuple(graph.cardinality(a) for a in m.args) + (graph.cardinality(v),)
            if m.table.shape != shape:
                raise ValueError(f"mechanism for {v!r} has shape {m.table.shape}, expected {shape}")
        extra = set(mechs) - graph.random
        if extra:
            raise ValueError(f"mechanisms for unknown or fixed vertices {sorted(extra)}")
        self.graph = graph
        self.mechanisms = {k: mechs[k] for k in sorted(mechs)}

    def __repr__(self) -> str:
        return f"StructuralModel({self.graph!r})"


# ---------------------------------------------------------------------------
# Gibbs equilibrium
# ---------------------------------------------------------------------------


def scan_operator(
    members: Sequence[str],
    mechs: Mapping[str, Factor],
    cards: Mapping[str, int],
    outside: Mapping[str, int],
) -> np.ndarray:
    """One systematic scan (members in the given order) as a dense matrix.

    ``mechs[m]`` is a factor over ``m`` and its arguments; arguments outside
    the block are fixed at ``outside``.  States are enumerated in C order
    over ``members``.
    """
    shape = tuple(cards[m] for m in members)
    size = int(np.prod(shape))
    states = np.array(np.unravel_index(np.arange(size), shape)).T
    rows = np.arange(size)
    total = np.eye(size)
    for i, m in enumerate(members):
        f = mechs[m].restrict(outside)
        stray = set(f.vars) - set(members)
        if stray:
            raise ValueError(f"mechanism of {m!r} depends on {sorted(stray)} outside the block and state")
        flat = np.broadcast_to(f.expand(tuple(members)), shape).reshape(-1)
        local = np.zeros((size, size))
        for x in range(cards[m]):
            t = states.copy()
            t[:, i] = x
            cols = np.ravel_multi_index(tuple(t.T), shape)
            local[rows, cols] = flat[cols]
        total = total @ local
    return total


def _stationary(op: np.ndarray) -> np.ndarray:
    """Stationary row vector of a stochastic matrix by power iteration."""
    size = op.shape[0]
    pi = np.full(size, 1.0 / size)
    for _ in range(EQUILIBRIUM_MAX_ITER):
        nxt = pi @ op
        if np.abs(nxt - pi).sum() < EQUILIBRIUM_TOL:
            return nxt / nxt.sum()
        pi = nxt
    raise EquilibriumError("power iteration did not converge")


def gibbs_equilibrium(
    members: Iterable[str],
    mechs: Mapping[str, Factor],
    cards: Mapping[str, int],
) -> Factor:
    """Exact equilibrium ``p*(block | parents)`` as a factor over block and parents.

    ``mechs[m]`` must be a factor over ``m`` and its arguments.  For every
    parent configuration the scan operator is built and its stationary
    distribution found by power iteration from the uniform distribution.
    """
    block = tuple(sorted(members))
    bset = set(block)
    if len(block) == 1:
        m = block[0]
        return mechs[m]
    for m in block:
        if np.any(mechs[m].table <= 0):
            raise EquilibriumError(f"mechanism of {m!r} in a nontrivial block is not positive")
    parents = tuple(sorted(set().union(*(set(mechs[m].vars) for m in block)) - bset))
    pshape = tuple(cards[v] for v in parents)
    bshape = tuple(cards[v] for v in block)
    out = np.zeros(pshape + bshape)
    for idx in np.ndindex(*pshape) if pshape else [()]:
        outside = dict(zip(parents, idx))
        op = scan_operator(block, mechs, cards, outside)
        out[idx] = _stationary(op).reshape(bshape)
    return Factor.from_axes(parents + block, out)


def _cards(g: MixedGraph) -> dict[str, int]:
    return {v: g.cardinality(v) for v in g.names}


def _mechanism_factors(sm: StructuralModel) -> dict[str, Factor]:
    return {v: m.factor() for v, m in sm.mechanisms.items()}


def block_factor(sm: StructuralModel, block: Iterable[str]) -> Factor:
    """``p*(block | pa(block))`` for every parent configuration."""
    members = tuple(sorted(block))
    facs = _mechanism_factors(sm)
    cards = _cards(sm.graph)
    return gibbs_equilibrium(members, {m: facs[m] for m in members}, cards)


def block_equilibrium_exact(
    sm: StructuralModel, block: Iterable[str], parent_state: Mapping[str, int] | None = None
) -> DiscreteDistribution | Factor:
    """Equilibrium of ``block`` at ``parent_state``; the full table when no state is given."""
    f = block_factor(sm, block)
    if parent_state is None:
        return f
    parents = set(f.vars) - set(block)
    missing = parents - set(parent_state)
    if missing:
        raise ValueError(f"parent state lacks {sorted(missing)}")
    return DiscreteDistribution(f.restrict({k: parent_state[k] for k in parents}), atol=1e-9)


def cg_joint_exact(sm: StructuralModel, *, marginalize_latent: bool = True) -> DiscreteDistribution:
    """Chain the block equilibria in block topological order into the joint."""
    joint = Factor.scalar()
    for b in block_topological_order(sm.graph):
        if set(b.members) & sm.graph.fixed:
            continue
        joint = joint * block_factor(sm, b.members)
    if marginalize_latent:
        joint = joint.sum_out(sm.graph.latent)
    return DiscreteDistribution(joint, atol=1e-9)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dataset:
    """Integer-coded samples, one column per vertex in name order."""

    columns: tuple[str, ...]
    data: np.ndarray

    def __len__(self) -> int:
        return int(self.data.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def empirical(self, cards: Mapping[str, int]) -> DiscreteDistribution:
        shape = tuple(cards[c] for c in self.columns)
        counts = np.zeros(shape)
        if len(self):
            np.add.at(counts, tuple(self.data.T), 1.0)
            counts /= len(self)
        else:
            raise ValueError("empty dataset has no empirical distribution")
        return DiscreteDistribution(Factor.from_axes(self.columns, counts), atol=1e-9)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            writer.writerows(self.data.tolist())


def _draw(rng: np.random.Generator, probs: np.ndarray) -> np.ndarray:
    """One categorical draw per row of ``probs``."""
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(probs.shape[0])[:, None]
    return np.minimum((u > cdf).sum(axis=-1), probs.shape[-1] - 1)


def cg_sample(sm: StructuralModel, n: int, sweeps: int = 100, seed: int | None = None) -> Dataset:
    """Draw ``n`` independent realisations, running ``sweeps`` Gibbs sweeps per block."""
    rng = np.random.default_rng(seed)
    g = sm.graph
    names = list(g.names)
    values = {v: np.zeros(n, dtype=np.int64) for v in names}
    for b in block_topological_order(g):
        members = [m for m in b.members if m in g.random]
        if not members:
            continue
        if len(members) > 1:
            for m in members:
                values[m] = rng.integers(0, g.cardinality(m), size=n)
        rounds = 1 if len(members) == 1 else sweeps
        for _ in range(rounds):
            for m in members:
                mech = sm.mechanisms[m]
                idx = tuple(values[a] for a in mech.args)
                probs = mech.table[idx] if mech.args else np.broadcast_to(mech.table, (n, mech.table.shape[-1]))
                values[m] = _draw(rng, probs) if n else values[m]
    cols = tuple(v for v in names if v in g.observed)
    data = np.stack([values[c] for c in cols], axis=1) if cols else np.zeros((n, 0), dtype=np.int64)
    return Dataset(cols, data.reshape(n, len(cols)))


# ---------------------------------------------------------------------------
# Interventions
# ---------------------------------------------------------------------------

PolicyResolver = Callable[[Policy, Mapping[str, int]], Any]
"""Maps a parametric policy and the variable cardinalities to its table."""


def policy_table(
    policy: Policy, cards: Mapping[str, int], resolver: PolicyResolver | None = None
) -> np.ndarray:
    """The policy as a table with axes (sorted inputs..., target)."""
    mech = policy.mechanism
    card = cards[policy.target]
    if isinstance(mech, ConstMechanism):
        out = np.zeros(card)
        out[mech.value] = 1.0
        return out
    if isinstance(mech, CPTMechanism):
        return mech.array()
    if resolver is None:
        raise PolicyError(f"policy on {policy.target!r} is parametric and no resolver was given")
    table = np.asarray(resolver(policy, cards), dtype=float)
    expected = tuple(cards[z] for z in policy.sorted_inputs) + (card,)
    if table.shape != expected:
        raise PolicyError(f"resolver returned shape {table.shape} for {policy.target!r}, expected {expected}")
    return table


def intervened_model(
    sm: StructuralModel, ps: PolicySet, resolver: PolicyResolver | None = None, *, validate: bool = True
) -> StructuralModel:
    """Swap target mechanisms for policies on the post-intervention graph."""
    gfa = intervene_graph(sm.graph, ps, validate=validate)
    mechs = dict(sm.mechanisms)
    for pol in ps:
        mechs[pol.target] = VertexMechanism(pol.target, pol.sorted_inputs, policy_table(pol, _cards(sm.graph), resolver))
    return StructuralModel(gfa, mechs)


def intervened_joint_exact(
    sm: StructuralModel, ps: PolicySet, resolver: PolicyResolver | None = None, *, validate: bool = True
) -> DiscreteDistribution:
    """Exact post-intervention distribution of the observed vertices."""
    return cg_joint_exact(intervened_model(sm, ps, resolver, validate=validate))
