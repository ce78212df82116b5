"""Random unit networks and the segregated graph they induce."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from ..graph_core import Edge, MixedGraph
from .config import NetworkSpec

__all__ = ["NetworkError", "UnitNetwork", "generate_network", "network_graph", "unit_names"]


class NetworkError(ValueError):
    """Generator parameters that do not describe a valid network."""


def unit_names(i: int) -> tuple[str, str, str]:
    """Vertex names ``(C, A, Y)`` of unit ``i``."""
    return f"C{i}", f"A{i}", f"Y{i}"


@dataclass(frozen=True)
class UnitNetwork:
    """A simple undirected graph over units ``0..n_units-1``."""

    spec: NetworkSpec
    edges: tuple[tuple[int, int], ...]

    @property
    def n_units(self) -> int:
        return self.spec.n_units

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_units)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    @cached_property
    def mean_matrix(self) -> np.ndarray:
        """Row ``i`` averages over the neighbours of ``i``; isolated units get a zero row."""
        m = np.zeros((self.n_units, self.n_units))
        for i, nb in enumerate(self.neighbors):
            if nb:
                m[i, list(nb)] = 1.0 / len(nb)
        return m

    @cached_property
    def graph(self) -> MixedGraph:
        return network_graph(self.n_units, self.edges)


def _ws_neighbors(spec: NetworkSpec) -> int:
    n = spec.n_units
    if spec.neighbors is not None:
        k = spec.neighbors
    else:
        k = max(2, 2 * int(round(spec.density * (n - 1) / 2)))
    if k >= n:
        raise NetworkError(f"Watts-Strogatz neighbour count {k} must be below the number of units {n}")
    return k


def _ba_attachment(spec: NetworkSpec) -> int:
    n = spec.n_units
    m = spec.attachment if spec.attachment is not None else min(max(int(round(spec.density * n / 2)), 1), n - 1)
    if not 1 <= m < n:
        raise NetworkError(f"Barabasi-Albert attachment count {m} must lie in 1..{n - 1}")
    return m


def generate_network(spec: NetworkSpec) -> UnitNetwork:
    """Draw the unit network described by ``spec`` (reproducible in ``spec.seed``)."""
    n = spec.n_units
    if spec.generator == "erdos-renyi":
        g = nx.gnp_random_graph(n, spec.density, seed=spec.seed)
    elif spec.generator == "watts-strogatz":
        g = nx.watts_strogatz_graph(n, _ws_neighbors(spec), spec.rewiring, seed=spec.seed)
    elif spec.generator == "barabasi-albert":
        g = nx.barabasi_albert_graph(n, _ba_attachment(spec), seed=spec.seed)
    else:  # pragma: no cover - pydantic restricts the literal
        raise NetworkError(f"unknown generator {spec.generator!r}")
    edges = tuple(sorted((min(a, b), max(a, b)) for a, b in g.edges() if a != b))
    return UnitNetwork(spec, edges)


def network_graph(n_units: int, edges: tuple[tuple[int, int], ...]) -> MixedGraph:
    """Segregated graph with the two-candidate template repeated over every unit pair.

    Each unit has ``C -> A -> Y``, ``C -> Y`` and ``C <-> A``.  Across an
    edge between units, covariates point at the neighbour's treatment and
    outcome, treatments point at the neighbour's outcome, and the two
    outcomes are joined by an undirected edge.
    """
    out: list[Edge] = []
    names: list[str] = []
    for i in range(n_units):
        c, a, y = unit_names(i)
        names += [c, a, y]
        out += [Edge.directed(c, a), Edge.directed(c, y), Edge.directed(a, y), Edge.bidirected(c, a)]
    for i, j in edges:
        ci, ai, yi = unit_names(i)
        cj, aj, yj = unit_names(j)
        out += [
            Edge.directed(ci, aj),
            Edge.directed(cj, ai),
            Edge.directed(ai, yj),
            Edge.directed(aj, yi),
            Edge.directed(ci, yj),
            Edge.directed(cj, yi),
            Edge.undirected(yi, yj),
        ]
    return MixedGraph(sorted(names), out)
