"""Dense discrete factors and distributions over named variables."""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

__all__ = ["Factor", "DiscreteDistribution", "SupportError"]


class SupportError(ZeroDivisionError):
    """Division by a zero probability with a nonzero numerator."""


@dataclass(frozen=True, eq=False)
class Factor:
    """A nonnegative table with one axis per variable, axes in name order."""

    vars: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        vs = tuple(self.vars)
        arr = np.asarray(self.table, dtype=float)
        if arr.ndim != len(vs):
            raise ValueError(f"table has {arr.ndim} axes for {len(vs)} variables")
        if len(set(vs)) != len(vs):
            raise ValueError(f"duplicate variables in {vs}")
        order = sorted(range(len(vs)), key=lambda i: vs[i])
        object.__setattr__(self, "vars", tuple(vs[i] for i in order))
        object.__setattr__(self, "table", np.transpose(arr, order) if order != list(range(len(vs))) else arr)

    # -- construction ---------------------------------------------------------

    @classmethod
    def scalar(cls, value: float = 1.0) -> "Factor":
        return cls((), np.asarray(float(value)))

    @classmethod
    def from_axes(cls, vars: Iterable[str], table: Any) -> "Factor":
        """Build from a table whose axes follow ``vars`` in the given order."""
        return cls(tuple(vars), np.asarray(table, dtype=float))

    # -- inspection -----------------------------------------------------------

    @property
    def cards(self) -> dict[str, int]:
        return dict(zip(self.vars, self.table.shape))

    def axes(self, order: Iterable[str]) -> np.ndarray:
        """The table transposed to ``order`` (which must list exactly ``vars``)."""
        order = tuple(order)
        if sorted(order) != list(self.vars):
            raise ValueError(f"order {order} does not match variables {self.vars}")
        return np.transpose(self.table, [self.vars.index(v) for v in order])

    def value(self, assignment: Mapping[str, int]) -> float:
        return float(self.table[tuple(assignment[v] for v in self.vars)])

    def allclose(self, other: "Factor", atol: float = 1e-10) -> bool:
        return self.vars == other.vars and np.allclose(self.table, other.table, atol=atol, rtol=0)

    def max_abs_diff(self, other: "Factor") -> float:
        if self.vars != other.vars:
            raise ValueError(f"variables differ: {self.vars} vs {other.vars}")
        return float(np.max(np.abs(self.table - other.table))) if self.table.size else 0.0

    # -- arithmetic -----------------------------------------------------------

    def expand(self, names: tuple[str, ...]) -> np.ndarray:
        """The table reshaped to axes ``names`` with size-one axes for absent variables."""
        missing = set(self.vars) - set(names)
        if missing:
            raise ValueError(f"expand target lacks variables {sorted(missing)}")
        present = [v for v in names if v in self.vars]
        table = self.axes(present) if present else self.table
        shape = [self.table.shape[self.vars.index(v)] if v in self.vars else 1 for v in names]
        return table.reshape(shape)

    @staticmethod
    def _check_cards(a: "Factor", b: "Factor") -> None:
        ca, cb = a.cards, b.cards
        for v in set(ca) & set(cb):
            if ca[v] != cb[v]:
                raise ValueError(f"variable {v!r} has cardinality {ca[v]} and {cb[v]}")

    def __mul__(self, other: "Factor") -> "Factor":
        self._check_cards(self, other)
        names = tuple(sorted(set(self.vars) | set(other.vars)))
        return Factor(names, self.expand(names) * other.expand(names))

    def __truediv__(self, other: "Factor") -> "Factor":
        self._check_cards(self, other)
        names = tuple(sorted(set(self.vars) | set(other.vars)))
        num, den = np.broadcast_arrays(self.expand(names), other.expand(names))
        bad = (den == 0) & (num != 0)
        if np.any(bad):
            raise SupportError("division by a zero probability")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, 0.0, num / np.where(den == 0, 1.0, den))
        return Factor(names, out)

    def sum_out(self, vars: Iterable[str]) -> "Factor":
        drop = [v for v in vars if v in self.vars]
        if not drop:
            return self
        axes = tuple(self.vars.index(v) for v in drop)
        keep = tuple(v for v in self.vars if v not in drop)
        return Factor(keep, self.table.sum(axis=axes))

    def marginal(self, keep: Iterable[str]) -> "Factor":
        k = set(keep)
        return self.sum_out([v for v in self.vars if v not in k])

    def mean_out(self, vars: Iterable[str]) -> "Factor":
        drop = [v for v in vars if v in self.vars]
        if not drop:
            return self
        axes = tuple(self.vars.index(v) for v in drop)
        keep = tuple(v for v in self.vars if v not in drop)
        return Factor(keep, self.table.mean(axis=axes))

    def restrict(self, assignment: Mapping[str, int]) -> "Factor":
        """Slice at ``var = value`` for the assigned variables present."""
        index: list[Any] = []
        keep = []
        for v in self.vars:
            if v in assignment:
                index.append(int(assignment[v]))
            else:
                index.append(slice(None))
                keep.append(v)
        return Factor(tuple(keep), self.table[tuple(index)])

    def conditional(self, given: Iterable[str]) -> "Factor":
        """``self / sum over non-given variables``."""
        g = set(given)
        return self / self.sum_out([v for v in self.vars if v not in g])

    def rename(self, mapping: Mapping[str, str]) -> "Factor":
        return Factor(tuple(mapping.get(v, v) for v in self.vars), self.table)

    def __repr__(self) -> str:
        return f"Factor({list(self.vars)}, shape={self.table.shape})"


class DiscreteDistribution:
    """A joint probability table over named finite variables."""

    __slots__ = ("factor",)

    def __init__(self, variables: Iterable[tuple[str, int]] | Factor, table: Any = None, *, atol: float = 1e-12):
        if isinstance(variables, Factor):
            f = variables
        else:
            items = list(variables)
            names = tuple(n for n, _ in items)
            shape = tuple(int(c) for _, c in items)
            arr = np.asarray(table, dtype=float).reshape(shape)
            f = Factor(names, arr)
        if np.any(f.table < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(f.table.sum())
        if abs(total - 1.0) > max(atol, 1e-12):
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        self.factor = f

    @property
    def variables(self) -> tuple[tuple[str, int], ...]:
        return tuple(zip(self.factor.vars, self.factor.table.shape))

    @property
    def names(self) -> tuple[str, ...]:
        return self.factor.vars

    @property
    def table(self) -> np.ndarray:
        return self.factor.table

    def cardinality(self, v: str) -> int:
        return self.factor.cards[v]

    def marginal(self, keep: Iterable[str]) -> "DiscreteDistribution":
        keep = set(keep)
        missing = keep - set(self.names)
        if missing:
            raise KeyError(f"unknown variables {sorted(missing)}")
        return DiscreteDistribution(self.factor.marginal(keep), atol=1e-9)

    def conditional(self, head: Iterable[str], given: Iterable[str]) -> Factor:
        """The table ``p(head | given)`` as a factor over ``head`` and ``given``."""
        h, g = set(head), set(given)
        joint = self.factor.marginal(h | g)
        return joint / joint.sum_out(h)

    def min_prob(self) -> float:
        return float(self.factor.table.min()) if self.factor.table.size else 1.0

    def to_json(self) -> dict[str, Any]:
        return {
            "variables": [{"name": n, "cardinality": c} for n, c in self.variables],
            "table": self.factor.table.ravel().tolist(),
        }

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "DiscreteDistribution":
        variables = [(str(v["name"]), int(v["cardinality"])) for v in doc["variables"]]
        return cls(variables, doc["table"], atol=1e-9)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    def __repr__(self) -> str:
        return f"DiscreteDistribution({list(self.variables)})"
