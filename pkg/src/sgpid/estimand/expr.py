"""Expression trees for identified functionals.

Every node is an immutable dataclass.  Two sets describe a node:

* ``random_vars()`` are the variables the node is a normalised density over;
* ``free_vars()`` are all variables the node is a function of (random ones
  plus the conditioning context).

A leaf probability ``p(X | W)`` is ``Conditional(ObservedJoint(X | W), W)``;
:func:`p` builds one.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from ..graph_core import MixedGraph, relatives
from ..intervention import ConstMechanism, Policy

__all__ = [
    "Expr",
    "One",
    "ObservedJoint",
    "Conditional",
    "Marginal",
    "Product",
    "SumOver",
    "Fix",
    "Const",
    "PolicyFactor",
    "Assignment",
    "Substitute",
    "PolicyRef",
    "ObservedRef",
    "MechanismRef",
    "BlockEquilibrium",
    "p",
    "leaf_parts",
    "product",
    "sum_over",
    "substitute",
    "base_name",
    "fix_markov_blanket",
]


def base_name(v: str) -> str:
    """Name without alpha-renaming primes."""
    return v.rstrip("'")


class Expr:
    """Base class; subclasses are frozen dataclasses."""

    def random_vars(self) -> frozenset[str]:
        raise NotImplementedError

    def free_vars(self) -> frozenset[str]:
        raise NotImplementedError

    def children(self) -> tuple["Expr", ...]:
        return ()

    def __mul__(self, other: "Expr") -> "Expr":
        return product([self, other])


@dataclass(frozen=True)
class One(Expr):
    def random_vars(self) -> frozenset[str]:
        return frozenset()

    def free_vars(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class ObservedJoint(Expr):
    """The observed margin ``p(vars)``."""

    vars: frozenset[str]

    def random_vars(self) -> frozenset[str]:
        return self.vars

    def free_vars(self) -> frozenset[str]:
        return self.vars


@dataclass(frozen=True)
class Conditional(Expr):
    """``child / sum_{random(child) - given} child``."""

    child: Expr
    given: frozenset[str]

    def random_vars(self) -> frozenset[str]:
        return self.child.random_vars() - self.given

    def free_vars(self) -> frozenset[str]:
        return self.child.free_vars()

    def children(self) -> tuple[Expr, ...]:
        return (self.child,)


@dataclass(frozen=True)
class Marginal(Expr):
    """``sum_{random(child) - keep} child``."""

    child: Expr
    keep: frozenset[str]

    @cached_property
    def summed(self) -> frozenset[str]:
        return self.child.random_vars() - self.keep

    def random_vars(self) -> frozenset[str]:
        return self.child.random_vars() & self.keep

    def free_vars(self) -> frozenset[str]:
        return self.child.free_vars() - self.summed

    def children(self) -> tuple[Expr, ...]:
        return (self.child,)


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple[Expr, ...]

    @cached_property
    def _random(self) -> frozenset[str]:
        return frozenset().union(*(f.random_vars() for f in self.factors))

    @cached_property
    def _free(self) -> frozenset[str]:
        return frozenset().union(*(f.free_vars() for f in self.factors))

    def random_vars(self) -> frozenset[str]:
        return self._random

    def free_vars(self) -> frozenset[str]:
        return self._free

    def children(self) -> tuple[Expr, ...]:
        return self.factors


@dataclass(frozen=True)
class SumOver(Expr):
    """Sum of ``child`` over ``vars``; variables absent from ``child`` are ignored."""

    child: Expr
    vars: frozenset[str]

    def random_vars(self) -> frozenset[str]:
        return self.child.random_vars() - self.vars

    def free_vars(self) -> frozenset[str]:
        return self.child.free_vars() - self.vars

    def children(self) -> tuple[Expr, ...]:
        return (self.child,)


def fix_markov_blanket(g: MixedGraph, v: str) -> frozenset[str]:
    """District of ``v`` plus the district's parents, without ``v``."""
    dis = relatives(g, {v}, "district")
    return (dis | relatives(g, dis, "parents")) - {v}


@dataclass(frozen=True)
class Fix(Expr):
    """The fixing operator applied to kernel ``child`` at ``vertex``.

    ``graph`` is the conditional ADMG in which the fixing is valid.  The new
    kernel is ``child / child(vertex | blanket)`` with the blanket taken from
    ``graph``.
    """

    child: Expr
    vertex: str
    graph: MixedGraph

    def random_vars(self) -> frozenset[str]:
        return self.child.random_vars() - {self.vertex}

    @cached_property
    def _free(self) -> frozenset[str]:
        from .kernel import fix_graph

        g2 = fix_graph(self.graph, self.vertex)
        rnd = self.random_vars()
        return rnd | (relatives(g2, rnd, "parents") & self.child.free_vars())

    def free_vars(self) -> frozenset[str]:
        return self._free

    def children(self) -> tuple[Expr, ...]:
        return (self.child,)


@dataclass(frozen=True)
class Const:
    """A node-intervention value."""

    value: int

    def free_vars(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class PolicyFactor(Expr):
    """The density ``f_A(A | Z_A)`` of a policy."""

    policy: Policy

    @property
    def target(self) -> str:
        return self.policy.target

    @property
    def inputs(self) -> frozenset[str]:
        return self.policy.inputs

    def random_vars(self) -> frozenset[str]:
        return frozenset({self.policy.target})

    def free_vars(self) -> frozenset[str]:
        return self.policy.inputs | {self.policy.target}


Assignment = Union[Const, PolicyFactor]


def _assignment_inputs(a: Assignment) -> frozenset[str]:
    return a.inputs if isinstance(a, PolicyFactor) else frozenset()


@dataclass(frozen=True)
class Substitute(Expr):
    """``child`` evaluated at ``A = value`` for every assignment.

    A policy-valued assignment means the policy's output is plugged in for
    ``A``; numerically ``sum_A f_A(A | Z_A) child``.
    """

    child: Expr
    assignments: tuple[tuple[str, Assignment], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignments", tuple(sorted(self.assignments, key=lambda kv: kv[0])))

    @property
    def mapping(self) -> dict[str, Assignment]:
        return dict(self.assignments)

    @cached_property
    def _vars(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.assignments)

    def random_vars(self) -> frozenset[str]:
        return self.child.random_vars() - self._vars

    def free_vars(self) -> frozenset[str]:
        extra = frozenset().union(*(_assignment_inputs(a) for _, a in self.assignments))
        return (self.child.free_vars() - self._vars) | (extra - self._vars)

    def children(self) -> tuple[Expr, ...]:
        return (self.child,)


@dataclass(frozen=True)
class PolicyRef:
    """Block member whose equation is replaced by a policy."""

    policy: Policy

    @property
    def var(self) -> str:
        return self.policy.target

    @property
    def args(self) -> frozenset[str]:
        return self.policy.inputs


@dataclass(frozen=True)
class ObservedRef:
    """Block member keeping its observational equation ``p(var | args)``."""

    var: str
    args: frozenset[str]


MechanismRef = Union[PolicyRef, ObservedRef]


@dataclass(frozen=True)
class BlockEquilibrium(Expr):
    """``p*(block | parents)``: the Gibbs equilibrium of the block's equations."""

    block: frozenset[str]
    parents: frozenset[str]
    mechanisms: tuple[MechanismRef, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mechanisms", tuple(sorted(self.mechanisms, key=lambda m: m.var)))

    @property
    def observational(self) -> bool:
        return all(isinstance(m, ObservedRef) for m in self.mechanisms)

    def random_vars(self) -> frozenset[str]:
        return self.block

    def free_vars(self) -> frozenset[str]:
        return self.block | self.parents


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def p(head: Iterable[str] | str, given: Iterable[str] = ()) -> Expr:
    """Leaf ``p(head | given)``."""
    h = frozenset([head]) if isinstance(head, str) else frozenset(head)
    w = frozenset(given) - h
    if not h:
        return One()
    if not w:
        return ObservedJoint(h)
    return Conditional(ObservedJoint(h | w), w)


def leaf_parts(e: Expr) -> tuple[frozenset[str], frozenset[str]] | None:
    """``(head, given)`` when ``e`` is a leaf probability, else ``None``."""
    if isinstance(e, ObservedJoint):
        return e.vars, frozenset()
    if isinstance(e, Conditional) and isinstance(e.child, ObservedJoint):
        given = e.given & e.child.vars
        head = e.child.vars - given
        if head:
            return head, given
    return None


def product(factors: Iterable[Expr]) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        if isinstance(f, Product):
            flat.extend(f.factors)
        elif not isinstance(f, One):
            flat.append(f)
    if not flat:
        return One()
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def sum_over(child: Expr, vars: Iterable[str]) -> Expr:
    vs = frozenset(vars) & child.free_vars()
    if not vs:
        return child
    return SumOver(child, vs)


def substitute(child: Expr, assignments: Mapping[str, Assignment]) -> Expr:
    asg = {}
    for k, v in assignments.items():
        if isinstance(v, PolicyFactor) and isinstance(v.policy.mechanism, ConstMechanism):
            v = Const(v.policy.mechanism.value)
        asg[k] = v
    if not asg:
        return child
    return Substitute(child, tuple(asg.items()))
