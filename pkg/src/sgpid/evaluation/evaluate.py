"""Numeric semantics of expression trees against an observed distribution."""

from __future__ import annotations

from collections.abc import Mapping

from ..estimand.expr import (
    BlockEquilibrium,
    Conditional,
    Const,
    Expr,
    Fix,
    Marginal,
    ObservedJoint,
    One,
    PolicyFactor,
    PolicyRef,
    Product,
    Substitute,
    SumOver,
    fix_markov_blanket,
)
from ..estimand.kernel import fix_graph
from ..graph_core import relatives
from ..intervention import Policy
from .factor import DiscreteDistribution, Factor
from .model import PolicyResolver, gibbs_equilibrium, policy_table

__all__ = ["EvaluationError", "evaluate", "policy_factor"]


class EvaluationError(ValueError):
    """An expression refers to variables or mechanisms that cannot be resolved."""


def policy_factor(policy: Policy, cards: Mapping[str, int], resolver: PolicyResolver | None = None) -> Factor:
    """``f_A(A | Z_A)`` as a factor."""
    table = policy_table(policy, cards, resolver)
    return Factor.from_axes(policy.sorted_inputs + (policy.target,), table)


class _Evaluator:
    def __init__(self, dist: DiscreteDistribution, resolver: PolicyResolver | None) -> None:
        self.dist = dist
        self.cards = dict(dist.variables)
        self.resolver = resolver
        self.memo: dict[Expr, Factor] = {}

    def observed(self, vars: frozenset[str]) -> Factor:
        missing = vars - set(self.cards)
        if missing:
            raise EvaluationError(f"variables {sorted(missing)} are not in the distribution")
        return self.dist.factor.marginal(vars)

    def policy(self, pol: Policy) -> Factor:
        for v in pol.inputs | {pol.target}:
            if v not in self.cards:
                raise EvaluationError(f"policy variable {v!r} is not in the distribution")
        return policy_factor(pol, self.cards, self.resolver)

    def __call__(self, e: Expr) -> Factor:
        try:
            return self.memo[e]
        except KeyError:
            pass
        out = self.compute(e)
        self.memo[e] = out
        return out

    def compute(self, e: Expr) -> Factor:
        if isinstance(e, One):
            return Factor.scalar()
        if isinstance(e, ObservedJoint):
            return self.observed(e.vars)
        if isinstance(e, Conditional):
            f = self(e.child)
            summed = e.child.random_vars() - e.given
            return f / f.sum_out(summed)
        if isinstance(e, Marginal):
            return self(e.child).sum_out(e.summed)
        if isinstance(e, Product):
            out = Factor.scalar()
            for x in e.factors:
                out = out * self(x)
            return out
        if isinstance(e, SumOver):
            return self(e.child).sum_out(e.vars)
        if isinstance(e, Fix):
            return self.fix(e)
        if isinstance(e, PolicyFactor):
            return self.policy(e.policy)
        if isinstance(e, Substitute):
            return self.substitute(e)
        if isinstance(e, BlockEquilibrium):
            return self.block(e)
        raise EvaluationError(f"cannot evaluate {type(e).__name__}")

    def fix(self, e: Fix) -> Factor:
        q = self(e.child)
        rnd = e.child.random_vars()
        blanket = fix_markov_blanket(e.graph, e.vertex)
        local = q.sum_out(rnd - blanket - {e.vertex})
        cond = local / local.sum_out({e.vertex})
        out = q / cond
        g2 = fix_graph(e.graph, e.vertex)
        rest = rnd - {e.vertex}
        keep = rest | relatives(g2, rest, "parents") if rest else frozenset()
        return out.mean_out([v for v in out.vars if v not in keep])

    def substitute(self, e: Substitute) -> Factor:
        f = self(e.child)
        consts: dict[str, int] = {}
        summed = []
        for k, a in e.assignments:
            if isinstance(a, Const):
                consts[k] = a.value
            else:
                f = f * self.policy(a.policy)
                summed.append(k)
        return f.restrict(consts).sum_out(summed)

    def block(self, e: BlockEquilibrium) -> Factor:
        mechs: dict[str, Factor] = {}
        for m in e.mechanisms:
            if isinstance(m, PolicyRef):
                mechs[m.var] = self.policy(m.policy)
            else:
                head = frozenset({m.var})
                joint = self.observed(head | m.args)
                mechs[m.var] = joint / joint.sum_out(head)
        return gibbs_equilibrium(sorted(e.block), mechs, self.cards)


def evaluate(e: Expr, dist: DiscreteDistribution, resolver: PolicyResolver | None = None) -> Factor:
    """Evaluate ``e`` on the observed joint ``dist``.

    Parametric policies need a ``resolver`` that returns their tables.
    """
    return _Evaluator(dist, resolver)(e)
