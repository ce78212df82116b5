"""Rewriting expressions into canonical form.

The rewrites are all semantics preserving under the numeric semantics in
:mod:`sgpid.evaluation.evaluate`.  In particular a sum over a variable the
body does not mention is the identity, so every rewrite that could make a
summed variable vanish from a body is guarded.
"""

from __future__ import annotations

from collections.abc import Iterable
from contextvars import ContextVar

from .expr import (
    BlockEquilibrium,
    Conditional,
    Expr,
    Fix,
    Marginal,
    ObservedJoint,
    One,
    PolicyFactor,
    Product,
    Substitute,
    SumOver,
    leaf_parts,
    p,
)
from .render import render_text

__all__ = ["canonicalize", "is_kernel", "sort_key", "rename"]

_MAX_PASSES = 50
_MERGE_CHAINS: ContextVar[bool] = ContextVar("merge_chains", default=True)


def sort_key(e: Expr) -> tuple[int, str]:
    """Order of product factors: sums last, then by rendered text."""
    return (1 if isinstance(e, SumOver) else 0, render_text(e))


def is_kernel(e: Expr) -> bool:
    """True when ``e`` sums to one over its random variables for every context."""
    if isinstance(e, (One, ObservedJoint, PolicyFactor, BlockEquilibrium, Conditional, Fix)):
        return True
    if isinstance(e, Marginal):
        return is_kernel(e.child)
    if isinstance(e, SumOver):
        return is_kernel(e.child) and (e.vars & e.child.free_vars()) <= e.child.random_vars()
    if isinstance(e, Substitute):
        if not is_kernel(e.child):
            return False
        rnd = e.child.random_vars()
        for k, a in e.assignments:
            if k in rnd:
                return False
            if isinstance(a, PolicyFactor) and a.inputs & rnd:
                return False
        return True
    if isinstance(e, Product):
        remaining = list(e.factors)
        while remaining:
            for i, f in enumerate(remaining):
                others = remaining[:i] + remaining[i + 1 :]
                used = frozenset().union(*(o.free_vars() for o in others))
                if is_kernel(f) and not (f.random_vars() & used):
                    del remaining[i]
                    break
            else:
                return False
        return True
    return False


# ---------------------------------------------------------------------------
# Renaming of bound variables
# ---------------------------------------------------------------------------


def _fresh(v: str, avoid: Iterable[str]) -> str:
    taken = set(avoid)
    out = v + "'"
    while out in taken:
        out += "'"
    return out


def rename(e: Expr, mapping: dict[str, str]) -> Expr:
    """Rename free occurrences of variables."""
    if not mapping or not (e.free_vars() & mapping.keys()):
        return e

    def rs(vs: frozenset[str]) -> frozenset[str]:
        return frozenset(mapping.get(v, v) for v in vs)

    if isinstance(e, ObservedJoint):
        return ObservedJoint(rs(e.vars))
    if isinstance(e, Conditional):
        return Conditional(rename(e.child, mapping), rs(e.given))
    if isinstance(e, Marginal):
        return Marginal(rename(e.child, mapping), rs(e.keep))
    if isinstance(e, Product):
        return Product(tuple(rename(f, mapping) for f in e.factors))
    if isinstance(e, SumOver):
        inner = {k: v for k, v in mapping.items() if k not in e.vars}
        clash = e.vars & frozenset(inner.values())
        child = e.child
        bound = e.vars
        if clash:
            avoid = child.free_vars() | frozenset(inner.values()) | frozenset(inner)
            alpha = {}
            for c in sorted(clash):
                alpha[c] = _fresh(c, avoid)
                avoid |= {alpha[c]}
            child = rename(child, alpha)
            bound = frozenset(alpha.get(v, v) for v in bound)
        return SumOver(rename(child, inner), bound)
    if isinstance(e, Substitute):
        keys = frozenset(k for k, _ in e.assignments)
        inner = {k: v for k, v in mapping.items() if k not in keys}
        asg = []
        for k, a in e.assignments:
            if isinstance(a, PolicyFactor) and a.inputs & inner.keys():
                raise ValueError("cannot rename the inputs of a policy substitution")
            asg.append((k, a))
        return Substitute(rename(e.child, inner), tuple(asg))
    if isinstance(e, PolicyFactor):
        raise ValueError("cannot rename the variables of a policy factor")
    if isinstance(e, BlockEquilibrium):
        raise ValueError("cannot rename the variables of a block equilibrium")
    if isinstance(e, Fix):
        raise ValueError("cannot rename inside a fixing node")
    return e


# ---------------------------------------------------------------------------
# Canonicalisation
# ---------------------------------------------------------------------------


def canonicalize(e: Expr, *, merge_chains: bool = True) -> Expr:
    """Rewrite ``e`` to canonical form (idempotent).

    ``merge_chains`` controls whether top-level products fold
    ``p(X|W) p(Y|X,W)`` into ``p(X,Y|W)``.  The fixing code turns it off
    because it needs one factor per district.  Inside sums the folding is
    always applied.
    """
    token = _MERGE_CHAINS.set(merge_chains)
    try:
        for _ in range(_MAX_PASSES):
            new = _canon(e)
            if new == e:
                return new
            e = new
        return e
    finally:
        _MERGE_CHAINS.reset(token)


def _canon(e: Expr) -> Expr:
    if isinstance(e, (One, PolicyFactor)):
        return e
    if isinstance(e, ObservedJoint):
        return e if e.vars else One()
    if isinstance(e, BlockEquilibrium):
        if e.observational:
            return p(e.block, e.parents)
        return e
    if isinstance(e, Marginal):
        child = canonicalize(e.child)
        summed = child.random_vars() - e.keep
        return _canon_sum(child, summed) if summed else child
    if isinstance(e, Conditional):
        return _canon_conditional(canonicalize(e.child), e.given)
    if isinstance(e, Product):
        return _canon_product([canonicalize(f) for f in e.factors])
    if isinstance(e, SumOver):
        return _canon_sum(canonicalize(e.child), e.vars)
    if isinstance(e, Substitute):
        return _canon_substitute(canonicalize(e.child), dict(e.assignments))
    if isinstance(e, Fix):
        from .kernel import simplify_fix

        return simplify_fix(canonicalize(e.child), e.vertex, e.graph)
    raise TypeError(f"cannot canonicalize {type(e).__name__}")


def _chain_merge(factors: list[Expr]) -> list[Expr]:
    """Merge ``p(X|W) p(Y|X,W)`` into ``p(X,Y|W)`` until no pair matches."""
    changed = True
    while changed:
        changed = False
        for i, f in enumerate(factors):
            pf = leaf_parts(f)
            if pf is None:
                continue
            for j, h in enumerate(factors):
                if i == j:
                    continue
                ph = leaf_parts(h)
                if ph is None or ph[0] & pf[0]:
                    continue
                if ph[1] == pf[0] | pf[1]:
                    merged = p(pf[0] | ph[0], pf[1])
                    factors = [x for k, x in enumerate(factors) if k not in (i, j)] + [merged]
                    changed = True
                    break
            if changed:
                break
    return factors


def _canon_product(factors: list[Expr], merge: bool | None = None) -> Expr:
    flat: list[Expr] = []
    for f in factors:
        if isinstance(f, Product):
            flat.extend(f.factors)
        elif not isinstance(f, One):
            flat.append(f)
    if _MERGE_CHAINS.get() if merge is None else merge:
        flat = _chain_merge(flat)
    if not flat:
        return One()
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(sorted(flat, key=sort_key)))


def _canon_conditional(child: Expr, given: frozenset[str]) -> Expr:
    w = given & child.free_vars()
    rnd = child.random_vars()
    if isinstance(child, One):
        return One()
    if not (rnd - w):
        return One()
    if isinstance(child, Conditional) and leaf_parts(child) is None:
        return _canon_conditional(child.child, child.given | w)
    if not (w & rnd) and is_kernel(child):
        return child
    if isinstance(child, ObservedJoint):
        return Conditional(child, w) if w & child.vars else child
    if isinstance(child, Product):
        target = rnd - w
        kept = [f for f in child.factors if f.free_vars() & target]
        if len(kept) < len(child.factors):
            return _canon_conditional(_canon_product(kept), w)
    if leaf_parts(child) is not None and isinstance(child, Conditional):
        head, g0 = leaf_parts(child)
        return p(head - w, g0 | (w & head))
    if isinstance(child, Substitute):
        keys = frozenset(k for k, _ in child.assignments)
        inner_rnd = child.child.random_vars()
        inputs = frozenset().union(
            *(a.inputs for _, a in child.assignments if isinstance(a, PolicyFactor))
        )
        if not (keys & inner_rnd) and not (inputs & (rnd - w)) and not (keys & w):
            return _canon_substitute(
                _canon_conditional(child.child, w), dict(child.assignments)
            )
    return Conditional(child, w)


def _marginalize_factor(f: Expr, s: str) -> Expr | None:
    """``sum_s f`` for a factor in which ``s`` is random, when it has a closed form."""
    parts = leaf_parts(f)
    if parts is not None:
        head, given = parts
        if s in head:
            return p(head - {s}, given)
        return None
    if isinstance(f, PolicyFactor) and f.target == s:
        return One()
    if isinstance(f, Conditional) and s not in f.given:
        inner = canonicalize(SumOver(f.child, frozenset({s})))
        return _canon_conditional(inner, f.given)
    if isinstance(f, Product) and is_kernel(f):
        out = canonicalize(SumOver(f, frozenset({s})))
        return out
    return None


def _canon_sum(child: Expr, vars: frozenset[str]) -> Expr:
    s_all = vars & child.free_vars()
    if not s_all:
        return child
    if isinstance(child, SumOver):
        return _canon_sum(child.child, child.vars | s_all)
    if isinstance(child, ObservedJoint):
        rest = child.vars - s_all
        return ObservedJoint(rest) if rest else One()
    parts = leaf_parts(child)
    if parts is not None:
        head, given = parts
        if not (s_all & given):
            return p(head - s_all, given)
    if isinstance(child, Conditional) and not (s_all & child.given):
        inner = _canon_sum(child.child, s_all)
        if not isinstance(inner, SumOver):
            return _canon_conditional(inner, child.given)
    if isinstance(child, PolicyFactor) and s_all == {child.target}:
        return One()

    factors = list(child.factors) if isinstance(child, Product) else [child]
    outside = [f for f in factors if not (f.free_vars() & s_all)]
    inside = [f for f in factors if f.free_vars() & s_all]
    if outside:
        return _canon_product(outside + [_canon_sum(_canon_product(inside), s_all)])

    clusters = _clusters(inside, s_all)
    if len(clusters) > 1:
        return _canon_product(
            [
                _canon_sum(_canon_product(fs), s_all & frozenset().union(*(f.free_vars() for f in fs)))
                for fs in clusters
            ]
        )

    merged = _chain_merge(list(inside))
    if len(merged) != len(inside):
        return _canon_sum(_canon_product(merged, merge=True), s_all)

    for s in sorted(s_all):
        holders = [i for i, f in enumerate(inside) if s in f.free_vars()]
        if len(holders) != 1:
            continue
        f = inside[holders[0]]
        if s not in f.random_vars():
            continue
        new_f = _marginalize_factor(f, s)
        if new_f is None or new_f == f:
            continue
        new_inside = inside[: holders[0]] + [new_f] + inside[holders[0] + 1 :]
        body = _canon_product(new_inside)
        before = frozenset().union(*(x.free_vars() for x in inside)) & s_all
        if not (before - {s}) <= body.free_vars():
            continue
        return _canon_sum(body, s_all - {s})

    body = _canon_product(inside)
    return SumOver(body, s_all)


def _clusters(factors: list[Expr], summed: frozenset[str]) -> list[list[Expr]]:
    parent = list(range(len(factors)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, f in enumerate(factors):
        for v in f.free_vars() & summed:
            if v in owner:
                parent[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list[Expr]] = {}
    for i, f in enumerate(factors):
        groups.setdefault(find(i), []).append(f)
    return list(groups.values())


def _restrict(child: Expr, asg: dict[str, object]) -> dict[str, object]:
    """Keep the assignments ``child`` depends on, closed over policy inputs."""
    free = child.free_vars()
    keep = {k: a for k, a in asg.items() if k in free}
    changed = True
    while changed:
        changed = False
        for k, a in asg.items():
            if k in keep:
                continue
            if any(isinstance(b, PolicyFactor) and k in b.inputs for b in keep.values()):
                keep[k] = a
                changed = True
    return keep


def _canon_substitute(child: Expr, asg: dict) -> Expr:
    asg = _restrict(child, asg)
    if not asg:
        return child
    if isinstance(child, Product):
        return _canon_product([_canon_substitute(f, asg) for f in child.factors])
    if isinstance(child, Substitute):
        merged = dict(child.assignments)
        merged.update({k: a for k, a in asg.items() if k not in merged})
        return _canon_substitute(child.child, merged)
    if isinstance(child, SumOver):
        inner = {k: a for k, a in asg.items() if k not in child.vars}
        inputs = frozenset().union(
            *(a.inputs for a in inner.values() if isinstance(a, PolicyFactor))
        )
        clash = child.vars & (inputs | frozenset(inner))
        body, bound = child.child, child.vars
        if clash:
            avoid = body.free_vars() | inputs | frozenset(inner) | child.vars
            alpha = {}
            for c in sorted(clash):
                alpha[c] = _fresh(c, avoid)
                avoid |= {alpha[c]}
            body = rename(body, alpha)
            bound = frozenset(alpha.get(v, v) for v in bound)
        return _canon_sum(_canon_substitute(body, inner), bound)
    if isinstance(child, Conditional) and leaf_parts(child) is None:
        keys = frozenset(asg)
        inputs = frozenset().union(*(a.inputs for a in asg.values() if isinstance(a, PolicyFactor)))
        inner_rnd = child.child.random_vars()
        if not (keys & inner_rnd) and not (inputs & (inner_rnd - child.given)):
            return _canon_conditional(_canon_substitute(child.child, asg), child.given)
    return Substitute(child, tuple(sorted(asg.items(), key=lambda kv: kv[0])))
