"""Text, LaTeX and JSON serialisations of expressions.

Text grammar (the canonical form used by golden tests)::

    expr    := "1" | prob | star | policy | sum | fix | product
    prob    := "p(" vars ")" | "p(" vars "|" vars ")"
    star    := "p*(" vars ")" | "p*(" vars "|" vars ")"
    policy  := "f_{" NAME "}(" NAME ")" | "f_{" NAME "}(" NAME "|" vars ")"
    sum     := "Σ_{" vars "} " expr
    fix     := "φ_{" NAME "}(" expr ")"
    product := factor (" " factor)*      sums that are not last are bracketed

Inside a substitution a variable renders as its lowercase value symbol
(``a2``) or as the policy call ``f_{A}(Z...)``.  A summation variable that is
also used outside its sum renders with a prime.
"""

from __future__ import annotations

from collections import Counter
from typing import Any, Callable

from .expr import (
    BlockEquilibrium,
    Conditional,
    Const,
    Expr,
    Fix,
    Marginal,
    ObservedJoint,
    One,
    PolicyFactor,
    Product,
    Substitute,
    SumOver,
    base_name,
    leaf_parts,
)

__all__ = ["render", "render_text", "render_latex", "expr_to_json", "value_symbol", "mentions"]


def value_symbol(var: str) -> str:
    """``A2`` becomes ``a2``: the symbol for a fixed value of ``var``."""
    name = base_name(var)
    return name[:1].lower() + name[1:] + var[len(name) :]


def mentions(e: Expr) -> Counter:
    """How often each variable name occurs in ``e`` (uses and bindings)."""
    out: Counter = Counter()
    _collect(e, out)
    return out


def _collect(e: Expr, out: Counter) -> None:
    if isinstance(e, ObservedJoint):
        out.update(e.vars)
    elif isinstance(e, Conditional):
        out.update(e.given)
        _collect(e.child, out)
    elif isinstance(e, Marginal):
        out.update(e.keep)
        _collect(e.child, out)
    elif isinstance(e, SumOver):
        out.update(e.vars)
        _collect(e.child, out)
    elif isinstance(e, Product):
        for f in e.factors:
            _collect(f, out)
    elif isinstance(e, Fix):
        out.update([e.vertex])
        _collect(e.child, out)
    elif isinstance(e, Substitute):
        for k, a in e.assignments:
            out.update([k])
            if isinstance(a, PolicyFactor):
                out.update(a.inputs)
        _collect(e.child, out)
    elif isinstance(e, PolicyFactor):
        out.update(e.free_vars())
    elif isinstance(e, BlockEquilibrium):
        out.update(e.free_vars())


class _Style:
    def var(self, display: str) -> str:
        return display

    def prob(self, star: bool, head: str, given: str) -> str:
        name = "p*" if star else "p"
        return f"{name}({head}|{given})" if given else f"{name}({head})"

    def policy(self, target: str, args: str) -> str:
        return f"f_{{{target}}}({args})"

    def sum(self, vars: str, body: str) -> str:
        return f"Σ_{{{vars}}} {body}"

    def fix(self, v: str, body: str) -> str:
        return f"φ_{{{v}}}({body})"

    def bracket(self, body: str) -> str:
        return f"[{body}]"

    def cond(self, body: str, given: str) -> str:
        return f"[{body} | {given}]"

    def join(self, parts: list[str]) -> str:
        return " ".join(parts)

    one = "1"
    sep = ","
    prime = "'"


class _Latex(_Style):
    def var(self, display: str) -> str:
        core = display.rstrip("'")
        primes = display[len(core) :]
        if core.startswith("f_{"):
            return display
        if "_" in core:
            head, tail = core.split("_", 1)
            return f"{head}_{{{tail}}}{primes}"
        i = len(core)
        while i > 0 and core[i - 1].isdigit():
            i -= 1
        if 0 < i < len(core):
            return f"{core[:i]}_{{{core[i:]}}}{primes}"
        return display

    def prob(self, star: bool, head: str, given: str) -> str:
        name = "p^{\\star}" if star else "p"
        return f"{name}({head} \\mid {given})" if given else f"{name}({head})"

    def policy(self, target: str, args: str) -> str:
        return f"f_{{{target}}}({args})"

    def sum(self, vars: str, body: str) -> str:
        return f"\\sum_{{{vars}}} {body}"

    def fix(self, v: str, body: str) -> str:
        return f"\\phi_{{{v}}}({body})"

    def bracket(self, body: str) -> str:
        return f"\\left[{body}\\right]"

    def cond(self, body: str, given: str) -> str:
        return f"\\left[{body} \\mid {given}\\right]"

    def join(self, parts: list[str]) -> str:
        return " \\, ".join(parts)

    one = "1"
    sep = ", "
    prime = "'"


class _Renderer:
    def __init__(self, root: Expr, style: _Style) -> None:
        self.style = style
        self.total = mentions(root)
        self.cache: dict[int, Counter] = {}

    def sub_mentions(self, e: Expr) -> Counter:
        key = id(e)
        if key not in self.cache:
            self.cache[key] = mentions(e)
        return self.cache[key]

    def names(self, vs, env: dict[str, str]) -> str:
        ordered = sorted(vs, key=lambda v: (base_name(v), v))
        return self.style.sep.join(self.disp(v, env) for v in ordered)

    def disp(self, v: str, env: dict[str, str]) -> str:
        return env.get(v, self.style.var(v))

    def render(self, e: Expr, env: dict[str, str]) -> str:
        st = self.style
        if isinstance(e, One):
            return st.one
        parts = leaf_parts(e)
        if parts is not None:
            head, given = parts
            return st.prob(False, self.names(head, env), self.names(given, env))
        if isinstance(e, BlockEquilibrium):
            return st.prob(True, self.names(e.block, env), self.names(e.parents, env))
        if isinstance(e, PolicyFactor):
            args = self.disp(e.target, env)
            if e.inputs:
                args = st.prob(False, args, self.names(e.inputs, env))[2:-1]
            return st.policy(st.var(e.target), args)
        if isinstance(e, Product):
            rendered = [self.render(f, env) for f in e.factors]
            out = []
            for i, (f, text) in enumerate(zip(e.factors, rendered)):
                if isinstance(f, SumOver) and i != len(e.factors) - 1:
                    text = st.bracket(text)
                out.append(text)
            return st.join(out)
        if isinstance(e, SumOver):
            outside = self.total - self.sub_mentions(e)
            inner = dict(env)
            taken = {k for k, c in outside.items() if c > 0} | set(env.values())
            for v in sorted(e.vars):
                shown = v
                while shown in taken or st.var(shown) in taken:
                    shown += st.prime
                inner[v] = st.var(shown)
            body = self.render(e.child, inner)
            return st.sum(self.names(e.vars, inner), body)
        if isinstance(e, Marginal):
            return self.render(SumOver(e.child, e.summed), env) if e.summed else self.render(e.child, env)
        if isinstance(e, Conditional):
            return st.cond(self.render(e.child, env), self.names(e.given, env))
        if isinstance(e, Fix):
            return st.fix(self.disp(e.vertex, env), self.render(e.child, env))
        if isinstance(e, Substitute):
            inner = dict(env)
            for k, a in e.assignments:
                if isinstance(a, Const):
                    inner[k] = st.var(value_symbol(k))
                else:
                    args = self.names(a.inputs, env)
                    inner[k] = st.policy(st.var(k), args)
            return self.render(e.child, inner)
        if isinstance(e, ObservedJoint):
            return st.prob(False, self.names(e.vars, env), "")
        raise TypeError(f"cannot render {type(e).__name__}")


def render(e: Expr, format: str = "text") -> str:
    """Deterministic rendering in ``text`` or ``latex`` (``json`` gives a JSON string)."""
    if format == "text":
        return _Renderer(e, _Style()).render(e, {})
    if format == "latex":
        return _Renderer(e, _Latex()).render(e, {})
    if format == "json":
        import json

        return json.dumps(expr_to_json(e), sort_keys=True)
    raise ValueError(f"unknown format {format!r}")


def render_text(e: Expr) -> str:
    return render(e, "text")


def render_latex(e: Expr) -> str:
    return render(e, "latex")


def _names(vs) -> list[str]:
    return sorted(vs, key=lambda v: (base_name(v), v))


def expr_to_json(e: Expr) -> dict[str, Any]:
    """Structured form of an expression tree."""
    node: Callable[[Expr], dict[str, Any]] = expr_to_json
    if isinstance(e, One):
        return {"node": "one"}
    if isinstance(e, ObservedJoint):
        return {"node": "observed", "vars": _names(e.vars)}
    if isinstance(e, Conditional):
        return {"node": "conditional", "given": _names(e.given), "child": node(e.child)}
    if isinstance(e, Marginal):
        return {"node": "marginal", "keep": _names(e.keep), "child": node(e.child)}
    if isinstance(e, Product):
        return {"node": "product", "factors": [node(f) for f in e.factors]}
    if isinstance(e, SumOver):
        return {"node": "sum", "vars": _names(e.vars), "child": node(e.child)}
    if isinstance(e, Fix):
        return {"node": "fix", "vertex": e.vertex, "child": node(e.child)}
    if isinstance(e, PolicyFactor):
        return {"node": "policy", "target": e.target, "inputs": _names(e.inputs)}
    if isinstance(e, BlockEquilibrium):
        return {
            "node": "block_equilibrium",
            "block": _names(e.block),
            "parents": _names(e.parents),
            "mechanisms": [
                {"var": m.var, "args": _names(m.args), "kind": type(m).__name__}
                for m in e.mechanisms
            ],
        }
    if isinstance(e, Substitute):
        asg = []
        for k, a in e.assignments:
            if isinstance(a, Const):
                asg.append({"var": k, "value": a.value})
            else:
                asg.append({"var": k, "policy": a.target, "inputs": _names(a.inputs)})
        return {"node": "substitute", "assignments": asg, "child": node(e.child)}
    raise TypeError(f"cannot serialise {type(e).__name__}")
