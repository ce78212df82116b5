"""Symbolic estimands and the identification algorithms that build them."""

from .expr import (
    BlockEquilibrium,
    Conditional,
    Const,
    Expr,
    Fix,
    Marginal,
    ObservedJoint,
    ObservedRef,
    One,
    PolicyFactor,
    PolicyRef,
    Product,
    Substitute,
    SumOver,
    p,
    product,
    substitute,
    sum_over,
)
from .identify import (
    Identified,
    IdResult,
    NotIdentified,
    g_formula_cg,
    g_formula_dag,
    id_admg,
    id_sg,
    policy_id_admg,
    policy_id_sg,
)
from .kernel import (
    NotFixable,
    base_kernel,
    district_kernel,
    fix_graph,
    fix_vertex,
    fixable,
    kernel_condition,
    kernel_marginalize,
    reachable,
)
from .render import expr_to_json, render
from .simplify import canonicalize, is_kernel

__all__ = [
    "BlockEquilibrium",
    "Conditional",
    "Const",
    "Expr",
    "Fix",
    "Marginal",
    "ObservedJoint",
    "ObservedRef",
    "One",
    "PolicyFactor",
    "PolicyRef",
    "Product",
    "Substitute",
    "SumOver",
    "p",
    "product",
    "substitute",
    "sum_over",
    "Identified",
    "IdResult",
    "NotIdentified",
    "g_formula_cg",
    "g_formula_dag",
    "id_admg",
    "id_sg",
    "policy_id_admg",
    "policy_id_sg",
    "NotFixable",
    "base_kernel",
    "district_kernel",
    "fix_graph",
    "fix_vertex",
    "fixable",
    "kernel_condition",
    "kernel_marginalize",
    "reachable",
    "expr_to_json",
    "render",
    "canonicalize",
    "is_kernel",
]
