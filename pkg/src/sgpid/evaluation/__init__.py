"""Exact discrete semantics for structural models and symbolic expressions."""

from .evaluate import EvaluationError, evaluate, policy_factor
from .factor import DiscreteDistribution, Factor, SupportError
from .model import (
    Dataset,
    EquilibriumError,
    StructuralModel,
    VertexMechanism,
    block_equilibrium_exact,
    block_factor,
    cg_joint_exact,
    cg_sample,
    gibbs_equilibrium,
    intervened_joint_exact,
    intervened_model,
    policy_table,
    scan_operator,
)

__all__ = [
    "EvaluationError",
    "evaluate",
    "policy_factor",
    "DiscreteDistribution",
    "Factor",
    "SupportError",
    "Dataset",
    "EquilibriumError",
    "StructuralModel",
    "VertexMechanism",
    "block_equilibrium_exact",
    "block_factor",
    "cg_joint_exact",
    "cg_sample",
    "gibbs_equilibrium",
    "intervened_joint_exact",
    "intervened_model",
    "policy_table",
    "scan_operator",
]
