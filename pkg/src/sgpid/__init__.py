"""Identification of policy interventions in segregated graphs.

The package is layered: :mod:`sgpid.graph_core` holds mixed graphs,
:mod:`sgpid.projection` and :mod:`sgpid.intervention` transform them,
:mod:`sgpid.estimand` derives symbolic functionals, :mod:`sgpid.evaluation`
gives them exact numeric meaning and :mod:`sgpid.experiments` runs the
network simulations.
"""

from .graph_core import GraphError, MixedGraph, classify, graph_from_text, load_graph
from .intervention import Policy, PolicyError, PolicySet, intervene_graph, is_segregation_preserving
from .projection import decompose, latent_project

__version__ = "0.1.0"

__all__ = [
    "GraphError",
    "MixedGraph",
    "classify",
    "graph_from_text",
    "load_graph",
    "Policy",
    "PolicyError",
    "PolicySet",
    "intervene_graph",
    "is_segregation_preserving",
    "decompose",
    "latent_project",
]
