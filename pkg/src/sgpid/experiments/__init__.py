"""Network simulation studies, from data generation to policy search."""

from .config import DEFAULT_DENSITIES, DGPParams, ExperimentConfig, NetworkSpec, PolicyClassSpec, SimulationConfig
from .dgp import NetworkSample, simulate
from .logistic import FitError, LogisticFit, RankDeficiencyError, SeparationError, fit_logistic
from .network import NetworkError, UnitNetwork, generate_network, network_graph
from .qlearn import (
    NuisanceModels,
    PolicyChoice,
    estimate_policy_value,
    fit_iid_outcome,
    fit_nuisance,
    iid_ace,
    optimize_policy,
    policy_values,
    sg_ace,
    status_quo_value,
)
from .studies import (
    BootstrapSummary,
    StudyResult,
    StudyRow,
    bias_experiment,
    bootstrap,
    format_increase,
    policy_experiment,
    run_experiment,
)

__all__ = [
    "DEFAULT_DENSITIES",
    "DGPParams",
    "ExperimentConfig",
    "NetworkSpec",
    "PolicyClassSpec",
    "SimulationConfig",
    "NetworkSample",
    "simulate",
    "FitError",
    "LogisticFit",
    "RankDeficiencyError",
    "SeparationError",
    "fit_logistic",
    "NetworkError",
    "UnitNetwork",
    "generate_network",
    "network_graph",
    "NuisanceModels",
    "PolicyChoice",
    "estimate_policy_value",
    "fit_iid_outcome",
    "fit_nuisance",
    "iid_ace",
    "optimize_policy",
    "policy_values",
    "sg_ace",
    "status_quo_value",
    "BootstrapSummary",
    "StudyResult",
    "StudyRow",
    "bias_experiment",
    "bootstrap",
    "format_increase",
    "policy_experiment",
    "run_experiment",
]
