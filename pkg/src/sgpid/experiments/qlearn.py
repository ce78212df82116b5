"""Nuisance models and plug-in indirect Q-learning for single-unit policies.

Two pooled logistic regressions are fitted across units.  The *marginal*
model predicts ``Y_k`` from ``A`` and ``C`` alone; the *conditional* model
predicts ``Y_i`` from ``A``, ``C`` and the other outcomes.  Both use a
unit's own covariates plus averages over its network neighbours, which is
the functional form of the outcome model used for simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .config import PolicyClassSpec
from .dgp import NetworkSample
from .logistic import LogisticFit, fit_logistic
from .network import UnitNetwork

__all__ = [
    "NuisanceModels",
    "PolicyChoice",
    "fit_nuisance",
    "fit_iid_outcome",
    "policy_probability",
    "estimate_policy_value",
    "policy_values",
    "optimize_policy",
    "status_quo_value",
    "sg_ace",
    "iid_ace",
]

MARGINAL_NAMES = ("const", "A", "C1", "C2", "C3", "nbr_A", "nbr_C")
CONDITIONAL_NAMES = ("const", "A", "C1", "C2", "C3", "nbr_A", "nbr_Y", "nbr_C")
_NEIGHBOR_TERMS = frozenset({"nbr_A", "nbr_Y", "nbr_C"})


def _columns(names: tuple[str, ...], net: UnitNetwork) -> tuple[str, ...]:
    # Without any network edge the neighbour averages are identically zero.
    if net.edges:
        return names
    return tuple(n for n in names if n not in _NEIGHBOR_TERMS)


def _design(
    names: tuple[str, ...], net: UnitNetwork, C: np.ndarray, A: np.ndarray, Y: np.ndarray | None
) -> np.ndarray:
    """Stacked ``(rows * units, features)`` design in unit-major order within each row."""
    m = net.mean_matrix.T
    n, units = A.shape
    parts = {
        "const": np.ones((n, units)),
        "A": A,
        "C1": C[:, :, 0],
        "C2": C[:, :, 1],
        "C3": C[:, :, 2],
        "nbr_A": A @ m,
        "nbr_C": C.sum(axis=2) @ m,
    }
    if Y is not None:
        parts["nbr_Y"] = Y @ m
    return np.stack([parts[c] for c in names], axis=-1)


@dataclass(frozen=True, eq=False)
class NuisanceModels:
    """Fitted outcome regressions together with the data used as ``p(A, C)``."""

    data: NetworkSample
    marginal: LogisticFit
    conditional: LogisticFit

    @property
    def network(self) -> UnitNetwork:
        return self.data.network

    @property
    def converged(self) -> bool:
        return self.marginal.converged and self.conditional.converged

    def outcome_marginals(self, C: np.ndarray, A: np.ndarray) -> np.ndarray:
        """Predicted ``E[Y_k | A, C]`` for every row and unit."""
        X = _design(self.marginal.names, self.network, C, A, None)
        return expit(X @ self.marginal.coef)

    def unit_value(self, unit: int, C: np.ndarray, A: np.ndarray) -> np.ndarray:
        """Plug-in ``E[Y_unit | A, C]``: predict the other outcomes, then the unit's own."""
        p = self.outcome_marginals(C, A)
        X = _design(self.conditional.names, self.network, C, A, p)
        return expit(X[:, unit, :] @ self.conditional.coef)


def fit_nuisance(sample: NetworkSample) -> NuisanceModels:
    """Fit the marginal and conditional outcome regressions on ``sample``."""
    net = sample.network
    A = sample.A.astype(float)
    Y = sample.Y.astype(float)
    y = Y.reshape(-1)
    names_m = _columns(MARGINAL_NAMES, net)
    names_c = _columns(CONDITIONAL_NAMES, net)
    Xm = _design(names_m, net, sample.C, A, None).reshape(-1, len(names_m))
    Xc = _design(names_c, net, sample.C, A, Y).reshape(-1, len(names_c))
    return NuisanceModels(
        sample,
        fit_logistic(Xm, y, names=names_m),
        fit_logistic(Xc, y, names=names_c),
    )


def fit_iid_outcome(sample: NetworkSample) -> LogisticFit:
    """Single-unit outcome regression that treats every unit as an iid draw."""
    n, units = sample.A.shape
    X = np.column_stack(
        [np.ones(n * units), sample.A.reshape(-1), sample.C.reshape(-1, 3)]
    )
    return fit_logistic(X, sample.Y.reshape(-1).astype(float), names=("const", "A", "C1", "C2", "C3"))


def policy_probability(k: tuple[float, float, float] | np.ndarray, C_unit: np.ndarray) -> np.ndarray:
    """``clip(mean_j k_j C_j, 0, 1)``; ``k`` may be one vector or a stack of them."""
    K = np.atleast_2d(np.asarray(k, dtype=float))
    out = np.clip(C_unit @ K.T / C_unit.shape[-1], 0.0, 1.0)
    return out[:, 0] if np.ndim(k) == 1 else out


def _arms(models: NuisanceModels, unit: int, rows: np.ndarray | None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = models.data if rows is None else models.data.take(rows)
    A = data.A.astype(float)
    out = []
    for a in (1.0, 0.0):
        Aa = A.copy()
        Aa[:, unit] = a
        out.append(models.unit_value(unit, data.C, Aa))
    return data.C[:, unit, :], out[0], out[1]


def _rows(models: NuisanceModels, mc_draws: int | None, seed: int) -> np.ndarray | None:
    if mc_draws is None:
        return None
    return np.random.default_rng(seed).integers(0, models.data.n, size=mc_draws)


def policy_values(
    models: NuisanceModels,
    unit: int,
    candidates: list[tuple[float, float, float]],
    *,
    mc_draws: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Estimated ``E[Y_unit]`` under each candidate policy for ``A_unit``.

    The policy output is the probability of treating; the unit's treatment
    is drawn from it while every other treatment keeps its observed value.
    With ``mc_draws=None`` the average runs over every observed replicate.
    """
    c, v1, v0 = _arms(models, unit, _rows(models, mc_draws, seed))
    pi = policy_probability(np.asarray(candidates, dtype=float), c)
    return (pi * v1[:, None] + (1.0 - pi) * v0[:, None]).mean(axis=0)


def estimate_policy_value(
    models: NuisanceModels,
    k: tuple[float, float, float],
    unit: int,
    *,
    mc_draws: int | None = None,
    seed: int = 0,
) -> float:
    return float(policy_values(models, unit, [tuple(k)], mc_draws=mc_draws, seed=seed)[0])


@dataclass(frozen=True)
class PolicyChoice:
    k: tuple[float, float, float]
    value: float


def optimize_policy(models: NuisanceModels, policy_class: PolicyClassSpec, unit: int) -> PolicyChoice:
    """Exhaustive grid search; ties go to the lexicographically smallest ``k``."""
    cands = policy_class.candidates()
    values = policy_values(models, unit, cands)
    best = int(np.argmax(values))
    return PolicyChoice(tuple(cands[best]), float(values[best]))


def status_quo_value(sample: NetworkSample, unit: int) -> float:
    """Observed mean outcome of ``unit``."""
    return float(sample.Y[:, unit].mean())


def sg_ace(models: NuisanceModels, units: tuple[int, ...] | None = None) -> float:
    """Average over units of ``E[Y_i(A = 1)] - E[Y_i(A = 0)]`` with every treatment set."""
    data = models.data
    ones = np.ones_like(data.A, dtype=float)
    zeros = np.zeros_like(data.A, dtype=float)
    units = units if units is not None else tuple(range(data.network.n_units))
    diffs = [
        models.unit_value(i, data.C, ones).mean() - models.unit_value(i, data.C, zeros).mean()
        for i in units
    ]
    return float(np.mean(diffs))


def iid_ace(fit: LogisticFit, sample: NetworkSample, units: tuple[int, ...] | None = None) -> float:
    """ACE from the single-unit model averaged over the covariates of ``units``."""
    units = units if units is not None else tuple(range(sample.network.n_units))
    c = sample.C[:, list(units), :].reshape(-1, 3)
    ones = np.ones(len(c))
    x1 = np.column_stack([ones, ones, c])
    x0 = np.column_stack([ones, 0 * ones, c])
    return float((fit.predict(x1) - fit.predict(x0)).mean())
