"""Unregularized logistic regression by iteratively reweighted least squares."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

__all__ = ["FitError", "SeparationError", "RankDeficiencyError", "LogisticFit", "fit_logistic"]


class FitError(ValueError):
    """The maximum-likelihood estimate does not exist or cannot be computed."""


class SeparationError(FitError):
    """The outcome is (quasi-)perfectly separated by the design."""


class RankDeficiencyError(FitError):
    """The design matrix does not have full column rank."""


@dataclass(frozen=True, eq=False)
class LogisticFit:
    coef: np.ndarray
    converged: bool
    iterations: int
    names: tuple[str, ...] = ()

    def linear(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef

    def predict(self, X: np.ndarray) -> np.ndarray:
        return expit(self.linear(X))

    def as_dict(self) -> dict[str, float]:
        names = self.names or tuple(f"x{i}" for i in range(len(self.coef)))
        return dict(zip(names, map(float, self.coef)))


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    *,
    names: tuple[str, ...] = (),
    tol: float = 1e-8,
    max_iter: int = 100,
) -> LogisticFit:
    """Newton-Raphson on the Bernoulli log-likelihood.

    Stops when the largest coefficient change falls below ``tol``.  Raises
    instead of regularizing when the estimate does not exist.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError(f"design {X.shape} and outcome {y.shape} do not match")
    if X.shape[0] == 0:
        raise FitError("no observations")
    if np.all(y == y[0]):
        raise SeparationError(f"outcome is constant ({y[0]:g}); the estimate does not exist")
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise RankDeficiencyError(f"design matrix has rank below its {X.shape[1]} columns")
    beta = np.zeros(X.shape[1])
    for it in range(1, max_iter + 1):
        mu = expit(X @ beta)
        w = mu * (1.0 - mu)
        if np.any(w < 1e-12) and np.max(np.abs(beta)) > 30:
            raise SeparationError("fitted probabilities reached 0 or 1; the data are separated")
        hess = X.T @ (X * w[:, None])
        grad = X.T @ (y - mu)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise RankDeficiencyError("weighted design became singular") from exc
        beta = beta + step
        if np.max(np.abs(step)) < tol:
            return LogisticFit(beta, True, it, names)
    return LogisticFit(beta, False, max_iter, names)
