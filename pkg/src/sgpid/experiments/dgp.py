"""Sampling network replicates from the parametric covariate/treatment/outcome model."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np
from scipy.special import expit

from .config import DGPParams
from .network import UnitNetwork

__all__ = ["NetworkSample", "simulate", "sample_outcomes", "treatment_propensity"]


@dataclass(frozen=True, eq=False)
class NetworkSample:
    """``n`` independent replicates of one unit network.

    ``C`` has shape ``(n, units, 3)``; ``A`` and ``Y`` have shape ``(n, units)``.
    """

    network: UnitNetwork
    C: np.ndarray
    A: np.ndarray
    Y: np.ndarray

    @property
    def n(self) -> int:
        return self.C.shape[0]

    def take(self, rows: np.ndarray) -> "NetworkSample":
        """Replicates at ``rows`` (used for bootstrap resampling)."""
        return NetworkSample(self.network, self.C[rows], self.A[rows], self.Y[rows])

    def columns(self) -> list[str]:
        names = []
        for i in range(self.network.n_units):
            names += [f"A{i}", f"C{i}_1", f"C{i}_2", f"C{i}_3", f"Y{i}"]
        return sorted(names)

    def rows(self) -> np.ndarray:
        cols = {}
        for i in range(self.network.n_units):
            cols[f"A{i}"] = self.A[:, i]
            cols[f"Y{i}"] = self.Y[:, i]
            for j in range(3):
                cols[f"C{i}_{j + 1}"] = self.C[:, i, j]
        return np.column_stack([cols[c] for c in self.columns()]) if self.n else np.zeros((0, len(cols)))

    def write_csv(self, fh: TextIO) -> None:
        """Headered CSV, one row per replicate, columns in lexicographic order."""
        names = self.columns()
        w = csv.writer(fh)
        w.writerow(names)
        for row in self.rows():
            w.writerow([repr(float(x)) if c.startswith("C") else str(int(x)) for c, x in zip(names, row)])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh)


def treatment_propensity(C: np.ndarray, net: UnitNetwork, params: DGPParams) -> np.ndarray:
    """``p(A_i = 1 | C)`` for every replicate and unit."""
    own = C @ np.asarray(params.gamma)
    nbr = C.sum(axis=2) @ net.mean_matrix.T
    return expit(own + params.tau_AC * nbr)


def _outcome_offset(C: np.ndarray, A: np.ndarray, net: UnitNetwork, params: DGPParams) -> np.ndarray:
    m = net.mean_matrix.T
    return (
        params.eta * A
        + C @ np.asarray(params.delta)
        + params.tau_YA * (A @ m)
        + params.tau_YC * (C.sum(axis=2) @ m)
    )


def sample_outcomes(
    C: np.ndarray,
    A: np.ndarray,
    net: UnitNetwork,
    params: DGPParams,
    rng: np.random.Generator,
    sweeps: int = 50,
) -> np.ndarray:
    """Systematic-scan Gibbs sampling of the outcome layer, all replicates at once."""
    n, units = A.shape
    offset = _outcome_offset(C, A, net, params)
    Y = (rng.random((n, units)) < 0.5).astype(float)
    m = net.mean_matrix
    for _ in range(sweeps):
        for i in range(units):
            logit = offset[:, i] + params.tau_YY * (Y @ m[i])
            Y[:, i] = rng.random(n) < expit(logit)
    return Y.astype(np.int8)


def simulate(
    net: UnitNetwork,
    params: DGPParams,
    n_samples: int,
    seed: int,
    sweeps: int = 50,
) -> NetworkSample:
    """Draw ``n_samples`` independent replicates of ``net`` (partial interference)."""
    rng = np.random.default_rng(seed)
    units = net.n_units
    a, b = np.asarray(params.beta_params).T
    C = rng.beta(a, b, size=(n_samples, units, 3))
    A = (rng.random((n_samples, units)) < treatment_propensity(C, net, params)).astype(np.int8)
    Y = sample_outcomes(C, A.astype(float), net, params, rng, sweeps)
    return NetworkSample(net, C, A, Y)
