"""Validated configuration objects for the network simulation studies."""

from __future__ import annotations

import itertools
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

__all__ = [
    "Generator",
    "NetworkSpec",
    "DGPParams",
    "PolicyClassSpec",
    "ExperimentConfig",
    "SimulationConfig",
    "DEFAULT_DENSITIES",
]

Generator = Literal["erdos-renyi", "watts-strogatz", "barabasi-albert"]

#: Densities swept when a configuration does not name its own.
DEFAULT_DENSITIES = (0.2, 0.4, 0.6, 0.8)


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class NetworkSpec(_Frozen):
    """Which random unit network to draw.

    ``density`` is the edge probability for Erdos-Renyi.  For the other two
    generators it picks the neighbour count (Watts-Strogatz) or attachment
    count (Barabasi-Albert) unless ``neighbors`` or ``attachment`` is given.
    """

    generator: Generator = "erdos-renyi"
    n_units: int = Field(10, ge=1)
    density: float = Field(0.4, ge=0.0, le=1.0)
    rewiring: float = Field(0.1, ge=0.0, le=1.0)
    neighbors: int | None = Field(None, ge=0)
    attachment: int | None = Field(None, ge=1)
    seed: int = 0


class DGPParams(_Frozen):
    """Coefficients of the data-generating model."""

    beta_params: tuple[tuple[float, float], tuple[float, float], tuple[float, float]] = (
        (1.5, 3.0),
        (6.0, 2.0),
        (0.8, 0.8),
    )
    gamma: tuple[float, float, float]
    tau_AC: float
    eta: float
    delta: tuple[float, float, float]
    tau_YA: float
    tau_YY: float
    tau_YC: float
    kind: Literal["bias", "policy", "custom"] = "custom"

    @field_validator("beta_params")
    @classmethod
    def _positive(cls, v: tuple[tuple[float, float], ...]) -> tuple[tuple[float, float], ...]:
        for j, (a, b) in enumerate(v):
            if a <= 0 or b <= 0:
                raise ValueError(f"Beta parameters for covariate {j + 1} must be positive, got ({a}, {b})")
        return v

    @classmethod
    def bias(cls) -> "DGPParams":
        return cls(
            gamma=(1.0, 0.0, 0.0),
            tau_AC=0.0,
            eta=-3.0,
            delta=(1.0, 0.0, 0.0),
            tau_YA=3.0,
            tau_YY=0.1,
            tau_YC=0.0,
            kind="bias",
        )

    @classmethod
    def policy(cls) -> "DGPParams":
        return cls(
            gamma=(0.5, 0.2, 0.25),
            tau_AC=0.15,
            eta=0.6,
            delta=(-0.3, 0.4, 0.1),
            tau_YA=0.2,
            tau_YY=0.3,
            tau_YC=-0.2,
            kind="policy",
        )

    @classmethod
    def preset(cls, name: str) -> "DGPParams":
        if name == "bias":
            return cls.bias()
        if name == "policy":
            return cls.policy()
        raise ValueError(f"unknown parameter preset {name!r}")

    def without_interference(self) -> "DGPParams":
        """The same model with every cross-unit coefficient set to zero."""
        return self.model_copy(update={"tau_AC": 0.0, "tau_YA": 0.0, "tau_YY": 0.0, "tau_YC": 0.0, "kind": "custom"})

    @property
    def has_interference(self) -> bool:
        return any(x != 0.0 for x in (self.tau_AC, self.tau_YA, self.tau_YY, self.tau_YC))


def _default_grid() -> tuple[float, ...]:
    return tuple(-1.0 + 0.25 * i for i in range(9))


class PolicyClassSpec(_Frozen):
    """Policies ``A_i = clip(mean_j k_j C_ij, 0, 1)`` with each ``k_j`` drawn from ``grid``."""

    grid: tuple[float, ...] = Field(default_factory=_default_grid)

    @field_validator("grid")
    @classmethod
    def _nonempty(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("coefficient grid must be nonempty")
        return tuple(sorted(set(float(x) for x in v)))

    def candidates(self) -> list[tuple[float, float, float]]:
        """All coefficient vectors in lexicographic order."""
        return list(itertools.product(self.grid, repeat=3))


class ExperimentConfig(_Frozen):
    """A full study: which networks to draw and how to sample from them."""

    kind: Literal["bias", "policy"]
    generators: tuple[Generator, ...] = ("erdos-renyi",)
    densities: tuple[float, ...] = DEFAULT_DENSITIES
    n_units: int = Field(10, ge=1)
    n_samples: int = Field(1000, ge=1)
    n_bootstrap: int = Field(1000, ge=1)
    sweeps: int = Field(50, ge=1)
    seed: int = 0
    params: DGPParams | None = None
    policy_class: PolicyClassSpec = Field(default_factory=PolicyClassSpec)
    units: tuple[int, ...] | None = None
    zero_interference: bool = False
    level: float = Field(0.95, gt=0.0, lt=1.0)

    @field_validator("densities")
    @classmethod
    def _densities(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("at least one density is required")
        for d in v:
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"density {d} is outside [0, 1]")
        return v

    @model_validator(mode="after")
    def _units_in_range(self) -> "ExperimentConfig":
        for u in self.units or ():
            if not 0 <= u < self.n_units:
                raise ValueError(f"unit {u} is outside 0..{self.n_units - 1}")
        return self

    @property
    def resolved_params(self) -> DGPParams:
        base = self.params if self.params is not None else DGPParams.preset(self.kind)
        return base.without_interference() if self.zero_interference else base

    @property
    def target_units(self) -> tuple[int, ...]:
        return self.units if self.units is not None else tuple(range(self.n_units))

    def network(self, generator: Generator, density: float) -> NetworkSpec:
        return NetworkSpec(generator=generator, n_units=self.n_units, density=density, seed=self.seed)


class SimulationConfig(_Frozen):
    """One network and a number of replicates to draw from it."""

    network: NetworkSpec = Field(default_factory=NetworkSpec)
    params: DGPParams | Literal["bias", "policy"] = "policy"
    n_samples: int = Field(1000, ge=0)
    sweeps: int = Field(50, ge=1)
    seed: int = 0

    @property
    def resolved_params(self) -> DGPParams:
        return DGPParams.preset(self.params) if isinstance(self.params, str) else self.params
