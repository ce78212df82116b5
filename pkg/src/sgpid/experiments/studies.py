"""The bias and policy-optimization studies with bootstrap confidence intervals."""

from __future__ import annotations

import csv
import json
import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..estimand import id_admg, id_sg, policy_id_sg, render
from ..graph_core import graph_from_text
from ..intervention import ParamMechanism, Policy, PolicySet
from .config import ExperimentConfig, Generator
from .dgp import NetworkSample, simulate
from .logistic import FitError
from .network import UnitNetwork, generate_network, unit_names
from .qlearn import fit_iid_outcome, fit_nuisance, iid_ace, optimize_policy, sg_ace, status_quo_value

__all__ = [
    "BootstrapSummary",
    "StudyRow",
    "StudyResult",
    "thread_count",
    "bootstrap",
    "percentile_interval",
    "bias_statistic",
    "improvement_statistic",
    "bias_experiment",
    "policy_experiment",
    "run_experiment",
    "format_increase",
]


def thread_count() -> int:
    """Worker threads for resampling, capped by ``SGPID_THREADS`` (default 1)."""
    raw = os.environ.get("SGPID_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def percentile_interval(draws: np.ndarray, level: float = 0.95) -> tuple[float, float]:
    tail = 100.0 * (1.0 - level) / 2.0
    lo, hi = np.percentile(draws, [tail, 100.0 - tail])
    return float(lo), float(hi)


@dataclass(frozen=True)
class BootstrapSummary:
    estimate: float
    ci_low: float
    ci_high: float
    draws: tuple[float, ...]
    failures: int

    @property
    def excludes_zero(self) -> bool:
        return self.ci_low > 0.0 or self.ci_high < 0.0


def bootstrap(
    sample: NetworkSample,
    statistic: Callable[[NetworkSample], float],
    n_bootstrap: int,
    seed: int,
    level: float = 0.95,
    threads: int | None = None,
) -> BootstrapSummary:
    """Percentile bootstrap over whole network replicates.

    Replicate ``r`` draws its rows from a generator seeded by ``(seed, r)``,
    so serial and threaded runs agree.  Replicates where a nuisance fit
    fails are counted and left out.  A single replicate gives the
    degenerate interval at the point estimate.
    """
    estimate = statistic(sample)

    def one(r: int) -> float:
        rows = np.random.default_rng([seed, r]).integers(0, sample.n, size=sample.n)
        try:
            return statistic(sample.take(rows))
        except FitError:
            return float("nan")

    workers = threads if threads is not None else thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            draws = np.array(list(pool.map(one, range(n_bootstrap))))
    else:
        draws = np.array([one(r) for r in range(n_bootstrap)])
    ok = draws[~np.isnan(draws)]
    if n_bootstrap <= 1 or ok.size == 0:
        lo = hi = estimate
    else:
        lo, hi = percentile_interval(ok, level)
    return BootstrapSummary(estimate, lo, hi, tuple(float(x) for x in draws), int(draws.size - ok.size))


def bias_statistic(sample: NetworkSample, units: tuple[int, ...] | None = None) -> float:
    """ACE under the iid single-unit model minus ACE under the network model."""
    return iid_ace(fit_iid_outcome(sample), sample, units) - sg_ace(fit_nuisance(sample), units)


def improvement_statistic(sample: NetworkSample, config: ExperimentConfig) -> float:
    """Mean over target units of optimized value minus observed mean outcome."""
    models = fit_nuisance(sample)
    gains = [
        optimize_policy(models, config.policy_class, i).value - status_quo_value(sample, i)
        for i in config.target_units
    ]
    return float(np.mean(gains))


def format_increase(delta: float) -> str:
    """An expected difference in a binary outcome as a percentage increase."""
    return f"{100.0 * delta:.1f}% increase"


@dataclass(frozen=True)
class StudyRow:
    generator: str
    density: float
    n_edges: int
    estimate: float
    ci_low: float
    ci_high: float
    failures: int
    note: str = ""

    @property
    def excludes_zero(self) -> bool:
        return self.ci_low > 0.0 or self.ci_high < 0.0


@dataclass
class StudyResult:
    kind: str
    config: ExperimentConfig
    rows: list[StudyRow] = field(default_factory=list)
    draws: dict[str, list[float]] = field(default_factory=dict)
    estimands: dict[str, dict[str, str]] = field(default_factory=dict)

    def summary_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["generator", "density", "n_edges", "estimate", "ci_low", "ci_high", "failures", "note"])
            for r in self.rows:
                w.writerow([r.generator, r.density, r.n_edges, repr(r.estimate), repr(r.ci_low), repr(r.ci_high), r.failures, r.note])

    def detail(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "config": self.config.model_dump(mode="json"),
            "estimands": self.estimands,
            "rows": [asdict(r) for r in self.rows],
            "replicates": self.draws,
        }

    def plot_data(self) -> dict[str, Any]:
        """One series per generator: density on x, estimate with interval on y."""
        series: dict[str, dict[str, list[float]]] = {}
        for r in self.rows:
            s = series.setdefault(r.generator, {"x": [], "y": [], "y_low": [], "y_high": []})
            s["x"].append(r.density)
            s["y"].append(r.estimate)
            s["y_low"].append(r.ci_low)
            s["y_high"].append(r.ci_high)
        label = "ACE bias" if self.kind == "bias" else "improvement over status quo"
        return {"x_label": "density", "y_label": label, "series": series}

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / f"{self.kind}_summary.csv", out / f"{self.kind}_detail.json", out / f"{self.kind}_plot.json"]
        self.summary_csv(paths[0])
        for p, doc in ((paths[1], self.detail()), (paths[2], self.plot_data())):
            p.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return paths


def _settings(config: ExperimentConfig) -> list[tuple[int, Generator, float]]:
    return [(gi * 1000 + di, gen, d) for gi, gen in enumerate(config.generators) for di, d in enumerate(config.densities)]


def _draw(config: ExperimentConfig, idx: int, gen: Generator, density: float) -> tuple[UnitNetwork, NetworkSample]:
    net = generate_network(config.network(gen, density))
    sample = simulate(net, config.resolved_params, config.n_samples, seed=config.seed * 100_003 + idx, sweeps=config.sweeps)
    return net, sample


def _unit_estimands(net: UnitNetwork, kind: str) -> dict[str, str]:
    c, a, y = unit_names(0)
    out = {}
    if kind == "bias":
        single = graph_from_text(f"{c}->{a}, {a}->{y}, {c}->{y}, {c}<->{a}")
        out["iid"] = render(id_admg(single, [y], {a: 1}).expr)
        treat = {unit_names(i)[1]: 1 for i in range(net.n_units)}
        out["network"] = render(id_sg(net.graph, [y], treat).expr)
    else:
        ps = PolicySet([Policy(a, [c], ParamMechanism(f"f_{a}"))])
        out["network"] = render(policy_id_sg(net.graph, [y], ps).expr)
    return out


def _run(config: ExperimentConfig, statistic: Callable[[NetworkSample], float], note: Callable[[float], str]) -> StudyResult:
    result = StudyResult(config.kind, config)
    for idx, gen, density in _settings(config):
        net, sample = _draw(config, idx, gen, density)
        result.estimands[f"{gen}@{density}"] = _unit_estimands(net, config.kind)
        boot = bootstrap(sample, statistic, config.n_bootstrap, seed=config.seed * 7919 + idx, level=config.level)
        result.rows.append(StudyRow(gen, density, len(net.edges), boot.estimate, boot.ci_low, boot.ci_high, boot.failures, note(boot.estimate)))
        result.draws[f"{gen}@{density}"] = list(boot.draws)
    return result


def bias_experiment(config: ExperimentConfig) -> StudyResult:
    """Bias of the iid single-unit ACE relative to the network-aware ACE."""
    if config.kind != "bias":
        raise ValueError("bias_experiment needs a configuration of kind 'bias'")
    units = config.units
    return _run(config, lambda s: bias_statistic(s, units), lambda est: "")


def policy_experiment(config: ExperimentConfig) -> StudyResult:
    """Optimized single-unit policy value minus the status quo, for each network setting."""
    if config.kind != "policy":
        raise ValueError("policy_experiment needs a configuration of kind 'policy'")
    return _run(config, lambda s: improvement_statistic(s, config), format_increase)


def run_experiment(config: ExperimentConfig) -> StudyResult:
    return bias_experiment(config) if config.kind == "bias" else policy_experiment(config)
