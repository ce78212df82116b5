from __future__ import annotations

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy.special import expit

from sgpid.experiments import (
    DGPParams,
    ExperimentConfig,
    LogisticFit,
    NetworkError,
    NetworkSpec,
    NuisanceModels,
    PolicyClassSpec,
    RankDeficiencyError,
    SeparationError,
    bootstrap,
    estimate_policy_value,
    fit_logistic,
    fit_nuisance,
    format_increase,
    generate_network,
    optimize_policy,
    policy_values,
    run_experiment,
    simulate,
    status_quo_value,
)
from sgpid.experiments.dgp import NetworkSample
from sgpid.experiments.qlearn import CONDITIONAL_NAMES, MARGINAL_NAMES, policy_probability
from sgpid.experiments.studies import bias_statistic, improvement_statistic
from sgpid.graph_core import GraphKind, classify, districts

# -- networks -----------------------------------------------------------------------


def net(generator="erdos-renyi", n_units=10, density=0.4, **kw):
    return generate_network(NetworkSpec(generator=generator, n_units=n_units, density=density, **kw))


def test_complete_and_empty_erdos_renyi():
    assert len(net(density=1.0).edges) == 45
    empty = net(density=0.0)
    assert empty.edges == ()
    g = empty.graph
    for i in range(10):
        unit = {f"C{i}", f"A{i}", f"Y{i}"}
        for v in unit:
            assert g.children(v) <= unit and g.parents(v) <= unit and not g.neighbors(v)


def test_barabasi_albert_edge_count():
    # Preferential attachment starts from m isolated nodes and adds m edges per further node.
    assert len(net("barabasi-albert", attachment=2).edges) == (10 - 2) * 2


def test_watts_strogatz_neighbour_count_must_be_below_n():
    with pytest.raises(NetworkError):
        net("watts-strogatz", n_units=5, neighbors=6)
    assert len(net("watts-strogatz", neighbors=4, rewiring=0.0).edges) == 20


def test_networks_are_reproducible_and_simple():
    for gen in ("erdos-renyi", "watts-strogatz", "barabasi-albert"):
        a, b = net(gen, seed=4), net(gen, seed=4)
        assert a.edges == b.edges
        assert all(i < j for i, j in a.edges) and len(set(a.edges)) == len(a.edges)


@settings(max_examples=20)
@given(st.integers(2, 8), st.floats(0.0, 1.0), st.integers(0, 1000))
def test_network_graph_is_segregated_and_mirrors_the_template(n, density, seed):
    un = net(n_units=n, density=density, seed=seed)
    g = un.graph
    assert GraphKind.SG in classify(g)
    for i, j in un.edges:
        assert f"C{i}" in g.parents(f"A{j}") and f"A{j}" in g.parents(f"Y{i}")
        assert f"Y{j}" in g.neighbors(f"Y{i}")
    assert all(len(d) <= 2 for d in districts(g))


# -- data model ---------------------------------------------------------------------


def test_appendix_parameters():
    b, p = DGPParams.bias(), DGPParams.policy()
    assert b.beta_params == p.beta_params == ((1.5, 3.0), (6.0, 2.0), (0.8, 0.8))
    assert (b.gamma, b.tau_AC, b.eta, b.delta) == ((1.0, 0.0, 0.0), 0.0, -3.0, (1.0, 0.0, 0.0))
    assert (b.tau_YA, b.tau_YY, b.tau_YC) == (3.0, 0.1, 0.0)
    assert (p.gamma, p.tau_AC, p.eta, p.delta) == ((0.5, 0.2, 0.25), 0.15, 0.6, (-0.3, 0.4, 0.1))
    assert (p.tau_YA, p.tau_YY, p.tau_YC) == (0.2, 0.3, -0.2)
    assert not p.without_interference().has_interference


def test_beta_parameters_must_be_positive():
    with pytest.raises(ValidationError):
        DGPParams.bias().model_validate({**DGPParams.bias().model_dump(), "beta_params": ((0, 1), (1, 1), (1, 1))})


def test_simulation_is_deterministic_and_shaped():
    un = net()
    a = simulate(un, DGPParams.policy(), 50, seed=3)
    b = simulate(un, DGPParams.policy(), 50, seed=3)
    assert a.C.shape == (50, 10, 3) and a.A.shape == a.Y.shape == (50, 10)
    assert np.array_equal(a.C, b.C) and np.array_equal(a.A, b.A) and np.array_equal(a.Y, b.Y)
    fa, fb = io.StringIO(), io.StringIO()
    a.write_csv(fa)
    b.write_csv(fb)
    assert fa.getvalue() == fb.getvalue()
    header = fa.getvalue().splitlines()[0].split(",")
    assert header == sorted(header) and len(header) == 50


def test_zero_interference_units_match_single_unit_closed_form():
    params = DGPParams.policy().without_interference()
    sample = simulate(net(density=0.6), params, 100_000, seed=1, sweeps=5)
    # Independent single-unit computation: integrate over a large Beta draw.
    rng = np.random.default_rng(12345)
    a, b = np.asarray(params.beta_params).T
    C = rng.beta(a, b, size=(2_000_000, 3))
    pa = expit(C @ np.asarray(params.gamma))
    lin = C @ np.asarray(params.delta)
    ey = np.mean(pa * expit(params.eta + lin) + (1 - pa) * expit(lin))
    assert np.all(np.abs(sample.A.mean(axis=0) - pa.mean()) < 0.01)
    assert np.all(np.abs(sample.Y.mean(axis=0) - ey) < 0.01)


# -- logistic regression ---------------------------------------------------------------


def test_irls_recovers_coefficients():
    rng = np.random.default_rng(0)
    X = np.column_stack([np.ones(100_000), rng.normal(size=(100_000, 2))])
    beta = np.array([-0.5, 1.0, 0.7])
    y = (rng.random(100_000) < expit(X @ beta)).astype(float)
    fit = fit_logistic(X, y)
    assert fit.converged and np.max(np.abs(fit.coef - beta)) < 0.05


def test_intercept_only_on_fair_coin():
    rng = np.random.default_rng(1)
    y = (rng.random(20_000) < 0.5).astype(float)
    assert abs(fit_logistic(np.ones((20_000, 1)), y).coef[0]) < 0.05


def test_degenerate_fits_raise():
    X = np.column_stack([np.ones(6), np.arange(6.0)])
    with pytest.raises(SeparationError):
        fit_logistic(X, np.ones(6))
    with pytest.raises(SeparationError):
        fit_logistic(X, np.array([0, 0, 0, 1, 1, 1.0]))
    with pytest.raises(RankDeficiencyError):
        fit_logistic(np.column_stack([np.ones(6), np.ones(6)]), np.array([0, 1, 0, 1, 0, 1.0]))


# -- policy values --------------------------------------------------------------------


def constant_models(sample: NetworkSample, marginal: dict[str, float], conditional: dict[str, float]) -> NuisanceModels:
    def fit(names, coefs):
        return LogisticFit(np.array([coefs.get(n, 0.0) for n in names]), True, 1, names)

    return NuisanceModels(sample, fit(MARGINAL_NAMES, marginal), fit(CONDITIONAL_NAMES, conditional))


@pytest.fixture(scope="module")
def small_sample():
    return simulate(net(n_units=4, density=0.7), DGPParams.policy(), 400, seed=2)


def test_policy_probability_clips():
    c = np.array([[1.0, 1.0, 1.0], [0.3, 0.6, 0.9]])
    assert np.allclose(policy_probability((1.0, 1.0, 1.0), c), [1.0, 0.6])
    assert np.allclose(policy_probability((-1.0, 0.0, 0.0), c), [0.0, 0.0])


def test_value_without_treatment_effect_ignores_policy(small_sample):
    models = constant_models(small_sample, {"const": 0.3, "C1": 0.5}, {"const": -0.2, "C2": 1.0, "nbr_Y": 0.4})
    values = policy_values(models, 1, PolicyClassSpec().candidates())
    assert np.ptp(values) < 1e-12


def test_deterministic_value_by_hand(small_sample):
    # Outcome probability is expit(2 A_i): the value is the policy mean mixed over expit(2) and 1/2.
    models = constant_models(small_sample, {}, {"A": 2.0})
    k = (1.0, 0.0, 0.0)
    pi = np.clip(small_sample.C[:, 2, 0] / 3.0, 0, 1)
    hand = np.mean(pi * expit(2.0) + (1 - pi) * 0.5)
    assert estimate_policy_value(models, k, 2) == pytest.approx(hand, abs=1e-14)


def test_monte_carlo_value_uses_resampled_rows(small_sample):
    models = constant_models(small_sample, {}, {"A": 2.0})
    exact = estimate_policy_value(models, (1.0, 0.5, 0.0), 0)
    mc = estimate_policy_value(models, (1.0, 0.5, 0.0), 0, mc_draws=50_000, seed=3)
    assert mc == pytest.approx(exact, abs=0.01)
    assert mc == estimate_policy_value(models, (1.0, 0.5, 0.0), 0, mc_draws=50_000, seed=3)


def concentrated_params(**kw) -> DGPParams:
    """Covariates pinned near 1/2 and a treatment coin that ignores them."""
    base = dict(
        beta_params=((2000.0, 2000.0), (2000.0, 2000.0), (2000.0, 2000.0)),
        gamma=(0.0, 0.0, 0.0),
        tau_AC=0.0,
        eta=0.8,
        delta=(0.2, -0.1, 0.3),
        tau_YA=0.5,
        tau_YY=0.0,
        tau_YC=0.1,
    )
    return DGPParams(**{**base, **kw})


def test_matching_policy_reproduces_status_quo():
    sample = simulate(net(n_units=3, density=1.0), concentrated_params(), 20_000, seed=4)
    models = fit_nuisance(sample)
    # Covariates sit at 1/2, so k = (1, 1, 1) treats with probability 1/2, the observed propensity.
    value = estimate_policy_value(models, (1.0, 1.0, 1.0), 0)
    assert value == pytest.approx(status_quo_value(sample, 0), abs=0.01)
    best = optimize_policy(models, PolicyClassSpec(grid=(0.0, 1.0, 2.0)), 0)
    assert best.value >= value


def test_singleton_grid_and_boundary_argmax(small_sample):
    models = constant_models(small_sample, {}, {"A": 2.0})
    assert optimize_policy(models, PolicyClassSpec(grid=(0.5,)), 0).k == (0.5, 0.5, 0.5)
    grid = PolicyClassSpec()
    assert optimize_policy(models, grid, 0).k == (1.0, 1.0, 1.0)
    harmful = constant_models(small_sample, {}, {"A": -2.0})
    assert optimize_policy(harmful, grid, 0).k == (-1.0, -1.0, -1.0)


def test_ties_break_lexicographically(small_sample):
    models = constant_models(small_sample, {}, {})
    assert optimize_policy(models, PolicyClassSpec(grid=(0.3, -0.2, 0.1)), 0).k == (-0.2, -0.2, -0.2)


def test_refining_the_grid_never_lowers_the_optimum(small_sample):
    models = fit_nuisance(small_sample)
    coarse = PolicyClassSpec(grid=tuple(np.linspace(-1, 1, 5)))
    fine = PolicyClassSpec(grid=tuple(np.linspace(-1, 1, 9)))
    assert optimize_policy(models, fine, 1).value >= optimize_policy(models, coarse, 1).value


def true_policy_value(params: DGPParams, un, k, unit: int, n: int = 2_000_000) -> float:
    """Direct Monte Carlo under the data model itself, with outcomes free of outcome coupling."""
    assert params.tau_YY == 0.0
    rng = np.random.default_rng(999)
    a, b = np.asarray(params.beta_params).T
    C = rng.beta(a, b, size=(n, un.n_units, 3))
    m = un.mean_matrix
    A = (rng.random((n, un.n_units)) < expit(C @ np.asarray(params.gamma) + params.tau_AC * (C.sum(axis=2) @ m.T))).astype(float)
    pi = policy_probability(np.asarray(k, dtype=float), C[:, unit, :])
    base = C[:, unit, :] @ np.asarray(params.delta) + m[unit] @ (params.tau_YA * A + params.tau_YC * C.sum(axis=2)).T
    return float(np.mean(pi * expit(params.eta + base) + (1 - pi) * expit(base)))


def test_plug_in_policy_value_is_consistent():
    params = DGPParams.policy().model_copy(update={"tau_YY": 0.0})
    un = net(n_units=3, density=1.0)
    k = (1.0, -0.5, 0.75)
    truth = true_policy_value(params, un, k, 0)
    errors = []
    for n in (1_000, 10_000, 100_000):
        reps = [abs(estimate_policy_value(fit_nuisance(simulate(un, params, n, seed=s)), k, 0) - truth) for s in range(4)]
        errors.append(float(np.mean(reps)))
    assert errors[0] > errors[1] > errors[2] and errors[2] < 0.005


# -- studies -------------------------------------------------------------------------------


def test_format_increase():
    assert format_increase(0.05) == "5.0% increase"
    assert format_increase(0.1234) == "12.3% increase"


def test_single_replicate_bootstrap_is_degenerate(small_sample):
    s = bootstrap(small_sample, lambda d: float(d.Y.mean()), 1, seed=0)
    assert s.ci_low == s.ci_high == s.estimate == pytest.approx(small_sample.Y.mean())


def test_threaded_bootstrap_matches_serial(small_sample):
    stat = lambda d: float(d.Y.mean() - d.A.mean())  # noqa: E731
    serial = bootstrap(small_sample, stat, 40, seed=5, threads=1)
    threaded = bootstrap(small_sample, stat, 40, seed=5, threads=4)
    assert serial == threaded and serial.ci_low < serial.estimate < serial.ci_high


def test_failed_refits_are_counted(small_sample):
    first = small_sample.C[0, 0, 0]

    def stat(d):
        if d.C[0, 0, 0] != first:
            raise SeparationError("forced")
        return 0.0

    s = bootstrap(small_sample, stat, 30, seed=1)
    assert s.failures == 30 - int((~np.isnan(s.draws)).sum()) and s.failures > 0
    assert s.ci_low == s.ci_high == 0.0


def test_zero_effect_model_shows_no_improvement():
    params = concentrated_params(eta=0.0, tau_YA=0.0)
    sample = simulate(net(n_units=3, density=1.0), params, 5_000, seed=6)
    config = ExperimentConfig(kind="policy", n_units=3, units=(0, 1, 2))
    assert abs(improvement_statistic(sample, config)) < 0.02


def test_bias_statistic_near_zero_without_interference():
    sample = simulate(net(density=0.6), DGPParams.bias().without_interference(), 5000, seed=2)
    assert abs(bias_statistic(sample)) < 0.02


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(kind="bias", densities=(1.5,))
    with pytest.raises(ValidationError):
        ExperimentConfig(kind="bias", units=(10,))
    with pytest.raises(ValidationError):
        ExperimentConfig(kind="bias", surprise=1)
    with pytest.raises(ValidationError):
        PolicyClassSpec(grid=())
    assert ExperimentConfig(kind="policy", zero_interference=True).resolved_params.has_interference is False


def test_small_study_is_byte_reproducible(tmp_path):
    config = ExperimentConfig(kind="policy", densities=(0.5,), generators=("erdos-renyi", "barabasi-albert"),
                              n_units=4, n_samples=150, n_bootstrap=5, sweeps=10, seed=3)
    a = run_experiment(config).write(tmp_path / "a")
    b = run_experiment(config).write(tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    assert [p.name for p in a] == ["policy_summary.csv", "policy_detail.json", "policy_plot.json"]
