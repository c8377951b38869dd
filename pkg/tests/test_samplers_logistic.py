import numpy as np
import pytest
from scipy.special import expit
from sklearn.base import clone
from sklearn.linear_model import LogisticRegression

from otregimes.errors import RankDeficientDesignError, SeparationWarning
from otregimes.samplers import McmcConfig, cubic_design, probability_draws
from otregimes.samplers.logistic import (
    LogisticMetropolisSampler,
    _newton_map,
    fit_logistic_metropolis,
)


def _simulate(n, beta, seed):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.uniform(-1.0, 1.0, (n, len(beta) - 1))])
    y = (rng.random(n) < expit(X @ np.asarray(beta))).astype(float)
    return X, y


class TestNewtonMap:
    def test_matches_sklearn_mle(self):
        # Flat prior: the posterior mode is the maximum-likelihood estimate.
        X, y = _simulate(400, [0.3, 1.2, -0.8], seed=0)
        beta_map, separated = _newton_map(X, y)
        assert not separated
        oracle = LogisticRegression(penalty=None, fit_intercept=False,
                                    tol=1e-10, max_iter=1000).fit(X, y)
        np.testing.assert_allclose(beta_map, oracle.coef_.ravel(), atol=1e-6)

    def test_separation_caps_norm_and_warns(self):
        x = np.linspace(-1.0, 1.0, 60)
        X = np.column_stack([np.ones(60), x])
        y = (x > 0).astype(float)
        with pytest.warns(SeparationWarning):
            beta_map, separated = _newton_map(X, y)
        assert separated
        assert np.linalg.norm(beta_map) <= 50.0 + 1e-9


class TestFitLogisticMetropolis:
    def test_posterior_concentrates_on_mle(self):
        X, y = _simulate(600, [0.4, 1.0], seed=1)
        cfg = McmcConfig(draws=4000, burn_in=1000, seed=3)
        result = fit_logistic_metropolis(y, X, cfg)
        assert result.coef_draws.shape == (4000, 2)
        oracle = LogisticRegression(penalty=None, fit_intercept=False,
                                    tol=1e-10, max_iter=1000).fit(X, y)
        mle = oracle.coef_.ravel()
        # Asymptotic posterior sd from the inverse observed information.
        p = expit(X @ mle)
        info = (X * (p * (1 - p))[:, None]).T @ X
        sd = np.sqrt(np.diag(np.linalg.inv(info)))
        post_mean = result.coef_draws.mean(axis=0)
        post_sd = result.coef_draws.std(axis=0)
        np.testing.assert_array_less(np.abs(post_mean - mle), 0.2 * sd)
        np.testing.assert_allclose(post_sd, sd, rtol=0.25)

    def test_acceptance_rate_in_working_range(self):
        X, y = _simulate(300, [0.0, 0.8, -0.5], seed=2)
        result = fit_logistic_metropolis(y, X, McmcConfig(draws=2000,
                                                          burn_in=500, seed=0))
        assert 0.1 < result.acceptance_rate < 0.7

    def test_deterministic_given_seed(self):
        X, y = _simulate(120, [0.2, 0.5], seed=3)
        cfg = McmcConfig(draws=200, burn_in=100, seed=9)
        a = fit_logistic_metropolis(y, X, cfg).coef_draws
        b = fit_logistic_metropolis(y, X, cfg).coef_draws
        np.testing.assert_array_equal(a, b)
        c = fit_logistic_metropolis(y, X, McmcConfig(draws=200, burn_in=100,
                                                     seed=10)).coef_draws
        assert not np.array_equal(a, c)

    def test_thinning_keeps_requested_draws(self):
        X, y = _simulate(150, [0.1, 0.4], seed=4)
        cfg = McmcConfig(draws=100, burn_in=50, thin=5, seed=1)
        result = fit_logistic_metropolis(y, X, cfg)
        assert result.coef_draws.shape == (100, 2)

    def test_rank_deficient_design_rejected(self):
        X, y = _simulate(100, [0.2, 0.5], seed=5)
        X_bad = np.column_stack([X, X[:, 1]])
        with pytest.raises(RankDeficientDesignError):
            fit_logistic_metropolis(y, X_bad, McmcConfig(draws=10, burn_in=0))

    def test_more_columns_than_rows_rejected(self):
        X = np.ones((3, 4))
        y = np.array([0.0, 1.0, 0.0])
        with pytest.raises(ValueError):
            fit_logistic_metropolis(y, X, McmcConfig(draws=10, burn_in=0))

    def test_separated_data_still_yields_draws(self):
        x = np.linspace(-1.0, 1.0, 80)
        X = np.column_stack([np.ones(80), x])
        y = (x > 0).astype(float)
        with pytest.warns(SeparationWarning):
            result = fit_logistic_metropolis(y, X, McmcConfig(draws=300,
                                                              burn_in=100,
                                                              seed=0))
        assert result.separated
        probs = probability_draws(result.coef_draws, X)
        assert np.all((probs > 0.0) & (probs < 1.0))


class TestDesignsAndProbabilities:
    def test_cubic_design_with_intercept(self):
        X = np.array([[2.0], [-1.0]])
        design = cubic_design(X, intercept=True)
        np.testing.assert_allclose(design, [[1.0, 2.0, 4.0, 8.0],
                                            [1.0, -1.0, 1.0, -1.0]])

    def test_cubic_design_without_intercept_stacks_covariates(self):
        X = np.array([[1.0, 2.0]])
        design = cubic_design(X, intercept=False)
        np.testing.assert_allclose(design, [[1.0, 1.0, 1.0, 2.0, 4.0, 8.0]])

    def test_probability_draws_shape_and_range(self):
        coef = np.array([[0.0, 1.0], [0.5, -1.0], [2.0, 0.0]])
        X_eval = np.array([[1.0, 0.3], [1.0, -0.7]])
        probs = probability_draws(coef, X_eval)
        assert probs.shape == (3, 2)
        assert np.all((probs > 0.0) & (probs < 1.0))
        np.testing.assert_allclose(probs[0, 0], expit(0.3), atol=1e-12)


class TestEstimatorApi:
    def test_get_set_params_and_clone(self):
        est = LogisticMetropolisSampler(draws=50, burn_in=20, seed=5)
        params = est.get_params()
        assert params["draws"] == 50 and params["seed"] == 5
        twin = clone(est)
        assert twin.get_params() == params
        est.set_params(draws=75)
        assert est.get_params()["draws"] == 75

    def test_fit_predict(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(-1.0, 1.0, (200, 1))
        y = (rng.random(200) < expit(0.3 + 1.5 * X[:, 0])).astype(float)
        est = LogisticMetropolisSampler(
            draws=400, burn_in=200, seed=2,
            design=lambda Z: np.column_stack([np.ones(len(Z)), Z]),
        ).fit(X, y)
        assert est.coef_draws_.shape == (400, 2)
        proba = est.predict_proba(X)
        assert proba.shape == (200, 2)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
        labels = est.predict(X)
        assert set(np.unique(labels)) <= {0, 1}
