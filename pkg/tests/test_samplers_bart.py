import numpy as np
import pytest
from sklearn.base import clone

from otregimes.errors import SingleClassError
from otregimes.samplers import BartConfig, BartProbitSampler, fit_probit_bart
from otregimes.samplers.bart import MOVE_PROBS, _BartChain

from oracles import probit_intercept_gibbs


def _constant_design(n):
    # A single constant covariate: every candidate split rule produces an
    # empty child, so grow proposals are always rejected and the sum of
    # stumps reduces to one Gaussian intercept with prior variance
    # num_trees * leaf_sd^2.
    return np.zeros((n, 1))


class TestStumpReduction:
    def test_matches_intercept_probit_gibbs(self):
        rng = np.random.default_rng(7)
        n = 120
        y = (rng.random(n) < 0.7).astype(float)
        cfg = BartConfig(draws=3000, burn_in=500, seed=11)
        probs = fit_probit_bart(y, _constant_design(n), cfg)
        assert probs.shape == (3000, n)
        # With identical covariates every subject shares one probability.
        np.testing.assert_array_equal(probs, probs[:, [0]] * np.ones((1, n)))
        prior_sd = np.sqrt(cfg.num_trees) * cfg.resolved_leaf_sd
        oracle = probit_intercept_gibbs(y, prior_sd=prior_sd, draws=6000,
                                        burn_in=1000, seed=3)
        assert abs(probs[:, 0].mean() - oracle.mean()) < 0.02
        for q in (0.1, 0.5, 0.9):
            assert abs(np.quantile(probs[:, 0], q)
                       - np.quantile(oracle, q)) < 0.03

    def test_grow_never_accepted_on_constant_covariate(self):
        rng = np.random.default_rng(0)
        n = 60
        y = (rng.random(n) < 0.5).astype(float)
        cfg = BartConfig(draws=50, burn_in=50, seed=5)
        chain = _BartChain(_constant_design(n), y, _constant_design(n), cfg,
                           np.random.default_rng(cfg.seed))
        chain.run()
        assert chain.accepted["grow"] == 0


class TestLeafScale:
    def test_default_forest_prior_variance(self):
        cfg = BartConfig(num_trees=50, k=2.0)
        total_sd = np.sqrt(cfg.num_trees) * cfg.resolved_leaf_sd
        np.testing.assert_allclose(total_sd, 3.0 / 2.0, atol=1e-12)

    def test_explicit_leaf_sd_wins(self):
        cfg = BartConfig(leaf_sd=0.31)
        assert cfg.resolved_leaf_sd == 0.31


class TestChainInvariants:
    def test_latent_signs_track_outcomes(self):
        rng = np.random.default_rng(4)
        n = 80
        X = rng.uniform(-1.0, 1.0, (n, 2))
        y = (rng.random(n) < 0.4).astype(float)
        cfg = BartConfig(draws=1, burn_in=0, num_trees=10, seed=2)
        chain = _BartChain(X, y, X, cfg, np.random.default_rng(cfg.seed))
        for _ in range(30):
            chain._draw_latents()
            assert np.all(chain.z[y == 1.0] > 0.0)
            assert np.all(chain.z[y == 0.0] <= 0.0)
            for tree in chain.trees:
                chain._update_tree(tree)
            # The cached fit must stay in sync with per-tree contributions.
            np.testing.assert_allclose(
                chain.f_tr, sum(t.g_tr for t in chain.trees), atol=1e-10)

    def test_every_sweep_proposes_one_move_per_tree(self):
        rng = np.random.default_rng(1)
        n = 50
        X = rng.uniform(-1.0, 1.0, (n, 1))
        y = (rng.random(n) < 0.5).astype(float)
        cfg = BartConfig(draws=20, burn_in=10, num_trees=8, seed=0)
        chain = _BartChain(X, y, X, cfg, np.random.default_rng(cfg.seed))
        chain.run()
        sweeps = cfg.burn_in + cfg.draws * cfg.thin
        assert sum(chain.proposed.values()) == sweeps * cfg.num_trees
        assert set(chain.proposed) == set(MOVE_PROBS)
        assert all(chain.accepted[m] <= chain.proposed[m] for m in MOVE_PROBS)


class TestFitProbitBart:
    def test_recovers_step_function(self):
        rng = np.random.default_rng(12)
        n = 300
        X = rng.uniform(-1.0, 1.0, (n, 1))
        y = (rng.random(n) < np.where(X[:, 0] > 0.0, 0.9, 0.1)).astype(float)
        grid = np.array([[-0.6], [0.6]])
        cfg = BartConfig(draws=600, burn_in=300, seed=1)
        probs = fit_probit_bart(y, X, cfg, X_eval=grid)
        means = probs.mean(axis=0)
        assert means[0] < 0.3
        assert means[1] > 0.7

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(6)
        X = rng.uniform(-1.0, 1.0, (40, 1))
        y = (rng.random(40) < 0.5).astype(float)
        cfg = BartConfig(draws=30, burn_in=20, num_trees=10, seed=21)
        a = fit_probit_bart(y, X, cfg)
        b = fit_probit_bart(y, X, cfg)
        np.testing.assert_array_equal(a, b)

    def test_single_class_rejected(self):
        X = np.zeros((10, 1))
        with pytest.raises(SingleClassError):
            fit_probit_bart(np.ones(10), X, BartConfig(draws=5, burn_in=0))

    def test_eval_column_mismatch_rejected(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(20, 2))
        y = np.array([0.0, 1.0] * 10)
        with pytest.raises(ValueError):
            fit_probit_bart(y, X, BartConfig(draws=5, burn_in=0),
                            X_eval=np.zeros((4, 3)))

    def test_draws_stay_in_open_interval(self):
        rng = np.random.default_rng(3)
        X = rng.uniform(-1.0, 1.0, (60, 1))
        y = (rng.random(60) < 0.5).astype(float)
        probs = fit_probit_bart(y, X, BartConfig(draws=50, burn_in=30, seed=0))
        assert np.all((probs > 0.0) & (probs < 1.0))


class TestEstimatorApi:
    def test_get_set_params_and_clone(self):
        est = BartProbitSampler(num_trees=25, draws=100, seed=4)
        params = est.get_params()
        assert params["num_trees"] == 25 and params["draws"] == 100
        twin = clone(est)
        assert twin.get_params() == params
        est.set_params(k=3.0)
        assert est.get_params()["k"] == 3.0

    def test_fit_exposes_probability_draws(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(-1.0, 1.0, (50, 1))
        y = (rng.random(50) < 0.5).astype(float)
        est = BartProbitSampler(draws=40, burn_in=20, num_trees=10,
                                seed=0).fit(X, y)
        assert est.prob_draws_.shape == (40, 50)
        proba = est.predict_proba()
        assert proba.shape == (50, 2)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
        with pytest.raises(ValueError):
            est.predict_proba(X)
