"""Random-walk Metropolis sampler for Bayesian logistic regression.

The posterior is the Bernoulli-logit likelihood under an improper uniform
prior on the coefficients. The proposal is a Gaussian random walk with
covariance (2.38^2 / d) * H^{-1}, where H is the negative log-posterior
Hessian at the mode found by Newton iteration; this is the standard
optimal-scaling choice and requires no hand tuning.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator

from .._validation import as_binary_vector, as_float_matrix, check_same_length
from ..errors import RankDeficientDesignError, SeparationWarning
from .base import McmcConfig, clip_probabilities

# Newton iterates whose coefficient norm exceeds this are treated as evidence
# of (quasi-)separation: under a flat prior the posterior then has an improper
# direction, so the mode is capped at this norm and a warning is emitted
# instead of failing the whole fit.
SEPARATION_NORM_CAP = 50.0


@dataclass(frozen=True)
class MetropolisResult:
    """Coefficient draws plus chain diagnostics."""

    coef_draws: np.ndarray          # (draws, d)
    acceptance_rate: float
    map_estimate: np.ndarray        # (d,)
    separated: bool


def _log_posterior(beta, X, y):
    # Flat prior: log posterior = log likelihood up to a constant.
    eta = X @ beta
    return float(y @ eta - np.logaddexp(0.0, eta).sum())


def _newton_map(X, y, max_iter=100, tol=1e-10):
    """Posterior mode by Newton iteration; norm-capped under separation."""
    n, d = X.shape
    beta = np.zeros(d)
    separated = False
    for _ in range(max_iter):
        p = expit(X @ beta)
        weights = p * (1.0 - p)
        grad = X.T @ (y - p)
        hess = (X * weights[:, None]).T @ X
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            separated = True
            break
        beta_new = beta + step
        norm = float(np.linalg.norm(beta_new))
        if norm > SEPARATION_NORM_CAP:
            beta = beta_new * (SEPARATION_NORM_CAP / norm)
            separated = True
            break
        beta = beta_new
        if float(np.max(np.abs(step))) < tol:
            break
    if separated:
        warnings.warn(
            "separation detected: MAP coefficient norm capped at "
            f"{SEPARATION_NORM_CAP}; posterior draws explore a capped mode",
            SeparationWarning, stacklevel=3)
    return beta, separated


def _proposal_chol(X, beta, d):
    p = expit(X @ beta)
    # The floor keeps the proposal covariance finite when separation pushes
    # fitted probabilities against 0 or 1.
    weights = np.clip(p * (1.0 - p), 1e-10, None)
    hess = (X * weights[:, None]).T @ X
    cov = (2.38 ** 2 / d) * np.linalg.inv(hess)
    return np.linalg.cholesky(cov)


def fit_logistic_metropolis(y, X_design, cfg: McmcConfig) -> MetropolisResult:
    """Sample coefficient draws from the flat-prior logistic posterior.

    X_design is used exactly as passed; callers supply any basis expansion
    (see :func:`cubic_design`). Requires full column rank and more rows than
    columns.
    """
    X = as_float_matrix(X_design, "X_design")
    y = as_binary_vector(y, "y")
    n, d = X.shape
    check_same_length(n, (y, "y"))
    if d >= n:
        raise ValueError(f"design must have fewer columns ({d}) than rows ({n})")
    if np.linalg.matrix_rank(X) < d:
        raise RankDeficientDesignError(
            f"design matrix has rank < {d}; drop collinear columns")

    beta_map, separated = _newton_map(X, y)
    chol = _proposal_chol(X, beta_map, d)

    rng = np.random.default_rng(cfg.seed)
    total = cfg.burn_in + cfg.draws * cfg.thin
    steps = rng.standard_normal((total, d)) @ chol.T
    log_u = np.log(rng.random(total))

    beta = beta_map.copy()
    log_post = _log_posterior(beta, X, y)
    out = np.empty((cfg.draws, d))
    kept = 0
    accepted = 0
    for i in range(total):
        proposal = beta + steps[i]
        log_post_prop = _log_posterior(proposal, X, y)
        if log_u[i] < log_post_prop - log_post:
            beta = proposal
            log_post = log_post_prop
            accepted += 1
        offset = i - cfg.burn_in
        if offset >= 0 and offset % cfg.thin == 0:
            out[kept] = beta
            kept += 1
    return MetropolisResult(coef_draws=out,
                            acceptance_rate=accepted / total,
                            map_estimate=beta_map,
                            separated=separated)


def probability_draws(coef_draws, X_design) -> np.ndarray:
    """Evaluate coefficient draws as success probabilities, (draws, n_eval)."""
    X = as_float_matrix(X_design, "X_design")
    return clip_probabilities(expit(X @ np.asarray(coef_draws).T).T)


def cubic_design(X, intercept=True) -> np.ndarray:
    """Design matrix with columns (x, x^2, x^3) per covariate.

    With intercept=True a leading column of ones is prepended. No
    interactions; the expansion is applied per covariate.
    """
    X = as_float_matrix(X, "X")
    columns = [np.ones(X.shape[0])] if intercept else []
    for j in range(X.shape[1]):
        x = X[:, j]
        columns.extend([x, x ** 2, x ** 3])
    return np.column_stack(columns)


class LogisticMetropolisSampler(BaseEstimator):
    """Estimator wrapper around :func:`fit_logistic_metropolis`.

    Parameters mirror McmcConfig; `design` is an optional callable mapping raw
    covariates to the design matrix (the sampler never invents features).
    After fit: `coef_draws_`, `acceptance_rate_`, `map_coef_`, `separated_`,
    and `prob_draws_` (success-probability draws at X_eval, default X).
    """

    def __init__(self, draws=5000, burn_in=1000, thin=1, seed=0, design=None):
        self.draws = draws
        self.burn_in = burn_in
        self.thin = thin
        self.seed = seed
        self.design = design

    def _design(self, X):
        X = as_float_matrix(X, "X")
        return X if self.design is None else as_float_matrix(self.design(X), "design(X)")

    def _config(self):
        return McmcConfig(draws=self.draws, burn_in=self.burn_in,
                          thin=self.thin, seed=self.seed)

    def fit(self, X, y, X_eval=None):
        result = fit_logistic_metropolis(y, self._design(X), self._config())
        self.coef_draws_ = result.coef_draws
        self.acceptance_rate_ = result.acceptance_rate
        self.map_coef_ = result.map_estimate
        self.separated_ = result.separated
        self.prob_draws_ = self.predict_proba_draws(X if X_eval is None else X_eval)
        return self

    def predict_proba_draws(self, X):
        return probability_draws(self.coef_draws_, self._design(X))

    def predict_proba(self, X):
        mean = self.predict_proba_draws(X).mean(axis=0)
        return np.column_stack([1.0 - mean, mean])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] > 0.5).astype(int)
