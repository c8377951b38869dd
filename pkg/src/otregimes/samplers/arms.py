"""Fit one outcome model per treatment arm and pool the draws.

Under ignorable treatment assignment the likelihood factorizes across arms, so
each arm's success probability is fit on that arm's subjects only. Both fitted
posteriors are then evaluated at every subject in the data set, giving aligned
draw matrices for P(Y(0)=1 | x) and P(Y(1)=1 | x).
"""

import dataclasses

import numpy as np

from .._rng import child_seed
from .base import BartConfig, DataSet, McmcConfig, PosteriorDraws
from .bart import fit_probit_bart
from .logistic import fit_logistic_metropolis, probability_draws


def _intercept_design(X):
    return np.column_stack([np.ones(X.shape[0]), X])


def fit_arm_models(data: DataSet, cfg, design=None) -> PosteriorDraws:
    """Fit the outcome model separately in each arm of `data`.

    The sampler is chosen by the config type: a plain McmcConfig runs the
    random-walk Metropolis logistic sampler (with `design` mapping covariates
    to the regression design matrix; identity with an intercept prepended when
    omitted), while a BartConfig runs the probit sum-of-trees sampler on the
    raw covariates. Each arm gets an independent seed derived from cfg.seed,
    and both fitted models are evaluated at all subjects.
    """
    use_bart = isinstance(cfg, BartConfig)
    if not use_bart and not isinstance(cfg, McmcConfig):
        raise TypeError(f"unsupported config type: {type(cfg).__name__}")
    if use_bart:
        X_all = data.covariates
    else:
        if design is None:
            design = _intercept_design
        X_all = design(data.covariates)

    prob = {}
    rates = []
    for arm in (0, 1):
        rows = data.arm_rows(arm)
        arm_cfg = dataclasses.replace(cfg, seed=child_seed(cfg.seed, arm))
        y_arm = data.outcome[rows]
        if use_bart:
            prob[arm] = fit_probit_bart(y_arm, data.covariates[rows], arm_cfg,
                                        X_eval=X_all)
        else:
            result = fit_logistic_metropolis(y_arm, X_all[rows], arm_cfg)
            prob[arm] = probability_draws(result.coef_draws, X_all)
            rates.append(result.acceptance_rate)

    return PosteriorDraws(prob0=prob[0], prob1=prob[1],
                          sampler="bart-probit" if use_bart else "logistic-metropolis",
                          config=cfg, acceptance_rates=tuple(rates) or None)
