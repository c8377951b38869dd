from .arms import fit_arm_models
from .bart import BartProbitSampler, fit_probit_bart
from .base import BartConfig, DataSet, McmcConfig, PosteriorDraws
from .logistic import (
    LogisticMetropolisSampler,
    cubic_design,
    fit_logistic_metropolis,
    probability_draws,
)

__all__ = [
    "BartConfig",
    "BartProbitSampler",
    "DataSet",
    "LogisticMetropolisSampler",
    "McmcConfig",
    "PosteriorDraws",
    "cubic_design",
    "fit_arm_models",
    "fit_logistic_metropolis",
    "fit_probit_bart",
    "probability_draws",
]
