"""Shared sampler types: data container, MCMC configs, posterior draw matrices."""

import math
from dataclasses import dataclass, field

import numpy as np

from .._validation import as_binary_vector, as_float_matrix, check_same_length
from ..errors import EmptyArmError

# Posterior probability draws are clipped inward by this margin so that every
# emitted probability is strictly inside (0, 1).
PROB_CLIP = 1e-12


@dataclass(frozen=True)
class DataSet:
    """Observed data: covariates X (n x p), treatment W and outcome Y(W) in {0,1}."""

    covariates: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray

    def __post_init__(self):
        X = as_float_matrix(self.covariates, "covariates")
        w = as_binary_vector(self.treatment, "treatment")
        y = as_binary_vector(self.outcome, "outcome")
        check_same_length(X.shape[0], (w, "treatment"), (y, "outcome"))
        object.__setattr__(self, "covariates", X)
        object.__setattr__(self, "treatment", w)
        object.__setattr__(self, "outcome", y)

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]

    def arm_rows(self, arm: int) -> np.ndarray:
        """Row indices of subjects who received the given treatment arm."""
        rows = np.flatnonzero(self.treatment == arm)
        if rows.size == 0:
            raise EmptyArmError(f"treatment arm {arm} has no observations")
        return rows


@dataclass(frozen=True)
class McmcConfig:
    """Chain length settings: kept draws, burn-in, thinning, and the seed."""

    draws: int = 5000
    burn_in: int = 1000
    thin: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.draws < 1:
            raise ValueError("draws must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class BartConfig(McmcConfig):
    """Sum-of-trees sampler settings on top of the chain-length settings.

    The prior that a node at depth delta splits is kappa*(1+delta)**(-eta).
    Leaf means have prior N(0, leaf_sd**2); leaf_sd=None derives the default
    3/(k*sqrt(num_trees)), which keeps the prior standard deviation of the
    summed latent function at 3/k regardless of the number of trees.
    """

    num_trees: int = 50
    kappa: float = 0.95
    eta: float = 2.0
    k: float = 2.0
    leaf_sd: float | None = None
    n_cutpoints: int = 100

    def __post_init__(self):
        super().__post_init__()
        if self.num_trees < 1:
            raise ValueError("num_trees must be >= 1")
        if not 0.0 < self.kappa < 1.0:
            raise ValueError("kappa must lie in (0, 1)")
        if self.eta < 0.0:
            raise ValueError("eta must be >= 0")
        if self.k <= 0.0:
            raise ValueError("k must be > 0")
        if self.leaf_sd is not None and self.leaf_sd <= 0.0:
            raise ValueError("leaf_sd must be > 0")
        if self.n_cutpoints < 1:
            raise ValueError("n_cutpoints must be >= 1")

    @property
    def resolved_leaf_sd(self) -> float:
        if self.leaf_sd is not None:
            return float(self.leaf_sd)
        return 3.0 / (self.k * math.sqrt(self.num_trees))


@dataclass(frozen=True)
class PosteriorDraws:
    """Per-subject posterior draws of the marginal success probabilities.

    prob0[d, i] is draw d of P(Y(0)=1 | x_i) and prob1[d, i] of P(Y(1)=1 | x_i),
    both evaluated at every subject, including the arm the subject did not
    receive. Entries are strictly inside (0, 1).
    """

    prob0: np.ndarray
    prob1: np.ndarray
    sampler: str = ""
    config: McmcConfig = field(default_factory=McmcConfig)
    acceptance_rates: tuple | None = None

    def __post_init__(self):
        p0 = np.asarray(self.prob0, dtype=float)
        p1 = np.asarray(self.prob1, dtype=float)
        if p0.ndim != 2 or p0.shape != p1.shape:
            raise ValueError(
                f"prob0/prob1 must be equally shaped 2-d matrices, "
                f"got {p0.shape} and {p1.shape}")
        for name, arr in (("prob0", p0), ("prob1", p1)):
            if not np.all((arr > 0.0) & (arr < 1.0)):
                raise ValueError(f"{name} entries must lie strictly in (0, 1)")
        object.__setattr__(self, "prob0", p0)
        object.__setattr__(self, "prob1", p1)

    @property
    def n_draws(self) -> int:
        return self.prob0.shape[0]

    @property
    def n_subjects(self) -> int:
        return self.prob0.shape[1]


def clip_probabilities(p: np.ndarray) -> np.ndarray:
    return np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
