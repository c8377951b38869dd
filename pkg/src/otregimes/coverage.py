"""Monte Carlo verifier for the selected-interval coverage guarantees.

Setting: (X, Y) is bivariate normal with means (mu, nu), standard deviations
(sigma, tau), correlation rho, and known variances. The interval reported is
the fixed-width (1-alpha) interval of whichever coordinate has the smaller
observed value (ties take X), and coverage is measured for that coordinate's
own mean. Selecting after looking at the data breaks the nominal level; the
guarantees verified here are:

  - a universal floor of 1 - 2*alpha;
  - exactly 1 - alpha when the means or the variances are equal;
  - strictly between 1 - alpha and 1 - alpha/2 when (mu - nu) and
    (sigma^2 - tau^2) have opposite signs;
  - strictly between 1 - 3*alpha/2 and 1 - alpha when they share a sign.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._rng import rng_from


@dataclass(frozen=True)
class CoverageConfig:
    """True means, known standard deviations, correlation, level, and run size."""

    mu: float
    nu: float
    sigma: float
    tau: float
    rho: float = 0.0
    alpha: float = 0.05
    replications: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma > 0.0 and self.tau > 0.0):
            raise ValueError("sigma and tau must be > 0")
        if not abs(self.rho) < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


@dataclass(frozen=True)
class CoverageResult:
    estimate: float
    mc_se: float
    freq_x_selected: float
    replications: int


@dataclass(frozen=True)
class Bracket:
    """Predicted coverage range with the universal floor.

    kind is "exact" (coverage equals lower == upper), "above-nominal"
    (open interval above 1-alpha), or "below-nominal" (open interval below
    1-alpha). floor = 1 - 2*alpha holds in every case.
    """

    lower: float
    upper: float
    kind: str
    floor: float

    def contains(self, estimate: float, slack: float = 0.0) -> bool:
        if estimate < self.floor - slack:
            return False
        return self.lower - slack <= estimate <= self.upper + slack


@dataclass(frozen=True)
class SweepRow:
    config: CoverageConfig
    result: CoverageResult
    bracket: Bracket
    within_bracket: bool


def coverage_experiment(cfg: CoverageConfig) -> CoverageResult:
    """Estimate the selected-interval coverage by simulation.

    Draws `replications` correlated pairs, selects the coordinate with the
    smaller observed value, and counts how often the fixed-width interval
    around the selected coordinate contains that coordinate's true mean.
    """
    rng = rng_from(cfg.seed)
    z = rng.standard_normal((cfg.replications, 2))
    x = cfg.mu + cfg.sigma * z[:, 0]
    y = cfg.nu + cfg.tau * (cfg.rho * z[:, 0]
                            + math.sqrt(1.0 - cfg.rho ** 2) * z[:, 1])
    xi = ndtri(1.0 - cfg.alpha / 2.0)

    pick_x = x <= y
    center = np.where(pick_x, x, y)
    target = np.where(pick_x, cfg.mu, cfg.nu)
    half_width = np.where(pick_x, cfg.sigma, cfg.tau) * xi
    hits = np.abs(center - target) <= half_width

    estimate = float(hits.mean())
    mc_se = math.sqrt(max(estimate * (1.0 - estimate), 1e-12) / cfg.replications)
    return CoverageResult(estimate=estimate, mc_se=mc_se,
                          freq_x_selected=float(pick_x.mean()),
                          replications=cfg.replications)


def theorem_bracket(cfg: CoverageConfig) -> Bracket:
    """Predicted coverage bracket for the config's mean/variance geometry."""
    alpha = cfg.alpha
    floor = 1.0 - 2.0 * alpha
    if cfg.mu == cfg.nu or cfg.sigma == cfg.tau:
        level = 1.0 - alpha
        return Bracket(lower=level, upper=level, kind="exact", floor=floor)
    mean_sign = math.copysign(1.0, cfg.mu - cfg.nu)
    sd_sign = math.copysign(1.0, cfg.sigma - cfg.tau)
    if mean_sign != sd_sign:
        return Bracket(lower=1.0 - alpha, upper=1.0 - alpha / 2.0,
                       kind="above-nominal", floor=floor)
    return Bracket(lower=1.0 - 1.5 * alpha, upper=1.0 - alpha,
                   kind="below-nominal", floor=floor)


def grid_sweep(configs, se_multiplier: float = 4.0) -> list:
    """coverage_experiment + theorem_bracket per config.

    Each estimate is checked against its bracket (and the universal floor)
    with a slack of `se_multiplier` Monte Carlo standard errors.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("the config grid is empty")
    rows = []
    for cfg in configs:
        result = coverage_experiment(cfg)
        bracket = theorem_bracket(cfg)
        within = bracket.contains(result.estimate,
                                  slack=se_multiplier * result.mc_se)
        rows.append(SweepRow(config=cfg, result=result, bracket=bracket,
                             within_bracket=within))
    return rows
