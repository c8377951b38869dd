"""Decision layer: posterior draws in, decisions and uncertainty reports out.

Given per-subject posterior draws of the two marginal success probabilities,
this module forms the loss-contrast draws Delta_L = mu_L(1) - mu_L(0) at a
chosen odds ratio, decides treatment by the posterior-mean rule (and the
posterior-median rule as a companion), attaches equal-tailed credible
intervals for the expected loss and expected outcome under the selected
decision, and scans the odds-ratio bounds to flag decisions that the
non-identified association could overturn.
"""

from dataclasses import dataclass

import numpy as np

from ._rng import rng_from
from .core import (
    LossSpec,
    MarginalPair,
    PhiSpec,
    expected_loss,
    loss_contrast,
    theta_from_marginals,
)
from .samplers.base import PosteriorDraws


@dataclass(frozen=True)
class CredibleInterval:
    """Equal-tailed posterior interval [lower, upper] at the given level."""

    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not (self.lower <= self.upper):
            raise ValueError("interval endpoints must satisfy lower <= upper")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value) -> bool:
        return bool(self.lower <= value <= self.upper)


@dataclass(frozen=True)
class DecisionRecord:
    """Per-subject analysis output.

    a1 is the posterior-mean decision and a2 the posterior-median decision
    (treat iff rho > 0.5, where rho is the posterior probability that treating
    does not increase expected loss). The functional summaries condition on
    the selected a1; the by-arm means keep both fixed decisions so cohort
    summaries can also evaluate the observed assignment. `sensitive` marks
    subjects whose decision changes somewhere across the odds-ratio scan.
    """

    index: int
    a1: int
    a2: int
    rho: float
    sensitive: bool
    mu_loss_mean: float
    mu_outcome_mean: float
    loss_interval: CredibleInterval
    outcome_interval: CredibleInterval
    a1_at_lower: int
    a1_at_upper: int
    rho_at_lower: float
    rho_at_upper: float
    mu_loss_mean_by_arm: tuple
    mu_outcome_mean_by_arm: tuple

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.a2 != int(self.rho > 0.5):
            raise ValueError("a2 must equal 1 exactly when rho > 0.5")


def _aligned_draws(prob0_col, prob1_col):
    p0 = np.asarray(prob0_col, dtype=float)
    p1 = np.asarray(prob1_col, dtype=float)
    if p0.shape != p1.shape:
        raise ValueError(
            f"draw vectors must have equal shape, got {p0.shape} and {p1.shape}")
    if p0.size == 0:
        raise ValueError("draw vectors must be non-empty")
    return p0, p1


def contrast_draws(prob0_col, prob1_col, phi, spec: LossSpec):
    """Per-draw loss contrast mu_L(1) - mu_L(0) at odds ratio phi.

    Each aligned pair of probability draws is inverted to the joint cell
    probabilities at phi and scored by the loss table. Negative values favour
    treating.
    """
    p0, p1 = _aligned_draws(prob0_col, prob1_col)
    theta = theta_from_marginals(MarginalPair(p0, p1), phi)
    return loss_contrast(theta, spec)


def decide_mean(contrasts) -> int:
    """Posterior-mean rule: treat iff the mean contrast is negative.

    A tie resolves to 0, the less burdensome arm.
    """
    arr = np.asarray(contrasts, dtype=float)
    if arr.size == 0:
        raise ValueError("contrast draw vector is empty")
    return int(arr.mean() < 0.0)


def posterior_rho(contrasts) -> float:
    """Posterior probability that treating does not increase expected loss.

    The fraction of contrast draws <= 0; the boundary counts as favouring
    treatment.
    """
    arr = np.asarray(contrasts, dtype=float)
    if arr.size == 0:
        raise ValueError("contrast draw vector is empty")
    return float(np.mean(arr <= 0.0))


def functional_draws(prob0_col, prob1_col, phi_draws, spec: LossSpec, a: int):
    """Draws of (expected loss, expected outcome) under the fixed decision a.

    phi_draws may be a scalar (fixed odds ratio) or one value per draw
    (integrating an odds-ratio prior). The outcome draws are taken directly
    from the marginal column for arm a, so they are bitwise identical across
    any phi_draws: the expected outcome depends on the joint distribution
    only through its marginals.
    """
    p0, p1 = _aligned_draws(prob0_col, prob1_col)
    theta = theta_from_marginals(MarginalPair(p0, p1), phi_draws)
    mu_loss = expected_loss(a, theta, spec)
    mu_outcome = p1 if a == 1 else p0
    return np.broadcast_to(mu_loss, p0.shape).astype(float, copy=False), mu_outcome


def credible_interval(draws, gamma: float) -> CredibleInterval:
    """Equal-tailed (1 - gamma) interval from empirical quantiles.

    Quantiles interpolate linearly between order statistics.
    """
    arr = np.asarray(draws, dtype=float).ravel()
    if arr.size < 2:
        raise ValueError("need at least 2 draws for a credible interval")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    lower, upper = np.quantile(arr, [gamma / 2.0, 1.0 - gamma / 2.0])
    return CredibleInterval(float(lower), float(upper), level=1.0 - gamma)


def analyze_subject(prob0_col, prob1_col, phi_spec: PhiSpec, spec: LossSpec,
                    gamma: float = 0.05, index: int = 0, rng=None) -> DecisionRecord:
    """Full per-subject analysis at the reference odds ratio phi0.

    Decisions, rho, and (unless integrating) the functional intervals are
    evaluated at phi0. In "scan" and "uniform-prior" modes the mean decision
    is additionally evaluated at the lower and upper odds-ratio bounds, and
    the subject is flagged sensitive when the three decisions disagree. In
    "uniform-prior" mode, non-sensitive subjects get loss functionals that
    integrate one Uniform(lower, upper) odds-ratio draw per posterior draw
    (pass `rng` for a reproducible stream; sensitive subjects keep phi0 and
    the flag). Outcome functionals never depend on the odds ratio.
    """
    p0, p1 = _aligned_draws(prob0_col, prob1_col)
    if p0.ndim != 1:
        raise ValueError("per-subject draws must be 1-d vectors")

    contrasts = contrast_draws(p0, p1, phi_spec.phi0, spec)
    a1 = decide_mean(contrasts)
    rho = posterior_rho(contrasts)
    a2 = int(rho > 0.5)

    if phi_spec.mode == "fixed":
        a1_low = a1_high = a1
        rho_low = rho_high = rho
    else:
        contrasts_low = contrast_draws(p0, p1, phi_spec.lower, spec)
        contrasts_high = contrast_draws(p0, p1, phi_spec.upper, spec)
        a1_low = decide_mean(contrasts_low)
        a1_high = decide_mean(contrasts_high)
        rho_low = posterior_rho(contrasts_low)
        rho_high = posterior_rho(contrasts_high)
    sensitive = not (a1_low == a1 == a1_high)

    if phi_spec.mode == "uniform-prior" and not sensitive:
        if rng is None:
            rng = rng_from(0, index)
        phi_draws = rng.uniform(phi_spec.lower, phi_spec.upper, size=p0.size)
    else:
        phi_draws = phi_spec.phi0

    theta = theta_from_marginals(MarginalPair(p0, p1), phi_draws)
    mu_loss = {a: np.broadcast_to(expected_loss(a, theta, spec), p0.shape)
               for a in (0, 1)}
    mu_outcome = {0: p0, 1: p1}

    return DecisionRecord(
        index=index,
        a1=a1,
        a2=a2,
        rho=rho,
        sensitive=sensitive,
        mu_loss_mean=float(mu_loss[a1].mean()),
        mu_outcome_mean=float(mu_outcome[a1].mean()),
        loss_interval=credible_interval(mu_loss[a1], gamma),
        outcome_interval=credible_interval(mu_outcome[a1], gamma),
        a1_at_lower=a1_low,
        a1_at_upper=a1_high,
        rho_at_lower=rho_low,
        rho_at_upper=rho_high,
        mu_loss_mean_by_arm=(float(mu_loss[0].mean()), float(mu_loss[1].mean())),
        mu_outcome_mean_by_arm=(float(p0.mean()), float(p1.mean())),
    )


def analyze_cohort(draws: PosteriorDraws, phi_spec: PhiSpec, spec: LossSpec,
                   gamma: float = 0.05, seed: int = 0) -> list:
    """analyze_subject for every subject, with per-subject RNG substreams."""
    records = []
    for i in range(draws.n_subjects):
        rng = rng_from(seed, i) if phi_spec.mode == "uniform-prior" else None
        records.append(analyze_subject(draws.prob0[:, i], draws.prob1[:, i],
                                       phi_spec, spec, gamma=gamma, index=i,
                                       rng=rng))
    return records


def cohort_summary(records, observed_w) -> dict:
    """Sample-averaged posterior means under the estimated regime and under
    the observed assignment, plus assignment fractions and sensitivity counts.
    """
    if len(records) == 0:
        raise ValueError("cohort is empty")
    w = np.asarray(observed_w)
    if w.shape != (len(records),):
        raise ValueError(
            f"observed_w must have one entry per record, got shape {w.shape} "
            f"for {len(records)} records")
    if not np.all(np.isin(w, (0, 1))):
        raise ValueError("observed_w entries must be 0 or 1")
    w = w.astype(int)

    loss_regime = np.array([r.mu_loss_mean for r in records])
    outcome_regime = np.array([r.mu_outcome_mean for r in records])
    loss_observed = np.array([r.mu_loss_mean_by_arm[wi]
                              for r, wi in zip(records, w)])
    outcome_observed = np.array([r.mu_outcome_mean_by_arm[wi]
                                 for r, wi in zip(records, w)])
    a1 = np.array([r.a1 for r in records])

    return {
        "n_subjects": len(records),
        "U_loss_regime": float(loss_regime.mean()),
        "U_outcome_regime": float(outcome_regime.mean()),
        "U_loss_observed": float(loss_observed.mean()),
        "U_outcome_observed": float(outcome_observed.mean()),
        "treated_fraction_regime": float(a1.mean()),
        "treated_fraction_observed": float(w.mean()),
        "n_sensitive": int(sum(r.sensitive for r in records)),
    }


@dataclass(frozen=True)
class MatrixAnalysis:
    """Vectorized per-subject summaries over aligned (draws x n) matrices."""

    a1: np.ndarray
    rho: np.ndarray
    mu_loss_mean: np.ndarray
    mu_outcome_mean: np.ndarray
    loss_lower: np.ndarray
    loss_upper: np.ndarray
    outcome_lower: np.ndarray
    outcome_upper: np.ndarray


def analyze_matrix(prob0, prob1, phi, spec: LossSpec,
                   gamma: float = 0.05) -> MatrixAnalysis:
    """Vectorized fixed-phi analysis of all subjects at once.

    Semantically identical to per-subject analyze_subject in "fixed" mode;
    used by the simulation harness where the odds-ratio scan is not needed.
    """
    p0 = np.asarray(prob0, dtype=float)
    p1 = np.asarray(prob1, dtype=float)
    if p0.ndim != 2 or p0.shape != p1.shape:
        raise ValueError("prob0/prob1 must be equally shaped (draws, n) matrices")

    theta = theta_from_marginals(MarginalPair(p0, p1), phi)
    contrasts = loss_contrast(theta, spec)
    a1 = (contrasts.mean(axis=0) < 0.0).astype(int)
    rho = (contrasts <= 0.0).mean(axis=0)

    mu_loss = np.where(a1 == 1,
                       expected_loss(1, theta, spec),
                       expected_loss(0, theta, spec))
    mu_outcome = np.where(a1 == 1, p1, p0)

    q = [gamma / 2.0, 1.0 - gamma / 2.0]
    loss_q = np.quantile(mu_loss, q, axis=0)
    outcome_q = np.quantile(mu_outcome, q, axis=0)

    return MatrixAnalysis(
        a1=a1,
        rho=rho,
        mu_loss_mean=mu_loss.mean(axis=0),
        mu_outcome_mean=mu_outcome.mean(axis=0),
        loss_lower=loss_q[0],
        loss_upper=loss_q[1],
        outcome_lower=outcome_q[0],
        outcome_upper=outcome_q[1],
    )
