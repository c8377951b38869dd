"""Monte Carlo harness: synthetic scenarios, replications, and summary metrics.

Covariates are uniform on (-1, 1); the true marginal success probabilities of
the two arms are cubic-logistic functions of the first covariate, with three
heterogeneity levels (strong: effects of opposite sign across the range;
mild: attenuated differences; none: identical arms). Treatment is assigned
with probability expit(lambda * standardized x1), so lambda = 0 is a
randomized trial and |lambda| = log 3 gives 3:1 odds at one standard
deviation. Each replication generates a dataset, fits per-arm posteriors,
analyzes every subject at the scenario odds ratio, and scores the results
against the known truth:

    B  signed bias of the posterior-mean functional under the selected
       decision, averaged over subjects and replications;
    omega  mean credible-interval width;
    C  frequency the interval contains the true functional value;
    A  frequency the mean-rule decision matches the true optimal decision.
"""

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from ._rng import child_seed, rng_from
from .core import (
    LossSpec,
    MarginalPair,
    ThetaVector,
    expected_loss,
    loss_contrast,
    loss_preset,
    theta_from_marginals,
)
from .errors import (
    EmptyArmError,
    NoValidRootError,
    RankDeficientDesignError,
    SingleClassError,
)
from .inference import analyze_matrix
from .samplers import (
    BartConfig,
    DataSet,
    McmcConfig,
    cubic_design,
    fit_arm_models,
)

HETEROGENEITY_LEVELS = ("strong", "mild", "none")

# Cubic-logistic coefficients (intercept, linear, quadratic, cubic) of the
# true success probability in each arm, as functions of x1.
BETA_TREATED = (0.457, 3.185, -1.593, -2.124)
BETA_CONTROL = {
    "strong": (0.457, -3.185, -1.593, 2.124),
    "mild": (0.457, 1.343, -1.430, -1.217),
    "none": BETA_TREATED,
}

_REPLICATION_ERRORS = (EmptyArmError, SingleClassError, RankDeficientDesignError,
                       NoValidRootError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class Scenario:
    """One simulation condition.

    q counts pure-noise covariates appended to x1. `phi` is the odds ratio at
    which both the truth table and the analysis operate. `mcmc` overrides the
    sampler settings (its seed field is ignored; every replication derives its
    own seed from `seed`). With truth_at_benchmark the bias/coverage truth is
    evaluated at the true optimal decision instead of the selected one.
    """

    heterogeneity: str
    lam: float = 0.0
    n: int = 250
    q: int = 0
    loss: LossSpec = field(default_factory=lambda: loss_preset("OTRmax"))
    phi: float = 1.0
    sampler: str = "logistic"
    replications: int = 100
    seed: int = 0
    gamma: float = 0.05
    mcmc: McmcConfig | None = None
    truth_at_benchmark: bool = False

    def __post_init__(self):
        if self.heterogeneity not in HETEROGENEITY_LEVELS:
            raise ValueError(
                f"heterogeneity must be one of {HETEROGENEITY_LEVELS}, "
                f"got {self.heterogeneity!r}")
        if self.n < 10:
            raise ValueError("n must be >= 10")
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not (math.isfinite(self.phi) and self.phi > 0.0):
            raise ValueError("phi must be positive and finite")
        if self.sampler not in ("logistic", "bart"):
            raise ValueError(f"sampler must be 'logistic' or 'bart', got {self.sampler!r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.mcmc is not None and self.sampler == "bart" \
                and not isinstance(self.mcmc, BartConfig):
            raise ValueError("sampler 'bart' requires a BartConfig")

    def resolved_mcmc(self) -> McmcConfig:
        if self.mcmc is not None:
            return self.mcmc
        return BartConfig() if self.sampler == "bart" else McmcConfig()


@dataclass(frozen=True)
class TruthTable:
    """Per-subject ground truth at the scenario odds ratio.

    mu_loss[a, i] and mu_outcome[a, i] are the true expected loss and outcome
    of fixed decision a for subject i; a_opt minimizes the true expected loss
    (ties resolve to 0).
    """

    marginals: MarginalPair
    theta: ThetaVector
    a_opt: np.ndarray
    mu_loss: np.ndarray
    mu_outcome: np.ndarray


@dataclass(frozen=True)
class MetricsRow:
    """The four scenario-level metrics, per functional where applicable."""

    B_L: float
    B_Y: float
    omega_L: float
    omega_Y: float
    C_L: float
    C_Y: float
    A: float

    def __post_init__(self):
        for name in ("C_L", "C_Y", "A"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        for name in ("omega_L", "omega_Y"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class RepDetail:
    """Sufficient statistics of one replication for exact metric recomputation."""

    rep: int
    n: int
    sum_bias_loss: float
    sum_bias_outcome: float
    sum_width_loss: float
    sum_width_outcome: float
    n_contain_loss: int
    n_contain_outcome: int
    n_correct: int


@dataclass(frozen=True)
class RunResult:
    metrics: MetricsRow
    details: list
    failures: int


def _cubic(coeffs, x):
    b0, b1, b2, b3 = coeffs
    return b0 + x * (b1 + x * (b2 + x * b3))


def true_marginals(x1, heterogeneity: str) -> MarginalPair:
    """True per-arm success probabilities at x1 (scalar or array in [-1, 1])."""
    if heterogeneity not in HETEROGENEITY_LEVELS:
        raise ValueError(f"unknown heterogeneity level {heterogeneity!r}")
    x = np.asarray(x1, dtype=float)
    if np.any(np.abs(x) > 1.0) or not np.all(np.isfinite(x)):
        raise ValueError("x1 must lie in [-1, 1]")
    m0 = expit(_cubic(BETA_CONTROL[heterogeneity], x))
    m1 = expit(_cubic(BETA_TREATED, x))
    return MarginalPair(theta1plus=m0, thetaplus1=m1)


def assignment_probability(x1, x1_mean, x1_sd, lam):
    """Treatment probability expit(lam * (x1 - mean) / sd)."""
    if not x1_sd > 0.0:
        raise ValueError("x1_sd must be > 0")
    return expit(lam * (np.asarray(x1, dtype=float) - x1_mean) / x1_sd)


def build_truth(x1, scn: Scenario) -> TruthTable:
    """Truth table for the subjects at x1 under the scenario's loss and phi."""
    m = true_marginals(x1, scn.heterogeneity)
    theta = theta_from_marginals(m, scn.phi)
    mu_loss = np.stack([np.broadcast_to(expected_loss(a, theta, scn.loss),
                                        np.shape(m.theta1plus))
                        for a in (0, 1)])
    mu_outcome = np.stack([np.asarray(m.theta1plus, dtype=float),
                           np.asarray(m.thetaplus1, dtype=float)])
    a_opt = (np.asarray(loss_contrast(theta, scn.loss)) < 0.0).astype(int)
    return TruthTable(marginals=m, theta=theta, a_opt=a_opt,
                      mu_loss=mu_loss, mu_outcome=mu_outcome)


def generate_dataset(scn: Scenario, rep: int):
    """Draw one replication's dataset plus its truth table.

    `rep` keys the RNG substream, so replications are reproducible in any
    execution order. Treatment assignment standardizes x1 by the replication's
    own sample mean and standard deviation (ddof=1).
    """
    rng = rng_from(scn.seed, rep)
    X = rng.uniform(-1.0, 1.0, size=(scn.n, 1 + scn.q))
    x1 = X[:, 0]
    truth = build_truth(x1, scn)
    p_treat = assignment_probability(x1, x1.mean(), x1.std(ddof=1), scn.lam)
    w = (rng.random(scn.n) < p_treat).astype(float)
    p_success = np.where(w == 1.0, truth.marginals.thetaplus1,
                         truth.marginals.theta1plus)
    y = (rng.random(scn.n) < p_success).astype(float)
    return DataSet(covariates=X, treatment=w, outcome=y), truth


def _replicate(scn: Scenario, rep: int) -> RepDetail:
    data, truth = generate_dataset(scn, rep)
    cfg = dataclasses.replace(scn.resolved_mcmc(),
                              seed=child_seed(scn.seed, rep, 1))
    if scn.sampler == "logistic":
        design = lambda X: cubic_design(X, intercept=(scn.q == 0))
        draws = fit_arm_models(data, cfg, design=design)
    else:
        draws = fit_arm_models(data, cfg)

    res = analyze_matrix(draws.prob0, draws.prob1, scn.phi, scn.loss,
                         gamma=scn.gamma)
    idx = np.arange(scn.n)
    a_eval = truth.a_opt if scn.truth_at_benchmark else res.a1
    true_loss = truth.mu_loss[a_eval, idx]
    true_outcome = truth.mu_outcome[a_eval, idx]

    contain_loss = (res.loss_lower <= true_loss) & (true_loss <= res.loss_upper)
    contain_outcome = ((res.outcome_lower <= true_outcome)
                       & (true_outcome <= res.outcome_upper))
    return RepDetail(
        rep=rep,
        n=scn.n,
        sum_bias_loss=float((res.mu_loss_mean - true_loss).sum()),
        sum_bias_outcome=float((res.mu_outcome_mean - true_outcome).sum()),
        sum_width_loss=float((res.loss_upper - res.loss_lower).sum()),
        sum_width_outcome=float((res.outcome_upper - res.outcome_lower).sum()),
        n_contain_loss=int(contain_loss.sum()),
        n_contain_outcome=int(contain_outcome.sum()),
        n_correct=int((res.a1 == truth.a_opt).sum()),
    )


def _replicate_safe(scn: Scenario, rep: int):
    try:
        return rep, _replicate(scn, rep), None
    except _REPLICATION_ERRORS as exc:
        return rep, None, f"{type(exc).__name__}: {exc}"


def metrics_from_details(details) -> MetricsRow:
    """Aggregate detail rows into a MetricsRow by exact compensated summation."""
    if not details:
        raise ValueError("no successful replications to aggregate")
    total = math.fsum(d.n for d in details)
    return MetricsRow(
        B_L=math.fsum(d.sum_bias_loss for d in details) / total,
        B_Y=math.fsum(d.sum_bias_outcome for d in details) / total,
        omega_L=math.fsum(d.sum_width_loss for d in details) / total,
        omega_Y=math.fsum(d.sum_width_outcome for d in details) / total,
        C_L=math.fsum(d.n_contain_loss for d in details) / total,
        C_Y=math.fsum(d.n_contain_outcome for d in details) / total,
        A=math.fsum(d.n_correct for d in details) / total,
    )


def run_replications(scn: Scenario, threads: int = 1) -> RunResult:
    """Run all replications of a scenario and aggregate the metrics.

    Replication failures (empty arm, single-class arm, rank-deficient design,
    numerical breakdown) are counted and excluded from the averages rather
    than aborting the run. With threads > 1, replications run in a process
    pool; per-replication RNG substreams make the result independent of
    execution order.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    outcomes = []
    if threads == 1:
        for rep in range(scn.replications):
            outcomes.append(_replicate_safe(scn, rep))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_replicate_safe, [scn] * scn.replications,
                                     range(scn.replications)))
    outcomes.sort(key=lambda item: item[0])
    details = [detail for _, detail, err in outcomes if err is None]
    failures = sum(1 for _, _, err in outcomes if err is not None)
    return RunResult(metrics=metrics_from_details(details), details=details,
                     failures=failures)


def decision_boundaries(heterogeneity: str, spec: LossSpec, phi: float,
                        grid_points: int = 513, tol: float = 1e-10) -> np.ndarray:
    """x1 values in (-1, 1) where the true loss contrast crosses zero.

    Roots are located by sign changes of the true contrast on a uniform grid
    and refined by Brent's method to `tol`.
    """

    def contrast(x1):
        theta = theta_from_marginals(true_marginals(x1, heterogeneity), phi)
        return float(loss_contrast(theta, spec))

    grid = np.linspace(-1.0, 1.0, grid_points)
    values = np.array([contrast(x) for x in grid])
    roots = []
    for left, right, f_left, f_right in zip(grid[:-1], grid[1:],
                                            values[:-1], values[1:]):
        if f_left == 0.0:
            roots.append(float(left))
        elif f_left * f_right < 0.0:
            roots.append(float(brentq(contrast, left, right, xtol=tol)))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return np.array(sorted(roots))
