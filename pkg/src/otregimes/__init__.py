"""Bayes-optimal treatment regimes for binary potential outcomes.

Estimates per-subject treatment decisions from observational data by fitting
one posterior per treatment arm, re-parametrizing the bivariate outcome
distribution through its two marginals and a non-identified odds ratio, and
minimizing posterior expected loss, with built-in sensitivity scans over the
odds ratio, a Monte Carlo study harness, and an empirical verifier for the
coverage guarantees of decision-selected credible intervals.
"""

from .core import (
    LOSS_PRESETS,
    LossSpec,
    MarginalPair,
    PhiSpec,
    ThetaVector,
    conditional_loss_spec,
    expected_loss,
    expected_outcome,
    loss_contrast,
    loss_preset,
    marginal_loss_spec,
    odds_ratio,
    outcome_contrast,
    theta_from_marginals,
)
from .coverage import (
    Bracket,
    CoverageConfig,
    CoverageResult,
    SweepRow,
    coverage_experiment,
    grid_sweep,
    theorem_bracket,
)
from .inference import (
    CredibleInterval,
    DecisionRecord,
    MatrixAnalysis,
    analyze_cohort,
    analyze_matrix,
    analyze_subject,
    cohort_summary,
    contrast_draws,
    credible_interval,
    decide_mean,
    functional_draws,
    posterior_rho,
)
from .samplers import (
    BartConfig,
    BartProbitSampler,
    DataSet,
    LogisticMetropolisSampler,
    McmcConfig,
    PosteriorDraws,
    cubic_design,
    fit_arm_models,
    fit_logistic_metropolis,
    fit_probit_bart,
    probability_draws,
)
from .simul import (
    MetricsRow,
    RepDetail,
    RunResult,
    Scenario,
    TruthTable,
    assignment_probability,
    build_truth,
    decision_boundaries,
    generate_dataset,
    metrics_from_details,
    run_replications,
    true_marginals,
)

__version__ = "0.1.0"

__all__ = [
    "BartConfig",
    "BartProbitSampler",
    "Bracket",
    "CoverageConfig",
    "CoverageResult",
    "CredibleInterval",
    "DataSet",
    "DecisionRecord",
    "LOSS_PRESETS",
    "LogisticMetropolisSampler",
    "LossSpec",
    "MarginalPair",
    "MatrixAnalysis",
    "McmcConfig",
    "MetricsRow",
    "PhiSpec",
    "PosteriorDraws",
    "RepDetail",
    "RunResult",
    "Scenario",
    "SweepRow",
    "ThetaVector",
    "TruthTable",
    "analyze_cohort",
    "analyze_matrix",
    "analyze_subject",
    "assignment_probability",
    "build_truth",
    "cohort_summary",
    "conditional_loss_spec",
    "contrast_draws",
    "coverage_experiment",
    "credible_interval",
    "cubic_design",
    "decide_mean",
    "decision_boundaries",
    "expected_loss",
    "expected_outcome",
    "fit_arm_models",
    "fit_logistic_metropolis",
    "fit_probit_bart",
    "functional_draws",
    "generate_dataset",
    "grid_sweep",
    "loss_contrast",
    "loss_preset",
    "marginal_loss_spec",
    "metrics_from_details",
    "odds_ratio",
    "outcome_contrast",
    "posterior_rho",
    "probability_draws",
    "run_replications",
    "theorem_bracket",
    "theta_from_marginals",
    "true_marginals",
]
