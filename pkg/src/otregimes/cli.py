"""Command-line interface: analyze a dataset, run simulations, verify coverage.

Subcommands:

  analyze  --config FILE   per-subject decisions for a CSV dataset
  simulate --scenario FILE Monte Carlo metrics for synthetic scenarios
  coverage --grid FILE     selected-interval coverage sweep
  overlap  --config FILE   propensity overlap diagnostic

Every command is deterministic given its inputs, --seed, and --threads:
rerunning writes byte-identical files. Exit codes: 0 success, 1 coverage
bracket violation, 2 configuration or input-data problem.
"""

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import child_seed
from .core import (
    LossSpec,
    PhiSpec,
    conditional_loss_spec,
    loss_preset,
    marginal_loss_spec,
)
from .coverage import CoverageConfig, grid_sweep
from .errors import (
    ConfigError,
    EmptyArmError,
    MissingValuesError,
    NonBinaryValueError,
    SchemaError,
)
from .inference import analyze_cohort, cohort_summary
from .samplers import BartConfig, DataSet, McmcConfig, cubic_design, fit_arm_models
from .samplers.logistic import _newton_map
from .simul import Scenario, run_replications

# Fixed output column orders (documented in the README).
DECISIONS_COLUMNS = [
    "index", "w", "a1", "a2", "rho", "sensitive", "a1_at_lower", "a1_at_upper",
    "rho_at_lower", "rho_at_upper", "mu_loss_mean", "mu_outcome_mean",
    "loss_lower", "loss_upper", "outcome_lower", "outcome_upper",
    "mu_loss_mean_a0", "mu_loss_mean_a1", "mu_outcome_mean_a0",
    "mu_outcome_mean_a1",
]
RHO_QUANTILES_COLUMNS = ["position", "rho_at_lower", "rho", "rho_at_upper"]
FUNCTIONAL_QUANTILES_COLUMNS = [
    "position", "mu_loss_regime", "mu_loss_observed",
    "mu_outcome_regime", "mu_outcome_observed",
]
METRICS_COLUMNS = [
    "condition", "heterogeneity", "lambda", "n", "q", "sampler", "replications",
    "failures", "B_L", "B_Y", "omega_L", "omega_Y", "C_L", "C_Y", "A",
]
DETAILS_COLUMNS = [
    "condition", "rep", "n", "sum_bias_loss", "sum_bias_outcome",
    "sum_width_loss", "sum_width_outcome", "n_contain_loss",
    "n_contain_outcome", "n_correct",
]
SWEEP_COLUMNS = [
    "mu", "nu", "sigma", "tau", "rho", "alpha", "replications", "seed",
    "estimate", "mc_se", "freq_x_selected", "bracket_kind", "bracket_lower",
    "bracket_upper", "floor", "within_bracket",
]
OVERLAP_COLUMNS = ["index", "treatment", "logit_propensity", "outside_support"]


# ---------------------------------------------------------------------------
# config loading


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    return doc


def _reject_unknown_keys(doc: dict, allowed, where: str):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}; "
                          f"allowed keys are {sorted(allowed)}")


def _build_loss(value, where: str) -> LossSpec:
    try:
        if isinstance(value, str):
            return loss_preset(value)
        if isinstance(value, dict):
            if set(value) == {"conditional"}:
                coeffs = value["conditional"]
                if not (isinstance(coeffs, list) and len(coeffs) == 4):
                    raise ConfigError(
                        f"{where}: 'conditional' takes a list of 4 coefficients")
                return conditional_loss_spec(*coeffs)
            if set(value) == {"marginal"}:
                coeffs = value["marginal"]
                if not (isinstance(coeffs, list) and len(coeffs) == 2):
                    raise ConfigError(
                        f"{where}: 'marginal' takes [per-failure, per-treatment]")
                return marginal_loss_spec(*coeffs)
            if set(value) == {"table"}:
                return LossSpec(np.array(value["table"], dtype=float))
            raise ConfigError(
                f"{where}: loss object must have exactly one of the keys "
                f"'conditional', 'marginal', 'table'")
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}")
    raise ConfigError(f"{where}: loss must be a preset name or an object")


def _build_phi(value, where: str) -> PhiSpec:
    if value is None:
        return PhiSpec()
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: phi must be an object")
    _reject_unknown_keys(value, ("phi0", "lower", "upper", "mode"), where)
    try:
        return PhiSpec(**value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}")


_MCMC_KEYS = ("draws", "burn_in", "thin")
_BART_KEYS = _MCMC_KEYS + ("num_trees", "kappa", "eta", "k", "leaf_sd",
                           "n_cutpoints")


def _build_mcmc(value, sampler: str, seed: int, where: str):
    value = dict(value or {})
    if "seed" in value:
        raise ConfigError(f"{where}: set the top-level 'seed', not mcmc.seed")
    allowed = _BART_KEYS if sampler == "bart" else _MCMC_KEYS
    _reject_unknown_keys(value, allowed, where)
    cls = BartConfig if sampler == "bart" else McmcConfig
    try:
        return cls(seed=seed, **value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}")


def _resolve_design(name, sampler: str, where: str):
    if sampler == "bart":
        if name is not None:
            raise ConfigError(f"{where}: 'design' applies only to the "
                              f"logistic sampler")
        return None
    if name is None:
        name = "linear"
    designs = {
        "linear": lambda X: np.column_stack([np.ones(X.shape[0]), X]),
        "cubic": lambda X: cubic_design(X, intercept=True),
        "cubic-no-intercept": lambda X: cubic_design(X, intercept=False),
    }
    if name not in designs:
        raise ConfigError(f"{where}: unknown design {name!r}; choose one of "
                          f"{sorted(designs)}")
    return designs[name]


# ---------------------------------------------------------------------------
# dataset ingestion


def load_dataset(path, config: dict) -> DataSet:
    """Read a header-row CSV into a validated DataSet.

    `config` names the outcome, treatment, and covariate columns. Rows with
    any missing value in those columns are rejected with their 1-based data
    row numbers (this tool never imputes); outcome and treatment values must
    be exactly 0 or 1.
    """
    where = "dataset config"
    outcome_col = config.get("outcome")
    treatment_col = config.get("treatment")
    covariate_cols = config.get("covariates")
    for key, value in (("outcome", outcome_col), ("treatment", treatment_col)):
        if not isinstance(value, str) or not value:
            raise ConfigError(f"{where}: {key!r} must name a column")
    if not isinstance(covariate_cols, list) or not covariate_cols:
        raise SchemaError(f"{where}: 'covariates' must be a non-empty list "
                          f"of column names")

    try:
        handle = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"dataset file not found: {path}")
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file (no header row)")
        needed = [outcome_col, treatment_col, *covariate_cols]
        missing_cols = [c for c in needed if c not in reader.fieldnames]
        if missing_cols:
            raise SchemaError(f"{path}: missing columns {missing_cols}; "
                              f"header has {reader.fieldnames}")

        rows_missing = []
        rows_nonbinary = []
        X, w, y = [], [], []
        for i, row in enumerate(reader, start=1):
            cells = {c: (row.get(c) or "").strip() for c in needed}
            if any(v == "" for v in cells.values()):
                rows_missing.append(i)
                continue
            try:
                values = {c: float(v) for c, v in cells.items()}
            except ValueError:
                bad = next(c for c, v in cells.items()
                           if not _is_number(v))
                raise SchemaError(
                    f"{path}: row {i}: column {bad!r} has non-numeric "
                    f"value {cells[bad]!r}")
            for col in (outcome_col, treatment_col):
                if values[col] not in (0.0, 1.0):
                    rows_nonbinary.append((i, col, cells[col]))
            X.append([values[c] for c in covariate_cols])
            w.append(values[treatment_col])
            y.append(values[outcome_col])

    if rows_missing:
        shown = ", ".join(str(r) for r in rows_missing[:10])
        more = f" and {len(rows_missing) - 10} more" if len(rows_missing) > 10 else ""
        raise MissingValuesError(
            f"{path}: rows with missing values (not imputed): {shown}{more}")
    if rows_nonbinary:
        i, col, value = rows_nonbinary[0]
        more = (f" ({len(rows_nonbinary) - 1} further rows affected)"
                if len(rows_nonbinary) > 1 else "")
        raise NonBinaryValueError(
            f"{path}: row {i}: column {col!r} has value {value!r}, "
            f"expected 0 or 1{more}")
    if not X:
        raise SchemaError(f"{path}: no data rows")
    return DataSet(covariates=np.array(X, dtype=float),
                   treatment=np.array(w), outcome=np.array(y))


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# overlap diagnostic


@dataclass(frozen=True)
class OverlapReport:
    """Per-subject logit propensities and a common-support summary.

    The support interval is the overlap of the two arms' logit ranges;
    subjects outside it have no comparable counterpart in the other arm.
    `separated` marks a treatment model that predicts assignment perfectly,
    which violates positivity outright.
    """

    logits: np.ndarray
    treatment: np.ndarray
    separated: bool
    support_lower: float
    support_upper: float
    outside_support: np.ndarray
    quantiles_by_arm: dict


def propensity_overlap(data: DataSet) -> OverlapReport:
    """Fit a flat-prior logistic treatment model and report overlap."""
    data.arm_rows(0)
    data.arm_rows(1)
    design = np.column_stack([np.ones(data.n), data.covariates])
    beta, separated = _newton_map(design, data.treatment)
    logits = design @ beta
    arm0 = logits[data.treatment == 0.0]
    arm1 = logits[data.treatment == 1.0]
    support_lower = max(arm0.min(), arm1.min())
    support_upper = min(arm0.max(), arm1.max())
    outside = (logits < support_lower) | (logits > support_upper)
    probs = [0.0, 0.25, 0.5, 0.75, 1.0]
    quantiles = {
        arm: dict(zip(map(str, probs),
                      np.quantile(values, probs).tolist()))
        for arm, values in (("0", arm0), ("1", arm1))
    }
    return OverlapReport(logits=logits, treatment=data.treatment,
                         separated=separated, support_lower=float(support_lower),
                         support_upper=float(support_upper),
                         outside_support=outside, quantiles_by_arm=quantiles)


# ---------------------------------------------------------------------------
# deterministic file output


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_json(path: Path, doc: dict):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_decisions(path: Path, records, treatment):
    rows = []
    for record, w in zip(records, treatment):
        rows.append([
            record.index, int(w), record.a1, record.a2, record.rho,
            record.sensitive, record.a1_at_lower, record.a1_at_upper,
            record.rho_at_lower, record.rho_at_upper, record.mu_loss_mean,
            record.mu_outcome_mean, record.loss_interval.lower,
            record.loss_interval.upper, record.outcome_interval.lower,
            record.outcome_interval.upper, record.mu_loss_mean_by_arm[0],
            record.mu_loss_mean_by_arm[1], record.mu_outcome_mean_by_arm[0],
            record.mu_outcome_mean_by_arm[1],
        ])
    _write_csv(path, DECISIONS_COLUMNS, rows)


def _quantile_rows(columns: dict, n: int):
    # Each column is sorted independently: these are per-column empirical
    # quantile curves over plot positions (i + 0.5) / n, not subject rows.
    sorted_cols = {name: np.sort(np.asarray(vals, dtype=float))
                   for name, vals in columns.items()}
    rows = []
    for i in range(n):
        position = (i + 0.5) / n
        rows.append([position, *(sorted_cols[name][i] for name in sorted_cols)])
    return rows


def _write_quantile_csvs(out_dir: Path, records, treatment):
    n = len(records)
    rho_cols = {
        "rho_at_lower": [r.rho_at_lower for r in records],
        "rho": [r.rho for r in records],
        "rho_at_upper": [r.rho_at_upper for r in records],
    }
    _write_csv(out_dir / "rho_quantiles.csv", RHO_QUANTILES_COLUMNS,
               _quantile_rows(rho_cols, n))

    w = treatment.astype(int)
    functional_cols = {
        "mu_loss_regime": [r.mu_loss_mean for r in records],
        "mu_loss_observed": [r.mu_loss_mean_by_arm[wi]
                             for r, wi in zip(records, w)],
        "mu_outcome_regime": [r.mu_outcome_mean for r in records],
        "mu_outcome_observed": [r.mu_outcome_mean_by_arm[wi]
                                for r, wi in zip(records, w)],
    }
    _write_csv(out_dir / "functional_quantiles.csv",
               FUNCTIONAL_QUANTILES_COLUMNS, _quantile_rows(functional_cols, n))


# ---------------------------------------------------------------------------
# commands


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


_ANALYZE_KEYS = ("dataset", "outcome", "treatment", "covariates", "sampler",
                 "mcmc", "design", "loss", "phi", "gamma", "seed")


def _load_analysis_inputs(args):
    cfg = _load_json(args.config)
    _reject_unknown_keys(cfg, _ANALYZE_KEYS, args.config)
    dataset_path = cfg.get("dataset")
    if not isinstance(dataset_path, str) or not dataset_path:
        raise ConfigError(f"{args.config}: 'dataset' must be a file path")
    dataset_path = Path(dataset_path)
    if not dataset_path.is_absolute():
        dataset_path = Path(args.config).parent / dataset_path
    data = load_dataset(dataset_path, cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    return cfg, data, seed


def cmd_analyze(args) -> int:
    cfg, data, seed = _load_analysis_inputs(args)
    sampler = cfg.get("sampler", "logistic")
    if sampler not in ("logistic", "bart"):
        raise ConfigError(f"{args.config}: sampler must be 'logistic' or "
                          f"'bart', got {sampler!r}")
    mcmc = _build_mcmc(cfg.get("mcmc"), sampler, seed, f"{args.config}: mcmc")
    design = _resolve_design(cfg.get("design"), sampler, f"{args.config}: design")
    loss = _build_loss(cfg.get("loss", "OTRmax"), f"{args.config}: loss")
    phi_spec = _build_phi(cfg.get("phi"), f"{args.config}: phi")
    gamma = float(cfg.get("gamma", 0.05))
    if not 0.0 < gamma < 1.0:
        raise ConfigError(f"{args.config}: gamma must lie in (0, 1)")

    draws = fit_arm_models(data, mcmc, design=design)
    records = analyze_cohort(draws, phi_spec, loss, gamma=gamma,
                             seed=child_seed(seed, 2))
    summary = cohort_summary(records, data.treatment.astype(int))
    summary.update({
        "gamma": gamma,
        "phi0": phi_spec.phi0,
        "phi_lower": phi_spec.lower,
        "phi_upper": phi_spec.upper,
        "phi_mode": phi_spec.mode,
        "sampler": sampler,
        "seed": seed,
    })

    out = _out_dir(args)
    _write_decisions(out / "decisions.csv", records, data.treatment)
    _write_json(out / "summary.json", summary)
    _write_quantile_csvs(out, records, data.treatment)

    print(f"analyzed {data.n} subjects with the {sampler} sampler")
    print(f"treated fraction: regime {summary['treated_fraction_regime']:.4f}, "
          f"observed {summary['treated_fraction_observed']:.4f}; "
          f"{summary['n_sensitive']} sensitive decisions")
    print(f"wrote {out / 'decisions.csv'}, {out / 'summary.json'}, "
          f"{out / 'rho_quantiles.csv'}, {out / 'functional_quantiles.csv'}")
    return 0


_SCENARIO_KEYS = ("heterogeneity", "lam", "n", "q", "loss", "phi", "sampler",
                  "replications", "seed", "gamma", "mcmc", "truth_at_benchmark")


def _build_scenario(doc: dict, index: int, seed_override, where: str) -> Scenario:
    _reject_unknown_keys(doc, _SCENARIO_KEYS, where)
    doc = dict(doc)
    if "heterogeneity" not in doc:
        raise ConfigError(f"{where}: missing required key 'heterogeneity'")
    if seed_override is not None:
        doc["seed"] = child_seed(seed_override, index)
    sampler = doc.get("sampler", "logistic")
    if "loss" in doc:
        doc["loss"] = _build_loss(doc["loss"], f"{where}: loss")
    if "mcmc" in doc:
        doc["mcmc"] = _build_mcmc(doc["mcmc"], sampler, 0, f"{where}: mcmc")
    try:
        return Scenario(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}")


def _expand_scenarios(doc: dict, path: str, seed_override) -> list:
    if "scenarios" in doc:
        if set(doc) != {"scenarios"} or not isinstance(doc["scenarios"], list):
            raise ConfigError(f"{path}: 'scenarios' must be the only key and "
                              f"hold a list of scenario objects")
        items = doc["scenarios"]
        if not items:
            raise ConfigError(f"{path}: 'scenarios' is empty")
    elif "grid" in doc:
        allowed = {"grid", "common"}
        _reject_unknown_keys(doc, allowed, path)
        grid = doc["grid"]
        common = doc.get("common", {})
        if not isinstance(grid, dict) or not grid:
            raise ConfigError(f"{path}: 'grid' must be a non-empty object "
                              f"mapping scenario keys to value lists")
        for key, values in grid.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"{path}: grid key {key!r} must map to a "
                                  f"non-empty list")
        keys = sorted(grid)
        stack = [dict(common)]
        for key in keys:
            stack = [dict(item, **{key: value})
                     for item in stack for value in grid[key]]
        items = stack
    else:
        items = [doc]
    return [_build_scenario(item, i, seed_override, f"{path}: scenario {i}")
            for i, item in enumerate(items)]


def cmd_simulate(args) -> int:
    doc = _load_json(args.scenario)
    scenarios = _expand_scenarios(doc, args.scenario, args.seed)
    out = _out_dir(args)

    metrics_rows = []
    detail_rows = []
    for index, scn in enumerate(scenarios):
        result = run_replications(scn, threads=args.threads)
        m = result.metrics
        metrics_rows.append([
            index, scn.heterogeneity, scn.lam, scn.n, scn.q, scn.sampler,
            scn.replications, result.failures, m.B_L, m.B_Y, m.omega_L,
            m.omega_Y, m.C_L, m.C_Y, m.A,
        ])
        for d in result.details:
            detail_rows.append([
                index, d.rep, d.n, d.sum_bias_loss, d.sum_bias_outcome,
                d.sum_width_loss, d.sum_width_outcome, d.n_contain_loss,
                d.n_contain_outcome, d.n_correct,
            ])
        print(f"condition {index} ({scn.heterogeneity}, lam={scn.lam}, "
              f"n={scn.n}, q={scn.q}, {scn.sampler}): "
              f"A={m.A:.3f} C_L={m.C_L:.3f} C_Y={m.C_Y:.3f} "
              f"B_L={m.B_L:+.4f} B_Y={m.B_Y:+.4f} "
              f"failures={result.failures}")

    _write_csv(out / "metrics.csv", METRICS_COLUMNS, metrics_rows)
    _write_csv(out / "details.csv", DETAILS_COLUMNS, detail_rows)
    print(f"wrote {out / 'metrics.csv'} and {out / 'details.csv'}")
    return 0


_COVERAGE_KEYS = ("mu", "nu", "sigma", "tau", "rho", "alpha", "replications",
                  "seed")


def _build_coverage(doc: dict, index: int, seed_override, where: str):
    _reject_unknown_keys(doc, _COVERAGE_KEYS, where)
    doc = dict(doc)
    if seed_override is not None:
        doc["seed"] = child_seed(seed_override, index)
    try:
        return CoverageConfig(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}")


def cmd_coverage(args) -> int:
    doc = _load_json(args.grid)
    se_multiplier = 4.0
    if "cells" in doc:
        _reject_unknown_keys(doc, ("cells", "se_multiplier"), args.grid)
        cells = doc["cells"]
        if not isinstance(cells, list) or not cells:
            raise ConfigError(f"{args.grid}: 'cells' must be a non-empty list")
        se_multiplier = float(doc.get("se_multiplier", 4.0))
    else:
        cells = [doc]
    configs = [_build_coverage(cell, i, args.seed, f"{args.grid}: cell {i}")
               for i, cell in enumerate(cells)]

    rows = grid_sweep(configs, se_multiplier=se_multiplier)
    out = _out_dir(args)
    csv_rows = []
    for row in rows:
        c, r, b = row.config, row.result, row.bracket
        csv_rows.append([
            c.mu, c.nu, c.sigma, c.tau, c.rho, c.alpha, c.replications, c.seed,
            r.estimate, r.mc_se, r.freq_x_selected, b.kind, b.lower, b.upper,
            b.floor, row.within_bracket,
        ])
        status = "ok" if row.within_bracket else "VIOLATION"
        print(f"mu={c.mu} nu={c.nu} sigma={c.sigma} tau={c.tau} rho={c.rho}: "
              f"estimate={r.estimate:.5f} (se {r.mc_se:.5f}) "
              f"bracket={b.kind} [{b.lower:.5f}, {b.upper:.5f}] {status}")
    _write_csv(out / "sweep.csv", SWEEP_COLUMNS, csv_rows)
    print(f"wrote {out / 'sweep.csv'}")

    violations = sum(1 for row in rows if not row.within_bracket)
    if violations:
        print(f"{violations} coverage estimate(s) fell outside the predicted "
              f"bracket", file=sys.stderr)
        return 1
    return 0


def cmd_overlap(args) -> int:
    cfg, data, _seed = _load_analysis_inputs(args)
    report = propensity_overlap(data)
    out = _out_dir(args)
    rows = [[i, int(w), logit, flagged]
            for i, (w, logit, flagged)
            in enumerate(zip(report.treatment, report.logits,
                             report.outside_support))]
    _write_csv(out / "overlap.csv", OVERLAP_COLUMNS, rows)
    _write_json(out / "overlap.json", {
        "separated": report.separated,
        "support_lower": report.support_lower,
        "support_upper": report.support_upper,
        "n_outside_support": int(report.outside_support.sum()),
        "quantiles_by_arm": report.quantiles_by_arm,
    })
    print(f"logit propensity support overlap: "
          f"[{report.support_lower:.4f}, {report.support_upper:.4f}], "
          f"{int(report.outside_support.sum())} subject(s) outside")
    if report.separated:
        print("WARNING: the treatment model separates the arms; positivity "
              "is violated and per-arm posteriors are not comparable",
              file=sys.stderr)
    print(f"wrote {out / 'overlap.csv'} and {out / 'overlap.json'}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override every seed in the input files")
    common.add_argument("--out-dir", default=".",
                        help="directory for output files (default: .)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for replications (default: 1)")

    parser = argparse.ArgumentParser(
        prog="otregimes",
        description="Bayes-optimal treatment regimes for binary outcomes",
        epilog="exit codes: 0 success, 1 coverage bracket violation, "
               "2 bad configuration or input data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="per-subject treatment decisions for a CSV dataset")
    p.add_argument("--config", required=True, help="analysis config (JSON)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", parents=[common],
                       help="Monte Carlo metrics for synthetic scenarios")
    p.add_argument("--scenario", required=True, help="scenario file (JSON)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("coverage", parents=[common],
                       help="selected-interval coverage sweep")
    p.add_argument("--grid", required=True, help="coverage grid file (JSON)")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("overlap", parents=[common],
                       help="propensity overlap diagnostic")
    p.add_argument("--config", required=True, help="analysis config (JSON)")
    p.set_defaults(func=cmd_overlap)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError, EmptyArmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
