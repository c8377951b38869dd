"""Deterministic kernel: bivariate binary outcome distributions and losses.

A subject with binary potential outcomes (Y(0), Y(1)) follows a four-cell
multinomial distribution with cell probabilities theta_jk = P(Y(0)=j, Y(1)=k).
The pair of marginal success probabilities (theta1plus, thetaplus1) together
with the odds ratio

    phi = theta11 * theta00 / (theta10 * theta01)

re-parametrizes the joint distribution; phi is not identified by data in which
each subject reveals only one potential outcome, so it enters as a sensitivity
parameter. Losses are eight coefficients L[j][k][a], the penalty for taking
decision a when the outcome stratum is (j, k). Everything in this module is a
pure function; all operations broadcast over numpy arrays, so a "probability"
may be a scalar or an array of posterior draws.

Treatment decisions are plain ints: 0 (control) and 1 (treat).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_decision
from .errors import InvalidMarginalError, NoValidRootError, ZeroCellError

Decision = int

# Marginals at exactly 0 or 1 make the odds ratio undefined; inputs are clamped
# to this margin (posterior draws can approach but never reach the boundary).
MARGINAL_CLAMP = 1e-12

# |phi - 1| below this uses the independence branch theta11 = theta1plus*thetaplus1
# to avoid catastrophic cancellation in the quadratic (whose leading coefficient
# is 1 - phi).
_PHI_ONE_TOL = 1e-8


@dataclass(frozen=True)
class ThetaVector:
    """Joint cell probabilities (theta00, theta10, theta01, theta11).

    Cell jk holds P(Y(0)=j, Y(1)=k). Fields may be scalars or equally shaped
    arrays (e.g. one entry per posterior draw). Instances produced by
    :func:`theta_from_marginals` are valid by construction; use
    :meth:`validate` to enforce the invariants on hand-built instances.
    """

    theta00: float
    theta10: float
    theta01: float
    theta11: float

    @property
    def theta1plus(self):
        """P(Y(0)=1) = theta10 + theta11."""
        return self.theta10 + self.theta11

    @property
    def thetaplus1(self):
        """P(Y(1)=1) = theta01 + theta11."""
        return self.theta01 + self.theta11

    def cells(self):
        return (self.theta00, self.theta10, self.theta01, self.theta11)

    def validate(self, atol=1e-12):
        """Check cells lie in [0, 1] and sum to 1 within ``atol``."""
        total = 0.0
        for cell in self.cells():
            arr = np.asarray(cell)
            if not np.all(np.isfinite(arr)):
                raise ValueError("theta cells must be finite")
            if np.any(arr < -atol) or np.any(arr > 1.0 + atol):
                raise ValueError("theta cells must lie in [0, 1]")
            total = total + arr
        if np.any(np.abs(total - 1.0) > atol):
            raise ValueError("theta cells must sum to 1")
        return self


@dataclass(frozen=True)
class MarginalPair:
    """Marginal success probabilities (theta1plus, thetaplus1), strictly in (0, 1).

    Fields may be scalars or arrays of posterior draws.
    """

    theta1plus: float
    thetaplus1: float

    def validate(self):
        for name, value in (("theta1plus", self.theta1plus),
                            ("thetaplus1", self.thetaplus1)):
            arr = np.asarray(value)
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
                raise InvalidMarginalError(
                    f"{name} must lie strictly in (0, 1)")
        return self


@dataclass(frozen=True)
class PhiSpec:
    """Sensitivity specification for the non-identified odds ratio phi.

    phi0 is the reference value at which decisions and functionals are
    reported; (lower, upper) bound the scan used to flag sensitive decisions.
    mode is one of:

    - "fixed": evaluate everything at phi0, no scan;
    - "scan": decisions additionally evaluated at lower and upper, decisions
      that change across the scan are flagged sensitive;
    - "uniform-prior": like "scan", and for non-sensitive subjects the loss
      functional integrates phi ~ Uniform(lower, upper).
    """

    phi0: float = 1.0
    lower: float = math.exp(-3.0)
    upper: float = math.exp(3.0)
    mode: str = "scan"

    def __post_init__(self):
        if not (self.lower > 0.0 and math.isfinite(self.upper)):
            raise ValueError("phi bounds must satisfy 0 < lower and upper < inf")
        if not (self.lower <= self.phi0 <= self.upper):
            raise ValueError("phi bounds must satisfy lower <= phi0 <= upper")
        if self.mode not in ("fixed", "scan", "uniform-prior"):
            raise ValueError(f"unknown phi mode {self.mode!r}")


@dataclass(frozen=True, eq=False)
class LossSpec:
    """Eight non-negative loss coefficients indexed as table[j, k, a].

    table[j, k, a] is the loss incurred by decision a for a subject whose
    outcome stratum is (Y(0)=j, Y(1)=k). Use :func:`conditional_loss_spec`
    or :func:`marginal_loss_spec` to build the two standard parametrizations.
    """

    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float)
        if table.shape != (2, 2, 2):
            raise ValueError(f"loss table must have shape (2, 2, 2), got {table.shape}")
        if not np.all(np.isfinite(table)) or np.any(table < 0.0):
            raise ValueError("loss coefficients must be finite and non-negative")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def coefficient(self, j, k, a):
        return float(self.table[j, k, a])

    def __repr__(self):
        return f"LossSpec(table={self.table.tolist()})"


def conditional_loss_spec(L00_1, L01_0, L10_1, L11_1) -> LossSpec:
    """Per-stratum parametrization: losses of correct decisions are zero.

    The four free coefficients penalize decision 1 in strata 00, 10, 11 and
    decision 0 in stratum 01; the remaining four coefficients are zero.
    """
    table = np.zeros((2, 2, 2))
    table[0, 0, 1] = L00_1
    table[0, 1, 0] = L01_0
    table[1, 0, 1] = L10_1
    table[1, 1, 1] = L11_1
    return LossSpec(table)


def marginal_loss_spec(L_d, L_t) -> LossSpec:
    """Additive parametrization: L_d per negative outcome, L_t per treatment.

    Decision 0 costs L_d when Y(0)=0; decision 1 costs L_d when Y(1)=0 plus a
    flat burden L_t. The implied decision contrast depends on the joint
    distribution only through its marginals, never through the odds ratio.
    """
    table = np.zeros((2, 2, 2))
    for j in (0, 1):
        for k in (0, 1):
            table[j, k, 0] = L_d if j == 0 else 0.0
            table[j, k, 1] = (L_d if k == 0 else 0.0) + L_t
    return LossSpec(table)


def theta_from_marginals(m: MarginalPair, phi) -> ThetaVector:
    """Invert (marginals, odds ratio) into the four joint cell probabilities.

    Solves b*t^2 + c*t + d = 0 for t = theta11 with b = 1-phi,
    c = 1 - b*(theta1plus + thetaplus1), d = -phi*theta1plus*thetaplus1,
    taking the root inside the Frechet interval
    [max(0, theta1plus+thetaplus1-1), min(theta1plus, thetaplus1)].
    For |phi - 1| < 1e-8 the independence solution t = theta1plus*thetaplus1
    is used directly. Marginals at the boundary are clamped inward by 1e-12.

    Broadcasts over array-valued marginals and phi.
    """
    m0 = np.asarray(m.theta1plus, dtype=float)
    m1 = np.asarray(m.thetaplus1, dtype=float)
    for name, arr in (("theta1plus", m0), ("thetaplus1", m1)):
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise InvalidMarginalError(f"{name} must lie in [0, 1] and be finite")
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)) or np.any(phi <= 0.0):
        raise ValueError("phi must be positive and finite")

    m0 = np.clip(m0, MARGINAL_CLAMP, 1.0 - MARGINAL_CLAMP)
    m1 = np.clip(m1, MARGINAL_CLAMP, 1.0 - MARGINAL_CLAMP)

    lo = np.maximum(0.0, m0 + m1 - 1.0)
    hi = np.minimum(m0, m1)

    b = 1.0 - phi
    c = 1.0 - b * (m0 + m1)
    d = -phi * m0 * m1
    disc = c * c - 4.0 * b * d
    sq = np.sqrt(np.maximum(disc, 0.0))
    # Stable two-root form: q/b and d/q avoid cancellation for either sign of c.
    q = -0.5 * (c + np.copysign(sq, c))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(b != 0.0, q / np.where(b != 0.0, b, 1.0), np.inf)
        r2 = np.where(q != 0.0, d / np.where(q != 0.0, q, 1.0), np.inf)
    tol = 1e-9
    in1 = (r1 >= lo - tol) & (r1 <= hi + tol)
    t = np.where(in1, r1, r2)
    t = np.where(np.abs(phi - 1.0) < _PHI_ONE_TOL, m0 * m1, t)
    if np.any(t < lo - tol) or np.any(t > hi + tol) or not np.all(np.isfinite(t)):
        raise NoValidRootError(
            "no quadratic root inside the Frechet interval; this is a bug")
    # Clip exactly into the interval so all four cells are >= 0 even when
    # rounding pushed the root a few ulp outside.
    t = np.clip(t, lo, hi)
    return ThetaVector(theta00=1.0 - m0 - m1 + t,
                       theta10=m0 - t,
                       theta01=m1 - t,
                       theta11=t)


def odds_ratio(theta: ThetaVector):
    """Return theta11*theta00 / (theta10*theta01); all cells must be positive."""
    th00, th10, th01, th11 = theta.cells()
    cells = [np.asarray(c, dtype=float) for c in (th00, th10, th01, th11)]
    if any(np.any(c <= 0.0) for c in cells):
        raise ZeroCellError("odds ratio undefined: a joint cell is zero")
    return (np.asarray(th11, float) * th00) / (np.asarray(th10, float) * th01)


def expected_loss(a: Decision, theta: ThetaVector, spec: LossSpec):
    """Expected loss of decision a: sum over strata of L[j,k,a] * theta_jk."""
    a = check_decision(a)
    L = spec.table
    return (L[0, 0, a] * theta.theta00 + L[0, 1, a] * theta.theta01
            + L[1, 0, a] * theta.theta10 + L[1, 1, a] * theta.theta11)


def loss_contrast(theta: ThetaVector, spec: LossSpec):
    """Expected loss of decision 1 minus expected loss of decision 0.

    Negative values favour treating; a contrast of exactly zero resolves to
    decision 0 downstream (the less burdensome arm wins ties).
    """
    return expected_loss(1, theta, spec) - expected_loss(0, theta, spec)


def expected_outcome(a: Decision, theta: ThetaVector):
    """Success probability under decision a: theta1plus if a=0 else thetaplus1."""
    a = check_decision(a)
    return theta.thetaplus1 if a == 1 else theta.theta1plus


def outcome_contrast(theta: ThetaVector):
    """thetaplus1 - theta1plus, the gain in success probability from treating."""
    return theta.thetaplus1 - theta.theta1plus


# Named loss presets. OTRmax rewards only the outcome; the OTR.25 / OTR.50
# variants add increasing treatment-burden penalties to every stratum.
LOSS_PRESETS = {
    "OTRmax": (0.0, 1.0, 1.0, 0.0),
    "OTR.25": (0.25, 1.0, 1.25, 0.25),
    "OTR.50": (0.50, 1.0, 1.50, 0.50),
}


def loss_preset(name: str) -> LossSpec:
    """Resolve a named preset (OTRmax, OTR.25, OTR.50) to its LossSpec."""
    try:
        coeffs = LOSS_PRESETS[name]
    except KeyError:
        options = ", ".join(sorted(LOSS_PRESETS))
        raise ValueError(f"unknown loss preset {name!r}; choose one of {options}")
    return conditional_loss_spec(*coeffs)
