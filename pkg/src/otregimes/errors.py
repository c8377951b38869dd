"""Exception and warning types raised across the package."""


class InvalidMarginalError(ValueError):
    """A marginal success probability lies outside [0, 1] or is not finite."""


class NoValidRootError(RuntimeError):
    """No root of the odds-ratio quadratic falls in the Frechet interval.

    This cannot happen for valid inputs; it signals an internal bug rather
    than a user error.
    """


class ZeroCellError(ValueError):
    """A joint cell probability is zero, so the odds ratio is undefined."""


class RankDeficientDesignError(ValueError):
    """The design matrix does not have full column rank."""


class SeparationWarning(UserWarning):
    """The likelihood is (near-)separable; coefficients were norm-capped."""


class SingleClassError(ValueError):
    """The outcome vector contains only one class."""


class EmptyArmError(ValueError):
    """A treatment arm has no observations."""


class SchemaError(ValueError):
    """Input data violates the declared schema (columns, types, shapes)."""


class MissingValuesError(SchemaError):
    """Input rows contain missing values; imputation is out of scope."""


class NonBinaryValueError(SchemaError):
    """A column declared binary contains values other than 0 and 1."""


class ConfigError(ValueError):
    """A configuration document cannot be parsed or validated."""
