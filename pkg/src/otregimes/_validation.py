"""Small input-validation helpers shared by the estimators and the CLI."""

import numpy as np

from .errors import SchemaError


def as_float_matrix(X, name="X"):
    """Coerce to a 2-d float array with at least one row and one column."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise SchemaError(f"{name} must be a 2-d matrix, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise SchemaError(f"{name} must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise SchemaError(f"{name} contains non-finite values")
    return X


def as_binary_vector(y, name="y"):
    """Coerce to a 1-d float vector containing only 0.0 and 1.0."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size < 1:
        raise SchemaError(f"{name} must be non-empty")
    if not np.all(np.isin(y, (0.0, 1.0))):
        bad = y[~np.isin(y, (0.0, 1.0))][0]
        raise SchemaError(f"{name} must contain only 0 and 1, found {bad!r}")
    return y


def check_same_length(n, *arrays_with_names):
    for arr, name in arrays_with_names:
        if len(arr) != n:
            raise SchemaError(f"{name} has length {len(arr)}, expected {n}")


def check_decision(a):
    """Validate a treatment decision; returns it as a plain int 0 or 1."""
    if a in (0, 1, False, True):
        return int(a)
    raise ValueError(f"decision must be 0 or 1, got {a!r}")
