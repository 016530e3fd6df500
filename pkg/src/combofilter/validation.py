"""Input-validation helpers shared by the estimators and config parsing."""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_signal",
    "check_signal_pair",
    "check_positive",
    "check_positive_int",
    "check_probability",
    "check_choice",
]


def check_signal(x, name="x"):
    """Coerce ``x`` to a finite 1-D float64 signal.

    Column vectors of shape (n, 1) are accepted and flattened.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D signal, got shape {np.shape(x)}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def check_signal_pair(x, d):
    """Validate an (input, desired) signal pair of equal length."""
    x = check_signal(x, "x")
    d = check_signal(d, "d")
    if x.size != d.size:
        raise ValueError(
            f"x and d must have equal length, got {x.size} and {d.size}"
        )
    return x, d


def check_positive(value, name):
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_positive_int(value, name):
    ivalue = int(value)
    if ivalue != value or ivalue < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return ivalue


def check_probability(value, name):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_choice(value, name, choices):
    if value not in choices:
        raise ValueError(f"{name} must be one of {tuple(choices)}, got {value!r}")
    return value
