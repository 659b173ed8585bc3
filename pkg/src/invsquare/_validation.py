"""Input checks shared by the solvers and the estimator wrappers."""

import math

import numpy as np

from .exceptions import BelowThresholdError, DomainError

CRITICAL_STRENGTH = 0.25


def check_rho0_sq(rho0_sq, bound=True):
    """Return rho0^2 as a float; with ``bound`` require it above 1/4."""
    try:
        value = float(rho0_sq)
    except (TypeError, ValueError):
        raise DomainError(f"rho0_sq must be a real number, got {rho0_sq!r}") from None
    if not math.isfinite(value):
        raise DomainError("rho0_sq must be finite")
    if bound and not value > CRITICAL_STRENGTH:
        raise BelowThresholdError(
            f"rho0_sq={value!r} is below critical strength 1/4: no bound states")
    return value


def check_eps_over_a(eps_over_a):
    value = float(eps_over_a)
    if not 0.0 < value < 1.0:
        raise DomainError(f"eps_over_a must lie in (0, 1), got {eps_over_a!r}")
    return value


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value or int(value) < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_grid(grid, lower=0.0, upper=None, name="grid"):
    """1-d, finite, strictly increasing array within [lower, upper]."""
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(np.diff(arr) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    if arr[0] < lower or (upper is not None and arr[-1] > upper):
        raise DomainError(f"{name} must lie within [{lower}, {upper}]")
    return arr


def check_column(X, name="X"):
    """Accept a scalar, 1-d sequence or (n, 1) array and return a flat float array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    elif arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DomainError(f"{name} must have a single column (rho0_sq), got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise DomainError(f"{name} must be 1-d or a single column")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr
