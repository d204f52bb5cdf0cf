"""Input validation helpers used across the package."""

import numpy as np

from .errors import NonFiniteError, NonSquareError


def check_square(m, name="matrix", dtype=complex, allow_stack=False):
    """Return ``m`` as a square ndarray, raising on bad shape or non-finite data.

    With ``allow_stack`` a stack of shape ``(..., n, n)`` is accepted.
    """
    a = np.asarray(m, dtype=dtype)
    if a.ndim == 0 or (a.ndim != 2 and not (allow_stack and a.ndim > 2)):
        raise NonSquareError(f"{name} must be a 2-D square array, got shape {a.shape}")
    if a.shape[-1] != a.shape[-2] or a.shape[-1] == 0:
        raise NonSquareError(f"{name} must be square with order >= 1, got shape {a.shape}")
    check_finite(a, name)
    return a


def check_finite(a, name="array"):
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return a


def check_scalar(x, name, *, positive=False, error=None):
    """Validate a finite real scalar; optionally require ``x > 0``."""
    try:
        value = float(x)
    except (TypeError, ValueError) as exc:
        raise NonFiniteError(f"{name} must be a real number, got {x!r}") from exc
    if not np.isfinite(value):
        raise NonFiniteError(f"{name} must be finite, got {value}")
    if positive and value <= 0:
        raise (error or ValueError)(f"{name} must be positive, got {value}")
    return value
