"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .exceptions import ParameterError


def check_series(y, min_length: int = 5) -> np.ndarray:
    """Coerce ``y`` to a 1-d float array of observations Y_0..Y_n.

    Returns a fresh contiguous float64 copy. Raises ParameterError when the
    input is not 1-d, too short, or contains non-finite entries.
    """
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise ParameterError(f"series must be 1-d, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise ParameterError(
            f"series has {arr.shape[0]} observations; at least {min_length} required"
        )
    if not np.all(np.isfinite(arr)):
        raise ParameterError("series contains non-finite values")
    return np.ascontiguousarray(arr)


def check_rho(rho: float) -> float:
    """Validate a hypothesized or true autoregressive coefficient."""
    rho = float(rho)
    if not np.isfinite(rho) or not (-1.0 < rho <= 1.0):
        raise ParameterError(f"rho must lie in (-1, 1], got {rho}")
    return rho


def check_prob(alpha: float, name: str = "alpha") -> float:
    """Validate a probability strictly inside (0, 1)."""
    alpha = float(alpha)
    if not np.isfinite(alpha) or not (0.0 < alpha < 1.0):
        raise ParameterError(f"{name} must lie in (0, 1), got {alpha}")
    return alpha


def check_positive_int(value, name: str) -> int:
    """Validate a strictly positive integer."""
    iv = int(value)
    if iv != value or iv < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    return iv


def check_positive_float(value, name: str) -> float:
    """Validate a finite, strictly positive float."""
    fv = float(value)
    if not np.isfinite(fv) or fv <= 0.0:
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return fv
