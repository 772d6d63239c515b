"""Regression design objects for the partialled AR(1) fit.

For a hypothesized coefficient rho the design is X = [X1 : X2(rho)], where
X1 holds the lagged series and X2(rho) has rows (1, rho^(i-1)) when |rho| < 1
(convention 0^0 = 1) and rows (1, i) when rho = 1. Projections are computed
through the tiny 2x2 / 3x3 Gram systems; no n x n matrix is ever formed, so
each evaluation is O(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_rho, check_series
from .exceptions import ParameterError, SingularDesignError

__all__ = [
    "DesignMatrices",
    "LeverageVector",
    "build_design",
    "annihilate",
    "hat_diagonals",
]

# A design is declared singular when the smallest-to-largest pivot ratio of
# its (equilibrated) Gram matrix falls below this.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class DesignMatrices:
    """Lagged-series regressor ``x1`` and the two-column design ``x2``."""

    x1: np.ndarray
    x2: np.ndarray
    rho: float


@dataclass(frozen=True)
class LeverageVector:
    """Hat-matrix diagonal ``p_ii`` of the full design and its capped form."""

    p_ii: np.ndarray
    p_ii_star: np.ndarray


def build_design(series, rho: float) -> DesignMatrices:
    """Build X1 and X2(rho) from observations Y_0..Y_n."""
    y = check_series(series, min_length=3)
    rho = check_rho(rho)
    n = y.shape[0] - 1
    x1 = y[:-1].copy()
    if rho == 1.0:
        second = np.arange(1, n + 1, dtype=float)
    else:
        second = rho ** np.arange(n, dtype=float)
    x2 = np.column_stack([np.ones(n), second])
    return DesignMatrices(x1=x1, x2=x2, rho=rho)


def _equilibrate(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale columns to unit sup-norm; projections are scale invariant."""
    norms = np.max(np.abs(x), axis=0)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise SingularDesignError("design has a zero or non-finite column")
    return x / norms, norms


def _gram_pivots(g: np.ndarray) -> np.ndarray:
    """Pivots of a symmetric PSD matrix under greedy diagonal pivoting."""
    a = g.copy()
    k = a.shape[0]
    pivots = np.empty(k)
    idx = list(range(k))
    for step in range(k):
        j = max(idx, key=lambda i: a[i, i])
        d = a[j, j]
        pivots[step] = d
        idx.remove(j)
        if d <= 0.0:
            pivots[step:] = min(d, 0.0)
            break
        for r in idx:
            for c in idx:
                a[r, c] -= a[r, j] * a[j, c] / d
    return pivots


def _check_rank(g: np.ndarray) -> np.ndarray:
    pivots = _gram_pivots(g)
    if pivots[0] <= 0.0 or pivots[-1] < PIVOT_RTOL * pivots[0]:
        raise SingularDesignError(
            f"rank-deficient design: pivot ratio {pivots[-1] / pivots[0]:.3e}"
        )
    return pivots


def annihilate(v, x2) -> np.ndarray:
    """Project ``v`` onto the orthocomplement of the columns of ``x2``.

    Returns v - X2 (X2'X2)^(-1) X2'v via the 2x2 Gram system.
    """
    v = np.asarray(v, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x2.ndim != 2 or v.ndim != 1 or x2.shape[0] != v.shape[0]:
        raise ParameterError(
            f"incompatible shapes: v {v.shape}, x2 {x2.shape}"
        )
    xs, _ = _equilibrate(x2)
    gram = xs.T @ xs
    _check_rank(gram)
    coef = np.linalg.solve(gram, xs.T @ v)
    return v - xs @ coef


def hat_diagonals(x) -> LeverageVector:
    """Diagonal of the projection matrix of ``x``, with the HC5 cap.

    ``p_ii_star`` caps each leverage at n^(-1/2).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] <= x.shape[1]:
        raise ParameterError(f"expected a tall design matrix, got shape {x.shape}")
    n = x.shape[0]
    xs, _ = _equilibrate(x)
    gram = xs.T @ xs
    _check_rank(gram)
    ginv = np.linalg.inv(gram)
    p = np.einsum("ij,jk,ik->i", xs, ginv, xs)
    p_star = np.minimum(p, n ** -0.5)
    return LeverageVector(p_ii=p, p_ii_star=p_star)
