"""The initial-condition-robust estimator, HC5 variance, and t statistic.

For a hypothesized coefficient rho, the estimator partials the two-column
design X2(rho) out of the lagged-series regressor and the response:

    rho_hat(rho) = (X1' M2 X1)^(-1) X1' M2 Y,        M2 = M_{X2(rho)}

The HC5 sandwich uses residuals from the FULL design [X1 : X2(rho)], each
inflated by 1/(1 - p*_ii) with leverages capped at n^(-1/2):

    sigma2_hat(rho) = (X1'M2X1/n)^(-1) (X1'M2 D^2 M2 X1/n) (X1'M2X1/n)^(-1)

and t(rho) = sqrt(n) (rho_hat - rho) / sigma_hat(rho). Because M2 annihilates
the columns (1, rho^(i-1)), t at the true rho is exactly invariant to the
level mu and the initial condition Y*_0, and to rescaling of the innovations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_rho, check_series
from .design import PIVOT_RTOL, annihilate, build_design, hat_diagonals
from .exceptions import DegenerateVarianceError, ParameterError, SingularDesignError

__all__ = ["TStatResult", "ProfilePoint", "icr_estimate", "t_profile", "TProfileKernel"]

# Sandwich variances at or below this signal an exactly fitting series.
VARIANCE_FLOOR = 1e-300


@dataclass(frozen=True)
class TStatResult:
    """Point estimate, sandwich variance, and t statistic at one rho."""

    rho_hat: float
    sigma2_hat: float
    t: float
    residual_scale: float


@dataclass(frozen=True)
class ProfilePoint:
    """One grid entry of a t-statistic profile; ``error`` set on failure."""

    rho: float
    result: TStatResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


def icr_estimate(series, rho: float) -> TStatResult:
    """Evaluate the estimator, HC5 variance, and t statistic at one rho.

    Raises SingularDesignError when [X1 : X2(rho)] is numerically rank
    deficient and DegenerateVarianceError when the sandwich collapses, which
    happens only for exactly fitting series.
    """
    y = check_series(series, min_length=6)
    rho = check_rho(rho)
    dm = build_design(y, rho)
    n = dm.x1.shape[0]
    yr = y[1:]
    lev = hat_diagonals(np.column_stack([dm.x1, dm.x2]))
    v = annihilate(dm.x1, dm.x2)
    m2y = annihilate(yr, dm.x2)
    vx1 = float(v @ dm.x1)
    rho_hat = float(v @ yr) / vx1
    uhat = m2y - rho_hat * v
    delta = uhat / (1.0 - lev.p_ii_star)
    bread = vx1 / n
    meat = float(np.sum((v * delta) ** 2)) / n
    sigma2 = meat / bread**2
    if not np.isfinite(sigma2) or sigma2 <= VARIANCE_FLOOR:
        raise DegenerateVarianceError(
            f"sandwich variance {sigma2:.3e} at rho={rho}; series fits exactly"
        )
    t = np.sqrt(n) * (rho_hat - rho) / np.sqrt(sigma2)
    return TStatResult(
        rho_hat=rho_hat,
        sigma2_hat=sigma2,
        t=float(t),
        residual_scale=float(np.max(np.abs(uhat))),
    )


class TProfileKernel:
    """Vectorized t-statistic evaluation over a fixed rho grid.

    Grid-dependent quantities (the power matrix rho^(i-1), the 2x2 Gram
    entries, and the X2-leverage core) are precomputed once, so repeated
    series evaluations cost a handful of (grid x n) array passes. Points at
    rho = 1 are not supported here; callers route them through
    :func:`icr_estimate`.
    """

    def __init__(self, n: int, grid: np.ndarray):
        if n < 5:
            raise ParameterError(f"n must be at least 5, got {n}")
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ParameterError("rho grid must be a nonempty 1-d vector")
        if np.any(grid <= -1.0) or np.any(grid >= 1.0):
            raise ParameterError("kernel grid values must lie in (-1, 1)")
        self.n = n
        self.grid = grid
        self.r_pow = np.vander(grid, n, increasing=True)
        self.s = self.r_pow.sum(axis=1)
        self.q = np.einsum("ij,ij->i", self.r_pow, self.r_pow)
        self.det = n * self.q - self.s * self.s
        # 2x2 pivot-ratio rank check per grid point (columns have unit
        # sup-norm already since |rho| < 1 and the intercept is 1).
        d1 = np.maximum(float(n), self.q)
        self._nonsingular = self.det > PIVOT_RTOL * d1 * d1
        with np.errstate(divide="ignore", invalid="ignore"):
            self.p2_core = (
                self.q[:, None] - 2.0 * self.s[:, None] * self.r_pow
                + n * self.r_pow * self.r_pow
            ) / self.det[:, None]
        self._cap = n ** -0.5
        self._sqrt_n = np.sqrt(n)

    def stats(self, y: np.ndarray):
        """Profile a series over the grid.

        Returns (rho_hat, sigma2, t, residual_scale, ok) arrays; ``ok`` is
        False where the design is rank deficient or the variance degenerate,
        with nan entries in the numeric outputs there.
        """
        y = np.asarray(y, dtype=float)
        n = self.n
        if y.shape[0] != n + 1:
            raise ParameterError(f"series length {y.shape[0]} != n+1 = {n + 1}")
        x1 = y[:-1]
        yr = y[1:]
        R, S, Q, det = self.r_pow, self.s, self.q, self.det
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            sx1 = x1.sum()
            sy = yr.sum()
            rx1 = R @ x1
            ry = R @ yr
            c1a = (Q * sx1 - S * rx1) / det
            c1b = (n * rx1 - S * sx1) / det
            cya = (Q * sy - S * ry) / det
            cyb = (n * ry - S * sy) / det
            v = x1[None, :] - c1a[:, None] - c1b[:, None] * R
            m2y = yr[None, :] - cya[:, None] - cyb[:, None] * R
            vv = np.einsum("ij,ij->i", v, v)
            vx1 = v @ x1
            vy = v @ yr
            rho_hat = vy / vx1
            uhat = m2y - rho_hat[:, None] * v
            p = self.p2_core + v * v / vv[:, None]
            np.minimum(p, self._cap, out=p)
            w = v * uhat / (1.0 - p)
            meat = np.einsum("ij,ij->i", w, w) / n
            bread = vx1 / n
            sigma2 = meat / (bread * bread)
            t = self._sqrt_n * (rho_hat - self.grid) / np.sqrt(sigma2)
            resid_scale = np.max(np.abs(uhat), axis=1)
        # Third pivot of the full-design Gram is v'v after equilibrating x1.
        x1_sup = float(np.max(np.abs(x1)))
        full_rank = vv > PIVOT_RTOL * n * x1_sup * x1_sup if x1_sup > 0 else np.zeros_like(vv, bool)
        singular = ~(self._nonsingular & full_rank)
        degenerate = ~singular & ~(np.isfinite(sigma2) & (sigma2 > VARIANCE_FLOOR))
        ok = ~singular & ~degenerate & np.isfinite(t)
        for arr in (rho_hat, sigma2, t, resid_scale):
            arr[~ok] = np.nan
        return rho_hat, sigma2, t, resid_scale, ok


def t_profile(series, rho_grid) -> list[ProfilePoint]:
    """Evaluate the t statistic on an increasing grid of rho values.

    Per-point estimator failures are recorded in the returned entries rather
    than raised, so a single bad grid point cannot abort a profile.
    """
    y = check_series(series, min_length=6)
    grid = np.asarray(rho_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("rho grid must be a nonempty 1-d vector")
    if np.any(np.diff(grid) <= 0.0):
        raise ParameterError("rho grid must be strictly increasing")
    if grid[0] <= -1.0 or grid[-1] > 1.0:
        raise ParameterError("rho grid values must lie in (-1, 1]")
    n = y.shape[0] - 1
    interior = grid[grid < 1.0]
    points: list[ProfilePoint] = []
    if interior.size:
        kernel = TProfileKernel(n, interior)
        rho_hat, sigma2, t, scale, ok = kernel.stats(y)
        for j, rho in enumerate(interior):
            if ok[j]:
                res = TStatResult(
                    rho_hat=float(rho_hat[j]),
                    sigma2_hat=float(sigma2[j]),
                    t=float(t[j]),
                    residual_scale=float(scale[j]),
                )
                points.append(ProfilePoint(rho=float(rho), result=res))
            else:
                points.append(
                    ProfilePoint(rho=float(rho), error="singular or degenerate design")
                )
    if grid[-1] == 1.0:
        try:
            points.append(ProfilePoint(rho=1.0, result=icr_estimate(y, 1.0)))
        except (SingularDesignError, DegenerateVarianceError) as exc:
            points.append(ProfilePoint(rho=1.0, error=str(exc)))
    return points
