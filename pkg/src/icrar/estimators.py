"""Scikit-learn style front end for interval and point estimation.

These wrappers expose the inference procedures through the familiar
``fit`` / ``get_params`` protocol so they compose with tooling that expects
estimator objects. ``fit`` takes the observed series (Y_0..Y_n) as a 1-d
array; fitted results are attributes with trailing underscores.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_series
from .intervals import DEFAULT_DOMAIN_EPS, DEFAULT_GRID_STEP, InversionGrid
from .limitdist import QuantileTable, bundled_table
from .tstat import icr_estimate

__all__ = ["IcrConfidenceInterval", "IcrMedianUnbiased"]


class _IcrBase(BaseEstimator):
    def _resolve_table(self) -> QuantileTable:
        return self.table if self.table is not None else bundled_table()

    def _check_fitted(self):
        if not hasattr(self, "n_"):
            raise NotFittedError(
                f"this {type(self).__name__} instance is not fitted yet; call fit first"
            )


class IcrConfidenceInterval(_IcrBase):
    """Equal-tailed test-inversion confidence interval for the AR coefficient.

    Parameters
    ----------
    alpha : float, default 0.05
        Nominal non-coverage level.
    grid_step : float, default 1e-3
        Spacing of the inversion grid over [-1 + domain_eps, 1].
    domain_eps : float, default 1e-3
        Offset of the lower domain endpoint from -1.
    table : QuantileTable or None
        Critical values; ``None`` selects the bundled table.

    Attributes (after fit)
    ----------------------
    lower_, upper_ : float
        Interval endpoints (nan when the acceptance set is empty).
    empty_, disconnected_ : bool
    accepted_grid_, grid_ : ndarray
    result_ : IntervalResult
    """

    def __init__(self, alpha=0.05, grid_step=DEFAULT_GRID_STEP,
                 domain_eps=DEFAULT_DOMAIN_EPS, table=None):
        self.alpha = alpha
        self.grid_step = grid_step
        self.domain_eps = domain_eps
        self.table = table

    def fit(self, y, X=None):
        series = check_series(y, min_length=6)
        inv = InversionGrid(
            series.shape[0] - 1,
            self._resolve_table(),
            self.alpha,
            self.grid_step,
            self.domain_eps,
        )
        result = inv.invert(series)
        self.n_ = series.shape[0] - 1
        self.result_ = result
        self.lower_ = result.lower
        self.upper_ = result.upper
        self.empty_ = result.empty
        self.disconnected_ = result.disconnected
        self.accepted_grid_ = result.accepted_grid
        self.grid_ = result.grid
        return self

    def interval(self) -> tuple[float, float]:
        self._check_fitted()
        return self.lower_, self.upper_


class IcrMedianUnbiased(_IcrBase):
    """Median-unbiased interval estimator of the AR coefficient.

    After ``fit``, ``rho_low_`` and ``rho_up_`` hold the interval (usually a
    point); ``rho_`` is the scalar estimate (the upper endpoint when the two
    differ). ``predict`` with no arguments returns ``rho_`` for convenience.
    """

    def __init__(self, grid_step=DEFAULT_GRID_STEP, domain_eps=DEFAULT_DOMAIN_EPS, table=None):
        self.grid_step = grid_step
        self.domain_eps = domain_eps
        self.table = table

    def fit(self, y, X=None):
        series = check_series(y, min_length=6)
        inv = InversionGrid(
            series.shape[0] - 1,
            self._resolve_table(),
            0.5,
            self.grid_step,
            self.domain_eps,
        )
        result = inv.mue(series)
        self.n_ = series.shape[0] - 1
        self.result_ = result
        self.rho_low_ = result.rho_low
        self.rho_up_ = result.rho_up
        self.is_point_ = result.is_point
        self.rho_ = result.estimate
        self.t_at_estimate_ = _safe_t(series, result.estimate)
        return self

    def predict(self, X=None) -> float:
        self._check_fitted()
        return self.rho_


def _safe_t(series: np.ndarray, rho: float) -> float:
    try:
        return icr_estimate(series, rho).t
    except Exception:
        return float("nan")
