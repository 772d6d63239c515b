"""Test-inversion confidence intervals and the median-unbiased estimator.

The level 1-alpha equal-tailed interval collects every rho on a fine grid
over [-1+eps, 1] whose t statistic falls between the critical values
c_h(alpha/2) and c_h(1-alpha/2) evaluated at h = n(1-rho). The reported
interval is [min, max] of the accepted set; the full acceptance mask is kept
because the set can in principle be disconnected.

The median-unbiased estimator inverts the one-sided level-.5 tests:
rho_up is the largest rho with c_h(.5) <= t(rho) and rho_low the smallest
with t(rho) <= c_h(.5). When the t profile crosses the median curve strictly
between two adjacent grid points, both one-sided extremes equal that
crossing; it is reported as the midpoint of the bracketing pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._validation import check_positive_float, check_prob, check_series
from .exceptions import DegenerateVarianceError, ParameterError, SingularDesignError
from .limitdist import QuantileTable, lookup
from .tstat import TProfileKernel, icr_estimate

__all__ = [
    "IntervalResult",
    "MueResult",
    "InversionGrid",
    "invert_ci",
    "mue",
    "make_rho_grid",
    "DEFAULT_GRID_STEP",
    "DEFAULT_DOMAIN_EPS",
]

DEFAULT_GRID_STEP = 1e-3
DEFAULT_DOMAIN_EPS = 1e-3


@dataclass(frozen=True)
class IntervalResult:
    """A two-sided confidence interval with its acceptance diagnostics."""

    lower: float
    upper: float
    alpha: float
    grid_step: float
    accepted_grid: np.ndarray
    grid: np.ndarray
    empty: bool
    disconnected: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def length(self) -> float:
        return 0.0 if self.empty else self.upper - self.lower


@dataclass(frozen=True)
class MueResult:
    """Median-unbiased interval [rho_low, rho_up]; usually a point."""

    rho_low: float
    rho_up: float
    is_point: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def estimate(self) -> float:
        """Scalar estimate: the upper endpoint when the interval is not a point."""
        return self.rho_up


def make_rho_grid(grid_step: float = DEFAULT_GRID_STEP, domain_eps: float = DEFAULT_DOMAIN_EPS) -> np.ndarray:
    """Grid over [-1+eps, 1] including both endpoints and exactly 1.

    Constructed in integer arithmetic when 1/grid_step is integral, so nice
    hypothesized values (0, 0.5, 0.99, ...) land exactly on grid points.
    """
    step = check_positive_float(grid_step, "grid_step")
    eps = check_positive_float(domain_eps, "domain_eps")
    if eps >= 2.0 or step > 1.0:
        raise ParameterError("need domain_eps < 2 and grid_step <= 1")
    lower = -1.0 + eps
    scale = round(1.0 / step)
    if abs(scale * step - 1.0) < 1e-9:
        k0 = int(np.ceil(lower * scale - 1e-9))
        grid = np.arange(k0, scale + 1, dtype=float) / scale
        if grid[0] > lower + 1e-12:
            grid = np.concatenate([[lower], grid])
    else:
        count = int(np.floor((1.0 - lower) / step + 1e-9))
        grid = lower + step * np.arange(count + 1)
        if grid[-1] < 1.0 - 1e-12:
            grid = np.concatenate([grid, [1.0]])
        grid[-1] = 1.0
    return grid


class InversionGrid:
    """Shared machinery for inverting many series on one (n, grid, table).

    Precomputes the profile kernel and the per-grid-point critical values,
    so Monte Carlo loops pay only the per-series array passes.
    """

    def __init__(
        self,
        n: int,
        table: QuantileTable,
        alpha: float = 0.05,
        grid_step: float = DEFAULT_GRID_STEP,
        domain_eps: float = DEFAULT_DOMAIN_EPS,
    ):
        self.alpha = check_prob(alpha)
        self.grid_step = float(grid_step)
        self.table = table
        self.n = int(n)
        self.grid = make_rho_grid(grid_step, domain_eps)
        self.has_unit_point = self.grid[-1] == 1.0
        interior = self.grid[:-1] if self.has_unit_point else self.grid
        self.kernel = TProfileKernel(self.n, interior)
        self._h = self.n * (1.0 - self.grid)

    @cached_property
    def c_low(self) -> np.ndarray:
        return lookup(self.table, self._h, self.alpha / 2.0)

    @cached_property
    def c_high(self) -> np.ndarray:
        return lookup(self.table, self._h, 1.0 - self.alpha / 2.0)

    @cached_property
    def c_med(self) -> np.ndarray:
        return lookup(self.table, self._h, 0.5)

    def t_values(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
        """t statistic and validity mask on the full grid; errors counted."""
        y = np.asarray(y, dtype=float)
        _, _, t_int, _, ok_int = self.kernel.stats(y)
        if not self.has_unit_point:
            return t_int, ok_int, int(np.count_nonzero(~ok_int))
        t = np.empty(self.grid.size)
        ok = np.empty(self.grid.size, dtype=bool)
        t[:-1] = t_int
        ok[:-1] = ok_int
        try:
            t[-1] = icr_estimate(y, 1.0).t
            ok[-1] = True
        except (SingularDesignError, DegenerateVarianceError):
            t[-1] = np.nan
            ok[-1] = False
        return t, ok, int(np.count_nonzero(~ok))

    def invert(self, y: np.ndarray) -> IntervalResult:
        return self._interval_from(*self.t_values(y))

    def mue(self, y: np.ndarray) -> MueResult:
        return self._mue_from(*self.t_values(y))

    def evaluate(self, y: np.ndarray) -> tuple[IntervalResult, MueResult]:
        """Interval and MUE from a single profile pass."""
        t, ok, n_err = self.t_values(y)
        return self._interval_from(t, ok, n_err), self._mue_from(t, ok, n_err)

    def _interval_from(self, t, ok, n_err) -> IntervalResult:
        accepted = ok & (t >= self.c_low) & (t <= self.c_high)
        idx = np.flatnonzero(accepted)
        empty = idx.size == 0
        disconnected = bool(idx.size > 1 and np.any(np.diff(idx) > 1))
        if empty:
            lower = upper = float("nan")
        else:
            lower = float(self.grid[idx[0]])
            upper = float(self.grid[idx[-1]])
        return IntervalResult(
            lower=lower,
            upper=upper,
            alpha=self.alpha,
            grid_step=self.grid_step,
            accepted_grid=accepted,
            grid=self.grid,
            empty=empty,
            disconnected=disconnected,
            diagnostics={"estimator_errors": n_err},
        )

    def _mue_from(self, t, ok, n_err) -> MueResult:
        if not ok.any():
            raise SingularDesignError("no grid point admits the estimator")
        diag = {"estimator_errors": n_err, "clamped": None}
        upper_side = ok & (t >= self.c_med)  # one-sided upper-bound CI at level .5
        lower_side = ok & (t <= self.c_med)  # one-sided lower-bound CI at level .5
        if not upper_side.any():
            rho_up = float(self.grid[0])
            diag["clamped"] = "upper_set_empty"
        else:
            rho_up = float(self.grid[np.flatnonzero(upper_side)[-1]])
        if not lower_side.any():
            rho_low = float(self.grid[-1])
            diag["clamped"] = "lower_set_empty"
        else:
            rho_low = float(self.grid[np.flatnonzero(lower_side)[0]])
        if rho_low > rho_up:
            # The median curve was crossed strictly between adjacent usable
            # grid points; that crossing belongs to both one-sided sets, so
            # both extremes equal it up to grid resolution. The bracket is
            # one step wide unless estimator errors blanked points inside it.
            diag["crossing_bracket"] = (rho_up, rho_low)
            rho_low = rho_up = 0.5 * (rho_low + rho_up)
        return MueResult(
            rho_low=rho_low,
            rho_up=rho_up,
            is_point=bool(rho_up - rho_low <= self.grid_step),
            diagnostics=diag,
        )


def invert_ci(
    series,
    alpha: float,
    table: QuantileTable,
    grid_step: float = DEFAULT_GRID_STEP,
    domain_eps: float = DEFAULT_DOMAIN_EPS,
) -> IntervalResult:
    """Equal-tailed level 1-alpha confidence interval for rho.

    An empty acceptance set is reported through ``empty=True`` (with nan
    endpoints), not raised; coverage accounting treats it as a miss.
    """
    y = check_series(series, min_length=6)
    grid = InversionGrid(y.shape[0] - 1, table, alpha, grid_step, domain_eps)
    return grid.invert(y)


def mue(
    series,
    table: QuantileTable,
    grid_step: float = DEFAULT_GRID_STEP,
    domain_eps: float = DEFAULT_DOMAIN_EPS,
) -> MueResult:
    """Median-unbiased interval estimator of rho from level-.5 inversion."""
    y = check_series(series, min_length=6)
    grid = InversionGrid(y.shape[0] - 1, table, 0.5, grid_step, domain_eps)
    return grid.mue(y)
