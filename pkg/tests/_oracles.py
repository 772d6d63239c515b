"""Independent reference implementations used only by the tests.

Everything here is deliberately naive: dense n x n projection matrices,
O(N^2) convolution sums, quadrature Gram matrices, scalar grid scans. The
production code must agree with these, not the other way around.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from icrar.limitdist import QuantileTable, lookup
from icrar.tstat import icr_estimate


def ar1_closed_form(mu: float, rho: float, y0_star: float, u: np.ndarray) -> np.ndarray:
    """Direct evaluation of Y_i = mu + rho^(i-1) rho Y*_0 + sum rho^(i-j) U_j."""
    n = u.shape[0]
    y = np.empty(n + 1)
    y[0] = mu + y0_star
    for i in range(1, n + 1):
        acc = rho ** (i - 1) * rho * y0_star
        for j in range(1, i + 1):
            acc += rho ** (i - j) * u[j - 1]
        y[i] = mu + acc
    return y


def dense_design(y: np.ndarray, rho: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = y.shape[0] - 1
    x1 = y[:-1]
    i = np.arange(1, n + 1, dtype=float)
    if rho == 1.0:
        x2 = np.column_stack([np.ones(n), i])
    else:
        x2 = np.column_stack([np.ones(n), rho ** (i - 1.0)])
    return x1, x2, y[1:]


def dense_annihilator(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    return np.eye(n) - x @ np.linalg.pinv(x)


def dense_icr(y: np.ndarray, rho: float) -> tuple[float, float, float]:
    """Estimator, sandwich, and t statistic from explicit dense matrices."""
    x1, x2, yr = dense_design(np.asarray(y, float), rho)
    n = x1.shape[0]
    m2 = dense_annihilator(x2)
    rho_hat = float((x1 @ m2 @ yr) / (x1 @ m2 @ x1))
    x_full = np.column_stack([x1, x2])
    p_full = x_full @ np.linalg.pinv(x_full)
    uhat = (np.eye(n) - p_full) @ yr
    p_star = np.minimum(np.diag(p_full), n ** -0.5)
    delta = np.diag(uhat / (1.0 - p_star))
    bread = (x1 @ m2 @ x1) / n
    meat = (x1 @ m2 @ delta @ delta @ m2 @ x1) / n
    sigma2 = float(meat / bread**2)
    t = float(np.sqrt(n) * (rho_hat - rho) / np.sqrt(sigma2))
    return rho_hat, sigma2, t


def brute_force_ih(h: float, dw: np.ndarray) -> np.ndarray:
    """O(N^2) evaluation of the discretized exponential integral."""
    n = dw.shape[0]
    r = np.arange(1, n + 1) / n
    out = np.empty(n)
    for j in range(n):
        out[j] = np.sum(np.exp(-(r[j] - r[: j + 1]) * h) * dw[: j + 1])
    return out


def quadrature_projection(h: float, i_path: np.ndarray, dt: float) -> np.ndarray:
    """Projection of a path off span{1, exp(-h s)} with a quadrature Gram.

    No closed forms: the 2x2 Gram of the limit regressors is integrated
    numerically and the weights come from a linear solve. Path moments use
    the same right-endpoint sums as the production code.
    """
    n = i_path.shape[0]
    r = np.arange(1, n + 1, dtype=float) * dt
    basis = [lambda s: 1.0, lambda s: np.exp(-h * s)]
    gram = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            gram[a, b] = quad(lambda s: basis[a](s) * basis[b](s), 0.0, 1.0, epsabs=1e-14)[0]
    moments = np.array(
        [np.sum(i_path) * dt, np.sum(np.exp(-h * r) * i_path) * dt]
    )
    coef = np.linalg.solve(gram, moments)
    return i_path - coef[0] - coef[1] * np.exp(-h * r)


def scan_interval(
    y: np.ndarray,
    alpha: float,
    table: QuantileTable,
    step: float,
    domain_eps: float = 1e-3,
) -> tuple[float, float]:
    """Brute-force interval endpoints from a scalar scan at the given step."""
    n = y.shape[0] - 1
    scale = round(1.0 / step)
    ks = np.arange(int(np.ceil((-1.0 + domain_eps) * scale - 1e-9)), scale + 1)
    lo = hi = None
    for k in ks:
        rho = k / scale
        try:
            t = icr_estimate(y, rho).t
        except Exception:
            continue
        h = n * (1.0 - rho)
        if lookup(table, h, alpha / 2.0) <= t <= lookup(table, h, 1.0 - alpha / 2.0):
            if lo is None:
                lo = rho
            hi = rho
    return (np.nan, np.nan) if lo is None else (lo, hi)


def scan_mue_up(y: np.ndarray, table: QuantileTable, step: float) -> float:
    """Largest rho on a scalar scan whose t statistic sits above c_h(.5)."""
    n = y.shape[0] - 1
    scale = round(1.0 / step)
    ks = np.arange(int(np.ceil(-0.999 * scale - 1e-9)), scale + 1)
    best = -0.999
    for k in ks:
        rho = k / scale
        try:
            t = icr_estimate(y, rho).t
        except Exception:
            continue
        if t >= lookup(table, n * (1.0 - rho), 0.5):
            best = rho
    return best


def mp_alpha_beta(h: float, r: float) -> tuple[float, float]:
    """50-digit evaluation of the projection weights."""
    from mpmath import mp, mpf, exp

    with mp.workdps(50):
        hh, rr = mpf(repr(h)), mpf(repr(r))
        den = hh * (1 - exp(-2 * hh)) - 2 * (1 - exp(-hh)) ** 2
        num_a = hh * (
            1 - exp(-2 * hh)
            - 2 * (1 - exp(-hh)) * exp(-hh * rr)
            + 2 * hh * exp(-hh * rr)
            - 2 * (1 - exp(-hh))
        )
        num_b = 2 * hh**2 * ((1 - exp(-hh)) - hh * exp(-hh * rr))
        return float(num_a / den), float(num_b / den)
