"""Simulation and tabulation of the local-to-unity limit law of the t statistic.

The limit distribution for localization parameter h in [0, inf) is the ratio

    J_h = int_0^1 I_fh(r) dW(r) / (int_0^1 I_fh(r)^2 dr)^(1/2)

where I_h(r) = int_0^r exp(-(r-s)h) dW(s) (the h = 0 case is W itself) and
I_fh is the residual of I_h after projecting it, in L2[0,1], onto the span of
(1, exp(-hr)) for h > 0 or (1, r) for h = 0. At h = inf the law is standard
normal. Paths are generated on an N-step grid r_j = j/N with increments
Z/sqrt(N); the exponential integral is accumulated by the one-step recursion

    I_h(r_j) = exp(-h/N) I_h(r_(j-1)) + dW_j,

which telescopes to the direct convolution sum exactly but costs O(N).
Quantiles of B simulated ratios give the critical values c_h(alpha).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.signal import lfilter
from scipy.stats import norm

from ._validation import check_positive_int, check_prob
from .exceptions import ParameterError, TableFormatError

__all__ = [
    "PathGridConfig",
    "QuantileTable",
    "LimitFunctionals",
    "alpha_beta",
    "simulate_ih_path",
    "project_ifh",
    "sample_jh",
    "build_table",
    "lookup",
    "save_table",
    "load_table",
    "bundled_table",
    "BUNDLED_H_GRID",
    "BUNDLED_ALPHA_GRID",
]

# Below this h the closed forms of alpha_h/beta_h lose digits to the
# O(h^4)/O(h^4) cancellation and a rational series expansion takes over.
SMALL_H = 1e-2

# A path whose discretized denominator falls below this is redrawn.
DENOMINATOR_FLOOR = 1e-14

_RESAMPLE_LIMIT = 100


@dataclass(frozen=True)
class PathGridConfig:
    """Discretization (N subintervals) and sample size (B paths) for J_h."""

    n_steps: int
    n_paths: int
    seed: int

    def __post_init__(self):
        if check_positive_int(self.n_steps, "n_steps") < 100:
            raise ParameterError(f"n_steps must be >= 100, got {self.n_steps}")
        if check_positive_int(self.n_paths, "n_paths") < 1000:
            raise ParameterError(f"n_paths must be >= 1000, got {self.n_paths}")
        int(self.seed)


@dataclass(frozen=True)
class LimitFunctionals:
    """Per-path stochastic integrals making up the J_h ratio."""

    numerator: np.ndarray
    denominator: np.ndarray
    ratio: np.ndarray


# --- small-h series -------------------------------------------------------
# Numerator and denominator of alpha_h/beta_h are O(h^4); the coefficients
# below are the exact Taylor coefficients of h^4..h^11, so the truncation
# error of the ratio is O(h^8) relative — machine precision for h <= 1e-2.
_DEN_COEF = np.array(
    [1 / 6, -1 / 6, 17 / 180, -7 / 180, 43 / 3360, -107 / 30240, 769 / 907200, -163 / 907200]
)


def _alpha_num_coeffs(r: np.ndarray) -> list[np.ndarray]:
    return [
        (2 - 3 * r) / 3,
        (3 * r**2 + 2 * r - 3) / 6,
        -(10 * r**3 + 10 * r**2 + 5 * r - 14) / 60,
        (15 * r**4 + 20 * r**3 + 15 * r**2 + 6 * r - 30) / 360,
        -(21 * r**5 + 35 * r**4 + 35 * r**3 + 21 * r**2 + 7 * r - 62) / 2520,
        (14 * r**6 + 28 * r**5 + 35 * r**4 + 28 * r**3 + 14 * r**2 + 4 * r - 63) / 10080,
        -(36 * r**7 + 84 * r**6 + 126 * r**5 + 126 * r**4 + 84 * r**3 + 36 * r**2 + 9 * r - 254)
        / 181440,
        (45 * r**8 + 120 * r**7 + 210 * r**6 + 252 * r**5 + 210 * r**4 + 120 * r**3 + 45 * r**2 + 10 * r - 510)
        / 1814400,
    ]


def _beta_num_coeffs(r: np.ndarray) -> list[np.ndarray]:
    return [
        2 * r - 1,
        -(3 * r**2 - 1) / 3,
        (4 * r**3 - 1) / 12,
        -(5 * r**4 - 1) / 60,
        (6 * r**5 - 1) / 360,
        -(7 * r**6 - 1) / 2520,
        (8 * r**7 - 1) / 20160,
        -(9 * r**8 - 1) / 181440,
    ]


def _horner(coeffs, h: float):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * h + c
    return acc


def alpha_beta(h: float, r):
    """Projection weight functions alpha_h(r), beta_h(r) for h > 0.

    These are the coordinates of (int g g')^(-1) g(r) for the basis
    g(s) = (1, (1 - exp(-hs))/h), so that the projection of I_h equals
    alpha_h(r) int I_h ds + beta_h(r) int (1-exp(-hs))/h I_h(s) ds. As h
    tends to 0 they approach the detrending weights 4 - 6r and 12r - 6.
    """
    h = float(h)
    if not np.isfinite(h) or h <= 0.0:
        raise ParameterError(f"alpha_beta requires h > 0, got {h}")
    r_arr = np.asarray(r, dtype=float)
    if h < SMALL_H:
        den = _horner(list(_DEN_COEF), h)
        alpha = _horner(_alpha_num_coeffs(r_arr), h) / den
        beta = _horner(_beta_num_coeffs(r_arr), h) / den
    else:
        emh = math.exp(-h)
        em2h = math.exp(-2.0 * h)
        ehr = np.exp(-h * r_arr)
        den = h * (1.0 - em2h) - 2.0 * (1.0 - emh) ** 2
        alpha = h * (1.0 - em2h - 2.0 * (1.0 - emh) * ehr + 2.0 * h * ehr - 2.0 * (1.0 - emh)) / den
        beta = 2.0 * h * h * ((1.0 - emh) - h * ehr) / den
    if np.ndim(r) == 0:
        return float(alpha), float(beta)
    return alpha, beta


def simulate_ih_path(h: float, dw) -> np.ndarray:
    """Accumulate I_h(r_j), j = 1..N, from Brownian increments on [0, 1].

    The grid is implied by the increment count: N = len(dw), dt = 1/N.
    """
    h = float(h)
    if not np.isfinite(h) or h < 0.0:
        raise ParameterError(f"h must be finite and >= 0, got {h}")
    dw = np.asarray(dw, dtype=float)
    if dw.ndim != 1 or dw.shape[0] < 2:
        raise ParameterError("dw must be a 1-d vector of at least 2 increments")
    if h == 0.0:
        return np.cumsum(dw)
    decay = math.exp(-h / dw.shape[0])
    out = lfilter([1.0], [1.0, -decay], dw)
    return np.asarray(out)


def _project_core(h: float, paths: np.ndarray, r: np.ndarray, ab=None) -> np.ndarray:
    """Residualize I_h paths (rows) against the limit regressors."""
    dt = r[1] - r[0]
    if h == 0.0:
        int_w = paths.sum(axis=1) * dt
        int_rw = paths @ r * dt
        return paths - np.outer(int_w, 4.0 - 6.0 * r) - np.outer(int_rw, 12.0 * r - 6.0)
    alpha, beta = ab if ab is not None else alpha_beta(h, r)
    g2 = (1.0 - np.exp(-h * r)) / h
    int_i = paths.sum(axis=1) * dt
    int_g2i = paths @ g2 * dt
    return paths - np.outer(int_i, alpha) - np.outer(int_g2i, beta)


def project_ifh(h: float, i_path, dt: float) -> np.ndarray:
    """Project an I_h path off the limit regressors, on the same grid.

    Integrals are right-endpoint Riemann sums on r_j = j*dt, matching the way
    the path itself is indexed.
    """
    h = float(h)
    if not np.isfinite(h) or h < 0.0:
        raise ParameterError(f"h must be finite and >= 0, got {h}")
    path = np.asarray(i_path, dtype=float)
    if path.ndim != 1:
        raise ParameterError("i_path must be 1-d")
    n = path.shape[0]
    r = np.arange(1, n + 1, dtype=float) * float(dt)
    return _project_core(h, path[None, :], r)[0]


def _functionals(h: float, dw: np.ndarray, r: np.ndarray, ab=None) -> LimitFunctionals:
    """Discretized numerator, denominator, and ratio for each path (row)."""
    n = dw.shape[1]
    if h == 0.0:
        paths = np.cumsum(dw, axis=1)
    else:
        paths = lfilter([1.0], [1.0, -math.exp(-h / n)], dw, axis=1)
    ifh = _project_core(h, paths, r, ab=ab)
    # Ito sum: left endpoints, with I_fh(r_0) := 0.
    num = np.einsum("ij,ij->i", ifh[:, :-1], dw[:, 1:])
    den = np.einsum("ij,ij->i", ifh, ifh) / n
    with np.errstate(invalid="ignore"):
        ratio = num / np.sqrt(den)
    return LimitFunctionals(numerator=num, denominator=den, ratio=ratio)


def _block_paths(n_steps: int) -> int:
    """Fixed per-block path count; the block partition defines the streams."""
    cap = min(4096, max(64, (1 << 24) // n_steps))
    return 1 << (cap.bit_length() - 1)


def _block_rng(seed: int, block: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block, attempt)))


def sample_jh(h: float, cfg: PathGridConfig, workers: int = 1) -> np.ndarray:
    """Simulate ``cfg.n_paths`` draws of J_h; deterministic given the config.

    Draws are produced in fixed-size blocks with per-(block, attempt)
    substreams, so the result is bit-identical for any ``workers`` value.
    Paths whose discretized denominator falls below 1e-14 are redrawn and
    counted; at practical step counts this never fires.
    """
    h = float(h)
    if not np.isfinite(h) or h < 0.0:
        raise ParameterError(f"h must be finite and >= 0, got {h}")
    n_steps, n_paths = cfg.n_steps, cfg.n_paths
    r = np.arange(1, n_steps + 1, dtype=float) / n_steps
    ab = alpha_beta(h, r) if h > 0.0 else None
    block = _block_paths(n_steps)
    n_blocks = (n_paths + block - 1) // block
    out = np.empty(n_paths)
    resampled = 0

    def run_block(bi: int) -> int:
        lo = bi * block
        hi = min(lo + block, n_paths)
        rng = _block_rng(cfg.seed, bi)
        dw = rng.standard_normal((block, n_steps)) / math.sqrt(n_steps)
        fun = _functionals(h, dw, r, ab=ab)
        ratio, den = fun.ratio.copy(), fun.denominator
        redrawn = 0
        bad = np.flatnonzero(~np.isfinite(ratio) | (den < DENOMINATOR_FLOOR))
        attempt = 0
        while bad.size:
            attempt += 1
            if attempt > _RESAMPLE_LIMIT:
                raise ParameterError("path resampling failed to converge")
            redrawn += bad.size
            rng = _block_rng(cfg.seed, bi, attempt)
            dw_new = rng.standard_normal((bad.size, n_steps)) / math.sqrt(n_steps)
            fun = _functionals(h, dw_new, r, ab=ab)
            ratio[bad] = fun.ratio
            still = ~np.isfinite(fun.ratio) | (fun.denominator < DENOMINATOR_FLOOR)
            bad = bad[still]
        out[lo:hi] = ratio[: hi - lo]
        return redrawn

    if workers > 1 and n_blocks > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            resampled = sum(pool.map(run_block, range(n_blocks)))
    else:
        resampled = sum(run_block(bi) for bi in range(n_blocks))
    if resampled:
        logging.getLogger(__name__).info(
            "resampled %d degenerate path(s) at h=%g", resampled, h
        )
    return out


# ---------------------------------------------------------------------------
# Quantile tables
# ---------------------------------------------------------------------------

BUNDLED_H_GRID = np.array(
    [0, 0.2, 0.4, 0.6, 0.8, 1, 1.4, 1.8, 2.2, 2.6, 3, 3.4, 3.8, 4.2, 4.6, 5,
     6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90,
     100, 200, 300, 500],
    dtype=float,
)
BUNDLED_ALPHA_GRID = np.array([0.025, 0.05, 0.5, 0.95, 0.975])


@dataclass(frozen=True)
class QuantileTable:
    """Critical values c_h(alpha) on an (h, alpha) grid.

    Lookups are piecewise linear in h inside the grid; above the largest
    tabulated h they interpolate linearly in h^(-1/2) toward the standard
    normal quantile, which is exact at both anchors and at h = inf.
    """

    h_grid: np.ndarray
    alpha_grid: np.ndarray
    values: np.ndarray
    provenance: PathGridConfig | str = "unspecified"

    def __post_init__(self):
        h = np.asarray(self.h_grid, dtype=float)
        a = np.asarray(self.alpha_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if h.ndim != 1 or np.any(h < 0.0) or np.any(np.diff(h) <= 0.0):
            raise TableFormatError("h grid must be nonnegative and strictly increasing")
        if a.ndim != 1 or np.any(a <= 0.0) or np.any(a >= 1.0) or np.any(np.diff(a) <= 0.0):
            raise TableFormatError("alpha grid must be strictly increasing inside (0, 1)")
        if v.shape != (h.size, a.size):
            raise TableFormatError(
                f"values shape {v.shape} does not match grids ({h.size}, {a.size})"
            )
        if not np.all(np.isfinite(v)):
            raise TableFormatError("table values must be finite")
        if np.any(np.diff(v, axis=1) < 0.0):
            bad = int(np.argwhere(np.diff(v, axis=1) < 0.0)[0, 0])
            raise TableFormatError(
                f"quantiles not nondecreasing in alpha at h={h[bad]:g}"
            )
        object.__setattr__(self, "h_grid", h)
        object.__setattr__(self, "alpha_grid", a)
        object.__setattr__(self, "values", v)

    def lookup(self, h, alpha: float):
        return lookup(self, h, alpha)


def build_table(h_grid, alpha_grid, cfg: PathGridConfig, workers: int = 1) -> QuantileTable:
    """Simulate c_h(alpha) over the grid; draws are reused across alpha."""
    h_arr = np.asarray(h_grid, dtype=float)
    a_arr = np.asarray(alpha_grid, dtype=float)
    values = np.empty((h_arr.size, a_arr.size))
    for i, h in enumerate(h_arr):
        draws = sample_jh(float(h), cfg, workers=workers)
        values[i] = np.quantile(draws, a_arr)
    return QuantileTable(h_grid=h_arr, alpha_grid=a_arr, values=values, provenance=cfg)


def _column(table: QuantileTable, alpha: float) -> tuple[np.ndarray, float]:
    """Table column at ``alpha`` (interpolated if between grid values)."""
    a = table.alpha_grid
    # snap within a few ulps so e.g. 1 - alpha/2 hits its tabulated column
    near = np.flatnonzero(np.abs(a - alpha) <= 1e-12)
    if near.size:
        return table.values[:, near[0]], float(norm.ppf(a[near[0]]))
    if alpha < a[0] or alpha > a[-1]:
        raise ParameterError(
            f"alpha={alpha} outside the tabulated range [{a[0]}, {a[-1]}]"
        )
    j = int(np.searchsorted(a, alpha)) - 1
    lam = (alpha - a[j]) / (a[j + 1] - a[j])
    col = (1.0 - lam) * table.values[:, j] + lam * table.values[:, j + 1]
    return col, float(norm.ppf(alpha))


def lookup(table: QuantileTable, h, alpha: float):
    """Interpolated critical value c_h(alpha); h may be a scalar or array.

    h = inf returns the exact standard normal quantile.
    """
    alpha = check_prob(alpha)
    col, z = _column(table, alpha)
    hg = table.h_grid
    h_arr = np.asarray(h, dtype=float)
    if np.any(h_arr < 0.0) or np.any(np.isnan(h_arr)):
        raise ParameterError("h must be >= 0 (or inf)")
    out = np.interp(np.minimum(h_arr, hg[-1]), hg, col)
    beyond = h_arr > hg[-1]
    if np.any(beyond):
        u_max = hg[-1] ** -0.5
        with np.errstate(divide="ignore"):
            u = np.where(np.isinf(h_arr), 0.0, h_arr**-0.5)
        out = np.where(beyond, z + (col[-1] - z) * (u / u_max), out)
    if np.ndim(h) == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Table file format: comment provenance lines, then "h,alpha,c" rows
# ---------------------------------------------------------------------------


def save_table(table: QuantileTable, path) -> None:
    """Write the table as CSV with a provenance comment block."""
    lines = []
    if isinstance(table.provenance, PathGridConfig):
        cfg = table.provenance
        lines += [
            "# source=simulated",
            f"# seed={cfg.seed}",
            f"# b_paths={cfg.n_paths}",
            f"# n_steps={cfg.n_steps}",
        ]
    else:
        lines.append(f"# source={table.provenance}")
    lines.append("h,alpha,c")
    for i, h in enumerate(table.h_grid):
        for j, a in enumerate(table.alpha_grid):
            lines.append(f"{float(h)!r},{float(a)!r},{float(table.values[i, j])!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_table(path) -> QuantileTable:
    """Read a table written by :func:`save_table` (or the bundled file)."""
    meta: dict[str, str] = {}
    rows: list[tuple[float, float, float]] = []
    header_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if line != "h,alpha,c":
                    raise TableFormatError(
                        f"{path}: line {lineno}: expected header 'h,alpha,c'"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise TableFormatError(f"{path}: line {lineno}: expected 3 fields")
            try:
                rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise TableFormatError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise TableFormatError(f"{path}: no data rows")
    h_grid = np.unique([r[0] for r in rows])
    a_grid = np.unique([r[1] for r in rows])
    values = np.full((h_grid.size, a_grid.size), np.nan)
    for h, a, c in rows:
        values[np.searchsorted(h_grid, h), np.searchsorted(a_grid, a)] = c
    if np.any(np.isnan(values)):
        raise TableFormatError(f"{path}: incomplete (h, alpha) grid")
    provenance: PathGridConfig | str = meta.get("source", "unspecified")
    if provenance == "simulated" and {"seed", "b_paths", "n_steps"} <= meta.keys():
        provenance = PathGridConfig(
            n_steps=int(meta["n_steps"]),
            n_paths=int(meta["b_paths"]),
            seed=int(meta["seed"]),
        )
    return QuantileTable(h_grid=h_grid, alpha_grid=a_grid, values=values, provenance=provenance)


@lru_cache(maxsize=1)
def bundled_table() -> QuantileTable:
    """The shipped default critical-value table."""
    ref = resources.files("icrar.data").joinpath("jh_quantiles.csv")
    with resources.as_file(ref) as path:
        return load_table(path)
