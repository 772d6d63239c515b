"""AR(1) sample simulation with conditionally heteroskedastic innovations.

The data generating process is

    Y_i  = mu + Y*_i,          i = 0, 1, ..., n
    Y*_i = rho Y*_{i-1} + U_i, i = 1, ..., n

with innovations U_i = sigma_i * eps_i, eps_i i.i.d. standard normal, and
sigma_i either constant (i.i.d. case) or following a GARCH(1,1) / ARCH(4)
recursion. The pre-sample value Y*_0 is drawn from one of four regimes that
scale its variability from zero ("fixed0") up to n^(3/4) ("explosive").
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from ._validation import check_positive_int, check_prob, check_rho
from .exceptions import ConfigError, ParameterError

__all__ = [
    "InnovationSpec",
    "InitialConditionSpec",
    "ModelParams",
    "TimeSeries",
    "ScenarioSpec",
    "INNOVATION_PRESETS",
    "default_burn_in",
    "draw_innovations",
    "draw_initial_condition",
    "simulate_series",
    "substream",
    "scenario_to_config",
    "scenario_from_config",
    "load_scenario_file",
]

# Pre-sample steps discarded so the variance recursion forgets its start.
VARIANCE_WARMUP = 500

# Relative weight below which the geometric tail of the pre-sample sum is cut.
_TAIL_WEIGHT = 1e-12


@dataclass(frozen=True)
class InnovationSpec:
    """Innovation process: i.i.d. normal, GARCH(1,1), or ARCH(4).

    ``garch_params`` is (ma, ar, intercept) and must be present exactly for
    kind "garch11"; ``arch_params`` is (ar1, ar2, ar3, ar4, intercept) and
    must be present exactly for kind "arch4".
    """

    kind: str
    garch_params: tuple[float, float, float] | None = None
    arch_params: tuple[float, float, float, float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("iid", "garch11", "arch4"):
            raise ParameterError(f"unknown innovation kind {self.kind!r}")
        if self.kind == "garch11":
            if self.garch_params is None or self.arch_params is not None:
                raise ParameterError("garch11 requires garch_params only")
            ma, ar, psi = map(float, self.garch_params)
            if ma < 0 or ar < 0 or not ma + ar < 1 or not psi > 0:
                raise ParameterError(
                    f"garch11 needs ma >= 0, ar >= 0, ma + ar < 1, intercept > 0; "
                    f"got ({ma}, {ar}; {psi})"
                )
            object.__setattr__(self, "garch_params", (ma, ar, psi))
        elif self.kind == "arch4":
            if self.arch_params is None or self.garch_params is not None:
                raise ParameterError("arch4 requires arch_params only")
            params = tuple(map(float, self.arch_params))
            *ars, psi = params
            if any(a < 0 for a in ars) or not sum(ars) < 1 or not psi > 0:
                raise ParameterError(
                    f"arch4 needs ar_k >= 0, sum(ar_k) < 1, intercept > 0; got {params}"
                )
            object.__setattr__(self, "arch_params", params)
        else:
            if self.garch_params is not None or self.arch_params is not None:
                raise ParameterError("iid innovations take no variance parameters")

    @classmethod
    def iid(cls) -> "InnovationSpec":
        return cls(kind="iid")

    @classmethod
    def garch11(cls, ma: float, ar: float, intercept: float) -> "InnovationSpec":
        return cls(kind="garch11", garch_params=(ma, ar, intercept))

    @classmethod
    def arch4(cls, ar1, ar2, ar3, ar4, intercept) -> "InnovationSpec":
        return cls(kind="arch4", arch_params=(ar1, ar2, ar3, ar4, intercept))

    @property
    def unconditional_variance(self) -> float:
        """Long-run variance of U implied by the variance recursion."""
        if self.kind == "iid":
            return 1.0
        if self.kind == "garch11":
            ma, ar, psi = self.garch_params
            return psi / (1.0 - ma - ar)
        ar_sum = sum(self.arch_params[:4])
        return self.arch_params[4] / (1.0 - ar_sum)


# The five innovation processes of the Monte Carlo design.
INNOVATION_PRESETS: dict[str, InnovationSpec] = {
    "iid": InnovationSpec.iid(),
    "garch1": InnovationSpec.garch11(0.05, 0.9, 0.001),
    "garch2": InnovationSpec.garch11(0.15, 0.8, 0.2),
    "garch3": InnovationSpec.garch11(0.25, 0.7, 0.2),
    "arch4": InnovationSpec.arch4(0.3, 0.2, 0.2, 0.2, 0.2),
}


@dataclass(frozen=True)
class InitialConditionSpec:
    """Pre-sample regime for Y*_0.

    Kinds: "fixed0" (Y*_0 = 0), "stationary" (truncated geometric sum of
    pre-sample innovations), "scaled_sqrt_n" (sqrt(n) times that sum), and
    "explosive" (n^(3/4) times it). ``burn_in`` truncates the infinite sum;
    ``None`` selects the default rule from :func:`default_burn_in`.
    """

    kind: str
    burn_in: int | None = None

    def __post_init__(self):
        if self.kind not in ("fixed0", "stationary", "scaled_sqrt_n", "explosive"):
            raise ParameterError(f"unknown initial-condition kind {self.kind!r}")
        if self.burn_in is not None:
            check_positive_int(self.burn_in, "burn_in")


@dataclass(frozen=True)
class ModelParams:
    """Level mu, autoregressive coefficient rho, and sample length n."""

    mu: float
    rho: float
    n: int

    def __post_init__(self):
        check_rho(self.rho)
        if not np.isfinite(self.mu):
            raise ParameterError(f"mu must be finite, got {self.mu}")
        n = check_positive_int(self.n, "n")
        if n < 4:
            raise ParameterError(f"n must be at least 4, got {n}")


@dataclass(frozen=True)
class ScenarioSpec:
    """One Monte Carlo cell: model x innovations x initial condition."""

    model: ModelParams
    innov: InnovationSpec
    init: InitialConditionSpec
    reps: int = 1
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.reps, "reps")
        check_prob(self.alpha)
        int(self.seed)


@dataclass(frozen=True)
class TimeSeries:
    """An observed AR(1) sample Y_0..Y_n with optional provenance."""

    y: np.ndarray
    meta: ScenarioSpec | None = None

    def __post_init__(self):
        arr = np.asarray(self.y, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise ParameterError(f"series must be a 1-d vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("series contains non-finite values")
        object.__setattr__(self, "y", arr)

    @property
    def n(self) -> int:
        return self.y.shape[0] - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key); order of construction is free.

    Streams are a pure function of their arguments, so any scheduling of
    replications or grid cells reproduces identical draws.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def default_burn_in(rho: float) -> int:
    """Truncation length leaving a relative tail weight below 1e-12."""
    a = abs(rho)
    if a == 0.0:
        return 1000
    if a >= 1.0:
        raise ParameterError("burn-in rule undefined for |rho| >= 1")
    return max(1000, math.ceil(math.log(_TAIL_WEIGHT) / math.log(a)))


def _variance_recursion(
    spec: InnovationSpec, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw GARCH/ARCH innovations; returns (U, sigma2) after warm-up."""
    total = VARIANCE_WARMUP + count
    eps = rng.standard_normal(total)
    u = np.empty(total)
    sig2 = np.empty(total)
    v0 = spec.unconditional_variance
    if spec.kind == "garch11":
        ma, ar, psi = spec.garch_params
        prev_u2 = v0
        prev_s2 = v0
        for i in range(total):
            s2 = psi + ma * prev_u2 + ar * prev_s2
            ui = math.sqrt(s2) * eps[i]
            sig2[i] = s2
            u[i] = ui
            prev_u2 = ui * ui
            prev_s2 = s2
    else:
        a1, a2, a3, a4, psi = spec.arch_params
        lag2 = [v0, v0, v0, v0]  # most recent first
        for i in range(total):
            s2 = psi + a1 * lag2[0] + a2 * lag2[1] + a3 * lag2[2] + a4 * lag2[3]
            ui = math.sqrt(s2) * eps[i]
            sig2[i] = s2
            u[i] = ui
            lag2 = [ui * ui, lag2[0], lag2[1], lag2[2]]
    return u[VARIANCE_WARMUP:], sig2[VARIANCE_WARMUP:]


def draw_innovations(
    spec: InnovationSpec, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``count`` innovations U_1..U_count from the given process.

    GARCH/ARCH recursions start at the unconditional variance and discard a
    warm-up of 500 pre-sample steps. Innovations are not rescaled to unit
    variance: the ICR t statistic is exactly scale invariant.
    """
    count = check_positive_int(count, "count")
    if spec.kind == "iid":
        return rng.standard_normal(count)
    u, _ = _variance_recursion(spec, count, rng)
    return u


def draw_initial_condition(
    spec: InitialConditionSpec,
    model: ModelParams,
    innov: InnovationSpec,
    rng: np.random.Generator,
) -> float:
    """Draw Y*_0 under the requested regime.

    The stationary sum is truncated at ``burn_in`` terms, with pre-sample
    innovations drawn from the same innovation process but a caller-supplied
    (typically independent) stream. Regimes other than "fixed0" are undefined
    at rho = 1, where the geometric sum diverges.
    """
    if spec.kind == "fixed0":
        return 0.0
    rho = model.rho
    if rho == 1.0:
        raise ParameterError(
            f"initial-condition regime {spec.kind!r} is undefined at rho = 1"
        )
    burn = spec.burn_in if spec.burn_in is not None else default_burn_in(rho)
    draws = draw_innovations(innov, burn + 1, rng)
    # draws run forward in time; the most recent one is U_0 and carries rho^0.
    weights = rho ** np.arange(burn + 1, dtype=float)
    stationary = float(weights @ draws[::-1])
    if spec.kind == "stationary":
        return stationary
    if spec.kind == "scaled_sqrt_n":
        return math.sqrt(model.n) * stationary
    return model.n ** 0.75 * stationary


def simulate_series(
    model: ModelParams,
    innov: InnovationSpec,
    init: InitialConditionSpec,
    rng: np.random.Generator,
    meta: ScenarioSpec | None = None,
) -> TimeSeries:
    """Simulate Y_0..Y_n from the AR(1) recursion.

    The supplied stream is split into an independent pre-sample stream (for
    the initial condition) and an in-sample stream, so regimes sharing a seed
    see identical in-sample innovations.
    """
    pre_rng, in_rng = rng.spawn(2)
    y0_star = draw_initial_condition(init, model, innov, pre_rng)
    u = draw_innovations(innov, model.n, in_rng)
    # Y*_i = rho Y*_{i-1} + U_i, seeded with Y*_0.
    ystar, _ = lfilter([1.0], [1.0, -model.rho], u, zi=[model.rho * y0_star])
    y = np.empty(model.n + 1)
    y[0] = model.mu + y0_star
    y[1:] = model.mu + ystar
    return TimeSeries(y=y, meta=meta)


# ---------------------------------------------------------------------------
# Flat key-value scenario configuration
# ---------------------------------------------------------------------------
# Keys: model.mu, model.rho, model.n, innov.kind, innov.ma, innov.ar,
# innov.intercept, innov.ar1..innov.ar4, init.kind, init.burn_in, reps,
# alpha, seed. Lines are "key = value"; '#' starts a comment; blank lines
# separate cells in multi-cell files.


def scenario_to_config(spec: ScenarioSpec) -> str:
    """Render a scenario as flat ``key = value`` lines."""
    lines = [
        f"model.mu = {spec.model.mu!r}",
        f"model.rho = {spec.model.rho!r}",
        f"model.n = {spec.model.n}",
        f"innov.kind = {spec.innov.kind}",
    ]
    if spec.innov.kind == "garch11":
        ma, ar, psi = spec.innov.garch_params
        lines += [f"innov.ma = {ma!r}", f"innov.ar = {ar!r}", f"innov.intercept = {psi!r}"]
    elif spec.innov.kind == "arch4":
        a1, a2, a3, a4, psi = spec.innov.arch_params
        lines += [
            f"innov.ar1 = {a1!r}",
            f"innov.ar2 = {a2!r}",
            f"innov.ar3 = {a3!r}",
            f"innov.ar4 = {a4!r}",
            f"innov.intercept = {psi!r}",
        ]
    lines.append(f"init.kind = {spec.init.kind}")
    if spec.init.burn_in is not None:
        lines.append(f"init.burn_in = {spec.init.burn_in}")
    lines += [f"reps = {spec.reps}", f"alpha = {spec.alpha!r}", f"seed = {spec.seed}"]
    return "\n".join(lines) + "\n"


def _parse_kv_block(lines: list[str]) -> dict[str, str]:
    kv: dict[str, str] = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"empty key or value in line {raw.strip()!r}")
        if key in kv:
            raise ConfigError(f"duplicate key {key!r}")
        kv[key] = value
    return kv


def _take(kv: dict[str, str], key: str, conv, default=None, required=False):
    if key not in kv:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = kv.pop(key)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def scenario_from_config(text: str) -> ScenarioSpec:
    """Parse a single scenario from flat key-value text."""
    kv = _parse_kv_block(text.splitlines())
    kind = _take(kv, "innov.kind", str, required=True)
    if kind == "iid":
        innov = InnovationSpec.iid()
    elif kind == "garch11":
        innov = InnovationSpec.garch11(
            _take(kv, "innov.ma", float, required=True),
            _take(kv, "innov.ar", float, required=True),
            _take(kv, "innov.intercept", float, required=True),
        )
    elif kind == "arch4":
        innov = InnovationSpec.arch4(
            _take(kv, "innov.ar1", float, required=True),
            _take(kv, "innov.ar2", float, required=True),
            _take(kv, "innov.ar3", float, required=True),
            _take(kv, "innov.ar4", float, required=True),
            _take(kv, "innov.intercept", float, required=True),
        )
    else:
        raise ConfigError(f"bad value for 'innov.kind': {kind!r}")
    try:
        model = ModelParams(
            mu=_take(kv, "model.mu", float, default=0.0),
            rho=_take(kv, "model.rho", float, required=True),
            n=_take(kv, "model.n", int, required=True),
        )
        init = InitialConditionSpec(
            kind=_take(kv, "init.kind", str, required=True),
            burn_in=_take(kv, "init.burn_in", int),
        )
        spec = ScenarioSpec(
            model=model,
            innov=innov,
            init=init,
            reps=_take(kv, "reps", int, default=1),
            alpha=_take(kv, "alpha", float, default=0.05),
            seed=_take(kv, "seed", int, default=0),
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    if kv:
        raise ConfigError(f"unknown key {sorted(kv)[0]!r}")
    return spec


def load_scenario_file(path) -> list[ScenarioSpec]:
    """Read one scenario per blank-line-separated block from ``path``."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    blocks: list[list[str]] = [[]]
    for line in text.splitlines():
        if line.split("#", 1)[0].strip():
            blocks[-1].append(line)
        elif blocks[-1]:
            blocks.append([])
    blocks = [b for b in blocks if b]
    if not blocks:
        raise ConfigError(f"no scenario cells found in {path}")
    return [scenario_from_config("\n".join(b)) for b in blocks]


def with_overrides(spec: ScenarioSpec, **kwargs) -> ScenarioSpec:
    """Return a copy of ``spec`` with the given fields replaced."""
    return replace(spec, **kwargs)
