"""Initial-condition-robust inference for the AR(1) coefficient.

The centerpiece is a t statistic whose regression includes, alongside the
lagged series, the two columns (1, rho^(i-1)) evaluated at the hypothesized
coefficient. Those columns absorb the level and the pre-sample starting
value exactly, so the test — and therefore the coverage of the inverted
confidence interval — does not depend on how the process was initialized.
Critical values come from a simulated local-to-unity limit family indexed by
h = n(1 - rho), bridging the unit-root and stationary regimes.
"""

from .design import DesignMatrices, LeverageVector, annihilate, build_design, hat_diagonals
from .estimators import IcrConfidenceInterval, IcrMedianUnbiased
from .exceptions import (
    ConfigError,
    DegenerateVarianceError,
    IcrError,
    ParameterError,
    SingularDesignError,
    TableFormatError,
)
from .harness import (
    CellResult,
    InvarianceCheckResult,
    McSummary,
    initial_condition_invariance_check,
    render_results_csv,
    render_results_text,
    run_cell,
    run_grid,
)
from .intervals import (
    DEFAULT_DOMAIN_EPS,
    DEFAULT_GRID_STEP,
    IntervalResult,
    InversionGrid,
    MueResult,
    invert_ci,
    make_rho_grid,
    mue,
)
from .limitdist import (
    PathGridConfig,
    QuantileTable,
    alpha_beta,
    build_table,
    bundled_table,
    load_table,
    lookup,
    project_ifh,
    sample_jh,
    save_table,
    simulate_ih_path,
)
from .simulate import (
    INNOVATION_PRESETS,
    InitialConditionSpec,
    InnovationSpec,
    ModelParams,
    ScenarioSpec,
    TimeSeries,
    default_burn_in,
    draw_initial_condition,
    draw_innovations,
    load_scenario_file,
    scenario_from_config,
    scenario_to_config,
    simulate_series,
    substream,
)
from .tstat import ProfilePoint, TProfileKernel, TStatResult, icr_estimate, t_profile

__version__ = "0.1.0"

__all__ = [
    "annihilate",
    "alpha_beta",
    "build_design",
    "build_table",
    "bundled_table",
    "CellResult",
    "ConfigError",
    "default_burn_in",
    "DEFAULT_DOMAIN_EPS",
    "DEFAULT_GRID_STEP",
    "DegenerateVarianceError",
    "DesignMatrices",
    "draw_initial_condition",
    "draw_innovations",
    "hat_diagonals",
    "IcrConfidenceInterval",
    "IcrError",
    "IcrMedianUnbiased",
    "initial_condition_invariance_check",
    "INNOVATION_PRESETS",
    "InitialConditionSpec",
    "InnovationSpec",
    "IntervalResult",
    "InvarianceCheckResult",
    "InversionGrid",
    "invert_ci",
    "icr_estimate",
    "LeverageVector",
    "load_scenario_file",
    "load_table",
    "lookup",
    "make_rho_grid",
    "McSummary",
    "ModelParams",
    "mue",
    "MueResult",
    "ParameterError",
    "PathGridConfig",
    "ProfilePoint",
    "project_ifh",
    "QuantileTable",
    "render_results_csv",
    "render_results_text",
    "run_cell",
    "run_grid",
    "sample_jh",
    "save_table",
    "scenario_from_config",
    "scenario_to_config",
    "ScenarioSpec",
    "simulate_ih_path",
    "simulate_series",
    "SingularDesignError",
    "substream",
    "t_profile",
    "TableFormatError",
    "TimeSeries",
    "TProfileKernel",
    "TStatResult",
]
