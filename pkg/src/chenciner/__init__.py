"""Analysis of the degenerate Chenciner bifurcation of truncated normal-form maps."""
from .classifier import (
    CircleInventory,
    CircleRecord,
    OriginMode,
    Stability,
    ZeroBand,
    brute_force_circle_count,
    circle_multiplier,
    classify,
    classify_point,
    region_of,
    sign_profile,
    solve_circle_equation,
)
from .config import ConfigError, ModelConfig, load_config, parse_config
from .curves import (
    CurveKind,
    CurveTrace,
    coefficient_table,
    expand,
    expand_B1,
    expand_B2,
    expand_C,
    implicit_series,
    series_expansion,
    trace_curve,
    verify_expansion,
)
from .diagram import DiagramCase, DiagramSpec, PhasePortraitSpec, build_diagram, enumerate_case, phase_portrait
from .errors import *  # noqa: F401,F403
from .normal_form import (
    Degeneracy,
    ModelEvaluation,
    NormalFormModel,
    ParameterPoint,
    TaylorSeries2D,
    check_degeneracy,
    evaluate,
    phi_step,
    rho_map,
    rho_step,
)
from .render import RenderOptions, render_svg
from .simulator import (
    SimulationConfig,
    Verdict,
    VerdictKind,
    iterate_orbit,
    monotonicity_check,
    semistability_probe,
)

__version__ = "0.1.0"
