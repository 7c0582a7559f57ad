"""Fractional Sobolev numerics.

Gagliardo seminorms, the fractional Laplacian under its three definitions,
the constant C(n,s), extension and trace operators, the Sobolev and Hoelder
inequality machinery and two counterexamples, each with closed-form or
brute-force oracles. The ``fracsob`` command runs them as experiments.
"""

from .catalog import CATALOG, AnalyticFunction, make_function, parse_function_spec
from .config import Settings, get_settings
from .constants import (
    a_const,
    b_const,
    c_const,
    c_const_direct,
    constant_bundle,
    e_integral,
    sphere,
    sphere_measure,
)
from .core import dilate, make_config, make_grid, make_params, sample
from .counterexamples import ball_family_study, cusp_control_study, cusp_divergence_study
from .exttrace import (
    cutoff_multiply,
    reflect_extend,
    trace_constant,
    trace_lift,
    trace_restrict,
    zero_extend,
)
from .fraclap import (
    flap_pv,
    flap_quotient,
    flap_spectral,
    half_laplacian_norm,
    operator_limit_scan,
    plancherel_seminorm,
    symbol_integral,
)
from .gagliardo import embedding_check, gagliardo_seminorm_p, limit_scan, refinement_ladder
from .inequalities import (
    campanato_seminorm,
    holder_check,
    level_profile,
    levelset_seminorm_bound,
    sequence_inequality_check,
    set_lower_bound,
    sobolev_ratio,
)
from .models import (
    DomainSpec,
    FracParams,
    FracsobError,
    Grid,
    GridFunction,
    QuadConfig,
    ReportRecord,
)

__version__ = "0.1.0"
__all__ = [
    "CATALOG",
    "AnalyticFunction",
    "make_function",
    "parse_function_spec",
    "Settings",
    "get_settings",
    "a_const",
    "b_const",
    "c_const",
    "c_const_direct",
    "constant_bundle",
    "e_integral",
    "sphere",
    "sphere_measure",
    "dilate",
    "make_config",
    "make_grid",
    "make_params",
    "sample",
    "ball_family_study",
    "cusp_control_study",
    "cusp_divergence_study",
    "cutoff_multiply",
    "reflect_extend",
    "trace_constant",
    "trace_lift",
    "trace_restrict",
    "zero_extend",
    "flap_pv",
    "flap_quotient",
    "flap_spectral",
    "half_laplacian_norm",
    "operator_limit_scan",
    "plancherel_seminorm",
    "symbol_integral",
    "embedding_check",
    "gagliardo_seminorm_p",
    "limit_scan",
    "refinement_ladder",
    "campanato_seminorm",
    "holder_check",
    "level_profile",
    "levelset_seminorm_bound",
    "sequence_inequality_check",
    "set_lower_bound",
    "sobolev_ratio",
    "DomainSpec",
    "FracParams",
    "FracsobError",
    "Grid",
    "GridFunction",
    "QuadConfig",
    "ReportRecord",
]
