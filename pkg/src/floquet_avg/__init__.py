"""Averaged monodromy-matrix approximations and stability-boundary tracing
for linear ODE systems with periodic coefficients."""

from .averaging import (
    AveragedExpansion,
    MonodromyExpansion,
    SeriesSystem,
    assemble_monodromy,
    monodromy_direct,
    run_recursion,
    standard_form,
)
from .errors import BracketError, FloquetError, ModelError, NumericRangeError
from .exactmono import (
    PiecewiseConstantSystem,
    exact_monodromy_pc,
    exact_monodromy_rk,
)
from .pendulum import (
    PendulumParams,
    boundary_order2,
    boundary_order4,
    jacobians,
    series_split,
)
from .ppoly import (
    PiecewisePolyMatrix,
    pp_antiderivative,
    pp_average,
    pp_eval,
    pp_mul,
)
from .scan import (
    BoundaryCurve,
    ScanGrid,
    bisect_boundary,
    compare_boundaries,
    scan_region,
    trace_boundary,
)
from .smallmat import char_roots_2x2, matexp
from .stability import (
    StabilityReport,
    Verdict,
    classify,
    det_series,
    det_series_expansion,
    margin_exact,
)

__version__ = "0.1.0"

__all__ = [
    "AveragedExpansion",
    "BoundaryCurve",
    "BracketError",
    "FloquetError",
    "ModelError",
    "MonodromyExpansion",
    "NumericRangeError",
    "PendulumParams",
    "PiecewiseConstantSystem",
    "PiecewisePolyMatrix",
    "ScanGrid",
    "SeriesSystem",
    "StabilityReport",
    "Verdict",
    "assemble_monodromy",
    "bisect_boundary",
    "boundary_order2",
    "boundary_order4",
    "char_roots_2x2",
    "classify",
    "compare_boundaries",
    "det_series",
    "det_series_expansion",
    "exact_monodromy_pc",
    "exact_monodromy_rk",
    "jacobians",
    "margin_exact",
    "matexp",
    "monodromy_direct",
    "pp_antiderivative",
    "pp_average",
    "pp_eval",
    "pp_mul",
    "run_recursion",
    "scan_region",
    "series_split",
    "standard_form",
    "trace_boundary",
]
