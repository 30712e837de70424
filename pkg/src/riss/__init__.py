"""Fast O(N)-time / O(1)-memory evaluation of Caputo fractional derivatives
via an infinite-state (diffusive) representation, plus an implicit solver
for fractional initial value problems built on the same machinery."""

from .core import (
    DerivMode,
    EtaGrid,
    FractionalOrder,
    QuadKind,
    SchemeConfig,
    StepperKind,
    eta_grid,
    kernel,
    omega,
)
from .errors import ConfigError, ConvergenceFailureError, DerivativeUnavailableError
from .evaluator import (
    DerivativeSeries,
    SampledFunction,
    eval_derivative_callable,
    eval_derivative_series,
)
from .fde import SolveFor, Trajectory, ZenerParams, solve_fde, zener_rhs
from .oracles import PowerFunction, caputo_power, naive_caputo, naive_caputo_series
from .quadrature import (
    CompoundRule,
    SubintervalRule,
    assemble_compound,
    clenshaw_curtis,
    gauss_legendre,
    weighted_cc,
)
from .bench import (
    ConvergenceTable,
    ErrorReport,
    TimingReport,
    estimate_order,
    presaturation_slope,
    run_eval_experiment,
    run_sweep,
    run_timing,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CompoundRule",
    "ConvergenceFailureError",
    "ConvergenceTable",
    "DerivMode",
    "DerivativeSeries",
    "DerivativeUnavailableError",
    "ErrorReport",
    "EtaGrid",
    "FractionalOrder",
    "PowerFunction",
    "QuadKind",
    "SampledFunction",
    "SchemeConfig",
    "SolveFor",
    "StepperKind",
    "SubintervalRule",
    "TimingReport",
    "Trajectory",
    "ZenerParams",
    "assemble_compound",
    "caputo_power",
    "clenshaw_curtis",
    "estimate_order",
    "eta_grid",
    "eval_derivative_callable",
    "eval_derivative_series",
    "gauss_legendre",
    "kernel",
    "naive_caputo",
    "naive_caputo_series",
    "omega",
    "presaturation_slope",
    "run_eval_experiment",
    "run_sweep",
    "run_timing",
    "solve_fde",
    "weighted_cc",
    "zener_rhs",
]
