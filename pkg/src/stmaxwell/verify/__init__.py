"""Manufactured cases, error metrics, conditioning probes and convergence studies."""
from .cases import CASE_NAMES, ManufacturedCase, TrigField, builtin_cases, get_case
from .conditioning import (
    condition_number,
    fit_exponential_rate,
    fit_loglog_slope,
    min_real_eig_time,
    time_block,
)
from .metrics import (
    divergence_residuals,
    divergences,
    field_errors,
    relative_difference,
    weighted_l2_error,
    weighted_norm,
)
from .study import (
    COMPARE_COLUMNS,
    CONDITION_COLUMNS,
    CONVERGENCE_COLUMNS,
    Comparison,
    ConditionReport,
    ConvergenceStudy,
    ErrorReport,
    SolveSettings,
    evaluate,
    run_comparison,
    run_condition,
    run_convergence,
)

__all__ = [
    "CASE_NAMES",
    "COMPARE_COLUMNS",
    "CONDITION_COLUMNS",
    "CONVERGENCE_COLUMNS",
    "Comparison",
    "ConditionReport",
    "ConvergenceStudy",
    "ErrorReport",
    "ManufacturedCase",
    "SolveSettings",
    "TrigField",
    "builtin_cases",
    "condition_number",
    "divergence_residuals",
    "divergences",
    "evaluate",
    "field_errors",
    "fit_exponential_rate",
    "fit_loglog_slope",
    "get_case",
    "min_real_eig_time",
    "relative_difference",
    "run_comparison",
    "run_condition",
    "run_convergence",
    "time_block",
    "weighted_l2_error",
    "weighted_norm",
]
