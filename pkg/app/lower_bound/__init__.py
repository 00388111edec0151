from app.lower_bound.dual import (
    build_dual_certificate,
    certified_gap,
    dual_residuals,
    fixed_point_b,
    fixed_point_sweeps,
    lambda_limit,
    lower_bound_curve,
    read_certificate,
    rho_root,
    verify_certificate,
    write_certificate,
    write_curve_csv,
)
from app.lower_bound.primal import (
    build_primal,
    discretize_function,
    export_lp_text,
    parse_lp_text,
    primal_objective,
    primal_violation,
    solve_primal,
)

__all__ = [
    "build_dual_certificate",
    "build_primal",
    "certified_gap",
    "discretize_function",
    "dual_residuals",
    "export_lp_text",
    "fixed_point_b",
    "fixed_point_sweeps",
    "lambda_limit",
    "lower_bound_curve",
    "parse_lp_text",
    "primal_objective",
    "primal_violation",
    "read_certificate",
    "rho_root",
    "solve_primal",
    "verify_certificate",
    "write_certificate",
    "write_curve_csv",
]
