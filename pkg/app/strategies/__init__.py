from app.strategies.class_i import class_i_function, class_i_mass, class_i_pareto, pareto_slopes
from app.strategies.classes import class_d, class_d_best, class_d_pareto, class_d_tradeoff, class_e
from app.strategies.pareto import (
    asymptotic_consistency_curve,
    build_algorithm_a,
    denominator_series,
    evaluate_guarantees,
    generating_q,
    polynomial_family,
    regime_params,
    verify_delay_ode,
    write_qk_csv,
)
from app.strategies.tradeoff import r_grid, tradeoff_points, write_tradeoff_csv

__all__ = [
    "asymptotic_consistency_curve",
    "build_algorithm_a",
    "class_d",
    "class_d_best",
    "class_d_pareto",
    "class_d_tradeoff",
    "class_e",
    "class_i_function",
    "class_i_mass",
    "class_i_pareto",
    "denominator_series",
    "evaluate_guarantees",
    "generating_q",
    "pareto_slopes",
    "polynomial_family",
    "r_grid",
    "regime_params",
    "tradeoff_points",
    "verify_delay_ode",
    "write_qk_csv",
    "write_tradeoff_csv",
]
