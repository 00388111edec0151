from app.numerics.roots import (
    E,
    TWO_OVER_LN2,
    check_robustness,
    expm1_over,
    find_root_bracketed,
    solve_r0,
    solve_work_bounds,
    w_hi,
)

__all__ = [
    "E",
    "TWO_OVER_LN2",
    "check_robustness",
    "expm1_over",
    "find_root_bracketed",
    "solve_r0",
    "solve_work_bounds",
    "w_hi",
]
