from app.bidding.core import (
    check_shape,
    cumulative_mass,
    derivative,
    inverse,
    normalized_mass,
    scaled,
    shift_to_prediction,
    shifted,
    values,
    work,
)
from app.bidding.estimate import empirical_mass, estimate_function_from_samples
from app.bidding.extrema import consistency_robustness, grid_points
from app.bidding.io import dump_function, function_from_dict, function_to_dict, load_function
from app.bidding.sampling import expected_normalized_cost, make_rng, normalized_costs, sample_sequence

__all__ = [
    "check_shape",
    "consistency_robustness",
    "cumulative_mass",
    "derivative",
    "dump_function",
    "empirical_mass",
    "estimate_function_from_samples",
    "expected_normalized_cost",
    "function_from_dict",
    "function_to_dict",
    "grid_points",
    "inverse",
    "load_function",
    "make_rng",
    "normalized_costs",
    "normalized_mass",
    "sample_sequence",
    "scaled",
    "shift_to_prediction",
    "shifted",
    "values",
    "work",
]
