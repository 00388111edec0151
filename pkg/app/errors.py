from __future__ import annotations


class BiddingLabError(RuntimeError):
    code = "INTERNAL"
    exit_code = 1

    def __init__(self, message: str = "") -> None:
        super().__init__(message or self.code)


class RobustnessBelowEError(BiddingLabError):
    code = "ROBUSTNESS_BELOW_E"
    exit_code = 10


class NoSignChangeError(BiddingLabError):
    code = "NO_SIGN_CHANGE"
    exit_code = 11


class NumericOverflowError(BiddingLabError):
    code = "NUMERIC_OVERFLOW"
    exit_code = 12


class NonConvergenceError(BiddingLabError):
    code = "NON_CONVERGENCE"
    exit_code = 13


class ThresholdOutOfRangeError(BiddingLabError):
    code = "THRESHOLD_OUT_OF_RANGE"
    exit_code = 20


class InsufficientSamplesError(BiddingLabError):
    code = "INSUFFICIENT_SAMPLES"
    exit_code = 21


class ConsistencyOutOfRangeError(BiddingLabError):
    code = "CONSISTENCY_OUT_OF_RANGE"
    exit_code = 30


class DivergentTailError(BiddingLabError):
    code = "DIVERGENT_TAIL"
    exit_code = 31


class FeasibilityViolationError(BiddingLabError):
    code = "FEASIBILITY_VIOLATION"
    exit_code = 40


class LPIOError(BiddingLabError):
    code = "IO_ERROR"
    exit_code = 41


class ParseError(BiddingLabError):
    code = "PARSE_ERROR"
    exit_code = 50


class DisconnectedGraphError(BiddingLabError):
    code = "DISCONNECTED"
    exit_code = 51


class NonpositiveWeightError(BiddingLabError):
    code = "NONPOSITIVE_WEIGHT"
    exit_code = 52


class MissingBaselineError(BiddingLabError):
    code = "MISSING_BASELINE"
    exit_code = 53
