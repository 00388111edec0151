from app.models.core import ExtremaResult, GridSpec, SolverConfig, WorkBounds
from app.models.evaluation import EvalResult, NoiseModel
from app.models.functions import BidSequenceSample, BiddingFunction, Segment
from app.models.graphs import IncrementalSolution, MedoidSolution, WeightedGraph
from app.models.lp import DualCertificate, PrimalLP
from app.models.run import RunConfig
from app.models.tradeoff import (
    ClassDParams,
    PolynomialFamily,
    RegimeParams,
    SeriesPiece,
    SlopeSequence,
    TradeoffPoint,
)

__all__ = [
    "BidSequenceSample",
    "BiddingFunction",
    "ClassDParams",
    "DualCertificate",
    "EvalResult",
    "ExtremaResult",
    "GridSpec",
    "IncrementalSolution",
    "MedoidSolution",
    "NoiseModel",
    "PolynomialFamily",
    "PrimalLP",
    "RegimeParams",
    "RunConfig",
    "Segment",
    "SeriesPiece",
    "SlopeSequence",
    "SolverConfig",
    "TradeoffPoint",
    "WeightedGraph",
    "WorkBounds",
]
