from __future__ import annotations

from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=1e-12, gt=0)
    rel_tol: float = Field(default=1e-12, gt=0)
    max_iter: int = Field(default=200, ge=1)


class GridSpec(BaseModel):
    """Evaluation grid for inf/sup searches of the normalized mass."""

    model_config = ConfigDict(frozen=True)

    points_per_unit: int = Field(default=4096, ge=8)
    half_width: float = Field(default=30.0, gt=0)
    refine: bool = True


@dataclass(frozen=True)
class WorkBounds:
    r: float
    w_lo: float
    w_hi: float


@dataclass(frozen=True)
class ExtremaResult:
    cons: float
    rob: float
    argmin_t: float
    argmax_t: float
    cons_error: float
    rob_error: float
