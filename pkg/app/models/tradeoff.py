from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

TradeoffSource = Literal["ClassE", "ClassD", "ClassI", "AlgorithmA", "LowerBound"]
Regime = Literal["Large", "Small"]


class ClassDParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    ell: float = Field(ge=0)
    h: float = Field(ge=0)

    @model_validator(mode="after")
    def _check_positive_growth(self) -> ClassDParams:
        if self.ell + self.h <= 0:
            raise ValueError("ell + h must be positive")
        return self


class SlopeSequence(BaseModel):
    """Slopes l_i of a class-I function on [i, i+1).

    Indices below i_min use left_slope, indices above i_max use right_slope.
    """

    model_config = ConfigDict(frozen=True)

    slopes: dict[int, float] = Field(default_factory=dict)
    left_slope: float = Field(ge=0)
    right_slope: float = Field(ge=0)
    i_min: int = 0
    i_max: int = -1

    @model_validator(mode="after")
    def _check_span(self) -> SlopeSequence:
        if set(self.slopes) != set(range(self.i_min, self.i_max + 1)):
            raise ValueError("slopes must cover every index in [i_min, i_max]")
        if any(value < 0 for value in self.slopes.values()):
            raise ValueError("slopes must be nonnegative")
        return self

    def slope(self, i: int) -> float:
        if i < self.i_min:
            return self.left_slope
        if i > self.i_max:
            return self.right_slope
        return self.slopes[i]


class TradeoffPoint(BaseModel):
    r: float
    c: float = Field(ge=1.0 - 1e-9)
    source: TradeoffSource

    @model_validator(mode="after")
    def _check_order(self) -> TradeoffPoint:
        if self.c > self.r * (1 + 1e-9):
            raise ValueError(f"consistency {self.c} exceeds robustness {self.r}")
        return self


class RegimeParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: float
    regime: Regime
    w_hi: float
    alpha: float
    mu: float
    y: float | None = None
    ell_cap: float | None = None


class SeriesPiece(BaseModel):
    """p_k on [s_start, s_end]: polynomial in v = s - s_start plus exp_coef * e^{rate * v}."""

    s_start: float
    s_end: float
    coefficients: list[float]
    exp_coef: float = 0.0


class PolynomialFamily(BaseModel):
    x: float
    exp_rate: float = 0.0
    polys: list[list[SeriesPiece]]
    q: list[float]
    k_max: int = Field(ge=1)
