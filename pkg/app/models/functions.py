from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

SegmentKind = Literal["exponential", "constant", "polynomial"]

KIND_EXPONENTIAL = 0
KIND_CONSTANT = 1
KIND_POLYNOMIAL = 2

_KIND_CODES = {"exponential": KIND_EXPONENTIAL, "constant": KIND_CONSTANT, "polynomial": KIND_POLYNOMIAL}


class Segment(BaseModel):
    """One analytic piece of a bidding function on [t_start, t_end).

    Every kind is written in the local variable s = t - t_start. A polynomial
    piece may carry an extra term exp_coef * exp(exp_rate * s).
    """

    model_config = ConfigDict(frozen=True)

    t_start: float
    t_end: float
    kind: SegmentKind
    value_at_start: float | None = Field(default=None, gt=0)
    exponent_slope: float | None = Field(default=None, ge=0)
    value: float | None = Field(default=None, gt=0)
    coefficients: list[float] | None = None
    exp_coef: float | None = None
    exp_rate: float | None = None

    @model_validator(mode="after")
    def _check_kind(self) -> Segment:
        if math.isnan(self.t_start) or math.isinf(self.t_start):
            raise ValueError("t_start must be finite")
        if not self.t_end > self.t_start:
            raise ValueError(f"empty segment [{self.t_start}, {self.t_end})")
        if self.kind == "exponential":
            if self.value_at_start is None or self.exponent_slope is None:
                raise ValueError("exponential segment needs value_at_start and exponent_slope")
        elif self.kind == "constant":
            if self.value is None:
                raise ValueError("constant segment needs value")
        else:
            if not self.coefficients:
                raise ValueError("polynomial segment needs coefficients")
            if math.isinf(self.t_end):
                raise ValueError("polynomial segment must be bounded")
            if (self.exp_coef is None) != (self.exp_rate is None):
                raise ValueError("exp_coef and exp_rate go together")
        return self


@dataclass(frozen=True)
class SegmentTable:
    starts: np.ndarray
    ends: np.ndarray
    kinds: np.ndarray
    base: np.ndarray
    slope: np.ndarray
    coef: np.ndarray
    integ: np.ndarray
    exp_coef: np.ndarray
    exp_rate: np.ndarray
    start_values: np.ndarray
    end_values: np.ndarray
    mass: np.ndarray
    cum_start: np.ndarray

    @classmethod
    def build(cls, segments: list[Segment], tail_mass: float) -> SegmentTable:
        n = len(segments)
        degree = max((len(seg.coefficients or [0.0]) for seg in segments), default=1)
        starts = np.array([seg.t_start for seg in segments], dtype=float)
        ends = np.array([seg.t_end for seg in segments], dtype=float)
        kinds = np.array([_KIND_CODES[seg.kind] for seg in segments], dtype=np.int64)
        base = np.zeros(n)
        slope = np.zeros(n)
        coef = np.zeros((n, degree))
        integ = np.zeros((n, degree + 1))
        exp_coef = np.zeros(n)
        exp_rate = np.zeros(n)
        for i, seg in enumerate(segments):
            if seg.kind == "exponential":
                base[i] = seg.value_at_start
                slope[i] = seg.exponent_slope
            elif seg.kind == "constant":
                base[i] = seg.value
            else:
                c = np.asarray(seg.coefficients, dtype=float)
                coef[i, : c.size] = c
                integ[i, 1 : c.size + 1] = c / np.arange(1, c.size + 1)
                exp_coef[i] = seg.exp_coef or 0.0
                exp_rate[i] = seg.exp_rate or 0.0
        lengths = ends - starts
        idx = np.arange(n)
        start_values = segment_values(kinds, base, slope, coef, exp_coef, exp_rate, idx, np.zeros(n))
        finite = np.isfinite(lengths)
        safe = np.where(finite, lengths, 0.0)
        end_values = np.where(
            finite, segment_values(kinds, base, slope, coef, exp_coef, exp_rate, idx, safe), np.inf
        )
        mass = np.where(finite, segment_masses(kinds, base, slope, integ, exp_coef, exp_rate, idx, safe), np.inf)
        cum_start = tail_mass + np.concatenate(([0.0], np.cumsum(mass[:-1])))
        return cls(
            starts=starts,
            ends=ends,
            kinds=kinds,
            base=base,
            slope=slope,
            coef=coef,
            integ=integ,
            exp_coef=exp_coef,
            exp_rate=exp_rate,
            start_values=start_values,
            end_values=end_values,
            mass=mass,
            cum_start=cum_start,
        )


def _horner(rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    out = rows[:, -1].copy()
    for j in range(rows.shape[1] - 2, -1, -1):
        out = out * u + rows[:, j]
    return out


def _expm1_over(rate: np.ndarray, u: np.ndarray) -> np.ndarray:
    # (e^{rate*u} - 1)/rate with the rate -> 0 limit u
    positive = rate > 0
    safe = np.where(positive, rate, 1.0)
    return np.where(positive, np.expm1(safe * u) / safe, u)


def segment_values(
    kinds: np.ndarray,
    base: np.ndarray,
    slope: np.ndarray,
    coef: np.ndarray,
    exp_coef: np.ndarray,
    exp_rate: np.ndarray,
    idx: np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    k = kinds[idx]
    out = np.empty(u.shape, dtype=float)
    m = k == KIND_EXPONENTIAL
    if m.any():
        out[m] = base[idx[m]] * np.exp(slope[idx[m]] * u[m])
    m = k == KIND_CONSTANT
    if m.any():
        out[m] = base[idx[m]]
    m = k == KIND_POLYNOMIAL
    if m.any():
        j = idx[m]
        out[m] = _horner(coef[j], u[m]) + exp_coef[j] * np.exp(exp_rate[j] * u[m])
    return out


def segment_derivatives(
    kinds: np.ndarray,
    base: np.ndarray,
    slope: np.ndarray,
    coef: np.ndarray,
    exp_coef: np.ndarray,
    exp_rate: np.ndarray,
    idx: np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    k = kinds[idx]
    out = np.zeros(u.shape, dtype=float)
    m = k == KIND_EXPONENTIAL
    if m.any():
        out[m] = base[idx[m]] * slope[idx[m]] * np.exp(slope[idx[m]] * u[m])
    m = k == KIND_POLYNOMIAL
    if m.any():
        j = idx[m]
        rows = coef[j]
        if rows.shape[1] > 1:
            deriv = rows[:, 1:] * np.arange(1, rows.shape[1])
            out[m] = _horner(deriv, u[m])
        out[m] += exp_coef[j] * exp_rate[j] * np.exp(exp_rate[j] * u[m])
    return out


def segment_masses(
    kinds: np.ndarray,
    base: np.ndarray,
    slope: np.ndarray,
    integ: np.ndarray,
    exp_coef: np.ndarray,
    exp_rate: np.ndarray,
    idx: np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    """Closed-form integral of each segment from its start to start + u."""
    k = kinds[idx]
    out = np.empty(u.shape, dtype=float)
    m = k == KIND_EXPONENTIAL
    if m.any():
        out[m] = base[idx[m]] * _expm1_over(slope[idx[m]], u[m])
    m = k == KIND_CONSTANT
    if m.any():
        out[m] = base[idx[m]] * u[m]
    m = k == KIND_POLYNOMIAL
    if m.any():
        j = idx[m]
        out[m] = _horner(integ[j], u[m]) + exp_coef[j] * _expm1_over(exp_rate[j], u[m])
    return out


class BiddingFunction(BaseModel):
    """Piecewise analytic nondecreasing B(t).

    Below the first segment the function is summarized by ``tail_mass`` (the
    integral of B over (-inf, t_start of the first segment)). When
    ``tail_growth`` is set, B(t - 1) = B(t) / tail_growth holds below the
    window, which makes values there and exact per-draw tails available.
    """

    model_config = ConfigDict(frozen=True)

    segments: list[Segment] = Field(min_length=1)
    tail_mass_bound: float = Field(default=0.0, ge=0)
    tail_mass: float = Field(default=0.0, ge=0)
    tail_growth: float | None = Field(default=None, gt=1)
    reference_point: float = 0.0

    _table: SegmentTable | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_layout(self) -> BiddingFunction:
        for left, right in zip(self.segments, self.segments[1:]):
            if left.t_end != right.t_start:
                raise ValueError(f"segments do not abut at t={left.t_end} / {right.t_start}")
        for seg in self.segments[:-1]:
            if math.isinf(seg.t_end):
                raise ValueError("only the last segment may be unbounded")
        return self

    @property
    def table(self) -> SegmentTable:
        if self._table is None:
            self._table = SegmentTable.build(self.segments, self.tail_mass)
        return self._table

    @property
    def t_first(self) -> float:
        return self.segments[0].t_start

    @property
    def t_last(self) -> float:
        return self.segments[-1].t_end

    def breakpoints(self) -> np.ndarray:
        points = [seg.t_start for seg in self.segments] + [self.segments[-1].t_end]
        return np.array([p for p in points if math.isfinite(p)], dtype=float)


class BidSequenceSample(BaseModel):
    lam: float = Field(ge=0, le=1, serialization_alias="lambda")
    bids: list[float]
    window: tuple[int, int]

    @model_validator(mode="after")
    def _check_bids(self) -> BidSequenceSample:
        if len(self.bids) != self.window[1] - self.window[0] + 1:
            raise ValueError("bids must fill the window")
        if any(b <= 0 for b in self.bids):
            raise ValueError("bids must be positive")
        if any(b2 < b1 for b1, b2 in zip(self.bids, self.bids[1:])):
            raise ValueError("bids must be nondecreasing")
        return self
