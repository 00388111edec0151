from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, Field

AlgorithmName = Literal["D", "I", "A"]


class NoiseModel(BaseModel):
    """u = u_hat * base**eta with eta ~ N(0, sigma2); base e gives the plain log-normal."""

    u_hat: float = Field(default=1.0, gt=0)
    sigma2: float = Field(default=0.0, ge=0)
    base: float = Field(default=2.0, gt=1)

    @property
    def log_sigma(self) -> float:
        """Standard deviation of ln(u / u_hat)."""
        return math.sqrt(self.sigma2) * math.log(self.base)


class EvalResult(BaseModel):
    algorithm: AlgorithmName
    r: float
    sigma2: float
    mean_nc: float
    stderr: float
    n_trials: int
    seed: int
