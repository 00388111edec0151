from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse


@dataclass(frozen=True)
class PrimalLP:
    """Discretized primal: minimize C over x_{-n..m} and C.

    Rows are stored as ``A_ub @ z <= b_ub`` with z = (x_{-n}, ..., x_m, C);
    ``row_names`` follows the lam / gam_k / bet_k / theta labelling.
    """

    r: float
    a: int
    n: int
    m: int
    a_ub: sparse.csr_matrix
    b_ub: np.ndarray
    row_names: list[str] = field(default_factory=list)

    @property
    def variable_names(self) -> list[str]:
        return [variable_name(k) for k in range(-self.n, self.m + 1)] + ["C"]

    @property
    def num_variables(self) -> int:
        return self.n + self.m + 2


def variable_name(k: int) -> str:
    return f"x_m{-k}" if k < 0 else f"x_{k}"


def row_label(prefix: str, k: int) -> str:
    return f"{prefix}_m{-k}" if k < 0 else f"{prefix}_{k}"


class DualCertificate(BaseModel):
    """Dual-feasible (lambda, beta, gamma); beta is indexed -n..m, gamma -n-1..m."""

    model_config = ConfigDict(validate_by_name=True, validate_by_alias=True)

    a: int = Field(ge=1)
    n: int = Field(ge=1)
    m: int = Field(ge=0)
    r: float
    lam: float = Field(ge=0, serialization_alias="lambda", validation_alias="lambda")
    beta: list[float]
    gamma: list[float]
    max_violation: float = 0.0

    def beta_at(self, k: int) -> float:
        return self.beta[k + self.n]

    def gamma_at(self, k: int) -> float:
        return self.gamma[k + self.n + 1]
