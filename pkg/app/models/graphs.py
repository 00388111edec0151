from __future__ import annotations

from dataclasses import dataclass, field

from pydantic import BaseModel, Field


class WeightedGraph(BaseModel):
    """Undirected graph on vertices 0..vertex_count-1.

    ``labels`` maps internal ids back to the ids found in the source file.
    """

    vertex_count: int = Field(ge=1)
    edges: list[tuple[int, int, float]]
    labels: list[int] = Field(default_factory=list)


class MedoidSolution(BaseModel):
    k: int = Field(ge=1)
    facilities: list[int]
    cost: float = Field(ge=0)
    seed: int = 0
    iterations: int = 0


@dataclass
class IncrementalSolution:
    index_set: list[int]
    prefix_sets: dict[int, frozenset[int]]
    ratios: dict[int, float]
    order: list[int] = field(default_factory=list)

    def holder(self, k: int) -> int | None:
        """Largest constructed index <= k, or None below the smallest one."""
        below = [i for i in self.prefix_sets if i <= k]
        return max(below) if below else None

    def facilities(self, k: int) -> frozenset[int]:
        own = self.holder(k)
        return self.prefix_sets[own] if own is not None else frozenset()
