from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field

Subcommand = Literal["tradeoff", "pareto", "mass", "sample", "lower-bound", "export-lp", "simulate", "median"]


class RunConfig(BaseModel):
    subcommand: Subcommand
    seed: int = Field(ge=0, lt=2**64)
    out_path: str | None = None
    threads: int = Field(default=0, ge=0)
    params: dict[str, Any] = Field(default_factory=dict)
    version: str = ""

    def sidecar_path(self) -> Path | None:
        if not self.out_path:
            return None
        return Path(f"{self.out_path}.run.json")

    def write_sidecar(self) -> Path | None:
        path = self.sidecar_path()
        if path is None:
            return None
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return path
