from __future__ import annotations

import copy
import json
import logging
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator

from pydantic import ValidationError

from app.errors import ParseError
from app.models.graphs import MedoidSolution

log = logging.getLogger(__name__)

CACHE_VERSION = 1


def cache_key(graph_hash: str, k: int, seed: int) -> str:
    return f"{graph_hash}:{k}:{seed}"


class BaselineCache:
    """k-medoids baselines in a JSON file keyed by (graph hash, k, seed).

    Writes go through ``tx()``: the file is rewritten on commit and the
    in-memory entries are restored if the block raises.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.RLock()
        self._entries: dict[str, dict[str, Any]] = {}
        if self.path.exists():
            self._entries = self._read()
        log.info("baseline_cache_open path=%s entries=%s", self.path, len(self._entries))

    def _read(self) -> dict[str, dict[str, Any]]:
        try:
            payload = json.loads(self.path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read baseline cache {self.path}: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("version") != CACHE_VERSION:
            raise ParseError(f"baseline cache {self.path} has an unknown layout")
        return dict(payload.get("entries", {}))

    def _flush(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        body = {"version": CACHE_VERSION, "entries": self._entries}
        tmp.write_text(json.dumps(body, sort_keys=True) + "\n", encoding="utf-8")
        tmp.replace(self.path)

    @contextmanager
    def tx(self) -> Iterator[dict[str, dict[str, Any]]]:
        with self._lock:
            log.info("transaction_start")
            snapshot = copy.deepcopy(self._entries)
            try:
                yield self._entries
                self._flush()
                log.info("transaction_commit")
            except Exception:
                self._entries = snapshot
                log.exception("transaction_rollback")
                raise

    def get(self, graph_hash: str, k: int, seed: int) -> MedoidSolution | None:
        with self._lock:
            raw = self._entries.get(cache_key(graph_hash, k, seed))
        if raw is None:
            return None
        try:
            return MedoidSolution.model_validate(raw)
        except ValidationError as exc:
            raise ParseError(f"bad cache entry for k={k}: {exc}") from exc

    def put_many(self, graph_hash: str, solutions: list[MedoidSolution]) -> None:
        log.info("baseline_write graph=%s count=%s", graph_hash[:12], len(solutions))
        with self.tx() as entries:
            for sol in solutions:
                entries[cache_key(graph_hash, sol.k, sol.seed)] = sol.model_dump()

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
