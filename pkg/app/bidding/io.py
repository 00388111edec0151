from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app.bidding.core import check_shape
from app.errors import ParseError
from app.models.functions import BiddingFunction

log = logging.getLogger(__name__)


def function_to_dict(B: BiddingFunction) -> dict[str, Any]:
    return B.model_dump(exclude_none=True)


def dump_function(B: BiddingFunction, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(function_to_dict(B), sort_keys=True, indent=1) + "\n", encoding="utf-8")
    log.info("function_written path=%s segments=%s", path, len(B.segments))
    return path


def function_from_dict(payload: dict[str, Any]) -> BiddingFunction:
    try:
        B = BiddingFunction.model_validate(payload)
        check_shape(B)
    except (ValidationError, ValueError, TypeError) as exc:
        raise ParseError(f"invalid bidding function: {exc}") from exc
    return B


def load_function(path: str | Path) -> BiddingFunction:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read bidding function {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"bidding function {path} must be a JSON object")
    return function_from_dict(payload)
