from __future__ import annotations

import logging
from typing import Sequence

from app.cli import build_parser, run_command
from app.config import Settings, configure_logging


def main(argv: Sequence[str] | None = None) -> int:
    settings = Settings()
    args = build_parser(settings).parse_args(argv)
    configure_logging(args.dev, args.log_level)
    logging.getLogger(__name__).info("app_start %s", settings.redacted())
    return run_command(args, settings)


if __name__ == "__main__":
    raise SystemExit(main())
