from __future__ import annotations

import logging
import sys
from typing import Sequence

from src.cli import run
from src.config import Config

logger = logging.getLogger(__name__)


def main(argv: Sequence[str] | None = None) -> int:
    config = Config.from_env()
    logging.basicConfig(level=config.log_level, format="%(asctime)s [%(name)s] %(message)s", stream=sys.stderr)
    logger.debug(
        "config loaded: seed=%d twirl_samples=%d curve_samples=%d coord_snap=%g",
        config.seed,
        config.twirl_samples,
        config.curve_samples,
        config.coord_snap,
    )
    return run(argv, config)


if __name__ == "__main__":
    sys.exit(main())
