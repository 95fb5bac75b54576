import json
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from app.cli.router import dispatch, parse_config
from app.core.config import settings
from app.core.exceptions import QMatroidError

load_dotenv()

logger = logging.getLogger("app")


def _configure_logging(level: Optional[str]) -> None:
    # stdout는 결과 전용, 로그는 stderr로
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config, log_level = parse_config(argv)
        _configure_logging(log_level)
        logger.debug(f"run config: {config.model_dump(exclude_none=True)}")
        result = dispatch(config)
    except QMatroidError as e:
        if settings.DEBUG:
            logger.exception(f"{e.code}: {e.message}")
        sys.stderr.write(json.dumps(e.detail, ensure_ascii=False) + "\n")
        return e.exit_code
    sys.stdout.write(result.text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
