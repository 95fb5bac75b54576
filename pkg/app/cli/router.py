import argparse
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from app.cli.common import CommandResult
from app.cli.commands import census, decompose, dsum, matroid, zflats
from app.core.config import settings
from app.core.exceptions import SpecError
from app.schemas.run_config import RunConfig

Handler = Callable[[RunConfig], CommandResult]

COMMANDS: Dict[str, Handler] = {
    "rank": matroid.cmd_rank,
    "dual": matroid.cmd_dual,
    "axioms": matroid.cmd_axioms,
    "zflats": zflats.cmd_zflats,
    "hasse": zflats.cmd_hasse,
    "validate": zflats.cmd_validate,
    "census": census.cmd_census,
    "verify-rep": census.cmd_verify_rep,
    "table": census.cmd_table,
    "dsum": dsum.cmd_dsum,
    "decompose": decompose.cmd_decompose,
    "equiv": decompose.cmd_equiv,
}

# (positional nargs, help)
_SPEC_ARGS = {
    "rank": (1, "matroid spec"),
    "dual": (1, "matroid spec"),
    "axioms": (1, "matroid spec"),
    "zflats": (1, "matroid spec"),
    "hasse": (1, "matroid spec"),
    "validate": (1, "family file"),
    "census": ("+", "matroid specs, one census each"),
    "verify-rep": (2, "matroid spec, then a representable spec holding G"),
    "dsum": ("+", "two or more matroid specs"),
    "decompose": (1, "matroid spec"),
    "equiv": (2, "two matroid specs"),
}


class CliParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors share the error JSON."""

    def error(self, message: str):
        raise SpecError(message, name="UsageError")


def _common_options() -> argparse.ArgumentParser:
    common = CliParser(add_help=False)
    common.add_argument("--shards", type=int, help="enumeration shards (default: CPU count)")
    common.add_argument("--budget-ms", type=float, dest="budget_ms", help="wall-clock budget")
    common.add_argument("--format", choices=["json", "csv", "dot", "text"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-cache", action="store_false", dest="use_cache", help="bypass the rank memo cache")
    common.add_argument(
        "--log-level",
        dest="log_level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help=f"default {settings.LOG_LEVEL}",
    )
    return common


def build_parser() -> CliParser:
    parser = CliParser(prog="qmat", description=settings.PROJECT_NAME)
    common = _common_options()
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)
    for name in COMMANDS:
        sub = commands.add_parser(name, parents=[common])
        if name in _SPEC_ARGS:
            nargs, help_text = _SPEC_ARGS[name]
            sub.add_argument("specs", nargs=nargs, help=help_text)
        if name in ("rank", "dual", "dsum"):
            sub.add_argument("--subspace", help='JSON rows, e.g. "[[1,0,1]]"')
        if name == "dsum":
            sub.add_argument("--strategy", choices=["naive", "zbased"], default="zbased")
        if name == "axioms":
            sub.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
        if name == "validate":
            sub.add_argument("--level", choices=["structural", "full"], default="structural")
        if name == "census":
            sub.add_argument("--timing", action="store_true", help="include elapsed_ms in the report")
            sub.add_argument("--archive", action="store_true", help="store the run in the census archive")
        if name in ("census", "table"):
            sub.add_argument("--label")
        if name == "equiv":
            sub.add_argument("--candidate-budget", type=int, dest="candidate_budget")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> Tuple[RunConfig, Optional[str]]:
    """RunConfig plus the --log-level override."""
    args = vars(build_parser().parse_args(argv))
    log_level = args.pop("log_level", None)
    try:
        config = RunConfig(**{k: v for k, v in args.items() if v is not None})
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(x) for x in first["loc"])
        raise SpecError(f"--{where.replace('_', '-')}: {first['msg']}") from e
    return config, log_level


def dispatch(config: RunConfig) -> CommandResult:
    return COMMANDS[config.command](config)
