import json
from dataclasses import dataclass
from typing import Any, Dict, Sequence

from pydantic import BaseModel

from app.core.exceptions import EXIT_OK, EXIT_PROPERTY_VIOLATED, SpecError
from app.schemas.run_config import RunConfig
from app.services import qmatroid_service as qm
from app.services import spec_service


@dataclass
class CommandResult:
    text: str
    exit_code: int = EXIT_OK


def pick_format(config: RunConfig, allowed: Sequence[str]) -> str:
    """The requested format, or the command's first format when none was given."""
    fmt = config.format or allowed[0]
    if fmt not in allowed:
        raise SpecError(f"{config.command} writes {', '.join(allowed)}, not {fmt}")
    return fmt


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def report_json(report: BaseModel) -> str:
    return to_json(report.model_dump(mode="json", exclude_none=True))


def verdict(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_PROPERTY_VIOLATED


def spec_arity(config: RunConfig, count: int) -> None:
    if len(config.specs) != count:
        raise SpecError(f"{config.command} takes {count} spec file(s), got {len(config.specs)}")


def load(config: RunConfig, path: str):
    """(spec, oracle) for one spec file, with the run's cache setting applied."""
    spec = spec_service.load_spec(path)
    oracle = spec_service.build_oracle(spec)
    oracle.use_cache = config.use_cache
    return spec, oracle


def require_subspace(config: RunConfig, m: qm.RankOracle):
    if config.subspace is None:
        raise SpecError(f"{config.command} needs --subspace ROWS")
    return spec_service.parse_subspace(m.q, m.n, config.subspace)


def subspace_payload(m: qm.RankOracle, v) -> Dict[str, Any]:
    r = m.rank(v)
    return {"rows": v.rows, "dim": v.dim, "rank": r}
