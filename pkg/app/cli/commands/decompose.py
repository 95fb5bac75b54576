import logging

from app.cli.common import CommandResult, load, pick_format, report_json, spec_arity
from app.schemas.run_config import RunConfig
from app.services import decompose_service
from app.services.zflats_service import family_of

logger = logging.getLogger(__name__)


def cmd_decompose(config: RunConfig) -> CommandResult:
    spec_arity(config, 1)
    fmt = pick_format(config, ("json", "text"))
    _, m = load(config, config.specs[0])
    result = decompose_service.decompose(m, family_of(m, shards=config.shards))
    if fmt == "text":
        return CommandResult(result.summary + "\n")
    return CommandResult(report_json(result.to_report()))


def cmd_equiv(config: RunConfig) -> CommandResult:
    """Anchored search for α with rank2(αV) = rank1(V); running out of candidates exits 3."""
    spec_arity(config, 2)
    fmt = pick_format(config, ("json", "text"))
    _, m1 = load(config, config.specs[0])
    _, m2 = load(config, config.specs[1])
    report = decompose_service.equivalence_search(
        m1,
        m2,
        budget=config.candidate_budget,
        family1=family_of(m1, shards=config.shards),
        family2=family_of(m2, shards=config.shards),
    )
    logger.info(f"equivalence: {report.reason} after {report.candidates_checked} candidates")
    if fmt == "text":
        if report.found:
            return CommandResult(f"equivalent: {report.alpha}\n")
        return CommandResult(f"not equivalent ({report.reason}, {report.candidates_checked} candidates)\n")
    return CommandResult(report_json(report))
