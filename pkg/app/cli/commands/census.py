import logging

from app.cli.common import CommandResult, load, pick_format, report_json, spec_arity, to_json, verdict
from app.core.exceptions import SpecError
from app.dependencies import archive_session
from app.schemas.matroid import RepresentableSpec
from app.schemas.run_config import RunConfig
from app.services import archive_service, census_service, spec_service
from app.services.field_service import create_field, parse_element

logger = logging.getLogger(__name__)


def _archive(reports, label) -> None:
    with archive_session() as db:
        for report in reports:
            archive_service.save_census_run(db, report, label=label)


def cmd_census(config: RunConfig) -> CommandResult:
    """One census per spec file; csv writes one row of seven counts per spec."""
    if not config.specs:
        raise SpecError("census needs at least one spec file")
    fmt = pick_format(config, ("json", "csv"))
    use_cache = None if config.use_cache else False
    reports = []
    for path in config.specs:
        spec, m = load(config, path)
        report = census_service.census(
            m,
            shards=config.shards,
            budget_ms=config.budget_ms,
            label=config.label or spec.label,
            use_cache=use_cache,
            timing=True,
            spec_digest=spec_service.spec_digest(spec),
        )
        reports.append(report)
    if config.archive:
        _archive(reports, config.label)
    if not config.timing:
        # 실행 시간은 아카이브에만 남긴다
        reports = [r.model_copy(update={"elapsed_ms": None}) for r in reports]

    if fmt == "csv":
        return CommandResult("".join(r.csv_row() + "\n" for r in reports))
    if len(reports) == 1:
        return CommandResult(report_json(reports[0]))
    return CommandResult(to_json([r.model_dump(mode="json", exclude_none=True) for r in reports]))


def cmd_verify_rep(config: RunConfig) -> CommandResult:
    """Compare a q-matroid with the matrix of a representable spec, subspace by subspace."""
    spec_arity(config, 2)
    fmt = pick_format(config, ("json", "text"))
    _, target = load(config, config.specs[0])
    g_spec = spec_service.load_spec(config.specs[1])
    if not isinstance(g_spec, RepresentableSpec):
        raise SpecError(f"{config.specs[1]} must be a representable spec, got {g_spec.kind}")
    field = create_field(g_spec.ext.p, g_spec.ext.m, g_spec.ext.modulus)
    G = [[parse_element(field, x) for x in row] for row in g_spec.G]
    report = census_service.verify_representation(
        target, G, field, budget_ms=config.budget_ms, shards=config.shards
    )
    if fmt == "text":
        text = f"agrees on {report.checked} of {report.total} subspaces\n"
        if not report.passed:
            text = f"mismatch: {report.mismatch.message} at {report.mismatch.witnesses[0]['rows']}\n"
        return CommandResult(text, verdict(report.passed))
    return CommandResult(report_json(report), verdict(report.passed))


def cmd_table(config: RunConfig) -> CommandResult:
    """Archived census runs as CSV."""
    pick_format(config, ("csv",))
    if config.specs:
        raise SpecError("table reads the archive and takes no spec files")
    with archive_session() as db:
        runs = archive_service.list_census_runs(db, label=config.label)
        logger.info(f"{len(runs)} archived census runs")
        return CommandResult(archive_service.census_table_csv(runs))
