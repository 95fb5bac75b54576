from app.cli.common import CommandResult, load, pick_format, report_json, spec_arity, to_json, verdict
from app.schemas.run_config import RunConfig
from app.services import spec_service
from app.services import zflats_service as zf


def _family(config: RunConfig) -> zf.CyclicFlatFamily:
    _, m = load(config, config.specs[0])
    known = m.known_cyclic_flats()
    if known is not None:
        return zf.CyclicFlatFamily.build(m.q, m.n, known, oracle=m)
    use_cache = None if config.use_cache else False
    return zf.compute_zflats(m, shards=config.shards, budget_ms=config.budget_ms, use_cache=use_cache)


def cmd_zflats(config: RunConfig) -> CommandResult:
    spec_arity(config, 1)
    fmt = pick_format(config, ("json", "dot", "text"))
    family = _family(config)
    if fmt == "dot":
        return CommandResult(zf.export_hasse(family))
    if fmt == "text":
        lines = [f"{z.dim}/{r} {z.rows}" for z, r in family.members]
        return CommandResult("\n".join(lines) + "\n")
    return CommandResult(to_json(spec_service.dump_family(family)))


def cmd_hasse(config: RunConfig) -> CommandResult:
    spec_arity(config, 1)
    pick_format(config, ("dot",))
    return CommandResult(zf.export_hasse(_family(config)))


def cmd_validate(config: RunConfig) -> CommandResult:
    """validate_family on a family file, not a matroid spec."""
    spec_arity(config, 1)
    fmt = pick_format(config, ("json", "text"))
    q, n, members = spec_service.load_family(config.specs[0])
    report = zf.validate_family(q, n, members, level=config.level, shards=config.shards)
    if fmt == "text":
        lines = ["passed" if report.passed else "failed"]
        lines += [f"{v.check}: {v.message}" for v in report.violations]
        return CommandResult("\n".join(lines) + "\n", verdict(report.passed))
    return CommandResult(report_json(report), verdict(report.passed))
