import dataclasses

from app.cli.common import (
    CommandResult,
    load,
    pick_format,
    report_json,
    require_subspace,
    spec_arity,
    subspace_payload,
    to_json,
    verdict,
)
from app.schemas.run_config import RunConfig
from app.services import qmatroid_service as qm
from app.services import spec_service


def cmd_rank(config: RunConfig) -> CommandResult:
    """rank(V) with the six predicates, closure and cyclic core of V."""
    spec_arity(config, 1)
    fmt = pick_format(config, ("json", "text"))
    _, m = load(config, config.specs[0])
    v = require_subspace(config, m)
    payload = subspace_payload(m, v)
    if fmt == "text":
        return CommandResult(f"{payload['rank']}\n")
    payload.update(dataclasses.asdict(qm.predicates(m, v)))
    payload["closure"] = qm.closure(m, v).rows
    payload["cyclic_core"] = qm.cyclic_core(m, v).rows
    return CommandResult(to_json(payload))


def cmd_dual(config: RunConfig) -> CommandResult:
    spec_arity(config, 1)
    fmt = pick_format(config, ("json", "text"))
    _, m = load(config, config.specs[0])
    m_star = qm.dual(m)
    payload = {"spec": spec_service.dump_spec(m_star.spec), "rank": m_star.full_rank}
    if config.subspace is not None:
        payload["subspace"] = subspace_payload(m_star, require_subspace(config, m_star))
    if fmt == "text":
        lines = [f"dual of {m.descriptor} on GF({m.q})^{m.n}, rank {payload['rank']}"]
        if "subspace" in payload:
            lines.append(str(payload["subspace"]["rank"]))
        return CommandResult("\n".join(lines) + "\n")
    return CommandResult(to_json(payload))


def cmd_axioms(config: RunConfig) -> CommandResult:
    spec_arity(config, 1)
    fmt = pick_format(config, ("json", "text"))
    _, m = load(config, config.specs[0])
    report = qm.axiom_check(m, mode=config.mode, seed=config.seed)
    if fmt == "text":
        if report.passed:
            text = f"passed ({report.subspaces_checked} subspaces, {report.pairs_checked} pairs)\n"
        else:
            text = f"{report.violation.check}: {report.violation.message}\n"
        return CommandResult(text, verdict(report.passed))
    return CommandResult(report_json(report), verdict(report.passed))
