from app.cli.common import (
    CommandResult,
    load,
    pick_format,
    require_subspace,
    subspace_payload,
    to_json,
)
from app.core.exceptions import SpecError
from app.schemas.run_config import RunConfig
from app.services import dsum_service, spec_service
from app.services.zflats_service import CyclicFlatFamily


def cmd_dsum(config: RunConfig) -> CommandResult:
    """Direct sum of two or more spec files, folded from the left."""
    if len(config.specs) < 2:
        raise SpecError("dsum needs at least two spec files")
    fmt = pick_format(config, ("json", "text"))
    parts = [load(config, path)[1] for path in config.specs]
    total = dsum_service.direct_sum_all(parts, config.strategy)
    total.use_cache = config.use_cache
    family = CyclicFlatFamily.build(total.q, total.n, total.known_cyclic_flats())

    payload = {
        "spec": spec_service.dump_spec(total.spec),
        "q": total.q,
        "n": total.n,
        "rank": total.full_rank,
        "cyclic_flats": len(family),
    }
    if config.subspace is not None:
        payload["subspace"] = subspace_payload(total, require_subspace(config, total))
    if fmt == "text":
        dims = " + ".join(str(p.n) for p in parts)
        lines = [f"GF({total.q})^({dims}) rank {payload['rank']}, {len(family)} cyclic flats"]
        if "subspace" in payload:
            lines.append(str(payload["subspace"]["rank"]))
        return CommandResult("\n".join(lines) + "\n")
    return CommandResult(to_json(payload))
