import logging
import time
from typing import Optional, Sequence

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, DimensionMismatch
from app.schemas.report import CensusCounts, CensusReport, RepresentationReport, Violation
from app.services import qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.field_service import FieldSpec
from app.services.sharding import CLOCK_STRIDE, Deadline, ShardResult, map_shards
from app.services.subspace_service import Subspace
from app.utils.math import subspace_count

logger = logging.getLogger(__name__)


def _census_shard(oracle: qm.RankOracle, shard, deadline: Deadline, use_cache: bool) -> ShardResult:
    counts = [0] * 7
    processed = 0
    for v in ss.enumerate_subspaces(oracle.q, oracle.n, shard=shard):
        if processed % CLOCK_STRIDE == 0 and deadline.expired():
            return ShardResult(counts, processed, expired=True)
        processed += 1
        flags = qm.predicates(oracle, v, use_cache)
        for i, hit in enumerate(
            (flags.flat, flags.cyclic, flags.flat and flags.cyclic, flags.independent, flags.dependent, flags.circuit, flags.basis)
        ):
            counts[i] += hit
    return ShardResult(counts, processed)


def census(
    m: qm.RankOracle,
    shards: Optional[int] = None,
    budget_ms: Optional[float] = None,
    label: Optional[str] = None,
    use_cache: Optional[bool] = None,
    timing: bool = False,
    spec_digest: Optional[str] = None,
) -> CensusReport:
    total = subspace_count(m.q, m.n)
    if total > settings.ENUMERATION_BUDGET:
        raise BudgetExceeded(f"GF({m.q})^{m.n} has {total} subspaces, above the enumeration budget")
    if use_cache is None:
        use_cache = m.use_cache and total <= settings.CENSUS_CACHE_THRESHOLD
        if not use_cache and m.use_cache:
            logger.warning(f"{total} subspaces: census bypasses the rank cache")
    shards = settings.shard_count if shards is None else shards

    started = time.perf_counter()
    results = map_shards(m, _census_shard, shards, Deadline.after_ms(budget_ms), args=(use_cache,))
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    sums = [sum(r.payload[i] for r in results) for i in range(7)]
    counts = CensusCounts(
        flats=sums[0],
        cyclic=sums[1],
        cyclic_flats=sums[2],
        independent=sums[3],
        dependent=sums[4],
        circuits=sums[5],
        bases=sums[6],
    )
    if counts.independent + counts.dependent != total:
        raise RuntimeError(f"census covered {counts.independent + counts.dependent} of {total} subspaces")

    fast_paths = ["family-formula"] if m.family_formula is not None else []
    logger.info(f"census of {m!r} over {total} subspaces in {elapsed_ms:.0f} ms: {counts.as_row()}")
    return CensusReport(
        descriptor=m.descriptor,
        label=label,
        q=m.q,
        n=m.n,
        total=total,
        counts=counts,
        shards=shards,
        cache=use_cache,
        fast_paths=fast_paths,
        spec_digest=spec_digest,
        elapsed_ms=round(elapsed_ms, 3) if timing else None,
    )


def _representation_shard(oracle: qm.RankOracle, shard, deadline: Deadline, other_spec) -> ShardResult:
    from app.services.spec_service import build_oracle

    other = build_oracle(other_spec)
    processed = 0
    for v in ss.enumerate_subspaces(oracle.q, oracle.n, shard=shard):
        if processed % CLOCK_STRIDE == 0 and deadline.expired():
            return ShardResult(None, processed, expired=True)
        processed += 1
        a = oracle.rank(v, False)
        b = other.rank(v, False)
        if a != b:
            return ShardResult((v.basis, a, b), processed)
    return ShardResult(None, processed)


def verify_representation(
    target: qm.RankOracle,
    G: Sequence[Sequence[int]],
    field_ext: FieldSpec,
    budget_ms: Optional[float] = None,
    shards: Optional[int] = None,
) -> RepresentationReport:
    representation = qm.from_representation(field_ext, G, q=target.q)
    if representation.n != target.n:
        raise DimensionMismatch(f"G has {representation.n} columns, the q-matroid lives on GF({target.q})^{target.n}")
    total = subspace_count(target.q, target.n)
    if total > settings.ENUMERATION_BUDGET:
        raise BudgetExceeded(f"GF({target.q})^{target.n} has {total} subspaces, above the enumeration budget")

    # workers rebuild the matrix oracle from its spec
    results = map_shards(
        target, _representation_shard, shards, Deadline.after_ms(budget_ms), args=(representation.spec,)
    )
    checked = sum(r.processed for r in results)
    mismatches = [r.payload for r in results if r.payload is not None]
    if mismatches:
        basis, a, b = min(mismatches, key=lambda item: (len(item[0]), item[0]))
        v = Subspace(target.q, target.n, basis)
        return RepresentationReport(
            passed=False,
            checked=checked,
            total=total,
            mismatch=Violation(
                check="representation",
                message=f"target rank {a}, matrix rank {b}",
                witnesses=[v.to_dict()],
            ),
        )
    logger.info(f"representation agrees on all {total} subspaces")
    return RepresentationReport(passed=True, checked=checked, total=total)
