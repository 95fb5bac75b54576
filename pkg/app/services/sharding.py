"""Round-robin shards of the subspace lattice, mapped over a process pool.

Shard k of S holds the subspaces whose position in the enumeration order is
k modulo S. Workers rebuild the oracle from its spec once per process.
"""

import logging
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Tuple

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, WorkerPoolError

logger = logging.getLogger(__name__)

Shard = Tuple[int, int]

_worker_oracle = None


@dataclass(frozen=True)
class Deadline:
    expires_at: Optional[float] = None

    @classmethod
    def after_ms(cls, budget_ms: Optional[float]) -> "Deadline":
        if budget_ms is None:
            return cls()
        return cls(time.time() + budget_ms / 1000.0)

    def expired(self) -> bool:
        return self.expires_at is not None and time.time() > self.expires_at


@dataclass
class ShardResult:
    payload: Any = None
    processed: int = 0
    expired: bool = False


# check the clock every this many subspaces
CLOCK_STRIDE = 256

# galois/numba start OpenMP in the parent; forked children abort
POOL_CONTEXT = "spawn"


def _init_worker(spec_json: str) -> None:
    global _worker_oracle
    from app.services.spec_service import build_oracle, parse_spec

    _worker_oracle = build_oracle(parse_spec(spec_json))


def _run_in_worker(task: Callable, shard: Shard, deadline: Deadline, args: tuple) -> ShardResult:
    return task(_worker_oracle, shard, deadline, *args)


def map_shards(
    oracle,
    task: Callable[..., ShardResult],
    shards: Optional[int] = None,
    deadline: Optional[Deadline] = None,
    args: tuple = (),
    workers: Optional[int] = None,
) -> List[ShardResult]:
    """Run `task(oracle, (k, S), deadline, *args)` for every shard, in shard order.

    Raises BudgetExceeded once every shard has reported and any of them ran out of time.
    """
    shards = settings.shard_count if shards is None else shards
    if shards < 1:
        raise ValueError("shard count must be positive")
    deadline = deadline or Deadline()
    workers = settings.worker_count if workers is None else workers
    workers = min(workers, shards)

    if oracle.spec is None or workers <= 1:
        if oracle.spec is None and workers > 1:
            logger.debug(f"{oracle!r} has no spec, scanning {shards} shards in-process")
        results = []
        for k in range(shards):
            results.append(task(oracle, (k, shards), deadline, *args))
            if results[-1].expired:
                break
    else:
        from app.services.spec_service import dump_spec_json

        logger.debug(f"scanning {shards} shards on {workers} worker processes")
        try:
            with ProcessPoolExecutor(
                max_workers=workers,
                mp_context=multiprocessing.get_context(POOL_CONTEXT),
                initializer=_init_worker,
                initargs=(dump_spec_json(oracle.spec),),
            ) as pool:
                futures = [pool.submit(_run_in_worker, task, (k, shards), deadline, args) for k in range(shards)]
                results = [f.result() for f in futures]
        except BrokenProcessPool as e:
            logger.error(f"worker pool died while scanning {shards} shards: {e}")
            raise WorkerPoolError(f"worker process terminated abruptly: {e}", workers=workers, shards=shards)

    if any(r.expired for r in results):
        progress = sum(r.processed for r in results)
        logger.warning(f"time budget exhausted after {progress} subspaces")
        raise BudgetExceeded(f"time budget exhausted after {progress} subspaces", progress=progress)
    return results
