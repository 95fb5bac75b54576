import csv
import io
import logging
from typing import List, Optional, Sequence

from sqlalchemy.orm import Session

from app.models.census_run import CensusRun
from app.schemas.report import CENSUS_FIELDS, CensusReport

logger = logging.getLogger(__name__)


def save_census_run(
    db: Session,
    report: CensusReport,
    label: Optional[str] = None,
    elapsed_ms: Optional[float] = None,
) -> CensusRun:
    counts = report.counts
    run = CensusRun(
        label=label or report.label,
        descriptor=report.descriptor,
        spec_digest=report.spec_digest,
        q=report.q,
        n=report.n,
        shards=report.shards,
        total=report.total,
        elapsed_ms=elapsed_ms if elapsed_ms is not None else report.elapsed_ms,
        **{name: getattr(counts, name) for name in CENSUS_FIELDS},
    )
    db.add(run)
    db.commit()
    db.refresh(run)
    logger.info(f"archived census run {run.id} ({run.label or run.descriptor})")
    return run


def list_census_runs(db: Session, label: Optional[str] = None) -> List[CensusRun]:
    query = db.query(CensusRun)
    if label is not None:
        query = query.filter(CensusRun.label == label)
    return query.order_by(CensusRun.id).all()


def census_table_csv(runs: Sequence[CensusRun]) -> str:
    """One row per run, the seven counts in table order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["label", "q", "n", *CENSUS_FIELDS])
    for run in runs:
        writer.writerow([run.label or run.descriptor, run.q, run.n, *(getattr(run, name) for name in CENSUS_FIELDS)])
    return buffer.getvalue()
