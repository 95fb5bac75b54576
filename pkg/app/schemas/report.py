from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel


CENSUS_FIELDS = ["flats", "cyclic", "cyclic_flats", "independent", "dependent", "circuits", "bases"]


class Violation(BaseModel):
    check: str
    message: str
    witnesses: List[Dict[str, Any]] = []


class AxiomReport(BaseModel):
    passed: bool
    mode: str
    subspaces_checked: int
    pairs_checked: int
    violation: Optional[Violation] = None


class ValidationReport(BaseModel):
    passed: bool
    level: str
    checks_run: List[str]
    checks_skipped: List[str] = []
    violations: List[Violation] = []


class CensusCounts(BaseModel):
    flats: int = 0
    cyclic: int = 0
    cyclic_flats: int = 0
    independent: int = 0
    dependent: int = 0
    circuits: int = 0
    bases: int = 0

    def as_row(self) -> List[int]:
        return [getattr(self, name) for name in CENSUS_FIELDS]


class CensusReport(BaseModel):
    descriptor: str
    label: Optional[str] = None
    q: int
    n: int
    total: int
    counts: CensusCounts
    shards: int
    cache: bool
    fast_paths: List[str] = []
    spec_digest: Optional[str] = None
    elapsed_ms: Optional[float] = None

    def csv_row(self) -> str:
        return ",".join(str(v) for v in self.counts.as_row())


class CheckReport(BaseModel):
    check: str
    passed: bool
    checked: int
    details: Dict[str, Any] = {}
    violation: Optional[Violation] = None


class RepresentationReport(BaseModel):
    passed: bool
    checked: int
    total: int
    mismatch: Optional[Violation] = None


class IrreducibilityReport(BaseModel):
    irreducible: bool
    reason: str
    witness: Optional[List[Dict[str, Any]]] = None
    family_size: Optional[int] = None


class ComponentReport(BaseModel):
    tag: Literal["trivial", "free", "irreducible"]
    dim: int
    rank: int
    name: str
    ground_rows: List[List[int]]
    spec: Dict[str, Any]


class DecompositionReport(BaseModel):
    descriptor: str
    q: int
    n: int
    l: int  # noqa: E741
    f: int
    summary: str
    components: List[ComponentReport]
    tree: Dict[str, Any]


class EquivalenceReport(BaseModel):
    found: bool
    exhausted: bool
    candidates_checked: int
    reason: str
    alpha: Optional[List[List[int]]] = None
