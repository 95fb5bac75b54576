import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, InconsistentFamily, NotAMember, NotComputedFromOracle
from app.schemas.matroid import FamilySchema, RankedSubspaceSchema
from app.schemas.report import ValidationReport, Violation
from app.services import qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.sharding import CLOCK_STRIDE, Deadline, ShardResult, map_shards
from app.services.subspace_service import Subspace
from app.utils.math import subspace_count

logger = logging.getLogger(__name__)


@dataclass
class CyclicFlatFamily:
    """Z(M) with ranks, sorted by (dim, basis); cover_edges are index pairs (lower, upper)."""

    q: int
    n: int
    members: Tuple[Tuple[Subspace, int], ...]
    cover_edges: Tuple[Tuple[int, int], ...]
    least: Optional[int]
    greatest: Optional[int]
    oracle: Optional[qm.RankOracle] = field(default=None, compare=False, repr=False)

    @classmethod
    def build(
        cls,
        q: int,
        n: int,
        members: Iterable[Tuple[Subspace, int]],
        oracle: Optional[qm.RankOracle] = None,
    ) -> "CyclicFlatFamily":
        ordered = tuple(sorted(members, key=lambda item: item[0].sort_key))
        spaces = [z for z, _ in ordered]
        below = {
            (i, j)
            for i, a in enumerate(spaces)
            for j, b in enumerate(spaces)
            if i != j and a.dim < b.dim and b.contains(a)
        }
        least = next((i for i, a in enumerate(spaces) if all(b.contains(a) for b in spaces)), None)
        greatest = next((i for i, a in enumerate(spaces) if all(a.contains(b) for b in spaces)), None)
        return cls(q, n, ordered, _cover_edges(len(spaces), below), least, greatest, oracle)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def spaces(self) -> List[Subspace]:
        return [z for z, _ in self.members]

    @cached_property
    def formula(self) -> qm.FamilyFormula:
        return qm.FamilyFormula(self.members)

    def index(self, z: Subspace) -> int:
        for i, (member, _) in enumerate(self.members):
            if member == z:
                return i
        raise NotAMember(f"{z.rows} is not a member of the family")

    def rank_of(self, i: int) -> int:
        return self.members[i][1]

    def profile(self) -> List[Tuple[int, int, int]]:
        """(dim, rank, count) groups in canonical order."""
        counts = {}
        for z, r in self.members:
            counts[(z.dim, r)] = counts.get((z.dim, r), 0) + 1
        return [(d, r, c) for (d, r), c in sorted(counts.items())]


def _cover_edges(size: int, below: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(size))
    graph.add_edges_from(below)
    return tuple(sorted(nx.transitive_reduction(graph).edges()))


def _cyclic_flat_shard(oracle: qm.RankOracle, shard, deadline: Deadline, use_cache: bool) -> ShardResult:
    found = []
    processed = 0
    formula = oracle.family_formula
    for v in ss.enumerate_subspaces(oracle.q, oracle.n, shard=shard):
        if processed % CLOCK_STRIDE == 0 and deadline.expired():
            return ShardResult(found, processed, expired=True)
        processed += 1
        if formula is not None:
            r, flat, cyclic = formula.profile(v)
            if flat and cyclic:
                found.append((v.basis, r))
            continue
        r = oracle.rank(v, use_cache)
        if oracle.is_flat(v, r, use_cache) and oracle.is_cyclic(v, r, use_cache):
            found.append((v.basis, r))
    return ShardResult(found, processed)


def compute_zflats(
    m: qm.RankOracle,
    shards: Optional[int] = None,
    budget_ms: Optional[float] = None,
    use_cache: Optional[bool] = None,
) -> CyclicFlatFamily:
    total = subspace_count(m.q, m.n)
    if total > settings.ENUMERATION_BUDGET:
        raise BudgetExceeded(f"GF({m.q})^{m.n} has {total} subspaces, above the enumeration budget")
    if use_cache is None:
        use_cache = m.use_cache and total <= settings.CENSUS_CACHE_THRESHOLD
    results = map_shards(m, _cyclic_flat_shard, shards, Deadline.after_ms(budget_ms), args=(use_cache,))
    members = [(Subspace(m.q, m.n, basis), r) for result in results for basis, r in result.payload]
    family = CyclicFlatFamily.build(m.q, m.n, members, oracle=m)
    logger.info(f"{m!r}: {len(family)} cyclic flats over {total} subspaces")
    return family


def family_of(m: qm.RankOracle, shards: Optional[int] = None) -> CyclicFlatFamily:
    """Z(M), taken from the oracle when it already knows it."""
    known = m.known_cyclic_flats()
    if known is not None:
        return CyclicFlatFamily.build(m.q, m.n, known, oracle=m)
    return compute_zflats(m, shards=shards)


def rank_via_family(family: CyclicFlatFamily, v: Subspace) -> int:
    return family.formula.rank(v)


def independent_via_family(family: CyclicFlatFamily, v: Subspace) -> bool:
    return family.formula.independent(v)


def _require_oracle(family: CyclicFlatFamily) -> qm.RankOracle:
    if family.oracle is None:
        raise NotComputedFromOracle("meet and join need the q-matroid the family was computed from")
    return family.oracle


def meet(family: CyclicFlatFamily, i: int, j: int) -> int:
    """Index of cyc(Z_i ∩ Z_j)."""
    m = _require_oracle(family)
    return family.index(qm.cyclic_core(m, ss.intersect(family.spaces[i], family.spaces[j])))


def join(family: CyclicFlatFamily, i: int, j: int) -> int:
    """Index of cl(Z_i + Z_j)."""
    m = _require_oracle(family)
    return family.index(qm.closure(m, ss.sum(family.spaces[i], family.spaces[j])))


def restrict_family(family: CyclicFlatFamily, zhat: Union[int, Subspace]) -> CyclicFlatFamily:
    """Z(M|Zhat) in the coordinates of the RREF rows of Zhat."""
    i = zhat if isinstance(zhat, int) else family.index(zhat)
    if not 0 <= i < len(family):
        raise NotAMember(f"no member with index {i}")
    top = family.spaces[i]
    embedding = ss.BasisEmbedding.of(top)
    members = [(embedding.pull(z), r) for z, r in family.members if top.contains(z)]
    oracle = qm.restriction(family.oracle, top) if family.oracle is not None else None
    return CyclicFlatFamily.build(family.q, top.dim, members, oracle=oracle)


def _violation(check: str, message: str, *witnesses: Subspace) -> Violation:
    return Violation(check=check, message=message, witnesses=[w.to_dict() for w in witnesses])


def _structural_violations(q: int, n: int, proposed: Sequence[Tuple[Subspace, int]]) -> List[Violation]:
    out: List[Violation] = []
    spaces = [z for z, _ in proposed]
    if len(set(spaces)) != len(spaces):
        dupes = [z for z in spaces if spaces.count(z) > 1]
        out.append(_violation("distinct", "members must be pairwise distinct", dupes[0]))
        return out

    family = CyclicFlatFamily.build(q, n, proposed)
    for z, r in family.members:
        if not 0 <= r <= z.dim:
            out.append(_violation("rank-bounds", f"rank {r} outside 0..{z.dim}", z))
    if family.least is None:
        out.append(_violation("least", "no member lies below all others"))
    elif family.rank_of(family.least) != 0:
        out.append(_violation("least", "least member must have rank 0", family.spaces[family.least]))
    if family.greatest is None:
        out.append(_violation("greatest", "no member lies above all others"))
    if out:
        return out

    for i, (a, ra) in enumerate(family.members):
        for b, rb in family.members[i + 1:]:
            if a.dim < b.dim and b.contains(a):
                if not ra < rb or not rb - ra < b.dim - a.dim:
                    out.append(
                        _violation(
                            "strict-monotone",
                            f"ranks {ra} < {rb} and {rb - ra} < {b.dim - a.dim} must both hold",
                            a,
                            b,
                        )
                    )
    if out:
        return out

    for z, r in family.members:
        got, flat, cyclic = family.formula.profile(z)
        if got != r:
            out.append(_violation("rank-realised", f"stored rank {r}, family formula gives {got}", z))
        elif not (flat and cyclic):
            out.append(_violation("cyclic-flat", "member is not a cyclic flat of the induced q-matroid", z))
    if out:
        return out

    induced = qm.CyclicFlatOracle(q, n, family.members)
    ranks = dict(family.members)
    for i, (a, ra) in enumerate(family.members):
        for b, rb in family.members[i + 1:]:
            met = ss.intersect(a, b)
            lower = qm.cyclic_core(induced, met)
            upper = qm.closure(induced, ss.sum(a, b))
            if lower not in ranks or upper not in ranks:
                missing = lower if lower not in ranks else upper
                out.append(_violation("lattice-closure", "meet or join of two members is not a member", a, b, missing))
                continue
            if ra + rb < ranks[upper] + ranks[lower] + met.dim - lower.dim:
                out.append(_violation("submodular", "rank inequality for the meet and join fails", a, b))
    return out


def validate_family(
    q: int,
    n: int,
    proposed: Sequence[Tuple[Subspace, int]],
    level: str = "structural",
    shards: Optional[int] = None,
) -> ValidationReport:
    checks = [
        "distinct",
        "rank-bounds",
        "least",
        "greatest",
        "strict-monotone",
        "rank-realised",
        "cyclic-flat",
        "lattice-closure",
        "submodular",
    ]
    if not proposed:
        return ValidationReport(
            passed=False,
            level=level,
            checks_run=["distinct"],
            violations=[_violation("empty", "the family has no members")],
        )
    violations = _structural_violations(q, n, proposed)
    skipped: List[str] = []
    if level == "full" and not violations:
        induced = qm.CyclicFlatOracle(q, n, proposed)
        try:
            axioms = qm.axiom_check(induced)
            checks.append("axioms")
            if not axioms.passed:
                violations.append(axioms.violation)
        except BudgetExceeded:
            skipped.append("axioms")
        try:
            recovered = compute_zflats(induced, shards=shards)
            checks.append("family-recovery")
            expected = CyclicFlatFamily.build(q, n, proposed)
            if recovered.members != expected.members:
                violations.append(
                    _violation(
                        "family-recovery",
                        f"the induced q-matroid has {len(recovered)} cyclic flats, expected {len(expected)}",
                    )
                )
        except BudgetExceeded:
            skipped.append("family-recovery")
    return ValidationReport(
        passed=not violations,
        level=level,
        checks_run=checks,
        checks_skipped=skipped,
        violations=violations,
    )


def export_hasse(family: CyclicFlatFamily) -> str:
    lines = ["digraph zflats {", "  rankdir=BT;"]
    for i, (z, r) in enumerate(family.members):
        lines.append(f'  z{i} [label="{z.dim}/{r}"];')
    for lower, upper in family.cover_edges:
        lines.append(f"  z{lower} -> z{upper};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_schema(family: CyclicFlatFamily) -> FamilySchema:
    return FamilySchema(
        q=family.q,
        n=family.n,
        members=[RankedSubspaceSchema(rows=z.rows, rank=r) for z, r in family.members],
    )


def require_consistent(family: CyclicFlatFamily) -> CyclicFlatFamily:
    report = validate_family(family.q, family.n, family.members)
    if not report.passed:
        first = report.violations[0]
        raise InconsistentFamily(f"{first.check}: {first.message}")
    return family
