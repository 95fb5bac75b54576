import logging
import random
from typing import Iterator, List, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, FieldMismatch, GroundMismatch, SpecError
from app.schemas.matroid import DsumSpec, UnionSpec
from app.schemas.report import CheckReport, Violation
from app.services import qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.field_service import FieldSpec
from app.services.subspace_service import Subspace
from app.utils.math import subspace_count

logger = logging.getLogger(__name__)

STRATEGIES = ("naive", "zbased")


class UnionOracle(qm.RankOracle):
    """rank(V) = dim V + min over X <= V of rank1(X) + rank2(X) - dim X."""

    descriptor = "union"

    def __init__(self, m1: qm.RankOracle, m2: qm.RankOracle, **kwargs):
        super().__init__(m1.q, m1.n, **kwargs)
        self.parts = (m1, m2)

    def _rank(self, v: Subspace) -> int:
        count = subspace_count(v.q, v.dim)
        if count > settings.ENUMERATION_BUDGET:
            raise BudgetExceeded(f"union rank needs {count} subspaces of V")
        m1, m2 = self.parts
        best = 0
        for x in ss.subspaces_of(v):
            best = min(best, m1.rank(x) + m2.rank(x) - x.dim)
        return v.dim + best


class SumOracle(qm.RankOracle):
    """M1 ⊕ M2 on GF(q)^(n1+n2); E1 is the first n1 coordinates, E2 the last n2."""

    descriptor = "dsum"

    def __init__(self, m1: qm.RankOracle, m2: qm.RankOracle, strategy: str = "zbased", **kwargs):
        super().__init__(m1.q, m1.n + m2.n, **kwargs)
        self.parts = (m1, m2)
        self.strategy = strategy
        self._shift = m1.q ** m2.n
        self._formula: Optional[qm.FamilyFormula] = None
        self._product: Optional[List[Tuple[Subspace, int]]] = None

    # embeddings and projections

    def embed_first(self, v1: Subspace) -> Subspace:
        return Subspace(self.q, self.n, tuple(r * self._shift for r in v1.basis))

    def embed_second(self, v2: Subspace) -> Subspace:
        return Subspace(self.q, self.n, v2.basis)

    def embed_pair(self, v1: Subspace, v2: Subspace) -> Subspace:
        return Subspace(self.q, self.n, self.embed_first(v1).basis + v2.basis)

    def project_first(self, v: Subspace) -> Subspace:
        m1 = self.parts[0]
        return ss.from_packed(self.q, m1.n, [r // self._shift for r in v.basis])

    def project_second(self, v: Subspace) -> Subspace:
        m2 = self.parts[1]
        return ss.from_packed(self.q, m2.n, [r % self._shift for r in v.basis])

    @property
    def first_ground(self) -> Subspace:
        return self.embed_first(self.parts[0].full_space)

    @property
    def second_ground(self) -> Subspace:
        return self.embed_second(self.parts[1].full_space)

    def known_cyclic_flats(self) -> List[Tuple[Subspace, int]]:
        # 동시에 처음 호출돼도 같은 결과를 만든다
        if self._product is None:
            from app.services.zflats_service import family_of

            m1, m2 = self.parts
            z1 = family_of(m1, shards=1)
            z2 = family_of(m2, shards=1)
            product = [
                (self.embed_pair(a, b), ra + rb) for a, ra in z1.members for b, rb in z2.members
            ]
            logger.info(f"direct sum family: {len(z1)} x {len(z2)} = {len(product)} members")
            self._product = sorted(product, key=lambda item: item[0].sort_key)
        return self._product

    @property
    def family_formula(self) -> Optional[qm.FamilyFormula]:
        if self.strategy != "zbased":
            return None
        if self._formula is None:
            self._formula = qm.FamilyFormula(self.known_cyclic_flats())
        return self._formula

    def _rank(self, v: Subspace) -> int:
        if self.strategy == "zbased":
            return self.family_formula.rank(v)
        return self._naive_rank(v)

    def _naive_rank(self, v: Subspace) -> int:
        """min over X1 ⊕ X2 with Xi <= pi_i(V) of rank1(X1) + rank2(X2) - dim((X1 ⊕ X2) ∩ V)."""
        m1, m2 = self.parts
        p1 = list(ss.subspaces_of(self.project_first(v)))
        p2 = list(ss.subspaces_of(self.project_second(v)))
        r2 = [(x2, m2.rank(x2)) for x2 in p2]
        best = 0
        for x1 in p1:
            r1 = m1.rank(x1)
            lifted = self.embed_first(x1)
            for x2, rank2 in r2:
                x = Subspace(self.q, self.n, lifted.basis + x2.basis)
                met = v.dim + x.dim - ss.dim_sum(v, x)
                best = min(best, r1 + rank2 - met)
        return v.dim + best


def union(m1: qm.RankOracle, m2: qm.RankOracle) -> UnionOracle:
    if (m1.q, m1.n) != (m2.q, m2.n):
        raise GroundMismatch(f"union needs one ground: GF({m1.q})^{m1.n} vs GF({m2.q})^{m2.n}")
    spec = None
    if m1.spec is not None and m2.spec is not None:
        spec = UnionSpec(parts=[m1.spec, m2.spec])
    return UnionOracle(m1, m2, spec=spec)


def direct_sum(
    m1: qm.RankOracle,
    m2: qm.RankOracle,
    strategy: str = "zbased",
    spec: Optional[DsumSpec] = None,
) -> SumOracle:
    if m1.q != m2.q:
        raise FieldMismatch(f"summands over GF({m1.q}) and GF({m2.q})")
    if strategy not in STRATEGIES:
        raise SpecError(f"unknown direct-sum strategy {strategy!r}")
    if spec is None and m1.spec is not None and m2.spec is not None:
        spec = DsumSpec(parts=[m1.spec, m2.spec], strategy=strategy)
    return SumOracle(m1, m2, strategy, spec=spec)


def direct_sum_all(parts: Sequence[qm.RankOracle], strategy: str = "zbased", spec: Optional[DsumSpec] = None):
    """Left fold; the outermost sum carries `spec`."""
    if len(parts) < 2:
        raise SpecError("a direct sum needs at least two parts")
    acc = parts[0]
    for i, part in enumerate(parts[1:], start=2):
        acc = direct_sum(acc, part, strategy, spec=spec if i == len(parts) else None)
    return acc


def zflats_of_sum(m1: qm.RankOracle, m2: qm.RankOracle):
    from app.services.zflats_service import CyclicFlatFamily

    total = direct_sum(m1, m2)
    return CyclicFlatFamily.build(total.q, total.n, total.known_cyclic_flats(), oracle=total)


# checks

def _scan(q: int, n: int, mode: str, seed: int, sample_size: Optional[int] = None) -> Iterator[Subspace]:
    if mode == "sampled":
        rng = random.Random(seed)
        for _ in range(sample_size or settings.SAMPLE_SIZE):
            yield ss.random_subspace(q, n, rng)
        return
    if mode != "exhaustive":
        raise SpecError(f"unknown check mode {mode!r}")
    total = subspace_count(q, n)
    if total > settings.ENUMERATION_BUDGET:
        raise BudgetExceeded(f"GF({q})^{n} has {total} subspaces, above the enumeration budget")
    yield from ss.enumerate_subspaces(q, n)


def _agreement(
    check: str,
    left: qm.RankOracle,
    right: qm.RankOracle,
    mode: str = "exhaustive",
    seed: int = 0,
    sample_size: Optional[int] = None,
) -> CheckReport:
    checked = 0
    for v in _scan(left.q, left.n, mode, seed, sample_size):
        checked += 1
        a, b = left.rank(v), right.rank(v)
        if a != b:
            return CheckReport(
                check=check,
                passed=False,
                checked=checked,
                details={"mode": mode},
                violation=Violation(check=check, message=f"ranks {a} and {b} differ", witnesses=[v.to_dict()]),
            )
    return CheckReport(check=check, passed=True, checked=checked, details={"mode": mode})


def strategy_agreement_check(
    m1: qm.RankOracle, m2: qm.RankOracle, mode: str = "exhaustive", seed: int = 0, sample_size: Optional[int] = None
) -> CheckReport:
    return _agreement(
        "strategy-agreement",
        direct_sum(m1, m2, "naive"),
        direct_sum(m1, m2, "zbased"),
        mode,
        seed,
        sample_size,
    )


def dual_of_sum_check(
    m1: qm.RankOracle, m2: qm.RankOracle, mode: str = "exhaustive", seed: int = 0, sample_size: Optional[int] = None
) -> CheckReport:
    return _agreement(
        "dual-of-sum",
        qm.dual(direct_sum(m1, m2)),
        direct_sum(qm.dual(m1), qm.dual(m2)),
        mode,
        seed,
        sample_size,
    )


def associativity_check(
    m1: qm.RankOracle,
    m2: qm.RankOracle,
    m3: qm.RankOracle,
    mode: str = "exhaustive",
    seed: int = 0,
    sample_size: Optional[int] = None,
) -> CheckReport:
    return _agreement(
        "associativity",
        direct_sum(direct_sum(m1, m2), m3),
        direct_sum(m1, direct_sum(m2, m3)),
        mode,
        seed,
        sample_size,
    )


def additivity_check(m1: qm.RankOracle, m2: qm.RankOracle) -> CheckReport:
    pairs = subspace_count(m1.q, m1.n) * subspace_count(m2.q, m2.n)
    if pairs > settings.ENUMERATION_BUDGET:
        raise BudgetExceeded(f"{pairs} split subspaces exceed the enumeration budget")
    total = direct_sum(m1, m2)
    seconds = [(v2, m2.rank(v2)) for v2 in ss.enumerate_subspaces(m2.q, m2.n)]
    checked = 0
    for v1 in ss.enumerate_subspaces(m1.q, m1.n):
        r1 = m1.rank(v1)
        for v2, r2 in seconds:
            checked += 1
            v = total.embed_pair(v1, v2)
            if total.rank(v) != r1 + r2:
                return CheckReport(
                    check="additivity",
                    passed=False,
                    checked=checked,
                    violation=Violation(
                        check="additivity",
                        message=f"rank {total.rank(v)} != {r1} + {r2}",
                        witnesses=[v1.to_dict(), v2.to_dict()],
                    ),
                )
    return CheckReport(check="additivity", passed=True, checked=checked)


def contraction_recovery_check(m1: qm.RankOracle, m2: qm.RankOracle) -> CheckReport:
    """(M1 ⊕ M2)/E1 agrees with M2 and (M1 ⊕ M2)/E2 with M1."""
    total = direct_sum(m1, m2)
    checked = 0
    for contracted, other in ((total.first_ground, m2), (total.second_ground, m1)):
        minor = qm.contraction(total, contracted)
        for v in _scan(other.q, other.n, "exhaustive", 0):
            checked += 1
            if minor.rank(v) != other.rank(v):
                return CheckReport(
                    check="contraction-recovery",
                    passed=False,
                    checked=checked,
                    violation=Violation(
                        check="contraction-recovery",
                        message=f"contraction gives {minor.rank(v)}, the part gives {other.rank(v)}",
                        witnesses=[contracted.to_dict(), v.to_dict()],
                    ),
                )
    return CheckReport(check="contraction-recovery", passed=True, checked=checked)


def containment_check(m1: qm.RankOracle, m2: qm.RankOracle) -> CheckReport:
    """I, F and O of the parts sum into those of M; circuits of each part are circuits of M."""
    total = direct_sum(m1, m2)
    firsts = [(v, qm.predicates(m1, v)) for v in _scan(m1.q, m1.n, "exhaustive", 0)]
    seconds = [(v, qm.predicates(m2, v)) for v in _scan(m2.q, m2.n, "exhaustive", 0)]
    checked = 0

    def fail(kind: str, *witnesses: Subspace) -> CheckReport:
        return CheckReport(
            check="containment",
            passed=False,
            checked=checked,
            violation=Violation(
                check="containment",
                message=f"{kind} of the parts is not {kind} in the sum",
                witnesses=[w.to_dict() for w in witnesses],
            ),
        )

    for v1, f1 in firsts:
        for v2, f2 in seconds:
            if not (f1.independent and f2.independent or f1.flat and f2.flat or f1.cyclic and f2.cyclic):
                continue
            checked += 1
            flags = qm.predicates(total, total.embed_pair(v1, v2))
            if f1.independent and f2.independent and not flags.independent:
                return fail("independent", v1, v2)
            if f1.flat and f2.flat and not flags.flat:
                return fail("flat", v1, v2)
            if f1.cyclic and f2.cyclic and not flags.cyclic:
                return fail("cyclic", v1, v2)
    for embed, part in ((total.embed_first, firsts), (total.embed_second, seconds)):
        for v, flags in part:
            if flags.circuit:
                checked += 1
                if not qm.predicates(total, embed(v)).circuit:
                    return fail("circuit", v)
    return CheckReport(check="containment", passed=True, checked=checked)


def circuits_of_sum_check(m1: qm.RankOracle, m2: qm.RankOracle, budget: Optional[int] = None) -> CheckReport:
    """Circuits of M1 ⊕ M2 are the minimal X with rank1(pi1 X) + rank2(pi2 X) < dim X."""
    total = direct_sum(m1, m2)
    count = subspace_count(total.q, total.n)
    budget = settings.ENUMERATION_BUDGET if budget is None else budget
    if count > budget:
        raise BudgetExceeded(f"GF({total.q})^{total.n} has {count} subspaces, above the budget {budget}")

    # meets[X]: some subspace of X (X included) lies in the set
    meets = {}
    minimal = set()
    circuits = set()
    for x in ss.enumerate_subspaces(total.q, total.n):
        in_set = m1.rank(total.project_first(x)) + m2.rank(total.project_second(x)) < x.dim
        below = x.dim > 0 and any(meets[h] for h in ss.hyperplanes_of(x))
        meets[x] = in_set or below
        if in_set and not below:
            minimal.add(x)
        if qm.predicates(total, x).circuit:
            circuits.add(x)

    details = {"circuits": len(circuits), "minimal": len(minimal)}
    if circuits != minimal:
        witness = next(iter(sorted(circuits ^ minimal)))
        return CheckReport(
            check="circuits-of-sum",
            passed=False,
            checked=count,
            details=details,
            violation=Violation(
                check="circuits-of-sum",
                message="circuit sets differ",
                witnesses=[witness.to_dict()],
            ),
        )
    return CheckReport(check="circuits-of-sum", passed=True, checked=count, details=details)


def block_diag(G1: Sequence[Sequence[int]], G2: Sequence[Sequence[int]], n1: int, n2: int) -> List[List[int]]:
    top = [list(row) + [0] * n2 for row in G1]
    bottom = [[0] * n1 + list(row) for row in G2]
    return top + bottom


def block_diag_compare(
    G1: Sequence[Sequence[int]],
    G2: Sequence[Sequence[int]],
    field_ext: FieldSpec,
    q: Optional[int] = None,
) -> CheckReport:
    """N from diag(G1, G2) against M = M_G1 ⊕ M_G2: Z(M) ⊆ Z(N) and I(N) ⊆ I(M)."""
    from app.services.zflats_service import family_of

    m1 = qm.from_representation(field_ext, G1, q=q)
    if not G2:
        return CheckReport(
            check="block-diagonal",
            passed=True,
            checked=0,
            details={"single_block": True, "n": m1.n},
        )
    m2 = qm.from_representation(field_ext, G2, q=q)
    n_oracle = qm.from_representation(field_ext, block_diag(G1, G2, m1.n, m2.n), q=q)
    m = direct_sum(m1, m2)

    zm = family_of(m)
    checked = 0
    for z, _ in zm.members:
        checked += 1
        flags = qm.predicates(n_oracle, z)
        if not (flags.flat and flags.cyclic):
            return CheckReport(
                check="block-diagonal",
                passed=False,
                checked=checked,
                violation=Violation(
                    check="block-diagonal",
                    message="a cyclic flat of the direct sum is not a cyclic flat of N",
                    witnesses=[z.to_dict()],
                ),
            )

    independent_n = 0
    independent_m = 0
    for v in _scan(m.q, m.n, "exhaustive", 0):
        checked += 1
        in_n = n_oracle.rank(v) == v.dim
        in_m = m.rank(v) == v.dim
        independent_n += in_n
        independent_m += in_m
        if in_n and not in_m:
            return CheckReport(
                check="block-diagonal",
                passed=False,
                checked=checked,
                violation=Violation(
                    check="block-diagonal",
                    message="independent in N but dependent in the direct sum",
                    witnesses=[v.to_dict()],
                ),
            )
    return CheckReport(
        check="block-diagonal",
        passed=True,
        checked=checked,
        details={
            "cyclic_flats_of_sum": len(zm),
            "independent_n": independent_n,
            "independent_sum": independent_m,
        },
    )
