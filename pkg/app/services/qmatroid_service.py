import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    BudgetExceeded,
    DimensionMismatch,
    EmptyFamily,
    FieldMismatch,
    InconsistentFamily,
    KOutOfRange,
    NotASpread,
    NotASubspace,
    RankDeficientG,
    SpecError,
    WrongDimension,
)
from app.schemas.matroid import (
    ContractSpec,
    DualSpec,
    FieldSchema,
    RankedSubspaceSchema,
    RepresentableSpec,
    RestrictSpec,
    SpreadSpec,
    SubspaceSchema,
    TableSpec,
    UniformSpec,
    ZDefinedSpec,
)
from app.schemas.report import AxiomReport, Violation
from app.services import subspace_service as ss
from app.services.field_service import FieldElement, FieldSpec, create_field
from app.services.subspace_service import Subspace
from app.utils.math import subspace_count

logger = logging.getLogger(__name__)

Family = List[Tuple[Subspace, int]]


def ranked(v: Subspace, rank: int) -> RankedSubspaceSchema:
    return RankedSubspaceSchema(rows=v.rows, rank=rank)


class RankOracle:
    """A q-matroid on GF(q)^n given by its rank function.

    Subclasses implement `_rank`. Values are memoised per canonical subspace;
    concurrent writers store the same value, so the last write wins.
    """

    descriptor = "table"

    def __init__(self, q: int, n: int, spec=None, use_cache: bool = True):
        self.q = q
        self.n = n
        self.spec = spec
        self.use_cache = use_cache
        self._cache: Dict[Subspace, int] = {}
        self.full_space = Subspace.full(q, n)
        self.zero_space = Subspace.zero(q, n)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor} GF({self.q})^{self.n}>"

    # rank(V) = min over Z of rank(Z) + dim(V+Z) - dim Z, when the oracle is defined that way
    family_formula: Optional["FamilyFormula"] = None

    def rank(self, v: Subspace, cache: Optional[bool] = None) -> int:
        if v.q != self.q or v.n != self.n:
            raise DimensionMismatch(
                f"subspace of GF({v.q})^{v.n} given to a q-matroid on GF({self.q})^{self.n}"
            )
        use = self.use_cache if cache is None else cache
        if use:
            hit = self._cache.get(v)
            if hit is not None:
                return hit
        value = self._rank(v)
        if use and len(self._cache) < settings.CACHE_MAX_ENTRIES:
            self._cache[v] = value
        return value

    def _rank(self, v: Subspace) -> int:
        raise NotImplementedError

    @property
    def full_rank(self) -> int:
        return self.rank(self.full_space)

    def known_cyclic_flats(self) -> Optional[Family]:
        """Z(M) when it is known without a lattice scan."""
        return None

    def is_flat(self, v: Subspace, r: Optional[int] = None, cache: Optional[bool] = None) -> bool:
        if r is None:
            r = self.rank(v, cache)
        for x in ss.quotient_lines(v):
            if self.rank(ss.add_vector(v, x), cache) <= r:
                return False
        return True

    def is_cyclic(self, v: Subspace, r: Optional[int] = None, cache: Optional[bool] = None) -> bool:
        if v.dim == 0:
            return True
        if r is None:
            r = self.rank(v, cache)
        for w in ss.hyperplanes_of(v):
            if self.rank(w, cache) != r:
                return False
        return True

    def clear_cache(self) -> None:
        self._cache.clear()


class FamilyFormula:
    """Rank through a list of (Z, rank Z): min over Z of rank Z + dim(V+Z) - dim Z.

    With M defined by this formula, V is a flat iff every minimising Z lies in V,
    and V is cyclic iff every minimising Z contains V.
    """

    def __init__(self, members: Sequence[Tuple[Subspace, int]]):
        self.members = tuple(members)
        self._terms = [(z.basis, rank - z.dim) for z, rank in self.members]

    def _values(self, v: Subspace) -> List[Tuple[int, int]]:
        q, n = v.q, v.n
        out = []
        for basis, offset in self._terms:
            joined = ss.rank_of(q, n, v.basis + basis)
            out.append((joined + offset, joined))
        return out

    def rank(self, v: Subspace) -> int:
        return min(value for value, _ in self._values(v))

    def profile(self, v: Subspace) -> Tuple[int, bool, bool]:
        """(rank, flat, cyclic)"""
        values = self._values(v)
        r = min(value for value, _ in values)
        d = v.dim
        flat = True
        cyclic = True
        for (value, joined), (z, _) in zip(values, self.members):
            if value != r:
                continue
            if joined != d:
                flat = False
            if joined != z.dim:
                cyclic = False
        return r, flat, cyclic

    def _minimisers(self, v: Subspace) -> List[Subspace]:
        values = self._values(v)
        r = min(value for value, _ in values)
        return [z for (value, _), (z, _) in zip(values, self.members) if value == r]

    def closure(self, v: Subspace) -> Subspace:
        """V plus every minimising member."""
        out = v
        for z in self._minimisers(v):
            out = ss.sum(out, z)
        return out

    def cyclic_core(self, v: Subspace) -> Subspace:
        """V meet every minimising member that does not contain V."""
        core = v
        for z in self._minimisers(v):
            if not z.contains(v):
                core = ss.intersect(core, z)
        return core

    def independent(self, v: Subspace) -> bool:
        """dim(V ∩ Z) <= rank Z for every member."""
        q, n = v.q, v.n
        d = v.dim
        for z, rank in self.members:
            meet = d + z.dim - ss.rank_of(q, n, v.basis + z.basis)
            if meet > rank:
                return False
        return True


class UniformOracle(RankOracle):
    descriptor = "uniform"

    def __init__(self, q: int, n: int, k: int, **kwargs):
        super().__init__(q, n, **kwargs)
        self.k = k

    def _rank(self, v: Subspace) -> int:
        return min(self.k, v.dim)


class RepresentableOracle(RankOracle):
    descriptor = "representable"

    def __init__(self, field: FieldSpec, G: Sequence[Sequence[FieldElement]], q: int, n: int, **kwargs):
        super().__init__(q, n, **kwargs)
        self.field = field
        self.k = len(G)
        self._G = field.array(G) if self.k else None

    def _rank(self, v: Subspace) -> int:
        if v.dim == 0 or self.k == 0:
            return 0
        y = self.field.array(v.rows)
        return int(np.linalg.matrix_rank(self._G @ y.T))


class CyclicFlatOracle(RankOracle):
    descriptor = "zdefined"

    def __init__(self, q: int, n: int, members: Sequence[Tuple[Subspace, int]], validated: bool = False, **kwargs):
        super().__init__(q, n, **kwargs)
        self.members = tuple(sorted(members, key=lambda item: item[0].sort_key))
        self.family_formula = FamilyFormula(self.members)
        self.validated = validated

    def known_cyclic_flats(self) -> Optional[Family]:
        # a family that passed the structural checks is Z(M) of the q-matroid it induces
        return list(self.members) if self.validated else None

    def _rank(self, v: Subspace) -> int:
        return self.family_formula.rank(v)


class SpreadOracle(RankOracle):
    descriptor = "spread"

    def __init__(self, q: int, n: int, spread: Sequence[Subspace], **kwargs):
        super().__init__(q, n, **kwargs)
        self.spread = tuple(sorted(spread))
        self._members = frozenset(self.spread)

    def _rank(self, v: Subspace) -> int:
        if v in self._members:
            return 1
        return min(2, v.dim)


class TableOracle(RankOracle):
    descriptor = "table"

    def __init__(self, q: int, n: int, table: Dict[Subspace, int], **kwargs):
        super().__init__(q, n, **kwargs)
        self.table = dict(table)

    def _rank(self, v: Subspace) -> int:
        try:
            return self.table[v]
        except KeyError:
            raise SpecError(f"rank table has no entry for {v.rows}") from None


class DualOracle(RankOracle):
    descriptor = "dual-of"

    def __init__(self, inner: RankOracle, **kwargs):
        super().__init__(inner.q, inner.n, **kwargs)
        self.inner = inner

    def _rank(self, v: Subspace) -> int:
        return v.dim + self.inner.rank(ss.orthogonal(v)) - self.inner.full_rank


class RestrictionOracle(RankOracle):
    """M|X on GF(q)^(dim X); local e_i is the i-th RREF row of X."""

    descriptor = "restriction"

    def __init__(self, inner: RankOracle, x: Subspace, **kwargs):
        super().__init__(inner.q, x.dim, **kwargs)
        self.inner = inner
        self.ground = x
        self.embedding = ss.BasisEmbedding.of(x)

    def _rank(self, v: Subspace) -> int:
        return self.inner.rank(self.embedding.push(v))


class ContractionOracle(RankOracle):
    """M/X on GF(q)^(n - dim X) in the quotient coordinates of X."""

    descriptor = "contraction"

    def __init__(self, inner: RankOracle, x: Subspace, **kwargs):
        coords = ss.QuotientCoordinates(x)
        super().__init__(inner.q, coords.dim, **kwargs)
        self.inner = inner
        self.contracted = x
        self.coords = coords
        self._offset = inner.rank(x)

    def _rank(self, w: Subspace) -> int:
        return self.inner.rank(self.coords.lift(w)) - self._offset


# constructors

def from_representation(
    field_ext: FieldSpec,
    G: Sequence[Sequence[FieldElement]],
    q: Optional[int] = None,
    n: Optional[int] = None,
    spec: Optional[RepresentableSpec] = None,
) -> RepresentableOracle:
    q = field_ext.p if q is None else q
    if q != field_ext.p:
        raise FieldMismatch(f"GF({q}) is not the prime subfield of GF({field_ext.order})")
    rows = [[field_ext.check(x) for x in row] for row in G]
    if rows:
        n_cols = len(rows[0])
        if any(len(row) != n_cols for row in rows):
            raise DimensionMismatch("matrix rows have different lengths")
        if n is not None and n != n_cols:
            raise DimensionMismatch(f"matrix has {n_cols} columns, expected {n}")
        n = n_cols
        rank = int(np.linalg.matrix_rank(field_ext.array(rows)))
        if rank != len(rows):
            raise RankDeficientG(f"G has {len(rows)} rows but rank {rank}")
    elif n is None:
        raise DimensionMismatch("an empty matrix needs an explicit ground dimension")
    if spec is None:
        spec = RepresentableSpec(
            q=q,
            ext=FieldSchema(**field_ext.to_dict()),
            G=[list(row) for row in rows],
            n=None if rows else n,
        )
    return RepresentableOracle(field_ext, rows, q, n, spec=spec)


def uniform(q: int, n: int, k: int) -> UniformOracle:
    ss._check_ground(q, n)
    if not 0 <= k <= n:
        raise KOutOfRange(f"k = {k} is outside 0..{n}")
    return UniformOracle(q, n, k, spec=UniformSpec(q=q, n=n, k=k))


def from_cyclic_flats(
    q: int,
    n: int,
    family: Sequence[Tuple[Subspace, int]],
    validate: bool = True,
    spec: Optional[ZDefinedSpec] = None,
) -> CyclicFlatOracle:
    if not family:
        raise EmptyFamily("a cyclic-flat family needs at least one member")
    for z, _ in family:
        if z.q != q or z.n != n:
            raise DimensionMismatch(f"family member {z.rows} is not a subspace of GF({q})^{n}")
    if validate:
        from app.services.zflats_service import validate_family

        report = validate_family(q, n, family, level="structural")
        if not report.passed:
            first = report.violations[0]
            raise InconsistentFamily(f"{first.check}: {first.message}")
    if spec is None:
        spec = ZDefinedSpec(q=q, n=n, flats=[ranked(z, r) for z, r in family])
    return CyclicFlatOracle(q, n, family, validated=validate, spec=spec)


def from_spread(q: int, spread: Sequence[Subspace], n: int = 4, spec: Optional[SpreadSpec] = None) -> SpreadOracle:
    if n != 4:
        raise WrongDimension(f"spread q-matroids live on GF(q)^4, got n = {n}")
    members = list(spread)
    for v in members:
        if v.q != q or v.n != n or v.dim != 2:
            raise WrongDimension(f"spread member {v.rows} is not a 2-dimensional subspace of GF({q})^4")
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            if ss.dim_sum(u, v) != 4:
                raise NotASpread(f"{u.rows} and {v.rows} share a nonzero vector")
    if spec is None:
        spec = SpreadSpec(q=q, n=n, spread=[SubspaceSchema(rows=v.rows) for v in members])
    return SpreadOracle(q, n, members, spec=spec)


def from_table(q: int, n: int, table: Dict[Subspace, int], spec: Optional[TableSpec] = None) -> TableOracle:
    if spec is None:
        spec = TableSpec(q=q, n=n, ranks=[ranked(v, r) for v, r in sorted(table.items())])
    return TableOracle(q, n, table, spec=spec)


def dual(m: RankOracle) -> DualOracle:
    spec = DualSpec(of=m.spec) if m.spec is not None else None
    return DualOracle(m, spec=spec)


def _check_part(m: RankOracle, x: Subspace) -> None:
    if not isinstance(x, Subspace) or x.q != m.q or x.n != m.n:
        raise NotASubspace(f"X must be a subspace of GF({m.q})^{m.n}")


def restriction(m: RankOracle, x: Subspace) -> RestrictionOracle:
    _check_part(m, x)
    spec = RestrictSpec(of=m.spec, X=SubspaceSchema(rows=x.rows)) if m.spec is not None else None
    return RestrictionOracle(m, x, spec=spec)


def contraction(m: RankOracle, x: Subspace) -> ContractionOracle:
    _check_part(m, x)
    spec = ContractSpec(of=m.spec, X=SubspaceSchema(rows=x.rows)) if m.spec is not None else None
    return ContractionOracle(m, x, spec=spec)


def random_representable(q: int, n: int, k: int, m: int = 2, seed: int = 0) -> RepresentableOracle:
    field = create_field(q, m)
    rng = random.Random(seed)
    while True:
        G = [[rng.randrange(field.order) for _ in range(n)] for _ in range(k)]
        if k == 0 or int(np.linalg.matrix_rank(field.array(G))) == k:
            return from_representation(field, G, q=q, n=n)


# derived operators

def closure(m: RankOracle, v: Subspace) -> Subspace:
    if m.family_formula is not None:
        return m.family_formula.closure(v)
    r = m.rank(v)
    extra = [x for x in ss.quotient_lines(v) if m.rank(ss.add_vector(v, x)) == r]
    if not extra:
        return v
    return ss.from_packed(v.q, v.n, v.basis + tuple(extra))


def cyclic_core(m: RankOracle, v: Subspace) -> Subspace:
    """Hyperplane exclusion: a low-rank hyperplane W of V excludes V minus W."""
    if m.family_formula is not None:
        return m.family_formula.cyclic_core(v)
    if v.dim == 0:
        return v
    r = m.rank(v)
    core = v
    for w in ss.hyperplanes_of(v):
        if m.rank(w) < r:
            core = ss.intersect(core, w)
    return core


def cyclic_core_by_circuits(m: RankOracle, v: Subspace) -> Subspace:
    """Sum of the circuits inside V."""
    core = Subspace.zero(v.q, v.n)
    for u in ss.subspaces_of(v):
        if u.dim and predicates(m, u).circuit:
            core = ss.sum(core, u)
    return core


@dataclass(frozen=True)
class SpaceFlags:
    independent: bool
    dependent: bool
    flat: bool
    cyclic: bool
    circuit: bool
    basis: bool


def predicates(m: RankOracle, v: Subspace, cache: Optional[bool] = None) -> SpaceFlags:
    d = v.dim
    if m.family_formula is not None:
        r, flat, cyclic = m.family_formula.profile(v)
    else:
        r = m.rank(v, cache)
        flat = m.is_flat(v, r, cache)
        cyclic = m.is_cyclic(v, r, cache)
    independent = r == d
    # independence is hereditary: a dependent V whose hyperplanes are all
    # independent is a circuit, i.e. cyclic of nullity one
    circuit = d > 0 and cyclic and r == d - 1
    basis = independent and d == m.full_rank
    return SpaceFlags(independent, not independent, flat, cyclic, circuit, basis)


def rank_by_independents(m: RankOracle, v: Subspace) -> int:
    for d in range(v.dim, -1, -1):
        for u in ss.subspaces_of(v, d):
            if m.rank(u) == d:
                return d
    return 0


def loop_space(m: RankOracle) -> Subspace:
    return closure(m, m.zero_space)


def cyc_top(m: RankOracle) -> Subspace:
    return cyclic_core(m, m.full_space)


def is_full(m: RankOracle) -> bool:
    return loop_space(m).is_zero() and cyc_top(m).is_full()


def _all_subspaces(q: int, n: int) -> Iterator[Subspace]:
    total = subspace_count(q, n)
    if total > settings.ENUMERATION_BUDGET:
        raise BudgetExceeded(
            f"GF({q})^{n} has {total} subspaces, above the enumeration budget {settings.ENUMERATION_BUDGET}"
        )
    return ss.enumerate_subspaces(q, n)


def axiom_check(
    m: RankOracle,
    mode: str = "exhaustive",
    budget: Optional[int] = None,
    seed: int = 0,
    sample_size: Optional[int] = None,
) -> AxiomReport:
    q, n = m.q, m.n
    total = subspace_count(q, n)
    budget = settings.AXIOM_PAIR_BUDGET if budget is None else budget
    pair_count = total * (total - 1) // 2
    if mode == "exhaustive" and pair_count > budget:
        raise BudgetExceeded(f"{pair_count} pairs exceed the axiom budget {budget}")
    if mode not in ("exhaustive", "sampled"):
        raise SpecError(f"unknown axiom-check mode {mode!r}")

    def fail(axiom: str, message: str, *witnesses: Subspace, checked: int = 0, pairs: int = 0) -> AxiomReport:
        logger.info(f"axiom {axiom} fails on {m!r}: {message}")
        return AxiomReport(
            passed=False,
            mode=mode,
            subspaces_checked=checked,
            pairs_checked=pairs,
            violation=Violation(check=axiom, message=message, witnesses=[w.to_dict() for w in witnesses]),
        )

    spaces = list(_all_subspaces(q, n))
    ranks: Dict[Subspace, int] = {}
    for i, v in enumerate(spaces):
        r = m.rank(v)
        ranks[v] = r
        if not 0 <= r <= v.dim:
            return fail("R1", f"rank {r} outside 0..{v.dim}", v, checked=i + 1)

    for i, v in enumerate(spaces):
        for x in ss.quotient_lines(v):
            w = ss.add_vector(v, x)
            if ranks[w] < ranks[v]:
                return fail("R2", f"rank drops from {ranks[v]} to {ranks[w]} on a cover", v, w, checked=total)

    def r3(u: Subspace, v: Subspace) -> Optional[AxiomReport]:
        joined = ss.sum(u, v)
        met = ss.intersect(u, v)
        if ranks[joined] + ranks[met] > ranks[u] + ranks[v]:
            return fail(
                "R3",
                f"rank(U+V) + rank(U∩V) = {ranks[joined] + ranks[met]} > {ranks[u] + ranks[v]}",
                u,
                v,
                checked=total,
                pairs=pairs,
            )
        return None

    pairs = 0
    if mode == "exhaustive":
        for i, u in enumerate(spaces):
            for v in spaces[i + 1:]:
                pairs += 1
                report = r3(u, v)
                if report is not None:
                    return report
    else:
        rng = random.Random(seed)
        for _ in range(sample_size or settings.SAMPLE_SIZE):
            pairs += 1
            report = r3(ss.random_subspace(q, n, rng), ss.random_subspace(q, n, rng))
            if report is not None:
                return report

    return AxiomReport(passed=True, mode=mode, subspaces_checked=total, pairs_checked=pairs)


def equivalent_under(m1: RankOracle, m2: RankOracle, alpha) -> bool:
    if m1.q != m2.q or m1.n != m2.n:
        raise DimensionMismatch("equivalence needs q-matroids on the same ground")
    linear = alpha if isinstance(alpha, ss.LinearMap) else ss.LinearMap(m1.q, m1.n, alpha)
    if m1.full_rank != m2.full_rank:
        return False
    for v in _all_subspaces(m1.q, m1.n):
        if m2.rank(linear.apply(v)) != m1.rank(v):
            return False
    return True
