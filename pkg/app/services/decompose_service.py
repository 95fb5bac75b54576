import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, ZeroGround
from app.schemas.report import (
    ComponentReport,
    DecompositionReport,
    EquivalenceReport,
    IrreducibilityReport,
)
from app.services import qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.subspace_service import Subspace
from app.services.zflats_service import CyclicFlatFamily, family_of
from app.utils.math import unpack

logger = logging.getLogger(__name__)

Member = Tuple[Subspace, int]


@dataclass
class TrivialFreeSplit:
    """E = cl(0) ⊕ Γ ⊕ Δ with cyc(E) = cl(0) ⊕ Γ."""

    l: int  # noqa: E741
    f: int
    core: qm.RankOracle
    loops: Subspace
    gamma: Subspace
    delta: Subspace
    top: Subspace


def _greedy_complement(base: Subspace, rows: Sequence[int]) -> List[int]:
    chosen: List[int] = []
    current = base
    for r in rows:
        if not current.contains_vector(r):
            chosen.append(r)
            current = ss.add_vector(current, r)
    return chosen


def split_trivial_free(m: qm.RankOracle) -> TrivialFreeSplit:
    loops = qm.loop_space(m)
    top = qm.cyc_top(m)
    gamma = ss.from_packed(m.q, m.n, _greedy_complement(loops, top.basis))
    # standard vectors on the non-pivot columns of cyc(E)
    delta = ss.from_packed(m.q, m.n, [m.q ** (m.n - 1 - c) for c in ss._free_columns(top)])
    core = qm.restriction(m, gamma)
    split = TrivialFreeSplit(loops.dim, delta.dim, core, loops, gamma, delta, top)
    logger.debug(f"{m!r}: loops {split.l}, free {split.f}, core dim {gamma.dim}")
    return split


def _find_split(ground: Subspace, members: Sequence[Member]) -> Optional[Tuple[Member, Member]]:
    """First complementary pair (Z1, Z2) whose lower sets multiply to the whole family."""
    ranks = dict(members)
    total_rank = ranks[ground]
    nonzero = [(z, r) for z, r in members if z.dim > 0]
    for i, (z1, r1) in enumerate(nonzero):
        for z2, r2 in nonzero[i + 1:]:
            if z1.dim + z2.dim != ground.dim or r1 + r2 != total_rank:
                continue
            if ss.dim_sum(z1, z2) != ground.dim:
                continue
            lower1 = [a for a, _ in members if z1.contains(a)]
            lower2 = [b for b, _ in members if z2.contains(b)]
            if len(lower1) * len(lower2) != len(members):
                continue
            if all(ss.sum(a, b) in ranks for a in lower1 for b in lower2):
                return (z1, r1), (z2, r2)
    return None


def is_irreducible(m: qm.RankOracle, family: Optional[CyclicFlatFamily] = None) -> IrreducibilityReport:
    if m.n == 0:
        raise ZeroGround("the zero space has no q-matroid to split")
    if m.n == 1:
        return IrreducibilityReport(irreducible=True, reason="dimension one")
    if not qm.is_full(m):
        return IrreducibilityReport(irreducible=False, reason="not full: a trivial or free part splits off")
    family = family or family_of(m)
    witness = _find_split(m.full_space, family.members)
    if witness is None:
        return IrreducibilityReport(irreducible=True, reason="no splitting pair of cyclic flats", family_size=len(family))
    (z1, r1), (z2, r2) = witness
    return IrreducibilityReport(
        irreducible=False,
        reason="complementary cyclic flats split the family",
        witness=[{"rows": z1.rows, "rank": r1}, {"rows": z2.rows, "rank": r2}],
        family_size=len(family),
    )


@dataclass
class Component:
    tag: str
    ground: Subspace
    rank: int
    oracle: qm.RankOracle
    members: List[Member] = field(default_factory=list)

    def name(self) -> str:
        if self.tag == "trivial":
            return "U_{0,1}"
        if self.tag == "free":
            return "U_{1,1}"
        d = self.ground.dim
        if [z for z, _ in self.members] == [Subspace.zero(self.ground.q, self.ground.n), self.ground]:
            return f"U_{self.rank}(F_{self.ground.q}^{d})"
        return f"Irr(dim {d}, rank {self.rank})"

    @property
    def sort_key(self):
        order = {"trivial": 0, "free": 1, "irreducible": 2}[self.tag]
        return (order, self.ground.dim, self.rank, self.ground.sort_key)


@dataclass
class Decomposition:
    descriptor: str
    q: int
    n: int
    l: int  # noqa: E741
    f: int
    components: List[Component]
    tree: Dict[str, Any]

    @property
    def summary(self) -> str:
        return " ⊕ ".join(c.name() for c in self.components)

    def multiset(self) -> List[Tuple[str, int, int]]:
        return sorted((c.tag, c.ground.dim, c.rank) for c in self.components)

    def to_report(self) -> DecompositionReport:
        return DecompositionReport(
            descriptor=self.descriptor,
            q=self.q,
            n=self.n,
            l=self.l,
            f=self.f,
            summary=self.summary,
            components=[
                ComponentReport(
                    tag=c.tag,
                    dim=c.ground.dim,
                    rank=c.rank,
                    name=c.name(),
                    ground_rows=c.ground.rows,
                    spec=c.oracle.spec.model_dump(mode="json") if c.oracle.spec is not None else {},
                )
                for c in self.components
            ],
            tree=self.tree,
        )


def _split_core(m: qm.RankOracle, ground: Subspace, members: List[Member], out: List[Component]) -> Dict[str, Any]:
    ranks = dict(members)
    node: Dict[str, Any] = {"ground": ground.rows, "dim": ground.dim, "rank": ranks[ground]}
    witness = _find_split(ground, members) if ground.dim > 1 else None
    if witness is None:
        node["irreducible"] = True
        out.append(Component("irreducible", ground, ranks[ground], qm.restriction(m, ground), members))
        return node
    (z1, _), (z2, _) = witness
    logger.info(f"splitting dim {ground.dim} into {z1.dim} + {z2.dim}")
    node["witness"] = [z1.rows, z2.rows]
    node["children"] = [
        _split_core(m, z, [(a, r) for a, r in members if z.contains(a)], out) for z in (z1, z2)
    ]
    return node


def decompose(m: qm.RankOracle, family: Optional[CyclicFlatFamily] = None) -> Decomposition:
    if m.n == 0:
        raise ZeroGround("the zero space has no decomposition")
    family = family or family_of(m)
    split = split_trivial_free(m)
    q, n = m.q, m.n

    components: List[Component] = []
    for row in split.loops.basis:
        components.append(Component("trivial", Subspace(q, n, (row,)), 0, qm.uniform(q, 1, 0)))
    for row in split.delta.basis:
        components.append(Component("free", Subspace(q, n, (row,)), 1, qm.uniform(q, 1, 1)))

    tree: Dict[str, Any] = {"l": split.l, "f": split.f, "core": None}
    shortcut = single_flat_shortcut(m, family)
    if shortcut is None and split.gamma.dim > 0:
        # Z(M|Γ) = {Z ∩ Γ}; cyclic flats all contain cl(0) and lie in cyc(E)
        core_members: Dict[Subspace, int] = {}
        for z, r in family.members:
            core_members[ss.intersect(z, split.gamma)] = r
        members = sorted(core_members.items(), key=lambda item: item[0].sort_key)
        irreducibles: List[Component] = []
        tree["core"] = _split_core(m, split.gamma, members, irreducibles)
        components.extend(irreducibles)

    components.sort(key=lambda c: c.sort_key)
    result = Decomposition(m.descriptor, q, n, split.l, split.f, components, tree)
    logger.info(f"{m!r} = {result.summary}")
    return result


def single_flat_shortcut(m: qm.RankOracle, family: Optional[CyclicFlatFamily] = None) -> Optional[Tuple[int, int]]:
    """(l, f) when Z(M) has a single member, which is then cl(0) = cyc(E)."""
    family = family or family_of(m)
    if len(family) != 1:
        return None
    (z, _), = family.members
    return z.dim, m.n - z.dim


# equivalence search

class _PartialMap:
    """An injective linear map defined on span(src), sending src[i] to dst[i]."""

    def __init__(self, q: int, n: int, source: ss.BasisEmbedding, dst: Tuple[int, ...]):
        self.q = q
        self.n = n
        self.source = source
        self.dst = dst
        self.domain = source.image
        self._image: Optional[Subspace] = None

    @classmethod
    def empty(cls, q: int, n: int) -> "_PartialMap":
        return cls(q, n, ss.BasisEmbedding(q, n, ()), ())

    @property
    def image(self) -> Subspace:
        if self._image is None:
            self._image = ss.from_packed(self.q, self.n, self.dst)
        return self._image

    def apply_vector(self, vector: int) -> int:
        return ss.combine(self.q, self.n, self.dst, self.source.pull_vector(vector))

    def apply(self, v: Subspace) -> Subspace:
        return ss.from_packed(self.q, self.n, [self.apply_vector(r) for r in v.basis])

    def to_matrix(self) -> List[List[int]]:
        columns = [unpack(self.apply_vector(self.q ** (self.n - 1 - j)), self.q, self.n) for j in range(self.n)]
        return [[columns[j][i] for j in range(self.n)] for i in range(self.n)]


def _image_tuples(q: int, n: int, target: Subspace, base: Subspace, count: int) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of `count` vectors of `target`, independent modulo `base`."""
    if count == 0:
        yield ()
        return
    for x in ss.vectors_of(target):
        if x == 0 or base.contains_vector(x):
            continue
        for rest in _image_tuples(q, n, target, ss.add_vector(base, x), count - 1):
            yield (x,) + rest


@dataclass
class _Level:
    """One anchor: the domain grows by `new_src` and `covered` becomes checkable."""

    anchor: Subspace
    rank: int
    met: Subspace
    new_src: Tuple[int, ...]
    source: ss.BasisEmbedding
    covered: List[Member]


def _plan_levels(q: int, n: int, members: Sequence[Member]) -> List[_Level]:
    levels: List[_Level] = []
    src: Tuple[int, ...] = ()
    domain = Subspace.zero(q, n)
    seen = set()
    for z, r in members:
        if z.dim == 0 or domain.contains(z):
            continue
        met = ss.intersect(z, domain)
        new_src = tuple(_greedy_complement(domain, z.basis))
        src = src + new_src
        source = ss.BasisEmbedding(q, n, src)
        domain = source.image
        covered = [(y, s) for y, s in members if y not in seen and domain.contains(y)]
        seen.update(y for y, _ in covered)
        levels.append(_Level(z, r, met, new_src, source, covered))
    if not levels or not domain.is_full():
        # fill with standard vectors; members all lie inside the anchored span
        standard = [q ** (n - 1 - c) for c in range(n)]
        new_src = tuple(_greedy_complement(domain, standard))
        source = ss.BasisEmbedding(q, n, src + new_src)
        covered = [(y, s) for y, s in members if y not in seen]
        levels.append(_Level(domain, -1, domain, new_src, source, covered))
    return levels


def equivalence_search(
    m1: qm.RankOracle,
    m2: qm.RankOracle,
    budget: Optional[int] = None,
    family1: Optional[CyclicFlatFamily] = None,
    family2: Optional[CyclicFlatFamily] = None,
) -> EquivalenceReport:
    """Search for α with rank2(αV) = rank1(V), anchored on cyclic flats.

    Each anchor is a cyclic flat of M1 that grows the span of the previous ones;
    it must land on a cyclic flat of M2 with the same dim and rank. Every cyclic
    flat inside the span so far must land on one with the same rank, or the
    branch is dropped. A complete assignment counts as one candidate, and a
    candidate that survives is confirmed with equivalent_under.
    """
    budget = settings.EQUIVALENCE_CANDIDATE_BUDGET if budget is None else budget
    if (m1.q, m1.n) != (m2.q, m2.n):
        return EquivalenceReport(found=False, exhausted=True, candidates_checked=0, reason="different grounds")
    if m1.full_rank != m2.full_rank:
        return EquivalenceReport(found=False, exhausted=True, candidates_checked=0, reason="different ranks")
    q, n = m1.q, m1.n

    identity = ss.LinearMap.identity(q, n)
    if qm.equivalent_under(m1, m2, identity):
        return EquivalenceReport(
            found=True, exhausted=False, candidates_checked=1, reason="identity", alpha=identity.to_rows()
        )

    family1 = family1 or family_of(m1)
    family2 = family2 or family_of(m2)
    if family1.profile() != family2.profile():
        return EquivalenceReport(
            found=False, exhausted=True, candidates_checked=1, reason="cyclic-flat profiles differ"
        )

    targets: Dict[Tuple[int, int], List[Subspace]] = {}
    for z, r in family2.members:
        targets.setdefault((z.dim, r), []).append(z)
    ranks2 = dict(family2.members)
    levels = _plan_levels(q, n, family1.members)
    whole = Subspace.full(q, n)
    candidates = 1

    def consistent(partial: _PartialMap, covered: List[Member]) -> bool:
        return all(ranks2.get(partial.apply(z)) == r for z, r in covered)

    def search(k: int, partial: _PartialMap) -> Optional[_PartialMap]:
        nonlocal candidates
        level = levels[k]
        last = k == len(levels) - 1
        if level.rank < 0:
            options = [whole]
        else:
            options = targets.get((level.anchor.dim, level.rank), [])
        for target in options:
            if not all(target.contains_vector(partial.apply_vector(x)) for x in level.met.basis):
                continue
            for images in _image_tuples(q, n, target, partial.image, len(level.new_src)):
                extended = _PartialMap(q, n, level.source, partial.dst + images)
                if last:
                    candidates += 1
                    if candidates > budget:
                        raise BudgetExceeded(
                            f"equivalence search passed {budget} candidates", progress=candidates - 1
                        )
                if not consistent(extended, level.covered):
                    continue
                if not last:
                    found = search(k + 1, extended)
                    if found is not None:
                        return found
                elif qm.equivalent_under(m1, m2, ss.LinearMap(q, n, extended.to_matrix())):
                    return extended
                if level.rank < 0:
                    # the fill is free once every cyclic flat is matched
                    return None
        return None

    found = search(0, _PartialMap.empty(q, n))
    if found is None:
        logger.info(f"no equivalence after {candidates} candidates")
        return EquivalenceReport(
            found=False, exhausted=True, candidates_checked=candidates, reason="candidate space exhausted"
        )
    return EquivalenceReport(
        found=True,
        exhausted=False,
        candidates_checked=candidates,
        reason="anchored search",
        alpha=found.to_matrix(),
    )
