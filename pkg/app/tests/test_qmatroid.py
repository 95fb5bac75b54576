import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.core.exceptions import (
    DimensionMismatch,
    EmptyFamily,
    FieldMismatch,
    InconsistentFamily,
    KOutOfRange,
    NotASpread,
    NotASubspace,
    RankDeficientG,
    SingularAlpha,
    SpecError,
    WrongDimension,
)
from app.services import qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.field_service import create_field
from app.services.subspace_service import Subspace
from app.tests.helpers import all_subspaces, oracle_zoo, subspaces

SMALL_GROUNDS = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)]
# GF(2)^5 has 374 subspaces, GF(3)^4 has 212
LARGE_GROUNDS = [(2, 5), (3, 4)]


def small_zoo():
    for q, n in SMALL_GROUNDS + LARGE_GROUNDS:
        marks = [pytest.mark.slow] if (q, n) in LARGE_GROUNDS else []
        for m in oracle_zoo(q, n):
            yield pytest.param(m, id=f"{m.descriptor}-GF{q}^{n}-{m.full_rank}", marks=marks)


def sampled_zoo():
    for q, n in SMALL_GROUNDS + LARGE_GROUNDS:
        yield pytest.param(q, n, oracle_zoo(q, n), id=f"GF{q}^{n}")


def e(n, *indices):
    """Span of standard basis vectors, 1-based like e_1..e_n."""
    return ss.span(2, n, [[int(j == i - 1) for j in range(n)] for i in indices])


# constructors

def test_uniform_ranks():
    m = qm.uniform(2, 4, 2)
    assert m.rank(e(4, 1)) == 1
    assert m.rank(e(4, 1, 2, 3)) == 2
    assert m.full_rank == 2
    with pytest.raises(KOutOfRange):
        qm.uniform(2, 4, 5)


def test_representable_rank_of_the_whole_space(m1_matroid):
    assert m1_matroid.full_rank == 2
    assert m1_matroid.n == 3


def test_five_flats_ranks(five_flats_matroid):
    m = five_flats_matroid
    assert m.rank(e(8, 1, 2)) == 1
    assert m.full_rank == 4
    # a line outside <e1, e2>
    assert m.rank(ss.span(2, 8, [[1, 0, 1, 0, 0, 0, 0, 0]])) == 1
    assert m.rank(e(8, 1, 2, 3, 4)) == 2


def test_spread_ranks(field_spread_matroid):
    m = field_spread_matroid
    member = ss.span(3, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])
    assert m.rank(member) == 1
    assert m.rank(ss.span(3, 4, [[1, 0, 0, 0], [0, 0, 1, 0]])) == 2
    assert m.full_rank == 2


def test_spread_validation():
    plane = ss.span(3, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])
    overlapping = ss.span(3, 4, [[1, 0, 0, 0], [0, 0, 1, 0]])
    with pytest.raises(NotASpread):
        qm.from_spread(3, [plane, overlapping])
    with pytest.raises(WrongDimension):
        qm.from_spread(3, [ss.span(3, 4, [[1, 0, 0, 0]])])
    with pytest.raises(WrongDimension):
        qm.from_spread(3, [], n=5)


def test_representation_errors():
    gf2 = create_field(2, 1)
    with pytest.raises(RankDeficientG):
        qm.from_representation(gf2, [[1, 0], [1, 0]])
    with pytest.raises(FieldMismatch):
        qm.from_representation(create_field(2, 3), [[1, 0]], q=3)
    with pytest.raises(DimensionMismatch):
        qm.from_representation(gf2, [[1, 0], [0, 1, 1]])


def test_family_errors():
    with pytest.raises(EmptyFamily):
        qm.from_cyclic_flats(2, 3, [])
    with pytest.raises(InconsistentFamily):
        qm.from_cyclic_flats(2, 3, [(Subspace.zero(2, 3), 0), (Subspace.full(2, 3), 5)])


def test_table_without_an_entry():
    m = qm.from_table(2, 1, {Subspace.zero(2, 1): 0})
    with pytest.raises(SpecError):
        m.rank(Subspace.full(2, 1))


def test_rank_rejects_foreign_subspace():
    with pytest.raises(DimensionMismatch):
        qm.uniform(2, 3, 1).rank(Subspace.full(2, 4))


def test_random_representable_is_seeded():
    a = qm.random_representable(2, 4, 2, seed=3)
    b = qm.random_representable(2, 4, 2, seed=3)
    assert a.spec == b.spec
    assert a.full_rank == 2


# duality, minors

def test_dual_of_m1(m1_matroid):
    assert qm.dual(m1_matroid).full_rank == 1


@pytest.mark.parametrize("m", small_zoo())
def test_bidual_identity(m):
    twice = qm.dual(qm.dual(m))
    assert all(twice.rank(v) == m.rank(v) for v in all_subspaces(m))


def test_restriction_and_contraction_of_trivial_parts():
    m = qm.random_representable(2, 4, 2, seed=1)
    whole = qm.restriction(m, m.full_space)
    nothing = qm.contraction(m, m.zero_space)
    for v in all_subspaces(m):
        assert whole.rank(v) == m.rank(v)
        assert nothing.rank(v) == m.rank(v)


def test_contraction_of_uniform_by_a_line():
    m = qm.uniform(2, 4, 2)
    minor = qm.contraction(m, e(4, 1))
    assert minor.n == 3
    assert minor.full_rank == 1
    assert all(minor.rank(v) == min(1, v.dim) for v in all_subspaces(minor))


def test_minors_need_a_subspace_of_the_ground():
    with pytest.raises(NotASubspace):
        qm.restriction(qm.uniform(2, 3, 1), Subspace.full(2, 4))


# closure and cyclic core

@pytest.mark.parametrize("m", small_zoo())
def test_closure_and_cyclic_core_laws(m):
    for v in all_subspaces(m):
        r = m.rank(v)
        cl = qm.closure(m, v)
        cyc = qm.cyclic_core(m, v)
        assert cl.contains(v) and m.rank(cl) == r
        assert qm.closure(m, cl) == cl
        assert v.contains(cyc)
        assert qm.cyclic_core(m, cyc) == cyc
        # nullity transfer
        assert v.dim - r == cyc.dim - m.rank(cyc)
        # sandwich
        assert ss.intersect(v, qm.closure(m, cyc)) == cyc


@pytest.mark.parametrize("q, n, zoo", sampled_zoo())
@given(data=st.data())
def test_closure_and_cyclic_core_are_monotone(q, n, zoo, data):
    m = data.draw(st.sampled_from(zoo))
    v = data.draw(subspaces(q, n))
    w = ss.sum(v, data.draw(subspaces(q, n)))
    assert qm.closure(m, w).contains(qm.closure(m, v))
    assert qm.cyclic_core(m, w).contains(qm.cyclic_core(m, v))


@pytest.mark.parametrize("q, n, zoo", sampled_zoo())
@given(data=st.data())
def test_closure_of_core_sits_below_core_of_closure(q, n, zoo, data):
    m = data.draw(st.sampled_from(zoo))
    v = data.draw(subspaces(q, n))
    lower = qm.closure(m, qm.cyclic_core(m, v))
    upper = qm.cyclic_core(m, qm.closure(m, v))
    assert m.is_cyclic(lower) and m.is_flat(lower)
    assert m.is_flat(upper) and m.is_cyclic(upper)
    assert upper.contains(lower)


@pytest.mark.parametrize("m", small_zoo())
def test_duality_bridge(m):
    m_star = qm.dual(m)
    for v in all_subspaces(m):
        assert ss.orthogonal(qm.cyclic_core(m, v)) == qm.closure(m_star, ss.orthogonal(v))


@pytest.mark.parametrize("q, n", [(2, 3), (3, 2)])
def test_cyclic_core_is_the_sum_of_circuits(q, n):
    for m in oracle_zoo(q, n):
        for v in all_subspaces(m):
            assert qm.cyclic_core(m, v) == qm.cyclic_core_by_circuits(m, v)


@pytest.mark.parametrize("q, n", [(2, 3), (3, 2)])
def test_rank_is_the_largest_independent_dimension(q, n):
    for m in oracle_zoo(q, n):
        for v in all_subspaces(m):
            assert qm.rank_by_independents(m, v) == m.rank(v)


def test_uniform_closure_and_core_do_not_commute():
    m = qm.uniform(2, 4, 2)
    v = e(4, 1, 2)
    assert qm.closure(m, v).is_full()
    assert qm.cyclic_core(m, qm.closure(m, v)).is_full()
    assert qm.closure(m, qm.cyclic_core(m, v)).is_zero()


def test_trivial_and_free_extremes():
    trivial = qm.uniform(2, 3, 0)
    free = qm.uniform(2, 3, 3)
    assert qm.loop_space(trivial).is_full()
    for v in all_subspaces(free):
        assert qm.closure(free, v) == v
        flags = qm.predicates(free, v)
        assert flags.independent and flags.flat
        assert flags.cyclic == v.is_zero()
        assert qm.cyclic_core(trivial, v) == v


# predicates

def test_predicates_on_the_middle_cyclic_flat(five_flats_matroid):
    flags = qm.predicates(five_flats_matroid, e(8, 1, 2, 3, 4))
    assert flags.flat and flags.cyclic and flags.dependent
    assert not flags.circuit


def test_zero_space_of_a_loopless_matroid():
    flags = qm.predicates(qm.uniform(3, 3, 2), Subspace.zero(3, 3))
    assert flags.independent and flags.cyclic and flags.flat
    assert not flags.basis


def test_m1_has_one_circuit_and_six_bases(m1_matroid):
    flags = [qm.predicates(m1_matroid, v) for v in all_subspaces(m1_matroid)]
    assert sum(f.circuit for f in flags) == 1
    assert sum(f.basis for f in flags) == 6


def test_loop_space_and_cyclic_top_of_block_n(block_n_matroid):
    assert qm.loop_space(block_n_matroid).is_zero()
    assert qm.cyc_top(block_n_matroid).dim == 6
    assert not qm.is_full(block_n_matroid)


def test_five_flats_matroid_is_full(five_flats_matroid):
    assert qm.is_full(five_flats_matroid)


# axioms and equivalence

@pytest.mark.parametrize("m", small_zoo())
def test_axioms_hold_on_the_zoo(m):
    report = qm.axiom_check(m)
    assert report.passed, report.violation


def test_axioms_on_a_small_cyclic_flat_family():
    family = [(Subspace.zero(2, 5), 0), (e(5, 1, 2), 1), (Subspace.full(2, 5), 2)]
    assert qm.axiom_check(qm.from_cyclic_flats(2, 5, family)).passed


def test_axioms_on_gf3_spreads(field_spread_matroid, hall_spread_matroid):
    assert qm.axiom_check(field_spread_matroid).passed
    assert qm.axiom_check(hall_spread_matroid).passed


def test_axioms_catch_a_corrupted_table():
    base = qm.uniform(2, 3, 2)
    table = {v: base.rank(v) for v in all_subspaces(base)}
    table[Subspace.full(2, 3)] = 1
    report = qm.axiom_check(qm.from_table(2, 3, table))
    assert not report.passed
    assert report.violation.check == "R2"
    assert report.violation.witnesses


def test_axioms_catch_a_rank_on_the_zero_space():
    base = qm.uniform(2, 3, 2)
    table = {v: base.rank(v) for v in all_subspaces(base)}
    table[Subspace.zero(2, 3)] = 1
    report = qm.axiom_check(qm.from_table(2, 3, table))
    assert not report.passed
    assert report.violation.check == "R1"
    assert [w["rows"] for w in report.violation.witnesses] == [[]]


def test_sampled_axiom_check_is_reproducible():
    m = qm.from_cyclic_flats(2, 5, [(Subspace.zero(2, 5), 0), (Subspace.full(2, 5), 3)])
    a = qm.axiom_check(m, mode="sampled", seed=11, sample_size=500)
    b = qm.axiom_check(m, mode="sampled", seed=11, sample_size=500)
    assert a == b and a.passed and a.pairs_checked == 500


def test_equivalence_under_a_map(m1_matroid):
    identity = ss.LinearMap.identity(2, 3)
    assert qm.equivalent_under(m1_matroid, m1_matroid, identity)
    assert not qm.equivalent_under(qm.uniform(2, 3, 1), qm.uniform(2, 3, 2), identity)
    with pytest.raises(SingularAlpha):
        qm.equivalent_under(m1_matroid, m1_matroid, [[1, 1, 0], [1, 1, 0], [0, 0, 1]])
