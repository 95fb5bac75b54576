import random

import pytest

from app.core.exceptions import BudgetExceeded, NotASpreadSet, SingularAlpha, SpecError, ZeroGround
from app.services import dsum_service as ds
from app.services import qmatroid_service as qm
from app.services import subspace_service as ss
from app.services.decompose_service import (
    decompose,
    equivalence_search,
    is_irreducible,
    single_flat_shortcut,
    split_trivial_free,
)
from app.services.field_service import create_field, parse_element
from app.services.spread_service import partial_spreads, spread_tools
from app.services.subspace_service import Subspace
from app.services.zflats_service import compute_zflats
from app.utils.math import unpack

TRIVIAL = ("trivial", 1, 0)
FREE = ("free", 1, 1)


def uniform_sum(q, *shapes):
    parts = [qm.uniform(q, n, k) for n, k in shapes]
    return parts[0] if len(parts) == 1 else ds.direct_sum_all(parts)


def test_m1_splits_off_a_free_part(m1_matroid):
    result = decompose(m1_matroid)
    assert result.summary == "U_{1,1} ⊕ U_1(F_2^2)"
    assert (result.l, result.f) == (0, 1)


def test_gf8_sum_decomposes_into_three_parts(sum_m_matroid):
    result = decompose(sum_m_matroid)
    assert result.summary == "U_{1,1} ⊕ U_1(F_2^2) ⊕ Irr(dim 4, rank 2)"
    report = result.to_report()
    assert [c.tag for c in report.components] == ["free", "irreducible", "irreducible"]
    assert report.tree["core"]["witness"]


@pytest.mark.slow
def test_block_n_has_an_irreducible_core(block_n_matroid):
    assert decompose(block_n_matroid).summary == "U_{1,1} ⊕ Irr(dim 6, rank 3)"


def test_core_of_block_n_is_irreducible(block_n_matroid):
    split = split_trivial_free(block_n_matroid)
    assert (split.l, split.f) == (0, 1)
    family = compute_zflats(split.core, shards=1)
    report = is_irreducible(split.core, family)
    assert report.irreducible
    assert report.family_size == 40


def test_component_of_the_sum_is_equivalent_to_m2(sum_m_matroid, m2_matroid):
    component = decompose(sum_m_matroid).components[-1]
    assert component.ground.dim == 4
    report = equivalence_search(component.oracle, m2_matroid)
    assert report.found


@pytest.mark.parametrize(
    "m, irreducible",
    [
        (qm.uniform(2, 1, 1), True),
        (qm.uniform(2, 3, 2), True),
        (qm.uniform(3, 3, 1), True),
        (uniform_sum(2, (2, 1), (2, 1)), False),
        (uniform_sum(2, (1, 1), (2, 1)), False),
        (qm.uniform(2, 3, 0), False),
    ],
)
def test_is_irreducible(m, irreducible):
    assert is_irreducible(m).irreducible is irreducible


def test_splitting_witness_is_reported():
    report = is_irreducible(uniform_sum(2, (2, 1), (2, 1)))
    assert report.witness is not None and len(report.witness) == 2
    assert [w["rank"] for w in report.witness] == [1, 1]


def test_m2_is_irreducible(m2_matroid):
    assert is_irreducible(m2_matroid).irreducible


def test_five_flats_matroid_is_irreducible(five_flats_matroid):
    assert is_irreducible(five_flats_matroid).irreducible


def test_both_spread_matroids_are_irreducible(field_spread_matroid, hall_spread_matroid):
    for m in (field_spread_matroid, hall_spread_matroid):
        assert is_irreducible(m, compute_zflats(m, shards=1)).irreducible


@pytest.mark.parametrize("q, size", [(2, t) for t in range(6)] + [(3, t) for t in range(11)])
def test_partial_spread_splits_only_with_two_lines(q, size):
    (partial,) = partial_spreads(spread_tools(q, "desarguesian"), [size])
    m = qm.from_spread(q, partial)
    assert is_irreducible(m, compute_zflats(m, shards=1)).irreducible is (size != 2)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize(
    "shapes, expected",
    [
        ([(3, 0)], [TRIVIAL] * 3),
        ([(1, 0), (1, 0), (1, 1)], [FREE, TRIVIAL, TRIVIAL]),
        ([(1, 0), (2, 2)], [FREE, FREE, TRIVIAL]),
        ([(3, 3)], [FREE] * 3),
        ([(1, 0), (2, 1)], [("irreducible", 2, 1), TRIVIAL]),
        ([(1, 1), (2, 1)], [FREE, ("irreducible", 2, 1)]),
        ([(3, 1)], [("irreducible", 3, 1)]),
        ([(3, 2)], [("irreducible", 3, 2)]),
    ],
)
def test_dimension_three_classification(q, shapes, expected):
    result = decompose(uniform_sum(q, *shapes))
    assert result.multiset() == sorted(expected)
    assert sum(dim for _, dim, _ in result.multiset()) == 3


def test_uniform_names():
    assert decompose(qm.uniform(3, 3, 2)).summary == "U_2(F_3^3)"
    assert decompose(qm.uniform(2, 2, 0)).summary == "U_{0,1} ⊕ U_{0,1}"


def test_single_flat_shortcut(single_flat_matroid):
    assert single_flat_shortcut(single_flat_matroid) == (1, 2)
    assert decompose(single_flat_matroid).summary == "U_{0,1} ⊕ U_{1,1} ⊕ U_{1,1}"
    assert single_flat_shortcut(qm.uniform(2, 3, 1)) is None


def test_zero_ground():
    with pytest.raises(ZeroGround):
        decompose(qm.uniform(2, 0, 0))
    with pytest.raises(ZeroGround):
        is_irreducible(qm.uniform(2, 0, 0))


# equivalence

def test_equivalence_after_a_column_swap(m1_matroid):
    gf8 = create_field(2, 3, [1, 1, 0, 1])
    swapped = qm.from_representation(
        gf8, [[parse_element(gf8, x) for x in row] for row in [["0", "1", "w3"], ["1", "0", "w"]]], q=2
    )
    report = equivalence_search(m1_matroid, swapped)
    assert report.found
    assert qm.equivalent_under(m1_matroid, swapped, report.alpha)


def test_equivalence_rejects_different_ranks():
    report = equivalence_search(qm.uniform(2, 3, 1), qm.uniform(2, 3, 2))
    assert not report.found and report.exhausted
    assert report.reason == "different ranks"


def test_equivalence_rejects_different_profiles():
    report = equivalence_search(qm.uniform(2, 4, 2), uniform_sum(2, (2, 1), (2, 1)))
    assert not report.found
    assert report.reason == "cyclic-flat profiles differ"


def test_equivalence_budget(field_spread_matroid, hall_spread_matroid):
    f1 = compute_zflats(field_spread_matroid, shards=1)
    f2 = compute_zflats(hall_spread_matroid, shards=1)
    with pytest.raises(BudgetExceeded) as info:
        equivalence_search(field_spread_matroid, hall_spread_matroid, budget=5, family1=f1, family2=f2)
    assert info.value.detail["progress"] == 5


@pytest.mark.slow
def test_field_and_hall_spreads_are_not_equivalent(field_spread_matroid, hall_spread_matroid):
    f1 = compute_zflats(field_spread_matroid, shards=1)
    f2 = compute_zflats(hall_spread_matroid, shards=1)
    report = equivalence_search(field_spread_matroid, hall_spread_matroid, family1=f1, family2=f2)
    assert not report.found
    assert report.exhausted


# spreads

def test_desarguesian_spread():
    spread = spread_tools(3, "desarguesian")
    assert len(spread) == 10
    m = qm.from_spread(3, spread)
    assert compute_zflats(m, shards=1).profile() == [(0, 0, 1), (2, 1, 10), (4, 2, 1)]


@pytest.mark.parametrize("size", [0, 1, 3])
def test_partial_spreads(size):
    spread = spread_tools(3, "desarguesian")
    (partial,) = partial_spreads(spread, [size])
    family = compute_zflats(qm.from_spread(3, partial), shards=1)
    assert len(family) == size + 2


def test_spread_set_errors():
    with pytest.raises(NotASpreadSet):
        spread_tools(3, "from_matrices", [[[1, 0], [0, 0]], [[0, 0], [0, 0]]])
    with pytest.raises(NotASpreadSet):
        spread_tools(3, "from_matrices", [[[1, 0], [0, 5]]])
    with pytest.raises(SpecError):
        spread_tools(3, "from_matrices")
    with pytest.raises(SpecError):
        spread_tools(3, "regulus")


# coordinate changes

def random_linear_map(q, n, seed):
    rng = random.Random(seed)
    while True:
        try:
            return ss.LinearMap(q, n, [[rng.randrange(q) for _ in range(n)] for _ in range(n)])
        except SingularAlpha:
            continue


def twisted(m, alpha):
    return qm.from_table(m.q, m.n, {alpha.apply(v): m.rank(v) for v in ss.enumerate_subspaces(m.q, m.n)})


def resummed(result):
    parts = [c.oracle for c in result.components]
    rows = [row for c in result.components for row in c.ground.basis]
    columns = [unpack(row, result.q, result.n) for row in rows]
    placement = ss.LinearMap(result.q, result.n, [[col[i] for col in columns] for i in range(result.n)])
    return ds.direct_sum_all(parts), placement


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_decompose_survives_a_change_of_coordinates(m1_matroid, seed):
    base = ds.direct_sum_all([m1_matroid, qm.uniform(2, 1, 0), qm.uniform(2, 1, 1)])
    alpha = random_linear_map(2, 5, seed)
    result = decompose(twisted(base, alpha))

    assert (result.l, result.f) == (1, 2)
    assert result.summary == "U_{0,1} ⊕ U_{1,1} ⊕ U_{1,1} ⊕ U_1(F_2^2)"
    (loops,) = [c.ground for c in result.components if c.tag == "trivial"]
    assert loops == alpha.apply(Subspace(2, 5, (2,)))

    total, placement = resummed(result)
    assert qm.equivalent_under(total, twisted(base, alpha), placement)


@pytest.mark.parametrize(
    "m",
    [
        pytest.param(None, id="fixture"),
        pytest.param(uniform_sum(2, (1, 0), (2, 2)), id="loop-and-free"),
        pytest.param(uniform_sum(3, (2, 0), (1, 1)), id="gf3"),
        pytest.param(qm.uniform(2, 3, 0), id="all-loops"),
    ],
)
def test_single_flat_structure(m, single_flat_matroid):
    m = m or single_flat_matroid
    family = compute_zflats(m, shards=1)
    assert len(family) == 1
    [(z, _)] = family.members
    assert single_flat_shortcut(m, family) == (z.dim, m.n - z.dim)
    for v in ss.enumerate_subspaces(m.q, m.n):
        flags = qm.predicates(m, v)
        assert flags.flat == v.contains(z)
        assert flags.cyclic == z.contains(v)
