import pytest

from app.core.exceptions import FieldMismatch, GroundMismatch, SpecError
from app.services import dsum_service as ds
from app.services import qmatroid_service as qm
from app.services.field_service import create_field, parse_element
from app.services.zflats_service import compute_zflats, family_of
from app.tests.helpers import all_subspaces

PAIRS = [
    (qm.uniform(2, 2, 1), qm.uniform(2, 2, 1)),
    (qm.uniform(2, 1, 1), qm.random_representable(2, 3, 2, seed=4)),
    (qm.random_representable(2, 2, 1, seed=1), qm.uniform(2, 3, 2)),
    (qm.uniform(3, 1, 0), qm.uniform(3, 2, 1)),
]


@pytest.fixture(scope="module")
def gf8():
    return create_field(2, 3, [1, 1, 0, 1])


def matrix(field, rows):
    return [[parse_element(field, x) for x in row] for row in rows]


@pytest.mark.parametrize("m1, m2", PAIRS)
def test_naive_and_family_strategies_agree(m1, m2):
    report = ds.strategy_agreement_check(m1, m2)
    assert report.passed, report.violation


@pytest.mark.parametrize("m1, m2", PAIRS)
def test_rank_is_additive_on_split_subspaces(m1, m2):
    assert ds.additivity_check(m1, m2).passed


@pytest.mark.parametrize("m1, m2", PAIRS)
def test_contracting_one_part_leaves_the_other(m1, m2):
    assert ds.contraction_recovery_check(m1, m2).passed


@pytest.mark.parametrize("m1, m2", PAIRS)
def test_dual_of_sum_is_sum_of_duals(m1, m2):
    assert ds.dual_of_sum_check(m1, m2).passed


@pytest.mark.parametrize("m1, m2", PAIRS[:2])
def test_independent_flat_and_cyclic_spaces_are_kept(m1, m2):
    assert ds.containment_check(m1, m2).passed


@pytest.mark.parametrize("m1, m2", PAIRS)
def test_circuits_of_sum(m1, m2):
    report = ds.circuits_of_sum_check(m1, m2)
    assert report.passed, report.violation
    assert report.details["circuits"] == report.details["minimal"]


def test_sum_is_associative():
    a, b, c = qm.uniform(2, 1, 1), qm.uniform(2, 2, 1), qm.uniform(2, 2, 0)
    assert ds.associativity_check(a, b, c).passed


def test_sum_of_gf8_representations(m1_matroid, m2_matroid, sum_m_matroid):
    assert sum_m_matroid.n == 7
    assert sum_m_matroid.full_rank == 4
    family = family_of(sum_m_matroid)
    assert len(family) == 10
    product = ds.zflats_of_sum(m1_matroid, m2_matroid)
    assert family.members == product.members


def test_sampled_agreement_on_the_gf8_sum(m1_matroid, m2_matroid):
    report = ds.strategy_agreement_check(m1_matroid, m2_matroid, mode="sampled", seed=5, sample_size=300)
    assert report.passed
    assert report.checked == 300


@pytest.mark.slow
def test_family_scan_matches_the_product(m1_matroid, m2_matroid):
    naive = ds.direct_sum(m1_matroid, m2_matroid, "naive")
    assert compute_zflats(naive, shards=1).members == ds.zflats_of_sum(m1_matroid, m2_matroid).members


def test_block_diagonal_against_the_sum(gf8):
    G1 = matrix(gf8, [["1", "0", "w3"], ["0", "1", "w"]])
    G2 = matrix(gf8, [["1", "0", "w3", "w"], ["0", "1", "w4", "w2"]])
    report = ds.block_diag_compare(G1, G2, gf8, q=2)
    assert report.passed, report.violation
    assert report.details["cyclic_flats_of_sum"] == 10
    assert report.details["independent_n"] <= report.details["independent_sum"]


def test_block_diagonal_with_an_empty_block(gf8):
    report = ds.block_diag_compare(matrix(gf8, [["1", "w", "w2"]]), [], gf8, q=2)
    assert report.passed
    assert report.details["single_block"]


def test_block_diag_layout():
    assert ds.block_diag([[1, 2]], [[3]], 2, 1) == [[1, 2, 0], [0, 0, 3]]


def test_direct_sum_all_folds_left():
    parts = [qm.uniform(2, 1, 1), qm.uniform(2, 1, 0), qm.uniform(2, 2, 1)]
    total = ds.direct_sum_all(parts)
    assert total.n == 4
    assert total.full_rank == 2
    with pytest.raises(SpecError):
        ds.direct_sum_all(parts[:1])


def test_direct_sum_errors():
    with pytest.raises(FieldMismatch):
        ds.direct_sum(qm.uniform(2, 1, 1), qm.uniform(3, 1, 1))
    with pytest.raises(SpecError):
        ds.direct_sum(qm.uniform(2, 1, 1), qm.uniform(2, 1, 1), strategy="greedy")


def test_union_of_uniforms():
    u = ds.union(qm.uniform(2, 3, 1), qm.uniform(2, 3, 1))
    for v in all_subspaces(u):
        assert u.rank(v) == min(2, v.dim)
    with pytest.raises(GroundMismatch):
        ds.union(qm.uniform(2, 3, 1), qm.uniform(2, 4, 1))
