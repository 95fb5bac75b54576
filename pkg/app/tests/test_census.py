from concurrent.futures.process import BrokenProcessPool

import pytest

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, DimensionMismatch, WorkerPoolError
from app.services import qmatroid_service as qm
from app.services import sharding, spec_service
from app.services.census_service import census, verify_representation
from app.services.field_service import create_field, parse_element
from app.tests.helpers import fixture_file


def matrix_of(name):
    spec = spec_service.load_spec(fixture_file(name))
    field = create_field(spec.ext.p, spec.ext.m, spec.ext.modulus)
    return field, [[parse_element(field, x) for x in row] for row in spec.G]


def test_census_of_m1(m1_matroid):
    report = census(m1_matroid, shards=2)
    assert report.total == 16
    assert report.counts.as_row() == [7, 2, 2, 14, 2, 1, 6]
    assert report.csv_row() == "7,2,2,14,2,1,6"
    assert report.elapsed_ms is None


def test_census_of_m2(m2_matroid):
    report = census(m2_matroid, shards=3, timing=True)
    assert report.counts.as_row() == [11, 11, 5, 48, 19, 9, 32]
    assert report.elapsed_ms is not None


def test_census_of_the_gf8_sum(sum_m_matroid):
    report = census(sum_m_matroid)
    assert report.total == 29212
    assert report.counts.as_row() == [7541, 412, 10, 24861, 4351, 355, 10416]
    assert report.fast_paths == ["family-formula"]


@pytest.mark.slow
def test_census_of_block_n(block_n_matroid):
    assert census(block_n_matroid).counts.as_row() == [2201, 124, 40, 24108, 5104, 73, 9792]


@pytest.mark.slow
def test_census_of_five_flats(five_flats_matroid):
    report = census(five_flats_matroid)
    assert report.total == 417199
    assert report.counts.as_row() == [99597, 105097, 5, 307905, 109294, 94079, 199775]


def test_census_of_the_free_q_matroid():
    report = census(qm.uniform(2, 3, 3), shards=1)
    assert report.counts.as_row() == [16, 1, 1, 16, 0, 0, 1]


def test_census_of_the_trivial_q_matroid():
    report = census(qm.uniform(3, 2, 0), shards=1)
    assert report.counts.as_row() == [1, 6, 1, 1, 5, 4, 1]


def test_shard_count_and_cache_do_not_change_counts(m2_matroid):
    expected = census(m2_matroid, shards=1).counts
    assert census(m2_matroid, shards=7).counts == expected
    assert census(m2_matroid, shards=2, use_cache=False).counts == expected


def test_census_on_worker_processes(monkeypatch, m2_matroid):
    monkeypatch.setattr(settings, "MAX_WORKERS", 2)
    assert census(m2_matroid, shards=2).counts.as_row() == [11, 11, 5, 48, 19, 9, 32]


def test_verify_on_worker_processes(monkeypatch):
    monkeypatch.setattr(settings, "MAX_WORKERS", 2)
    target = spec_service.load_oracle(fixture_file("representable_gf9_spread.json"))
    field, G = matrix_of("representable_gf9_spread.json")
    report = verify_representation(target, G, field, shards=3)
    assert report.passed
    assert report.checked == report.total == 212


class _DeadPool:
    def __init__(self, *args, **kwargs):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def submit(self, *args):
        raise BrokenProcessPool("A child process terminated abruptly")


def test_dead_worker_pool_is_reported(monkeypatch, m2_matroid):
    monkeypatch.setattr(settings, "MAX_WORKERS", 2)
    monkeypatch.setattr(sharding, "ProcessPoolExecutor", _DeadPool)
    with pytest.raises(WorkerPoolError) as info:
        census(m2_matroid, shards=2)
    assert info.value.detail["code"] == "WORKER_POOL_FAILED"
    assert info.value.exit_code == 1


def test_census_budget(five_flats_matroid):
    with pytest.raises(BudgetExceeded) as info:
        census(five_flats_matroid, shards=2, budget_ms=1e-6)
    assert info.value.exit_code == 3


def test_enumeration_budget(monkeypatch, m1_matroid):
    monkeypatch.setattr(settings, "ENUMERATION_BUDGET", 10)
    with pytest.raises(BudgetExceeded):
        census(m1_matroid)


def test_verify_gf9_representation():
    target = spec_service.load_oracle(fixture_file("representable_gf9_spread.json"))
    field, G = matrix_of("representable_gf9_spread.json")
    report = verify_representation(target, G, field, shards=2)
    assert report.passed
    assert report.checked == report.total == 212


def test_verify_reports_a_mismatch():
    field, G = matrix_of("representable_gf9_spread.json")
    report = verify_representation(qm.uniform(3, 4, 2), G, field, shards=1)
    assert not report.passed
    assert report.mismatch.check == "representation"
    assert report.mismatch.witnesses


def test_verify_needs_matching_columns(m1_matroid):
    field, G = matrix_of("representable_gf8_m2.json")
    with pytest.raises(DimensionMismatch):
        verify_representation(m1_matroid, G, field)


@pytest.mark.slow
def test_five_flats_is_representable_over_gf65536(five_flats_matroid):
    field, G = matrix_of("representable_f2_8_over_gf65536.json")
    report = verify_representation(five_flats_matroid, G, field)
    assert report.passed
    assert report.checked == 417199
