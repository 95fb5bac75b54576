import pytest
from hypothesis import settings as hypothesis_settings
from sqlalchemy.orm import sessionmaker

from app.db.base import create_tables
from app.db.session import make_engine
from app.tests.helpers import load_fixture

hypothesis_settings.register_profile("qmat", max_examples=60, deadline=None)
hypothesis_settings.load_profile("qmat")


@pytest.fixture(scope="session")
def five_flats_matroid():
    return load_fixture("zdefined_f2_8_five_flats.json")


@pytest.fixture(scope="session")
def m1_matroid():
    return load_fixture("representable_gf8_m1.json")


@pytest.fixture(scope="session")
def m2_matroid():
    return load_fixture("representable_gf8_m2.json")


@pytest.fixture(scope="session")
def block_n_matroid():
    return load_fixture("representable_gf8_block_n.json")


@pytest.fixture(scope="session")
def sum_m_matroid():
    return load_fixture("dsum_gf8_m.json")


@pytest.fixture(scope="session")
def field_spread_matroid():
    return load_fixture("spread_f3_4_field.json")


@pytest.fixture(scope="session")
def hall_spread_matroid():
    return load_fixture("spread_f3_4_hall.json")


@pytest.fixture(scope="session")
def single_flat_matroid():
    return load_fixture("representable_f2_3_single_flat.json")


@pytest.fixture
def db_session():
    """Census archive on an in-memory SQLite database."""
    engine = make_engine("sqlite://")
    create_tables(engine)
    session = sessionmaker(autocommit=False, autoflush=False, bind=engine)()
    try:
        yield session
    finally:
        session.close()
        engine.dispose()


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    # 샤드는 그대로, 프로세스 풀은 필요한 테스트에서만
    from app.core.config import settings

    monkeypatch.setattr(settings, "MAX_WORKERS", 1)
