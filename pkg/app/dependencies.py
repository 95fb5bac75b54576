from contextlib import contextmanager
from typing import Generator, Iterator

from sqlalchemy.orm import Session, sessionmaker

from app.db.base import create_tables
from app.db.session import SyncSessionLocal


def get_db(factory: sessionmaker = SyncSessionLocal) -> Generator[Session, None, None]:
    db = factory()
    try:
        yield db
    finally:
        db.close()


@contextmanager
def archive_session(factory: sessionmaker = SyncSessionLocal) -> Iterator[Session]:
    """Census archive session; tables are created on first use."""
    create_tables(factory.kw["bind"])
    yield from get_db(factory)
