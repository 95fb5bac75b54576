from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from app.core.setting import DATABASE_URL


def get_sync_url(url: str) -> str:
    """URL을 동기 드라이버 URL로 변환"""
    if url.startswith("postgres://"):
        url = url.replace("postgres://", "postgresql://", 1)
    if url.startswith("postgresql://"):
        return url.replace("postgresql://", "postgresql+psycopg2://", 1)
    return url


def make_engine(url: str = DATABASE_URL):
    return create_engine(get_sync_url(url), echo=False)


# 동기 엔진 및 세션 설정
sync_engine = make_engine()
SyncSessionLocal = sessionmaker(
    autocommit=False, autoflush=False, bind=sync_engine
)
