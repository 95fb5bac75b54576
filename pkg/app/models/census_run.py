from sqlalchemy import Column, Float, Integer, String

from app.db.base import Base


class CensusRun(Base):
    label = Column(String, nullable=True, index=True)
    descriptor = Column(String, nullable=False)
    spec_digest = Column(String(64), nullable=True, index=True)
    q = Column(Integer, nullable=False)
    n = Column(Integer, nullable=False)
    shards = Column(Integer, nullable=False)
    total = Column(Integer, nullable=False)
    elapsed_ms = Column(Float, nullable=True)

    # census counts
    flats = Column(Integer, nullable=False)
    cyclic = Column(Integer, nullable=False)
    cyclic_flats = Column(Integer, nullable=False)
    independent = Column(Integer, nullable=False)
    dependent = Column(Integer, nullable=False)
    circuits = Column(Integer, nullable=False)
    bases = Column(Integer, nullable=False)
