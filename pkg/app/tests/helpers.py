from pathlib import Path
from typing import List

from hypothesis import strategies as st

from app.services import dsum_service
from app.services import qmatroid_service as qm
from app.services import spec_service, spread_service
from app.services import subspace_service as ss

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_file(name: str) -> str:
    return str(FIXTURES / name)


def load_fixture(name: str) -> qm.RankOracle:
    return spec_service.load_oracle(FIXTURES / name)


def subspaces(q: int, n: int) -> st.SearchStrategy:
    """Spans of up to n random rows of GF(q)^n."""
    row = st.lists(st.integers(0, q - 1), min_size=n, max_size=n)
    return st.lists(row, max_size=n).map(lambda rows: ss.span(q, n, rows))


def oracle_zoo(q: int, n: int) -> List[qm.RankOracle]:
    """One of every oracle kind that lives on GF(q)^n.

    Uniforms, three random representables and a dual, a cyclic-flat family, a restriction and a
    contraction; from n >= 3 a direct sum, and at n = 4 a full and a partial spread.
    """
    zoo: List[qm.RankOracle] = [qm.uniform(q, n, k) for k in range(n + 1)]
    for seed in range(3):
        k = 1 + seed % max(1, n - 1)
        zoo.append(qm.random_representable(q, n, min(k, n), seed=seed))
    zoo.append(qm.dual(zoo[-1]))

    zero, full = ss.Subspace.zero(q, n), ss.Subspace.full(q, n)
    if n >= 4:
        plane = ss.span(q, n, [[int(j == i) for j in range(n)] for i in range(2)])
        zoo.append(qm.from_cyclic_flats(q, n, [(zero, 0), (plane, 1), (full, 2)]))
    elif n >= 2:
        zoo.append(qm.from_cyclic_flats(q, n, [(zero, 0), (full, 1)]))

    bigger = qm.random_representable(q, n + 1, max(1, n // 2), seed=5)
    tail = ss.span(q, n + 1, [[int(j == i) for j in range(n + 1)] for i in range(1, n + 1)])
    head = ss.span(q, n + 1, [[int(j == 0) for j in range(n + 1)]])
    zoo.append(qm.restriction(bigger, tail))
    zoo.append(qm.contraction(bigger, head))

    if n >= 3:
        zoo.append(dsum_service.direct_sum(qm.uniform(q, 1, 1), qm.random_representable(q, n - 1, 1, seed=7)))
    if n == 4:
        spread = spread_service.spread_tools(q, "desarguesian")
        zoo.append(qm.from_spread(q, spread))
        zoo.append(qm.from_spread(q, spread[:3]))
    return zoo


def all_subspaces(m: qm.RankOracle):
    return list(ss.enumerate_subspaces(m.q, m.n))
