"""Line spreads of GF(q)^4 from spread sets of 2x2 matrices."""

import logging
from typing import Iterable, List, Optional, Sequence

from app.core.exceptions import NotASpreadSet, SpecError
from app.services import subspace_service as ss
from app.services.field_service import create_field, field_arithmetic
from app.services.subspace_service import Subspace
from app.utils import gfp

logger = logging.getLogger(__name__)

Matrix2 = Sequence[Sequence[int]]


def _check_matrix(q: int, a: Matrix2) -> List[List[int]]:
    if len(a) != 2 or any(len(row) != 2 for row in a):
        raise NotASpreadSet(f"{a} is not a 2x2 matrix")
    if any(not isinstance(x, int) or not 0 <= x < q for row in a for x in row):
        raise NotASpreadSet(f"{a} has entries outside GF({q})")
    return [list(row) for row in a]


def _check_spread_set(q: int, matrices: Sequence[Matrix2]) -> List[List[List[int]]]:
    checked = [_check_matrix(q, a) for a in matrices]
    for i, a in enumerate(checked):
        for b in checked[i + 1:]:
            diff = [[(x - y) % q for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
            if gfp.det_is_zero(diff, q):
                raise NotASpreadSet(f"{a} - {b} is singular")
    return checked


def from_matrices(q: int, matrices: Sequence[Matrix2]) -> List[Subspace]:
    """rs(0|I) followed by rs(I|A) for every A."""
    checked = _check_spread_set(q, matrices)
    spread = [ss.span(q, 4, [[0, 0, 1, 0], [0, 0, 0, 1]])]
    for a in checked:
        spread.append(ss.span(q, 4, [[1, 0, a[0][0], a[0][1]], [0, 1, a[1][0], a[1][1]]]))
    return spread


def desarguesian_matrices(q: int) -> List[List[List[int]]]:
    """Multiplication by each element of GF(q^2) in the basis 1, w."""
    field = create_field(q, 2)
    omega = field.omega
    out = []
    for a in range(field.order):
        images = [a, field_arithmetic(field, a, omega, "mul")]
        # integer index = c0 + c1 q
        out.append([[x % q, x // q] for x in images])
    return out


def spread_tools(q: int, kind: str, data: Optional[Sequence[Matrix2]] = None) -> List[Subspace]:
    if kind == "from_matrices":
        if data is None:
            raise SpecError("from_matrices needs a list of 2x2 matrices")
        spread = from_matrices(q, data)
    elif kind == "desarguesian":
        spread = from_matrices(q, desarguesian_matrices(q))
    else:
        raise SpecError(f"unknown spread kind {kind!r}")
    logger.debug(f"{kind} spread over GF({q}) with {len(spread)} members")
    return spread


def partial_spreads(spread: Sequence[Subspace], sizes: Optional[Iterable[int]] = None) -> List[List[Subspace]]:
    """Leading sub-families of a spread, one per requested size."""
    sizes = range(len(spread) + 1) if sizes is None else sizes
    return [list(spread[:t]) for t in sizes if 0 <= t <= len(spread)]
