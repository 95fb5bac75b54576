"""Linear algebra over a prime field GF(p) on plain integer lists."""

from typing import Iterable, List, Sequence, Tuple


Row = Tuple[int, ...]


def rref(rows: Iterable[Sequence[int]], p: int) -> List[Row]:
    """Reduced row echelon basis, zero rows dropped, rows ordered by pivot."""
    matrix = [list(r) for r in rows]
    if not matrix:
        return []
    n = len(matrix[0])
    pivot_row = 0
    for col in range(n):
        sel = None
        for i in range(pivot_row, len(matrix)):
            if matrix[i][col] % p:
                sel = i
                break
        if sel is None:
            continue
        matrix[pivot_row], matrix[sel] = matrix[sel], matrix[pivot_row]
        row = matrix[pivot_row]
        inv = pow(row[col], -1, p)
        row[:] = [(x * inv) % p for x in row]
        for i in range(len(matrix)):
            if i != pivot_row:
                c = matrix[i][col] % p
                if c:
                    other = matrix[i]
                    matrix[i] = [(a - c * b) % p for a, b in zip(other, row)]
        pivot_row += 1
        if pivot_row == len(matrix):
            break
    return [tuple(r) for r in matrix[:pivot_row]]


def rank(rows: Iterable[Sequence[int]], p: int) -> int:
    return len(rref(rows, p))


def pivots(basis: Sequence[Row]) -> List[int]:
    return [next(i for i, x in enumerate(row) if x) for row in basis]


def kernel(basis: Sequence[Row], n: int, p: int) -> List[Row]:
    """Right kernel of an RREF basis under the standard dot product."""
    pivot_cols = pivots(basis)
    pivot_set = set(pivot_cols)
    out = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [0] * n
        v[f] = 1
        for row, piv in zip(basis, pivot_cols):
            v[piv] = (-row[f]) % p
        out.append(v)
    return rref(out, p)


def intersect(a: Sequence[Row], b: Sequence[Row], n: int, p: int) -> List[Row]:
    """Zassenhaus: row reduce [[A, A], [B, 0]] and read the bottom-right block."""
    blocks = [list(r) + list(r) for r in a] + [list(r) + [0] * n for r in b]
    if not blocks:
        return []
    reduced = rref(blocks, p)
    out = [row[n:] for row in reduced if not any(row[:n])]
    return rref(out, p)


def mat_vec(matrix: Sequence[Sequence[int]], vector: Sequence[int], p: int) -> Row:
    return tuple(sum(a * b for a, b in zip(line, vector)) % p for line in matrix)


def det_is_zero(matrix: Sequence[Sequence[int]], p: int) -> bool:
    return rank(matrix, p) < len(matrix)
