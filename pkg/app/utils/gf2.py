"""Bit-packed linear algebra over GF(2).

Rows are Python ints. Coordinate i of GF(2)^n is bit n-1-i, so the leading
(highest) set bit of a row is its pivot column.
"""

from typing import Iterable, List, Tuple


def rref(rows: Iterable[int]) -> Tuple[int, ...]:
    """Reduced row echelon basis, rows ordered by pivot column."""
    basis: List[int] = []
    for r in rows:
        for b in basis:
            # b's leading bit is set in r
            if r ^ b < r:
                r ^= b
        if r:
            top = 1 << (r.bit_length() - 1)
            basis = [b ^ r if b & top else b for b in basis]
            basis.append(r)
    basis.sort(reverse=True)
    return tuple(basis)


def rank(rows: Iterable[int]) -> int:
    basis: List[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    return len(basis)


def echelon(rows: Iterable[int]) -> List[int]:
    """Echelon basis sorted by descending leading bit (not reduced)."""
    basis: List[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    return basis


def reduce(vector: int, basis: List[int]) -> int:
    """Remainder of `vector` against an echelon basis from `echelon`."""
    for b in basis:
        vector = min(vector, vector ^ b)
    return vector


def pivots(basis: Tuple[int, ...], n: int) -> List[int]:
    return [n - b.bit_length() for b in basis]


def kernel(basis: Tuple[int, ...], n: int) -> Tuple[int, ...]:
    """Right kernel of an RREF basis under the standard dot product."""
    pivot_cols = pivots(basis, n)
    pivot_set = set(pivot_cols)
    out = []
    for f in range(n):
        if f in pivot_set:
            continue
        fbit = 1 << (n - 1 - f)
        v = fbit
        for row, p in zip(basis, pivot_cols):
            if row & fbit:
                v |= 1 << (n - 1 - p)
        out.append(v)
    return rref(out)


def dot(a: int, b: int) -> int:
    return bin(a & b).count("1") & 1
