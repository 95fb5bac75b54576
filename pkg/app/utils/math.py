from functools import lru_cache
from typing import List, Sequence


# 가우스 이항계수

@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def subspace_count(q: int, n: int) -> int:
    return sum(gaussian_binomial(n, k, q) for k in range(n + 1))


def projective_count(q: int, d: int) -> int:
    """Number of 1-dimensional subspaces of GF(q)^d."""
    return (q ** d - 1) // (q - 1)


# Vectors are packed base-q with coordinate 0 as the most significant digit,
# so integer order is lexicographic order on coordinate tuples. For q = 2 this
# is a plain bitmask.

def pack(vector: Sequence[int], q: int) -> int:
    value = 0
    for entry in vector:
        value = value * q + entry
    return value


def unpack(value: int, q: int, n: int) -> List[int]:
    if q == 2:
        return [(value >> (n - 1 - i)) & 1 for i in range(n)]
    digits = [0] * n
    for i in range(n - 1, -1, -1):
        value, digits[i] = divmod(value, q)
    return digits
