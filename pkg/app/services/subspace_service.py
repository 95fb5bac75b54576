import builtins
import itertools
import logging
import random
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from app.core.exceptions import DimensionMismatch, NotASubspace, NotPrime, SingularAlpha, ZeroSpace
from app.utils import gf2, gfp
from app.utils.math import gaussian_binomial, pack, unpack

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(q)^n stored as its packed RREF basis.

    Packed rows are base-q integers with coordinate 0 most significant, so the
    (q, n, basis) triple is the canonical form, the equality and the hash key.
    """

    q: int
    n: int
    basis: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def rows(self) -> List[List[int]]:
        return [unpack(r, self.q, self.n) for r in self.basis]

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (len(self.basis), self.basis)

    def __lt__(self, other: "Subspace") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"Subspace(q={self.q}, n={self.n}, rows={self.rows})"

    def to_dict(self) -> dict:
        return {"q": self.q, "n": self.n, "rows": self.rows}

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return len(self.basis) == self.n

    def contains(self, other: "Subspace") -> bool:
        """other <= self"""
        _same_ground(self, other)
        if other.dim > self.dim:
            return False
        return dim_sum(self, other) == self.dim

    def contains_vector(self, vector: int) -> bool:
        return rank_of(self.q, self.n, self.basis + (vector,)) == self.dim

    @classmethod
    def zero(cls, q: int, n: int) -> "Subspace":
        return cls(q, n, ())

    @classmethod
    def full(cls, q: int, n: int) -> "Subspace":
        return cls(q, n, tuple(q ** (n - 1 - i) for i in range(n)))


def _check_ground(q: int, n: int) -> None:
    if q < 2 or any(q % d == 0 for d in range(2, int(q ** 0.5) + 1)):
        raise NotPrime(f"ground field order {q} is not a prime")
    if n < 0:
        raise DimensionMismatch(f"ambient dimension must be non-negative, got {n}")


def _same_ground(u: Subspace, v: Subspace) -> None:
    if u.q != v.q or u.n != v.n:
        raise DimensionMismatch(
            f"subspaces live in different spaces: GF({u.q})^{u.n} vs GF({v.q})^{v.n}"
        )


def canonical(q: int, n: int, packed_rows: Sequence[int]) -> Tuple[int, ...]:
    if q == 2:
        return gf2.rref(packed_rows)
    reduced = gfp.rref([unpack(r, q, n) for r in packed_rows], q)
    return tuple(pack(r, q) for r in reduced)


def rank_of(q: int, n: int, packed_rows: Sequence[int]) -> int:
    if q == 2:
        return gf2.rank(packed_rows)
    return gfp.rank([unpack(r, q, n) for r in packed_rows], q)


def from_packed(q: int, n: int, packed_rows: Sequence[int]) -> Subspace:
    return Subspace(q, n, canonical(q, n, packed_rows))


def span(q: int, n: int, rows: Sequence[Sequence[int]]) -> Subspace:
    _check_ground(q, n)
    packed = []
    for row in rows:
        if len(row) != n:
            raise DimensionMismatch(f"row {list(row)} has length {len(row)}, expected {n}")
        if any(not isinstance(x, int) or not 0 <= x < q for x in row):
            raise DimensionMismatch(f"row {list(row)} has entries outside 0..{q - 1}")
        packed.append(pack(row, q))
    return from_packed(q, n, packed)


def sum(u: Subspace, v: Subspace) -> Subspace:  # noqa: A001 - lattice join
    _same_ground(u, v)
    if not u.basis:
        return v
    if not v.basis:
        return u
    return from_packed(u.q, u.n, u.basis + v.basis)


def dim_sum(u: Subspace, v: Subspace) -> int:
    return rank_of(u.q, u.n, u.basis + v.basis)


def orthogonal(v: Subspace) -> Subspace:
    if v.q == 2:
        return Subspace(2, v.n, gf2.kernel(v.basis, v.n))
    reduced = gfp.kernel([tuple(r) for r in v.rows], v.n, v.q)
    return Subspace(v.q, v.n, tuple(pack(r, v.q) for r in reduced))


def intersect(u: Subspace, v: Subspace) -> Subspace:
    _same_ground(u, v)
    if not u.basis or not v.basis:
        return Subspace.zero(u.q, u.n)
    if u.q == 2:
        return orthogonal(sum(orthogonal(u), orthogonal(v)))
    reduced = gfp.intersect(u.rows, v.rows, u.n, u.q)
    return Subspace(u.q, u.n, tuple(pack(r, u.q) for r in reduced))


def add_vector(v: Subspace, vector: int) -> Subspace:
    return from_packed(v.q, v.n, v.basis + (vector,))


def pivot_columns(v: Subspace) -> List[int]:
    if v.q == 2:
        return gf2.pivots(v.basis, v.n)
    return gfp.pivots([tuple(r) for r in v.rows])


def _free_columns(v: Subspace) -> List[int]:
    used = set(pivot_columns(v))
    return [c for c in range(v.n) if c not in used]


def _normalized_vectors(q: int, positions: Sequence[int], n: int) -> Iterator[int]:
    """Nonzero vectors supported on `positions`, first nonzero entry 1."""
    weights = [q ** (n - 1 - c) for c in positions]
    if q == 2:
        vectors = [0]
        for w in reversed(weights):
            vectors = vectors + [x | w for x in vectors]
        yield from sorted(vectors[1:])
        return
    for lead in range(len(weights)):
        tail = weights[lead + 1:]
        for digits in itertools.product(range(q), repeat=len(tail)):
            yield weights[lead] + builtins.sum(d * w for d, w in zip(digits, tail))


def quotient_lines(v: Subspace) -> Iterator[int]:
    """One representative per line of E/V, supported on the non-pivot columns."""
    return _normalized_vectors(v.q, _free_columns(v), v.n)


def lines_outside(v: Subspace) -> Iterator[int]:
    """One representative per 1-dimensional subspace of E not inside V."""
    members = list(vectors_of(v))
    for c in quotient_lines(v):
        for x in members:
            yield _add_packed(v.q, v.n, c, x)


def _add_packed(q: int, n: int, a: int, b: int) -> int:
    if q == 2:
        return a ^ b
    return pack([(x + y) % q for x, y in zip(unpack(a, q, n), unpack(b, q, n))], q)


def vectors_of(v: Subspace) -> Iterator[int]:
    """Every vector of V (q^dim of them), zero first."""
    q, n = v.q, v.n
    if q == 2:
        vectors = [0]
        for b in v.basis:
            vectors = vectors + [x ^ b for x in vectors]
        yield from vectors
        return
    rows = v.rows
    for coeffs in itertools.product(range(q), repeat=len(rows)):
        out = [0] * n
        for c, row in zip(coeffs, rows):
            if c:
                out = [(a + c * b) % q for a, b in zip(out, row)]
        yield pack(out, q)


def hyperplanes_of(v: Subspace) -> Iterator[Subspace]:
    """Codimension-1 subspaces of V, one per projective class of functionals."""
    d = v.dim
    if d == 0:
        raise ZeroSpace("the zero space has no hyperplanes")
    q, n = v.q, v.n
    if q == 2:
        rows = v.basis
        for mask in range(1, 1 << d):
            # functional f = bits of mask over V-coordinates, pivot = lowest index with f = 1
            p = d - mask.bit_length()
            rp = rows[p]
            kernel_rows = []
            for i in range(d):
                if i == p:
                    continue
                if (mask >> (d - 1 - i)) & 1:
                    kernel_rows.append(rows[i] ^ rp)
                else:
                    kernel_rows.append(rows[i])
            yield Subspace(2, n, gf2.rref(kernel_rows))
        return
    rows = v.rows
    for p in range(d):
        for tail in itertools.product(range(q), repeat=d - p - 1):
            f = [0] * p + [1] + list(tail)
            kernel_rows = []
            for i in range(d):
                if i == p:
                    continue
                c = f[i]
                kernel_rows.append([(a - c * b) % q for a, b in zip(rows[i], rows[p])])
            yield span(q, n, kernel_rows)


def enumerate_subspaces(
    q: int,
    n: int,
    dim_filter: Optional[int] = None,
    shard: Optional[Tuple[int, int]] = None,
) -> Iterator[Subspace]:
    """Every subspace of GF(q)^n once: by dimension, then pivot pattern, then free entries.

    `shard=(k, S)` keeps the items whose position in that order is k modulo S.
    """
    _check_ground(q, n)
    k, shards = shard if shard is not None else (0, 1)
    dims = [dim_filter] if dim_filter is not None else range(n + 1)
    position = 0
    for d in dims:
        if d < 0 or d > n:
            continue
        for pivots in itertools.combinations(range(n), d):
            pivot_set = set(pivots)
            base = [q ** (n - 1 - p) for p in pivots]
            free = [
                (i, q ** (n - 1 - c))
                for i, p in enumerate(pivots)
                for c in range(p + 1, n)
                if c not in pivot_set
            ]
            block = q ** len(free)
            start = (k - position) % shards
            position += block
            if start >= block:
                continue
            values = itertools.islice(itertools.product(range(q), repeat=len(free)), start, None, shards)
            for entries in values:
                rows = list(base)
                for (i, w), e in zip(free, entries):
                    if e:
                        rows[i] += e * w
                yield Subspace(q, n, tuple(rows))


def count_subspaces(q: int, n: int, dim_filter: Optional[int] = None) -> int:
    if dim_filter is not None:
        return gaussian_binomial(n, dim_filter, q)
    return builtins.sum(gaussian_binomial(n, d, q) for d in range(n + 1))


def random_subspace(q: int, n: int, rng: random.Random, dim: Optional[int] = None) -> Subspace:
    """Uniform over all subspaces (or over those of dimension `dim`)."""
    if dim is None:
        weights = [gaussian_binomial(n, d, q) for d in range(n + 1)]
        dim = rng.choices(range(n + 1), weights=weights)[0]
    while True:
        rows = [rng.randrange(q ** n) for _ in range(dim)]
        if rank_of(q, n, rows) == dim:
            return from_packed(q, n, rows)


class QuotientCoordinates:
    """E/X realised as GF(q)^(n - dim X) on the non-pivot columns of X."""

    def __init__(self, x: Subspace):
        self.x = x
        self.q = x.q
        self.n = x.n
        self.free = _free_columns(x)
        self.pivots = pivot_columns(x)
        self.x_rows = x.rows
        self.dim = len(self.free)

    def _reduce(self, vector: int) -> int:
        q, n = self.q, self.n
        if q == 2:
            for b in self.x.basis:
                if vector ^ b < vector:
                    vector ^= b
            return vector
        digits = unpack(vector, q, n)
        for row, p in zip(self.x_rows, self.pivots):
            c = digits[p]
            if c:
                digits = [(a - c * b) % q for a, b in zip(digits, row)]
        return pack(digits, q)

    def project(self, v: Subspace) -> Subspace:
        _same_ground(v, self.x)
        q, n = self.q, self.n
        out = []
        for r in v.basis:
            digits = unpack(self._reduce(r), q, n)
            out.append(pack([digits[c] for c in self.free], q))
        return from_packed(q, self.dim, out)

    def lift(self, w: Subspace) -> Subspace:
        if w.q != self.q or w.n != self.dim:
            raise DimensionMismatch(f"expected a subspace of GF({self.q})^{self.dim}")
        q, n = self.q, self.n
        out = list(self.x.basis)
        for digits in w.rows:
            full = [0] * n
            for c, e in zip(self.free, digits):
                full[c] = e
            out.append(pack(full, q))
        return from_packed(q, n, out)


def quotient_coords(x: Subspace) -> Tuple[Callable[[Subspace], Subspace], Callable[[Subspace], Subspace]]:
    coords = QuotientCoordinates(x)
    return coords.project, coords.lift


def combine(q: int, n: int, rows: Sequence[int], local: int) -> int:
    """The combination of `rows` whose coefficients are the digits of `local`."""
    k = len(rows)
    if q == 2:
        out = 0
        for i, r in enumerate(rows):
            if (local >> (k - 1 - i)) & 1:
                out ^= r
        return out
    coeffs = unpack(local, q, k)
    out = [0] * n
    for c, r in zip(coeffs, rows):
        if c:
            out = [(a + c * b) % q for a, b in zip(out, unpack(r, q, n))]
    return pack(out, q)


class BasisEmbedding:
    """GF(q)^k -> GF(q)^n sending e_i to the i-th basis row, with its inverse on the image."""

    def __init__(self, q: int, n: int, basis_rows: Sequence[int]):
        self.q = q
        self.n = n
        self.rows = tuple(basis_rows)
        self.k = len(self.rows)
        if rank_of(q, n, self.rows) != self.k:
            raise NotASubspace("embedding basis rows are linearly dependent")
        k = self.k
        # [B | I] reduced; reducing (v | 0) leaves (0 | -coordinates)
        self._augmented = canonical(
            q, n + k, [r * q ** k + q ** (k - 1 - i) for i, r in enumerate(self.rows)]
        )
        self.image = from_packed(q, n, self.rows)

    @classmethod
    def of(cls, x: Subspace) -> "BasisEmbedding":
        return cls(x.q, x.n, x.basis)

    def push_vector(self, local: int) -> int:
        return combine(self.q, self.n, self.rows, local)

    def push(self, v: Subspace) -> Subspace:
        if v.q != self.q or v.n != self.k:
            raise DimensionMismatch(f"expected a subspace of GF({self.q})^{self.k}")
        return from_packed(self.q, self.n, [self.push_vector(r) for r in v.basis])

    def pull_vector(self, vector: int) -> int:
        q, n, k = self.q, self.n, self.k
        width = n + k
        if q == 2:
            x = vector << k
            for r in self._augmented:
                if x ^ r < x:
                    x ^= r
            if x >> k:
                raise NotASubspace("vector is not in the embedded subspace")
            return x & ((1 << k) - 1)
        digits = unpack(vector * q ** k, q, width)
        for r in self._augmented:
            row = unpack(r, q, width)
            p = next(i for i, e in enumerate(row) if e)
            c = digits[p]
            if c:
                digits = [(a - c * b) % q for a, b in zip(digits, row)]
        if any(digits[:n]):
            raise NotASubspace("vector is not in the embedded subspace")
        return pack([(-e) % q for e in digits[n:]], q)

    def pull(self, v: Subspace) -> Subspace:
        if not self.image.contains(v):
            raise NotASubspace("subspace is not contained in the embedded subspace")
        return from_packed(self.q, self.k, [self.pull_vector(r) for r in v.basis])


class LinearMap:
    """x -> A x on column vectors of GF(q)^n."""

    def __init__(self, q: int, n: int, matrix: Sequence[Sequence[int]]):
        if len(matrix) != n or any(len(line) != n for line in matrix):
            raise DimensionMismatch(f"expected an {n}x{n} matrix")
        self.q = q
        self.n = n
        self.matrix = [[x % q for x in line] for line in matrix]
        # column j packed, the image of e_j
        self.columns = [pack([self.matrix[i][j] for i in range(n)], q) for j in range(n)]
        if rank_of(q, n, self.columns) != n:
            raise SingularAlpha("matrix is not invertible")

    @classmethod
    def identity(cls, q: int, n: int) -> "LinearMap":
        return cls(q, n, [[int(i == j) for j in range(n)] for i in range(n)])

    def apply_vector(self, vector: int) -> int:
        q, n = self.q, self.n
        if q == 2:
            out = 0
            for j in range(n):
                if (vector >> (n - 1 - j)) & 1:
                    out ^= self.columns[j]
            return out
        return pack(gfp.mat_vec(self.matrix, unpack(vector, q, n), q), q)

    def apply(self, v: Subspace) -> Subspace:
        if v.q != self.q or v.n != self.n:
            raise DimensionMismatch("linear map and subspace live in different spaces")
        return from_packed(self.q, self.n, [self.apply_vector(r) for r in v.basis])

    def to_rows(self) -> List[List[int]]:
        return [list(line) for line in self.matrix]


def subspaces_of(v: Subspace, dim_filter: Optional[int] = None) -> Iterator[Subspace]:
    """Every subspace of V, in the enumeration order of its own coordinates."""
    embedding = BasisEmbedding.of(v)
    for local in enumerate_subspaces(v.q, v.dim, dim_filter):
        yield embedding.push(local)
