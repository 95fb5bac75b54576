import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import galois
import numpy as np

from app.core.exceptions import (
    DivisionByZero,
    FieldElementError,
    NoDefaultModulus,
    NotPrime,
    Reducible,
    SpecError,
)

logger = logging.getLogger(__name__)

# Integer index 0..p^m-1: the coefficient vector of the residue read as base-p
# digits, constant term least significant (galois' integer representation).
FieldElement = int

# Coefficients from the constant term upward. Pinned verbatim, the worked
# examples depend on these exact primitive elements.
DEFAULT_MODULI = {
    (2, 3): (1, 1, 0, 1),  # w^3 + w + 1
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),  # w^16 + w^5 + w^3 + w^2 + 1
    (3, 2): (2, 2, 1),  # w^2 + 2w + 2
}

_POWER_TOKEN = re.compile(r"^(?:w|ω)(?:\^?(\d+))?$")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: Tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p ** self.m

    @property
    def gf(self) -> "type[galois.FieldArray]":
        return _galois_field(self.p, self.m, self.modulus)

    @property
    def omega(self) -> FieldElement:
        """The residue class of x, written w in matrix files."""
        return self.p if self.m > 1 else 1

    def check(self, a: FieldElement) -> FieldElement:
        if not isinstance(a, (int, np.integer)) or not 0 <= a < self.order:
            raise FieldElementError(f"{a!r} is not an element of GF({self.order})")
        return int(a)

    def array(self, matrix) -> "galois.FieldArray":
        return self.gf(np.asarray(matrix, dtype=np.int64))

    def to_dict(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}


@lru_cache(maxsize=None)
def _galois_field(p: int, m: int, modulus: Tuple[int, ...]):
    if m == 1:
        return galois.GF(p)
    poly = galois.Poly(list(reversed(modulus)), field=galois.GF(p))
    logger.debug(f"building GF({p}^{m}) with modulus {poly}")
    return galois.GF(p ** m, irreducible_poly=poly)


def create_field(p: int, m: int, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    if p < 2 or not galois.is_prime(p):
        raise NotPrime(f"characteristic {p} is not prime")
    if m < 1:
        raise SpecError(f"extension degree must be at least 1, got {m}")

    if m == 1:
        return FieldSpec(p, 1, (0, 1))

    if modulus is None:
        modulus = DEFAULT_MODULI.get((p, m))
        if modulus is None:
            try:
                conway = galois.conway_poly(p, m)
            except LookupError as e:
                raise NoDefaultModulus(f"no built-in modulus for GF({p}^{m})") from e
            modulus = tuple(int(c) for c in reversed(conway.coeffs))
    modulus = tuple(int(c) for c in modulus)

    if len(modulus) != m + 1 or modulus[-1] != 1:
        raise SpecError(f"modulus must be monic of degree {m}, got {list(modulus)}")
    if any(not 0 <= c < p for c in modulus):
        raise SpecError(f"modulus coefficients must lie in 0..{p - 1}")

    poly = galois.Poly(list(reversed(modulus)), field=galois.GF(p))
    if not poly.is_irreducible():
        raise Reducible(f"{poly} is reducible over GF({p})")
    return FieldSpec(p, m, modulus)


def field_arithmetic(spec: FieldSpec, a: FieldElement, b: FieldElement, kind: str) -> FieldElement:
    a, b = spec.check(a), spec.check(b)
    gf = spec.gf
    x, y = gf(a), gf(b)
    if kind == "add":
        return int(x + y)
    if kind == "sub":
        return int(x - y)
    if kind == "mul":
        return int(x * y)
    if kind == "div":
        if b == 0:
            raise DivisionByZero(f"division by zero in GF({spec.order})")
        return int(x / y)
    raise SpecError(f"unknown arithmetic kind {kind!r}")


def power(spec: FieldSpec, a: FieldElement, e: int) -> FieldElement:
    a = spec.check(a)
    if e < 0:
        raise FieldElementError(f"exponent must be non-negative, got {e}")
    return int(spec.gf(a) ** e)


def parse_element(spec: FieldSpec, token: Union[str, int]) -> FieldElement:
    """Read a matrix entry: an integer index, or a power of w like "w5" / "w^5"."""
    if isinstance(token, int):
        return spec.check(token)
    text = token.strip()
    if text.isdigit():
        return spec.check(int(text))
    match = _POWER_TOKEN.match(text)
    if match is None:
        raise SpecError(f"cannot read field element {token!r}")
    if spec.m == 1:
        raise SpecError(f"{token!r}: powers of w need an extension field")
    exponent = int(match.group(1)) if match.group(1) else 1
    return power(spec, spec.omega, exponent)
