"""GF(2^b) arithmetic and univariate polynomials over it.

Field elements are plain Python ints whose binary digits are the coefficients
of a polynomial residue over GF(2); arithmetic is modulo a fixed irreducible
polynomial per extension degree.  Keeping one deterministic modulus per degree
makes every serialized matrix and every seeded random construction portable
across runs and machines.

Addition is XOR (characteristic 2, so subtraction is addition).  For b <= 16
multiplication goes through log/antilog tables built once per field; larger
degrees use carry-less shift-and-reduce, which is slower but only needed when
someone explicitly asks for a wide field.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels

MAX_DEGREE = 32
_TABLE_DEGREE_LIMIT = 16

# Smallest irreducible polynomial of each degree over GF(2), as a bit pattern
# including the leading x^b term.  Degree 8 is the Rijndael polynomial.
_IRREDUCIBLE = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
    17: 0x20009,
    18: 0x40009,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001B,
    25: 0x2000009,
    26: 0x400001B,
    27: 0x8000027,
    28: 0x10000003,
    29: 0x20000005,
    30: 0x40000003,
    31: 0x80000009,
    32: 0x10000008D,
}


def clmul_reduce(x: int, y: int, modulus: int, b: int) -> int:
    """Carry-less multiply of two degree-<b residues, reduced mod `modulus`."""
    acc = 0
    while y:
        if y & 1:
            acc ^= x
        x <<= 1
        y >>= 1
    for i in range(2 * b - 2, b - 1, -1):
        if (acc >> i) & 1:
            acc ^= modulus << (i - b)
    return acc


def poly_mod2(a: int, m: int) -> int:
    """Remainder of the GF(2)[x] division of bit-pattern a by m."""
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def is_irreducible(p: int) -> bool:
    """Exhaustive trial division by every factor of degree 1..deg(p)//2."""
    d = p.bit_length() - 1
    if d <= 0:
        return False
    for f in range(2, 1 << (d // 2 + 1)):
        if poly_mod2(p, f) == 0:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class Field:
    """The binary extension field GF(2^b) with a fixed irreducible modulus."""

    __slots__ = ("b", "modulus", "q", "_exp", "_log", "_exp_np", "_log_np")

    def __init__(self, b: int):
        if not 1 <= b <= MAX_DEGREE:
            raise ValueError(f"extension degree must be in 1..{MAX_DEGREE}, got {b}")
        self.b = b
        self.modulus = _IRREDUCIBLE[b]
        self.q = 1 << b
        if b <= _TABLE_DEGREE_LIMIT:
            if not is_irreducible(self.modulus):
                raise ValueError(f"modulus {self.modulus:#x} for degree {b} is reducible")
            self._build_tables()
        else:
            # Degree > 16: modulus taken on faith from the built-in table,
            # no log/antilog tables (they would need 2^b entries).
            self._exp = None
            self._log = None
            self._exp_np = None
            self._log_np = None

    def _build_tables(self) -> None:
        q1 = self.q - 1
        g = self._find_generator()
        exp = np.zeros(2 * q1 if q1 > 1 else 2, dtype=np.uint32)
        exp[0] = 1
        filled = 1
        while filled < q1:
            take = min(filled, q1 - filled)
            step = np.uint32(exp[filled - 1])
            step = clmul_reduce(int(step), g, self.modulus, self.b)
            block = kernels.gf_mul_nt_vec(
                exp[:take], np.full(take, step, dtype=np.uint32), self.b, self.modulus
            )
            exp[filled : filled + take] = block
            filled += take
        if len(set(exp[:q1].tolist())) != q1:
            raise AssertionError(f"generator {g} is not primitive for degree {self.b}")
        exp[q1 : 2 * q1] = exp[:q1]
        log = np.zeros(self.q, dtype=np.int64)
        log[exp[:q1]] = np.arange(q1)
        self._exp_np = exp
        self._log_np = log
        self._exp = exp.tolist()
        self._log = log.tolist()

    def _find_generator(self) -> int:
        q1 = self.q - 1
        if q1 == 1:
            return 1
        factors = _prime_factors(q1)
        for g in range(2, self.q):
            if all(self._pow_nt(g, q1 // p) != 1 for p in factors):
                return g
        raise AssertionError("no generator found")  # unreachable for a field

    def _pow_nt(self, x: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = clmul_reduce(r, x, self.modulus, self.b)
            x = clmul_reduce(x, x, self.modulus, self.b)
            e >>= 1
        return r

    # -- scalar arithmetic on raw int values ---------------------------------

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[x] + self._log[y]]
        return clmul_reduce(x, y, self.modulus, self.b)

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^b)")
        if self._exp is not None:
            return self._exp[self.q - 1 - self._log[x]]
        return self._pow_nt(x, self.q - 2)

    def pow(self, x: int, e: int) -> int:
        if e == 0:
            return 1
        if x == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[x] * e) % (self.q - 1)]
        return self._pow_nt(x, e)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.q))

    def random_value(self, rng: random.Random) -> int:
        return rng.getrandbits(self.b)

    # -- serialization and kernel plumbing ------------------------------------

    @property
    def hex_width(self) -> int:
        return (self.b + 3) // 4

    def format_value(self, v: int) -> str:
        return format(v, f"0{self.hex_width}x")

    def parse_value(self, s: str) -> int:
        v = int(s, 16)
        if not 0 <= v < self.q:
            raise ValueError(f"value {s!r} out of range for GF(2^{self.b})")
        return v

    def descriptor(self) -> str:
        return f"gf2^{self.b}:{self.modulus:x}"

    @staticmethod
    def from_descriptor(token: str) -> "Field":
        try:
            head, mod_hex = token.split(":")
            if not head.startswith("gf2^"):
                raise ValueError
            b = int(head[4:])
            modulus = int(mod_hex, 16)
        except ValueError:
            raise ValueError(f"malformed field descriptor {token!r}") from None
        field = field_new(b)
        if field.modulus != modulus:
            raise ValueError(
                f"descriptor modulus {modulus:#x} does not match the fixed "
                f"degree-{b} modulus {field.modulus:#x}"
            )
        return field

    def kernel_spec(self) -> tuple:
        """(bits, modulus, exp, log) consumed by the kernel backends."""
        return (self.b, self.modulus, self._exp_np, self._log_np)

    # -- identity -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.b == self.b and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash((self.b, self.modulus))

    def __repr__(self) -> str:
        return f"Field(gf2^{self.b})"


@functools.lru_cache(maxsize=None)
def field_new(b: int) -> Field:
    """The canonical GF(2^b) instance (same modulus on every run)."""
    return Field(b)


@dataclass(frozen=True, slots=True)
class FieldElement:
    value: int
    field: Field

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"value {self.value} out of range for GF(2^{self.field.b})")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError("mixed-field operands")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __neg__(self) -> "FieldElement":
        return self

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field.mul(self.value, other.value), self.field)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field.mul(self.value, self.field.inv(other.value)), self.field)

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.field.pow(self.value, e), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"<{self.field.format_value(self.value)}:gf2^{self.field.b}>"


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def sample_uniform(field: Field, rng: random.Random) -> FieldElement:
    """Uniform draw over all q elements, deterministic under the rng's seed."""
    return FieldElement(field.random_value(rng), field)


class Polynomial:
    """Univariate polynomial over one field, coefficients lowest degree first.

    Trailing zero coefficients are trimmed; the zero polynomial is the empty
    coefficient sequence.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence[FieldElement | int]):
        values = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise ValueError("mixed-field coefficients")
                values.append(c.value)
            else:
                values.append(int(c))
        while values and values[-1] == 0:
            values.pop()
        self.field = field
        self.coeffs = tuple(FieldElement(v, field) for v in values)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1].value == 1

    def coeff_values(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.coeffs)

    def __call__(self, x: FieldElement | int) -> FieldElement:
        """Horner evaluation."""
        xv = x.value if isinstance(x, FieldElement) else int(x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = self.field.mul(acc, xv) ^ c.value
        return FieldElement(acc, self.field)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        if self.is_zero():
            return "Polynomial(0)"
        terms = " + ".join(
            f"{c.value:#x}*x^{i}" if i else f"{c.value:#x}" for i, c in enumerate(self.coeffs)
        )
        return f"Polynomial({terms})"


def poly_coeffs_from_roots(field: Field, root_values: Iterable[int]) -> list[int]:
    """Coefficient bit patterns (lowest first) of prod (x + a) over the roots.

    The empty product is the constant polynomial 1.  In characteristic 2 the
    linear factor (x - a) equals (x + a), so the coefficients come out as the
    elementary symmetric polynomials of the roots.
    """
    coeffs = [1]
    for a in root_values:
        nxt = [0] * (len(coeffs) + 1)
        for i, cv in enumerate(coeffs):
            nxt[i + 1] ^= cv
            nxt[i] ^= field.mul(cv, a)
        coeffs = nxt
    return coeffs


def poly_from_roots(roots: Sequence[FieldElement], field: Field | None = None) -> Polynomial:
    """Monic polynomial whose roots (with multiplicity) are the given elements."""
    if field is None:
        if not roots:
            raise ValueError("field is required when the root sequence is empty")
        field = roots[0].field
    values = []
    for r in roots:
        if r.field != field:
            raise ValueError("mixed-field roots")
        values.append(r.value)
    return Polynomial(field, poly_coeffs_from_roots(field, values))
