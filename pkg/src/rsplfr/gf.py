"""Exact arithmetic over the finite fields GF(q).

Two families are supported: prime fields GF(p) with plain modular
arithmetic, and binary extension fields GF(2^e) for e <= 16 built from a
fixed table of canonical irreducible polynomials.  Element values are
canonical integers in [0, q-1]; for extension fields bit i of the value is
the coefficient of x^i in the polynomial basis.

A :class:`FieldSpec` carries the field description and provides fast
integer-level operations (``add``, ``mul``, ``inv``, ...) used by the rest
of the package.  :class:`FieldElement` wraps a value together with its
field and supports the usual operators; mixing elements of different
fields is a hard error, never an implicit coercion.
"""

from __future__ import annotations

from functools import lru_cache


class FieldError(Exception):
    """Base class for finite-field errors."""


class UnsupportedCardinality(FieldError):
    """q is neither a prime nor a supported power of two."""


class FieldMismatch(FieldError):
    """Operands belong to different fields."""


class DivisionByZero(FieldError):
    """Multiplicative inverse of zero requested."""


# Canonical irreducible (in fact primitive) polynomials for GF(2^e),
# e = 2..16.  Bit i is the coefficient of x^i, including the leading x^e.
_REDUCTION_POLY = {
    2: 0b111,                  # x^2 + x + 1
    3: 0b1011,                 # x^3 + x + 1
    4: 0b10011,                # x^4 + x + 1
    5: 0b100101,               # x^5 + x^2 + 1
    6: 0b1000011,              # x^6 + x + 1
    7: 0b10001001,             # x^7 + x^3 + 1
    8: 0b100011101,            # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,           # x^9 + x^4 + 1
    10: 0b10000001001,         # x^10 + x^3 + 1
    11: 0b100000000101,        # x^11 + x^2 + 1
    12: 0b1000001010011,       # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,      # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,     # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,    # x^15 + x + 1
    16: 0b10001000000001011,   # x^16 + x^12 + x^3 + x + 1
}

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _gf2_poly_mod(a: int, b: int) -> int:
    """Remainder of carry-less polynomial division a mod b over GF(2)."""
    db = b.bit_length() - 1
    while a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def _gf2_poly_irreducible(poly: int, e: int) -> bool:
    """Trial division by every polynomial of degree 1..e//2."""
    if poly.bit_length() - 1 != e:
        return False
    for d in range(2, 1 << (e // 2 + 1)):
        if d.bit_length() - 1 < 1:
            continue
        if _gf2_poly_mod(poly, d) == 0:
            return False
    return True


class FieldSpec:
    """Immutable description of GF(q) with integer-level arithmetic.

    Do not construct directly; use :func:`field_new`.  Operations take and
    return canonical integer representatives, which keeps the inner loops
    of the protocol cheap.  ``spec(v)`` wraps a value as a
    :class:`FieldElement`.
    """

    __slots__ = ("q", "characteristic", "extension_degree",
                 "reduction_polynomial", "_poly_int", "_exp", "_log")

    def __init__(self, q, characteristic, extension_degree, poly_int=None):
        self.q = q
        self.characteristic = characteristic
        self.extension_degree = extension_degree
        self._poly_int = poly_int
        if poly_int is None:
            self.reduction_polynomial = None
            self._exp = self._log = None
        else:
            self.reduction_polynomial = tuple(
                (poly_int >> i) & 1 for i in range(extension_degree + 1))
            self._build_tables()

    def _build_tables(self):
        # x is a generator for every polynomial in the canonical table.
        q, poly = self.q, self._poly_int
        exp = [0] * (2 * q)
        log = [0] * q
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v <<= 1
            if v & q:
                v ^= poly
        if v != 1:
            raise FieldError(f"reduction polynomial {poly:#x} is not primitive")
        for i in range(q - 1, 2 * q):
            exp[i] = exp[i - (q - 1)]
        self._exp, self._log = exp, log

    # -- integer-level arithmetic ------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.extension_degree > 1 or self.characteristic == 2:
            return a ^ b
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        if self.extension_degree > 1 or self.characteristic == 2:
            return a ^ b
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        if self.extension_degree > 1 or self.characteristic == 2:
            return a
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        if self._exp is None:
            return a * b % self.q
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        if self._exp is None:
            return pow(a, self.q - 2, self.q)
        return self._exp[(self.q - 1) - self._log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self._exp is None:
            return pow(a, n, self.q) if n else 1
        if n == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[self._log[a] * n % (self.q - 1)]

    # -- element construction -----------------------------------------

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    __call__ = element

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    def elements(self):
        """Iterate all q elements in canonical value order."""
        for v in range(self.q):
            yield FieldElement(v, self)

    # -- plumbing -------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, FieldSpec) and self.q == other.q
                and self._poly_int == other._poly_int)

    def __hash__(self):
        return hash((self.q, self._poly_int))

    def __repr__(self):
        if self.extension_degree > 1:
            return f"GF(2^{self.extension_degree})"
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def field_new(q: int) -> FieldSpec:
    """Return the FieldSpec for GF(q).

    q must be a prime, or a power of two 2^e with e <= 16 (canonical
    reduction polynomial chosen from a fixed table).  Raises
    UnsupportedCardinality otherwise.
    """
    if q < 2:
        raise UnsupportedCardinality(f"q={q}: field needs q >= 2")
    if q == 2:
        return FieldSpec(2, 2, 1)
    if q & (q - 1) == 0:
        e = q.bit_length() - 1
        if e > 16:
            raise UnsupportedCardinality(f"q=2^{e}: only exponents <= 16 supported")
        poly = _REDUCTION_POLY[e]
        if not _gf2_poly_irreducible(poly, e):
            raise FieldError(f"table polynomial for e={e} failed irreducibility check")
        return FieldSpec(q, 2, e, poly)
    if _is_prime(q):
        return FieldSpec(q, q, 1)
    raise UnsupportedCardinality(
        f"q={q} is neither prime nor a supported power of 2")


class FieldElement:
    """A value in [0, q-1] bound to its FieldSpec.

    Supports +, -, *, /, ** (integer exponent), unary -, == and hashing.
    Binary operations require both operands to share the field.
    """

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: FieldSpec):
        if not isinstance(value, int):
            raise TypeError(f"field element value must be int, got {type(value).__name__}")
        if field.extension_degree > 1:
            if not 0 <= value < field.q:
                raise ValueError(f"value {value} out of range for {field}")
        else:
            value %= field.q
        self.value = value
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.add(self.value, v), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.sub(self.value, v), self.field)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.field.mul(self.value, v), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if v == 0:
            raise DivisionByZero("division by zero")
        return FieldElement(self.field.div(self.value, v), self.field)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return FieldElement(self.field.pow(self.value, n), self.field)

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return self.value == other.value

    def __hash__(self):
        return hash((self.value, self.field.q))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field!r}({self.value})"
