"""Prime fields GF(p) and roots of unity."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NoRoot


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=None)
def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def zero(self) -> "FieldElement":
        return self(0)

    def one(self) -> "FieldElement":
        return self(1)

    def elements(self):
        return [self(v) for v in range(self.p)]

    def root_of_unity(self, n: int) -> "FieldElement":
        return primitive_root(self.p, n)

    def signed(self, v: int) -> int:
        """Representative of v in (-p/2, p/2]."""
        v %= self.p
        return v - self.p if v > self.p // 2 else v


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    @property
    def p(self) -> int:
        return self.field.p

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value + o) % self.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value - o) % self.p, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((o - self.value) % self.p, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value * o % self.p, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.p, self.field)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(pow(self.value, -1, self.p), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero")
        return FieldElement(self.value * pow(o, -1, self.p) % self.p, self.field)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(pow(self.value, k, self.p), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"

    def order(self) -> int:
        return multiplicative_order(self.value, self.p)


def primitive_root(p: int, n: int) -> FieldElement:
    """Smallest residue of multiplicative order exactly ``n`` in GF(p).

    Raises NoRoot unless n divides p - 1.
    """
    field = PrimeField(p)
    if n < 1 or (p - 1) % n:
        raise NoRoot(f"GF({p}) has no primitive {n}-th root of unity")
    for a in range(1, p):
        if multiplicative_order(a, p) == n:
            return field(a)
    raise NoRoot(f"GF({p}) has no primitive {n}-th root of unity")  # pragma: no cover


def admissible(n: int, p: int) -> bool:
    """p ≡ 1 (mod n) and p does not divide 6n², the working assumptions for Fermat curves."""
    return is_prime(p) and p % n == 1 and (6 * n * n) % p != 0


def admissible_primes(n: int, count: int = 2, start: int = 2) -> list[int]:
    out = []
    p = max(start, 2)
    while len(out) < count:
        if admissible(n, p):
            out.append(p)
        p += 1
    return out


def default_prime(n: int) -> int:
    return admissible_primes(n, 1)[0]
