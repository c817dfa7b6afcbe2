"""Monomials and sparse polynomials in the differential variables.

Inside the pipeline a monomial is a sorted tuple of variable indices; the
labelled form ``Monomial`` (a multiset of ``(N, mu)`` pairs) is what the term
order and the JSON format talk about.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Pair = tuple[int, int]


@dataclass(frozen=True, order=False)
class Monomial:
    factors: tuple[Pair, ...]

    def __init__(self, factors: Iterable[Sequence[int]] = ()):
        object.__setattr__(self, "factors", tuple(sorted(tuple(map(int, f)) for f in factors)))

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def n_sum(self) -> int:
        return sum(f[0] for f in self.factors)

    @property
    def mu_sum(self) -> int:
        return sum(f[1] for f in self.factors)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.factors + other.factors)

    def __repr__(self):
        if not self.factors:
            return "1"
        return "*".join(f"w{N},{mu}" for N, mu in self.factors)


def order_key(factors: Sequence[Pair]) -> tuple:
    """Sort key realising the term order: ascending key means ≺-smaller.

    Stages: total degree ascending; sum of second indices descending; sum of
    first indices ascending; lexicographic on the sorted factor pairs.
    """
    fs = tuple(sorted(factors))
    return (len(fs), -sum(f[1] for f in fs), sum(f[0] for f in fs), fs)


def term_compare(m1: Monomial, m2: Monomial) -> int:
    """-1 if m1 ≺ m2, 0 if equal, 1 if m1 ≻ m2."""
    k1, k2 = order_key(m1.factors), order_key(m2.factors)
    return (k1 > k2) - (k1 < k2)


class TermOrder:
    """The term order transported to index-tuple monomials through ``labels``."""

    def __init__(self, labels: Sequence[Pair]):
        self.labels = [tuple(l) for l in labels]

    def key(self, mono: tuple[int, ...]) -> tuple:
        return order_key([self.labels[v] for v in mono])

    def monomial(self, mono: tuple[int, ...]) -> Monomial:
        return Monomial(self.labels[v] for v in mono)

    def index(self, m: Monomial) -> tuple[int, ...]:
        lookup = {l: k for k, l in enumerate(self.labels)}
        return tuple(sorted(lookup[f] for f in m.factors))


def mono_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(a + b))


class SparsePolynomial:
    """Polynomial over GF(p) with index-tuple monomials; zero coefficients never stored."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(sorted(mono))
            clean[mono] = (clean.get(mono, 0) + int(c)) % p
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def monomial(cls, p: int, mono, coeff: int = 1) -> "SparsePolynomial":
        return cls(p, {tuple(mono): coeff})

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return SparsePolynomial(self.p, out)

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.p, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other) -> "SparsePolynomial":
        if isinstance(other, int):
            return SparsePolynomial(self.p, {m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return SparsePolynomial(self.p, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"SparsePolynomial({self.terms}, p={self.p})"

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = self.degrees()
        if d is None:
            return len(degs) <= 1
        return degs <= {d}

    def substitute(self, images: Sequence["SparsePolynomial"]) -> "SparsePolynomial":
        """Replace variable k by ``images[k]``."""
        out = SparsePolynomial(self.p)
        for mono, c in self.terms.items():
            t = SparsePolynomial(self.p, {(): c})
            for v in mono:
                t = t * images[v]
            out = out + t
        return out

    def leading(self, order: TermOrder) -> tuple[int, ...]:
        return max(self.terms, key=order.key)

    def to_json(self, labels: Sequence[Pair] | None = None) -> dict:
        def lab(v):
            return list(labels[v]) if labels is not None else [v]
        return {"terms": [{"coeff": c, "mono": [lab(v) for v in m]}
                          for m, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data: dict, p: int, labels: Sequence[Pair] | None = None):
        lookup = {tuple(l): k for k, l in enumerate(labels)} if labels is not None else None
        terms = {}
        for t in data["terms"]:
            if lookup is not None:
                mono = tuple(lookup[tuple(f)] for f in t["mono"])
            else:
                mono = tuple(f[0] for f in t["mono"])
            mono = tuple(sorted(mono))
            terms[mono] = terms.get(mono, 0) + t["coeff"]
        return cls(p, terms)
