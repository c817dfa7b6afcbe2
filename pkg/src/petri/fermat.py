"""Canonical ideal of the Fermat curve x^n + y^n + 1 = 0.

The holomorphic differentials x^i y^j dx/y^(n-1), 0 <= i+j <= n-3, give the
variables w_{i,j}; the canonical ideal is generated by binomials (G1) that
identify monomials over the same lattice point, and trinomials (G2) coming
from multiplying x^a y^b by the curve equation.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product

from .errors import AuditFailed, UnsupportedExponent
from .field import default_prime
from .poly import Monomial, SparsePolynomial, order_key
from .ring import GradedRing, echelon_span

Pair = tuple[int, int]


@dataclass(frozen=True)
class DifferentialBasis:
    n: int
    indices: tuple[Pair, ...]

    @property
    def g(self) -> int:
        return len(self.indices)

    @cached_property
    def position(self) -> dict[Pair, int]:
        return {ij: k for k, ij in enumerate(self.indices)}

    def weights(self) -> list[Pair]:
        return [(i % self.n, j % self.n) for i, j in self.indices]


def genus(n: int) -> int:
    return (n - 1) * (n - 2) // 2


def build_basis(n: int) -> DifferentialBasis:
    """Index pairs (i, j), 0 <= i+j <= n-3, in lexicographic order."""
    if n < 6:
        raise UnsupportedExponent(
            f"n={n}: the canonical ideal is generated by quadrics only for n >= 6")
    idx = tuple((i, j) for i in range(n - 2) for j in range(n - 2 - i))
    return DifferentialBasis(n, idx)


def decompositions(point: Pair, basis: DifferentialBasis) -> list[tuple[int, int]]:
    """Unordered pairs (u <= v) of variable positions whose indices sum to ``point``."""
    rho, t = point
    pos = basis.position
    out = []
    for (i, j), u in pos.items():
        v = pos.get((rho - i, t - j))
        if v is not None and u <= v:
            out.append((u, v))
    return sorted(out)


@dataclass
class FermatIdeal:
    basis: DifferentialBasis
    p: int
    g1: list[SparsePolynomial]
    g2: list[SparsePolynomial]
    # (a, b) pairs of the generation range that admit no decomposition
    g2_empty: list[Pair] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def g(self) -> int:
        return self.basis.g

    @property
    def generators(self) -> list[SparsePolynomial]:
        return self.g1 + self.g2

    def ring(self) -> GradedRing:
        cached = self.__dict__.get("_ring")
        if cached is None:
            cached = GradedRing(self.g, self.p, self.generators,
                                labels=list(self.basis.indices),
                                weights=self.basis.weights(),
                                weight_modulus=(self.n, self.n))
            self.__dict__["_ring"] = cached
        return cached

    def labelled(self, mono) -> Monomial:
        return Monomial(self.basis.indices[v] for v in mono)

    def to_json(self) -> dict:
        labels = self.basis.indices
        gens = [{"family": "G1", **f.to_json(labels)} for f in self.g1]
        gens += [{"family": "G2", **f.to_json(labels)} for f in self.g2]
        return {"n": self.n, "g": self.g, "p": self.p, "generators": gens}

    @classmethod
    def from_json(cls, data: dict) -> "FermatIdeal":
        basis = build_basis(data["n"])
        p = data.get("p") or default_prime(data["n"])
        g1, g2 = [], []
        for gen in data["generators"]:
            f = SparsePolynomial.from_json(gen, p, basis.indices)
            (g1 if gen["family"] == "G1" else g2).append(f)
        return cls(basis, p, g1, g2)


def build_ideal(n: int, p: int | None = None) -> FermatIdeal:
    """G1 binomials and G2 trinomials generating the canonical ideal over GF(p)."""
    basis = build_basis(n)
    if p is None:
        p = default_prime(n)
    by_point: dict[Pair, list[tuple[int, int]]] = defaultdict(list)
    for u, v in combinations_with_self(basis.g):
        (i1, j1), (i2, j2) = basis.indices[u], basis.indices[v]
        by_point[(i1 + i2, j1 + j2)].append((u, v))

    g1 = []
    for pt in sorted(by_point):
        for d1, d2 in combinations(by_point[pt], 2):
            g1.append(SparsePolynomial(p, {d1: 1, d2: -1}))

    g2, seen, empty = [], set(), []
    for a in range(n - 2):
        for b in range(n - 2 - a):
            t1 = by_point.get((n + a, b), [])
            t2 = by_point.get((a, n + b), [])
            t3 = by_point.get((a, b), [])
            if not (t1 and t2 and t3):
                empty.append((a, b))
                continue
            for m1, m2, m3 in product(t1, t2, t3):
                f = SparsePolynomial(p, {m1: 1, m2: 1, m3: 1})
                key = frozenset(f.terms.items())
                if key not in seen:
                    seen.add(key)
                    g2.append(f)
    return FermatIdeal(basis, p, g1, g2, empty)


def combinations_with_self(g: int):
    for u in range(g):
        for v in range(u, g):
            yield u, v


def _reduce_xy(poly: dict[Pair, int], n: int, p: int) -> dict[Pair, int]:
    """Normal form in k[x,y]/(x^n + y^n + 1) via x^n -> -y^n - 1."""
    work = dict(poly)
    out: dict[Pair, int] = {}
    while work:
        (ex, ey), c = work.popitem()
        if c % p == 0:
            continue
        if ex < n:
            out[(ex, ey)] = (out.get((ex, ey), 0) + c) % p
            continue
        for mono in ((ex - n, ey + n), (ex - n, ey)):
            work[mono] = (work.get(mono, 0) - c) % p
    return {m: c for m, c in out.items() if c}


def verify_vanishing(ideal: FermatIdeal) -> bool:
    """True iff every generator vanishes on the curve under w_{i,j} -> x^i y^j."""
    idx, n, p = ideal.basis.indices, ideal.n, ideal.p
    for f in ideal.generators:
        xy: dict[Pair, int] = {}
        for mono, c in f.terms.items():
            ex = sum(idx[v][0] for v in mono)
            ey = sum(idx[v][1] for v in mono)
            xy[(ex, ey)] = (xy.get((ex, ey), 0) + c) % p
        if _reduce_xy(xy, n, p):
            return False
    return True


@dataclass(frozen=True)
class LatticeRegion:
    points: frozenset
    tag: str

    def __len__(self):
        return len(self.points)

    def __contains__(self, pt):
        return tuple(pt) in self.points


def minkowski_sum(basis: DifferentialBasis) -> LatticeRegion:
    pts = {(i + k, j + l) for (i, j) in basis.indices for (k, l) in basis.indices}
    return LatticeRegion(frozenset(pts), "A+A")


def sigma_map(region: LatticeRegion, basis: DifferentialBasis) -> dict[Pair, Monomial]:
    """Each lattice point -> the ≺-minimal quadratic monomial lying over it."""
    idx = basis.indices
    out = {}
    for pt in sorted(region.points):
        decs = decompositions(pt, basis)
        if not decs:
            raise ValueError(f"{pt} is not in A+A")
        out[pt] = min((Monomial((idx[u], idx[v])) for u, v in decs),
                      key=lambda m: order_key(m.factors))
    return out


def set_C(n: int) -> LatticeRegion:
    if n < 6:
        raise UnsupportedExponent(f"n={n} < 6")
    pts = {(n + a, b) for a in range(n - 5) for b in range(n - 5 - a)}
    return LatticeRegion(frozenset(pts), "C")


@dataclass
class AuditReport:
    n: int
    g: int
    minkowski_size: int
    c_size: int
    identity_value: int          # 3(g-1) - (|A+A| - |C|)
    standard_count: int          # dim (S / in(J))_2 from the generators
    standard_matches_sigma: bool
    sigma_c_leading: bool        # every sigma(C) monomial leads some G2 element
    g2_outside_c: int            # G2 elements whose leading point is not in C
    g2_empty_ranges: int         # (a, b) in the generation range with no G2 element
    certified: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def dimension_audit(n: int, ideal: FermatIdeal | None = None) -> AuditReport:
    """Certify that G1 and G2 span the whole canonical ideal in degree 2.

    Checks the closed-form identity 3(g-1) = |A+A| - |C| and that the
    standard monomials of the generators' initial ideal number exactly
    3(g-1) and are sigma(A+A) minus sigma(C). Raises AuditFailed otherwise.
    """
    if ideal is None:
        ideal = build_ideal(n)
    basis = ideal.basis
    g = basis.g
    aa = minkowski_sum(basis)
    c = set_C(n)
    if len(aa) != (2 * n - 5) * (2 * n - 4) // 2:
        raise AuditFailed(f"|A+A| = {len(aa)} disagrees with closed form", len(aa))
    if len(c) != (n - 5) * (n - 4) // 2 or not c.points <= aa.points:
        raise AuditFailed(f"|C| = {len(c)} disagrees with closed form", len(c))
    identity = 3 * (g - 1) - (len(aa) - len(c))

    sig = sigma_map(aa, basis)
    sigma_c = {sig[pt] for pt in c.points}
    expected_std = {m for pt, m in sig.items() if pt not in c.points}

    ring = ideal.ring()
    ech = echelon_span(ideal.generators, ring.monomials(2), ideal.p,
                       ring.order.key, ring.mono_weight)
    standard = {ideal.labelled(m) for m in ech.standard}

    leads = set()
    outside = 0
    for f in ideal.g2:
        lead = f.leading(ring.order)
        leads.add(ideal.labelled(lead))
        lm = ideal.labelled(lead)
        if (lm.n_sum, lm.mu_sum) not in c.points:
            outside += 1

    report = AuditReport(
        n=n, g=g, minkowski_size=len(aa), c_size=len(c), identity_value=identity,
        standard_count=len(standard), standard_matches_sigma=standard == expected_std,
        sigma_c_leading=sigma_c <= leads, g2_outside_c=outside,
        g2_empty_ranges=len(ideal.g2_empty), certified=False)
    if identity != 0:
        raise AuditFailed(f"3(g-1) - (|A+A| - |C|) = {identity}", identity)
    if len(standard) != 3 * (g - 1):
        raise AuditFailed(
            f"{len(standard)} standard quadratic monomials, expected {3 * (g - 1)}",
            len(standard))
    if not report.standard_matches_sigma or not report.sigma_c_leading:
        raise AuditFailed("standard monomials differ from sigma(A+A) \\ sigma(C)",
                          len(standard))
    report.certified = True
    return report
