"""The generic Fermat automorphism group (Z/n × Z/n) ⋊ S_3 acting on differentials.

Matrices here follow the substitution convention σ(w_μ) = Σ_ν σ[μ, ν] w_ν
(row μ is the image of w_μ) and are the genuine pull-back action on
holomorphic differentials, not just projective representatives:

* diagonal (x, y) ↦ (ζ^a x, ζ^b y):   w_{i,j} ↦ ζ^(a(i+1)+b(j+1)) w_{i,j}
* swap x1 ↔ x2, i.e. (x, y) ↦ (y, x):  w_{i,j} ↦ -w_{j,i}
* swap x0 ↔ x1, i.e. (x, y) ↦ (1/x, y/x): w_{i,j} ↦ -w_{n-3-i-j, j}

Because substitutions compose contravariantly, the automorphism σ∘τ has
matrix τ·σ; ``compose`` hides this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotAccepted, SpecialCase
from .fermat import build_basis
from .field import admissible, is_prime, primitive_root
from .linalg import ExactMatrix
from .quadrics import QuadricSystem, is_automorphism


@dataclass
class CandidateAutomorphism:
    sigma: ExactMatrix
    lam: ExactMatrix | None = None
    label: tuple = field(default=())

    @property
    def p(self) -> int:
        return self.sigma.p

    def dense(self) -> np.ndarray:
        return self.sigma.dense()

    def to_json(self) -> dict:
        out = {"sigma": self.sigma.to_json(), "label": list(self.label)}
        if self.lam is not None:
            out["lambda"] = self.lam.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CandidateAutomorphism":
        lam = ExactMatrix.from_json(data["lambda"]) if "lambda" in data else None
        return cls(ExactMatrix.from_json(data["sigma"]), lam, tuple(data.get("label", ())))


def compose(s: CandidateAutomorphism, t: CandidateAutomorphism) -> CandidateAutomorphism:
    """The automorphism s∘t (apply t, then s)."""
    p = s.p
    M = t.dense() @ s.dense() % p
    return CandidateAutomorphism(ExactMatrix.from_dense(M, p), label=("compose", s.label, t.label))


def inverse(s: CandidateAutomorphism) -> CandidateAutomorphism:
    from .linalg import rref_with_transform
    _, Q, piv = rref_with_transform(s.dense(), s.p)
    return CandidateAutomorphism(ExactMatrix.from_dense(Q, s.p), label=("inverse", s.label))


def projective_normalize(M: np.ndarray, p: int) -> np.ndarray:
    """Scale so the first nonzero entry (row-major) is 1."""
    M = np.asarray(M, dtype=np.int64) % p
    flat = M.ravel()
    nz = np.flatnonzero(flat)
    if nz.size == 0:
        return M
    return M * pow(int(flat[nz[0]]), -1, p) % p


def projectively_equal(A: np.ndarray, B: np.ndarray, p: int) -> bool:
    return np.array_equal(projective_normalize(A, p), projective_normalize(B, p))


def _is_prime_power_plus_one(n: int, p: int) -> bool:
    q = p
    while q + 1 <= n:
        if q + 1 == n:
            return True
        q *= p
    return False


def permutation_generators(n: int, p: int) -> dict[str, np.ndarray]:
    basis = build_basis(n)
    g, pos = basis.g, basis.position
    swap_xy = np.zeros((g, g), dtype=np.int64)
    swap_01 = np.zeros((g, g), dtype=np.int64)
    for (i, j), u in pos.items():
        swap_xy[u, pos[(j, i)]] = p - 1
        swap_01[u, pos[(n - 3 - i - j, j)]] = p - 1
    return {"t12": swap_xy, "t01": swap_01}


def diagonal(n: int, p: int, a: int, b: int, zeta: int | None = None) -> np.ndarray:
    basis = build_basis(n)
    if zeta is None:
        zeta = primitive_root(p, n).value
    d = [pow(zeta, a * (i + 1) + b * (j + 1), p) for i, j in basis.indices]
    return np.diag(np.array(d, dtype=np.int64))


def s3_matrices(n: int, p: int) -> list[tuple[str, np.ndarray]]:
    gens = permutation_generators(n, p)
    t01, t12 = gens["t01"], gens["t12"]
    g = t01.shape[0]
    eye = np.eye(g, dtype=np.int64)
    mul = lambda *ms: _chain(p, *ms)
    return [("e", eye), ("t01", t01), ("t12", t12), ("t01*t12", mul(t01, t12)),
            ("t12*t01", mul(t12, t01)), ("t01*t12*t01", mul(t01, t12, t01))]


def _chain(p, *ms):
    out = ms[0]
    for m in ms[1:]:
        out = out @ m % p
    return out


def enumerate_fermat_group(n: int, p: int,
                           system: QuadricSystem | None = None) -> list[CandidateAutomorphism]:
    """All 6n² automorphisms as g×g matrices, ordered by (S_3 element, a, b).

    With ``system`` given, each matrix is run through is_automorphism and its
    λ attached; a rejected element raises NotAccepted naming it.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if _is_prime_power_plus_one(n, p):
        raise SpecialCase(f"n = {n} = 1 + {p}^h: the automorphism group is PGU(3, q)")
    if not admissible(n, p):
        raise ValueError(f"p={p} is not admissible for n={n} (need p ≡ 1 mod n, p ∤ 6n²)")
    zeta = primitive_root(p, n).value
    out = []
    for name, P in s3_matrices(n, p):
        for a in range(n):
            for b in range(n):
                M = diagonal(n, p, a, b, zeta) @ P % p
                cand = CandidateAutomorphism(ExactMatrix.from_dense(M, p), label=(name, a, b))
                if system is not None:
                    dec = is_automorphism(M, system)
                    if not dec.accepted:
                        raise NotAccepted(f"group element {cand.label} rejected at quadric "
                                          f"{dec.first_failure}")
                    cand.lam = ExactMatrix.from_dense(dec.lam, p)
                out.append(cand)
    return out


def attach_lambda(elements: Sequence[CandidateAutomorphism], system: QuadricSystem) -> None:
    for e in elements:
        if e.lam is None:
            dec = is_automorphism(e.dense(), system)
            if not dec.accepted:
                raise NotAccepted(f"element {e.label} is not an automorphism")
            e.lam = ExactMatrix.from_dense(dec.lam, system.p)


def rho1_homomorphism_check(elements: Sequence[CandidateAutomorphism], system: QuadricSystem,
                            pairs: int | None = 500, seed: int = 0) -> bool:
    """λ(σ∘τ) = λ(σ)·λ(τ) up to a scalar, on ``pairs`` seeded random pairs.

    ``pairs=None`` checks every ordered pair. Elements without λ violate the
    precondition and raise NotAccepted.
    """
    missing = [e.label for e in elements if e.lam is None]
    if missing:
        raise NotAccepted(f"elements without accepted λ: {missing[:5]}")
    p = system.p
    m = len(elements)
    if pairs is None:
        idx = [(a, b) for a in range(m) for b in range(m)]
    else:
        rng = np.random.default_rng(seed)
        idx = [tuple(x) for x in rng.integers(0, m, size=(pairs, 2)).tolist()]
    for a, b in idx:
        s, t = elements[a], elements[b]
        st = compose(s, t)
        dec = is_automorphism(st.dense(), system)
        if not dec.accepted:
            return False
        prod = s.lam.dense() @ t.lam.dense() % p
        if not projectively_equal(dec.lam, prod, p):
            return False
    return True


def random_invertible(g: int, p: int, rng: np.random.Generator,
                      exclude_monomial: bool = True) -> np.ndarray:
    from .linalg import rank_mod_p
    while True:
        M = rng.integers(0, p, size=(g, g))
        if rank_mod_p(M, p) < g:
            continue
        if exclude_monomial and np.all((M != 0).sum(axis=0) == 1):
            continue
        return M.astype(np.int64)
