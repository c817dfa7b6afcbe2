"""Quadrics as symmetric matrices and the matrix automorphism problem.

A linear substitution w ↦ σ w sends the quadric w^t A w to w^t (σ^t A σ) w.
With A_1..A_r a basis of the degree-2 part of the ideal, σ preserves the
ideal iff every σ^t A_i σ stays in their span; the coefficients λ_{ji} of
σ^t A_i σ = Σ_j λ_{ji} A_j form the induced representation on quadrics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CharTwo, DependentQuadrics, NotHomogeneous, Singular
from .linalg import ExactMatrix, rank_mod_p, rref_with_transform
from .poly import SparsePolynomial
from .ring import GradedRing


def _sym_index(g: int) -> dict[tuple[int, int], int]:
    """Upper-triangle row-major positions (0,0), (0,1), ..., (0,g-1), (1,1), ..."""
    out, k = {}, 0
    for a in range(g):
        for b in range(a, g):
            out[(a, b)] = k
            k += 1
    return out


@dataclass(frozen=True)
class QuadricForm:
    A: ExactMatrix

    def __post_init__(self):
        if not self.A.is_symmetric():
            raise ValueError("quadric matrix must be symmetric")

    @property
    def g(self) -> int:
        return self.A.rows

    @property
    def p(self) -> int:
        return self.A.p

    def polynomial(self) -> SparsePolynomial:
        """w^t A w as a polynomial."""
        terms = {}
        for (a, b), v in self.A.entries.items():
            key = (min(a, b), max(a, b))
            terms[key] = terms.get(key, 0) + v
        return SparsePolynomial(self.p, terms)


def encode_quadric(f: SparsePolynomial, g: int) -> QuadricForm:
    """Symmetric A with w^t A w = f; cross terms are split in half."""
    p = f.p
    if p == 2:
        raise CharTwo("cannot symmetrise quadrics in characteristic 2")
    if not f.is_homogeneous(2):
        raise NotHomogeneous("expected a homogeneous quadric")
    half = pow(2, -1, p)
    ent: dict = {}
    for (a, b), c in f.terms.items():
        if a == b:
            ent[(a, a)] = (ent.get((a, a), 0) + c) % p
        else:
            for key in ((a, b), (b, a)):
                ent[key] = (ent.get(key, 0) + c * half) % p
    return QuadricForm(ExactMatrix(g, g, p, ent))


def vectorize(Q: QuadricForm | ExactMatrix) -> np.ndarray:
    A = Q.A if isinstance(Q, QuadricForm) else Q
    D = A.dense()
    iu = np.triu_indices(A.rows)
    return D[iu].copy()


def vectorize_dense(D: np.ndarray) -> np.ndarray:
    return D[np.triu_indices(D.shape[0])]


def devectorize(v: Sequence[int], g: int, p: int) -> QuadricForm:
    D = np.zeros((g, g), dtype=np.int64)
    D[np.triu_indices(g)] = np.asarray(v, dtype=np.int64) % p
    D = D + np.triu(D, 1).T
    return QuadricForm(ExactMatrix.from_dense(D, p))


@dataclass
class QuadricSystem:
    """Linearly independent quadrics A_1..A_r with the normaliser Q precomputed.

    ``Q @ vectorized == [I_r ; 0]``.
    """

    quadrics: list[QuadricForm]
    labels: list | None = None
    weights: list | None = None
    weight_modulus: tuple = ()
    vectorized: np.ndarray = field(init=False, repr=False)
    normalizer: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.quadrics:
            raise ValueError("empty quadric system")
        g, p = self.g, self.p
        if p == 2:
            raise CharTwo("characteristic 2 is not supported")
        for q in self.quadrics:
            if q.g != g or q.p != p:
                raise ValueError("quadrics of mixed size or field")
        self.vectorized = np.stack([vectorize(q) for q in self.quadrics], axis=1)
        R, Q, pivots = rref_with_transform(self.vectorized, p)
        if len(pivots) != self.r:
            raise DependentQuadrics(f"quadrics span only {len(pivots)} of {self.r} dimensions")
        self.normalizer = Q
        self._equations = None

    @property
    def g(self) -> int:
        return self.quadrics[0].g

    @property
    def p(self) -> int:
        return self.quadrics[0].p

    @property
    def r(self) -> int:
        return len(self.quadrics)

    @property
    def sym_dim(self) -> int:
        return self.g * (self.g + 1) // 2

    @classmethod
    def from_polynomials(cls, polys: Sequence[SparsePolynomial], g: int, **kw) -> "QuadricSystem":
        """Greedy independent subset of ``polys``, kept in the given order."""
        p = polys[0].p
        chosen, vecs, rank = [], [], 0
        for f in polys:
            q = encode_quadric(f, g)
            trial = vecs + [vectorize(q)]
            r = rank_mod_p(np.stack(trial, axis=1), p)
            if r > rank:
                chosen.append(q)
                vecs, rank = trial, r
        return cls(chosen, **kw)

    @classmethod
    def from_ideal(cls, ideal) -> "QuadricSystem":
        return cls.from_polynomials(ideal.generators, ideal.g, labels=list(ideal.basis.indices),
                                    weights=ideal.basis.weights(),
                                    weight_modulus=(ideal.n, ideal.n))

    def ring(self) -> GradedRing:
        cached = self.__dict__.get("_ring")
        if cached is None:
            cached = GradedRing(self.g, self.p, [q.polynomial() for q in self.quadrics],
                                labels=self.labels, weights=self.weights,
                                weight_modulus=self.weight_modulus)
            self.__dict__["_ring"] = cached
        return cached

    def with_prime(self, p: int) -> "QuadricSystem":
        # halved cross terms do not lift to integers; go through the polynomials
        polys = []
        for q in self.quadrics:
            f = q.polynomial()
            polys.append(SparsePolynomial(p, {m: (c - self.p if c > self.p // 2 else c)
                                              for m, c in f.terms.items()}))
        return QuadricSystem([encode_quadric(f, self.g) for f in polys], labels=self.labels,
                             weights=self.weights, weight_modulus=self.weight_modulus)

    def to_json(self) -> dict:
        return {"p": self.p, "g": self.g, "quadrics": [q.A.to_json() for q in self.quadrics]}

    @classmethod
    def from_json(cls, data) -> "QuadricSystem":
        if isinstance(data, list):
            mats = data
        else:
            mats = data["quadrics"]
        return cls([QuadricForm(ExactMatrix.from_json(m)) for m in mats])


@dataclass
class Decision:
    """Outcome of is_automorphism."""

    accepted: bool
    lam: np.ndarray | None = None
    first_failure: int | None = None        # index i of the first quadric leaving the span
    residual: np.ndarray | None = None      # bottom block of Q·(images)

    def __bool__(self):
        return self.accepted


def _as_dense(sigma, p: int) -> np.ndarray:
    if isinstance(sigma, ExactMatrix):
        return sigma.dense()
    return np.asarray(sigma, dtype=np.int64) % p


def image_quadrics(sigma: np.ndarray, system: QuadricSystem) -> np.ndarray:
    """Columns vec(σ^t A_i σ), i = 1..r."""
    p = system.p
    S = np.asarray(sigma, dtype=np.int64) % p
    cols = []
    for q in system.quadrics:
        B = (S.T @ (q.A.dense() @ S % p)) % p
        cols.append(vectorize_dense(B))
    return np.stack(cols, axis=1)


def is_automorphism(sigma, system: QuadricSystem) -> Decision:
    """Decide whether σ maps the ideal into itself; on success return λ(σ).

    Raises Singular if σ is not invertible.
    """
    p = system.p
    S = _as_dense(sigma, p)
    if S.shape != (system.g, system.g):
        raise ValueError(f"expected a {system.g}x{system.g} matrix")
    if rank_mod_p(S, p) < system.g:
        raise Singular("candidate matrix is not invertible")
    T = system.normalizer @ image_quadrics(S, system) % p
    r = system.r
    bottom = T[r:]
    if np.any(bottom):
        bad = int(np.flatnonzero(bottom.any(axis=0))[0])
        return Decision(False, None, bad, bottom)
    return Decision(True, T[:r].copy())


@dataclass
class ConditionSystem:
    """Quadratic equations in the g² entries x_{r,c} cutting out the automorphisms."""

    g: int
    p: int
    equations: list[SparsePolynomial]

    @property
    def variables(self) -> list[str]:
        return [f"x_{{{r + 1},{c + 1}}}" for r in range(self.g) for c in range(self.g)]

    def _flat(self):
        if getattr(self, "_cache", None) is None:
            eq, c, v1, v2 = [], [], [], []
            for k, f in enumerate(self.equations):
                for (a, b), coef in f.terms.items():
                    eq.append(k)
                    c.append(coef)
                    v1.append(a)
                    v2.append(b)
            self._cache = tuple(np.array(x, dtype=np.int64) for x in (eq, c, v1, v2))
        return self._cache

    def evaluate(self, sigma) -> np.ndarray:
        """Values of all equations at a concrete matrix."""
        x = _as_dense(sigma, self.p).ravel()
        eq, c, v1, v2 = self._flat()
        vals = c * (x[v1] * x[v2] % self.p) % self.p
        out = np.zeros(len(self.equations), dtype=np.int64)
        np.add.at(out, eq, vals)
        return out % self.p

    def format_polynomial(self, f: SparsePolynomial) -> str:
        names = self.variables
        parts = []
        for (a, b), c in sorted(f.terms.items()):
            s = c - self.p if c > self.p // 2 else c
            mono = f"{names[a]}*{names[b]}"
            mag = abs(s)
            body = mono if mag == 1 else f"{mag}*{mono}"
            if not parts:
                parts.append(body if s > 0 else f"-{body}")
            else:
                parts.append(("+ " if s > 0 else "- ") + body)
        return " ".join(parts) if parts else "0"

    def to_text(self) -> str:
        return "\n".join(self.format_polynomial(f) for f in self.equations) + "\n"

    def to_json(self) -> dict:
        return {"g": self.g, "p": self.p, "variables": self.variables,
                "equations": [[[c, a, b] for (a, b), c in sorted(f.terms.items())]
                              for f in self.equations]}

    @classmethod
    def from_json(cls, data: dict) -> "ConditionSystem":
        p = data["p"]
        return cls(data["g"], p, [SparsePolynomial(p, {(a, b): c for c, a, b in eq})
                                  for eq in data["equations"]])


def condition_equations(system: QuadricSystem) -> ConditionSystem:
    """Bottom block of Q·(vec(X^t A_i X)) with X = (x_{r,c}) symbolic."""
    g, p, r = system.g, system.p, system.r
    pos = _sym_index(g)
    # vec(X^t A X)[(a,b)] = Σ_{u,v} A[u,v] x_{u,a} x_{v,b}
    images = []
    for q in system.quadrics:
        comps = []
        ent = q.A.entries
        for (a, b) in pos:
            terms: dict = {}
            for (u, v), c in ent.items():
                m = tuple(sorted((u * g + a, v * g + b)))
                terms[m] = terms.get(m, 0) + c
            comps.append(terms)
        images.append(comps)
    Q = system.normalizer
    equations = []
    for t in range(r, system.sym_dim):
        qrow = Q[t]
        nz = np.flatnonzero(qrow)
        for i in range(r):
            terms: dict = {}
            for s in nz.tolist():
                coef = int(qrow[s])
                for m, c in images[i][s].items():
                    terms[m] = terms.get(m, 0) + coef * c
            equations.append(SparsePolynomial(p, terms))
    return ConditionSystem(g, p, equations)


def load_matrix(data) -> ExactMatrix:
    if isinstance(data, str):
        data = json.loads(data)
    return ExactMatrix.from_json(data)
