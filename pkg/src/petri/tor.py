"""Automorphism actions on S_X and on the Koszul homology Tor_i(k, S_X)_j.

σ acts on the Koszul term Λ^i V ⊗ (S_X)_d by Λ^i(σ) ⊗ ρ_d(σ), which commutes
with the differential; the induced map on homology is read off in a fixed
basis of kernel representatives modulo the image, one weight block at a time.
All matrices use the column convention (column = image of a basis vector),
so ρ(σ∘τ) = ρ(σ)ρ(τ).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import IdealNotPreserved, ZeroSpace
from .field import FieldElement, PrimeField
from .group import CandidateAutomorphism, compose, projectively_equal
from .koszul import koszul_complex
from .linalg import ExactMatrix, echelon, nullspace_mod_p, rank_mod_p, rref_with_transform
from .ring import as_ring


def _sigma_dense(sigma, p: int) -> np.ndarray:
    if isinstance(sigma, CandidateAutomorphism):
        return sigma.dense()
    if isinstance(sigma, ExactMatrix):
        return sigma.dense()
    return np.asarray(sigma, dtype=np.int64) % p


def _linear_images(M: np.ndarray) -> list[dict[int, int]]:
    return [{int(v): int(M[k, v]) for v in np.flatnonzero(M[k])} for k in range(M.shape[0])]


def _image_of_monomial(mono, lin, p) -> dict:
    poly = {(): 1}
    for k in mono:
        nxt: dict = {}
        for m, c in poly.items():
            for v, a in lin[k].items():
                key = tuple(sorted(m + (v,)))
                nxt[key] = (nxt.get(key, 0) + c * a) % p
        poly = {m: c for m, c in nxt.items() if c}
    return poly


@dataclass
class RingAction:
    sigma: ExactMatrix
    matrices: dict[int, ExactMatrix]

    def __getitem__(self, d: int) -> ExactMatrix:
        return self.matrices[d]


def degree_action(M: np.ndarray, ring, d: int) -> np.ndarray:
    """Matrix of σ on (S_X)_d in the quotient basis."""
    p = ring.p
    piece = ring.piece(d)
    lin = _linear_images(M)
    out = np.zeros((piece.dim, piece.dim), dtype=np.int64)
    for c, m in enumerate(piece.basis):
        img = _image_of_monomial(m, lin, p)
        for mono, coef in img.items():
            for r, v in piece.normal_form(mono).items():
                out[r, c] = (out[r, c] + coef * v) % p
    return out


def preserves_ideal(M: np.ndarray, ring) -> bool:
    p = ring.p
    piece = ring.piece(2)
    lin = _linear_images(M)
    for row in piece.ideal_rows:
        acc: dict = {}
        for mono, c in row.items():
            for m2, a in _image_of_monomial(mono, lin, p).items():
                for r, v in piece.normal_form(m2).items():
                    acc[r] = (acc.get(r, 0) + c * a * v) % p
        if any(acc.values()):
            return False
    return True


def ring_action(sigma, ideal, d_max: int) -> RingAction:
    """Induced matrices of σ on (S_X)_d for d = 0..d_max."""
    ring = as_ring(ideal)
    p = ring.p
    M = _sigma_dense(sigma, p)
    if not preserves_ideal(M, ring):
        raise IdealNotPreserved("σ does not map I_2 into itself")
    mats = {d: ExactMatrix.from_dense(degree_action(M, ring, d), p) for d in range(d_max + 1)}
    return RingAction(ExactMatrix.from_dense(M, p), mats)


def exterior_power(M: np.ndarray, i: int, p: int) -> np.ndarray:
    """Λ^i of the column-convention action e_k ↦ Σ_ν M[k, ν] e_ν."""
    g = M.shape[0]
    ks = list(combinations(range(g), i))
    index = {K: t for t, K in enumerate(ks)}
    lin = _linear_images(M)
    out = np.zeros((len(ks), len(ks)), dtype=np.int64)
    for c, K in enumerate(ks):
        terms = {(): 1}
        for k in K:
            nxt: dict = {}
            for seq, coef in terms.items():
                for v, a in lin[k].items():
                    if v in seq:
                        continue
                    key = seq + (v,)
                    nxt[key] = (nxt.get(key, 0) + coef * a) % p
            terms = nxt
        for seq, coef in terms.items():
            if not coef:
                continue
            sign = _perm_sign(seq)
            r = index[tuple(sorted(seq))]
            out[r, c] = (out[r, c] + sign * coef) % p
    return out


def _perm_sign(seq) -> int:
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


def chain_action(sigma, ideal, i: int, d: int) -> np.ndarray:
    """Λ^i(σ) ⊗ ρ_d(σ) on the Koszul term C(i, d), dense."""
    ring = as_ring(ideal)
    M = _sigma_dense(sigma, ring.p)
    L = exterior_power(M, i, ring.p)
    R = degree_action(M, ring, d)
    return np.kron(L, R) % ring.p


class TorSpace:
    """A fixed basis of Tor_i(k, S_X)_j with a coordinate map for cycles."""

    def __init__(self, ideal, i: int, j: int, seed: int | None = None):
        self.ideal = ideal
        self.i, self.j, self.d = i, j, j - i
        kc = koszul_complex(ideal)
        self.kc = kc
        self.p = p = kc.ring.p
        self.size = kc.dim(i, self.d)
        rng = np.random.default_rng(seed) if seed is not None else None
        out_blocks = {w: (cols, B) for w, cols, _, B in kc.blocks(i, self.d)} if i > 0 else {}
        in_blocks = {w: (rows, B) for w, _, rows, B in kc.blocks(i + 1, self.d - 1)} \
            if self.d >= 1 else {}
        from .koszul import _group
        groups = _group(kc.weight_codes(i, self.d))
        self.blocks = []          # (cols, Q, b, h)
        reps = []
        for w, cols in groups.items():
            n = len(cols)
            if w in out_blocks and out_blocks[w][1].size:
                Z = nullspace_mod_p(out_blocks[w][1], p)
            else:
                Z = np.eye(n, dtype=np.int64)
            if Z.shape[1] == 0:
                continue
            if rng is not None:
                Z = Z[:, rng.permutation(Z.shape[1])]
                Z = Z * rng.integers(1, p, size=Z.shape[1]) % p
            if w in in_blocks and in_blocks[w][1].size:
                Rt, piv = echelon(in_blocks[w][1].T, p)
                im = Rt[:len(piv)].T
            else:
                im = np.zeros((n, 0), dtype=np.int64)
            b = im.shape[1]
            _, piv = echelon(np.concatenate([im, Z], axis=1), p)
            H = Z[:, [c - b for c in piv if c >= b]]
            h = H.shape[1]
            if h == 0:
                continue
            _, Q, _ = rref_with_transform(np.concatenate([im, H], axis=1), p)
            self.blocks.append((cols, Q[b:b + h], h))
            for k in range(h):
                reps.append((cols, H[:, k]))
        self.dim = len(reps)
        self.representatives = np.zeros((self.dim, self.size), dtype=np.int64)
        for t, (cols, v) in enumerate(reps):
            self.representatives[t, cols] = v

    def coordinates(self, V: np.ndarray) -> np.ndarray:
        """Homology coordinates of cycles given as columns of V (size × m)."""
        out = []
        for cols, Qh, h in self.blocks:
            out.append(Qh @ V[cols] % self.p)
        return np.concatenate(out, axis=0) if out else np.zeros((0, V.shape[1]), dtype=np.int64)

    def matrix(self, sigma) -> np.ndarray:
        M = _sigma_dense(sigma, self.p)
        ring = self.kc.ring
        L = exterior_power(M, self.i, self.p)
        R = degree_action(M, ring, self.d)
        nK, dm = L.shape[0], R.shape[0]
        X = self.representatives.reshape(self.dim, nK, dm)
        img = np.einsum("ab,tbc,dc->tad", L, X, R, optimize=True) % self.p
        return self.coordinates(img.reshape(self.dim, -1).T)


def tor_space(ideal, i: int, j: int, seed: int | None = None) -> TorSpace:
    ring = as_ring(ideal)
    cache = ring.__dict__.setdefault("_tor_spaces", {})
    key = (i, j, seed)
    if key not in cache:
        cache[key] = TorSpace(ideal, i, j, seed)
    return cache[key]


@dataclass
class TorRepresentation:
    i: int
    j: int
    matrix: ExactMatrix
    trace: FieldElement

    @property
    def dim(self) -> int:
        return self.matrix.rows


def tor_representation(sigma, ideal, i: int, j: int, seed: int | None = None) -> TorRepresentation:
    """Matrix of σ on Tor_i(k, S_X)_j.

    ``seed`` permutes and rescales the kernel vectors before representatives
    are picked, giving a different but equivalent homology basis.
    """
    ring = as_ring(ideal)
    M = _sigma_dense(sigma, ring.p)
    if not preserves_ideal(M, ring):
        raise IdealNotPreserved("σ does not map I_2 into itself")
    space = tor_space(ideal, i, j, seed)
    if space.dim == 0:
        raise ZeroSpace(f"Tor_{i}(k, S_X)_{j} = 0")
    T = space.matrix(M)
    F = PrimeField(ring.p)
    return TorRepresentation(i, j, ExactMatrix.from_dense(T, ring.p), F(int(np.trace(T))))


@dataclass
class BlockAudit:
    i: int
    blocks: dict[int, int]                  # j -> block size
    invertible: bool
    homomorphic: bool
    pairs_checked: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.invertible and self.homomorphic

    def to_json(self) -> dict:
        return {"i": self.i, "blocks": {str(k): v for k, v in self.blocks.items()},
                "invertible": self.invertible, "homomorphic": self.homomorphic,
                "pairs_checked": self.pairs_checked, "ok": self.ok}


def block_diagonal_audit(group: Sequence[CandidateAutomorphism], ideal, i: int,
                         pairs: int = 200, seed: int = 0, max_row: int = 3) -> BlockAudit:
    """Per internal degree j, check that σ ↦ ρ(σ) on Tor_i(k,S_X)_j is an invertible homomorphism."""
    kc = koszul_complex(ideal)
    p = kc.ring.p
    blocks = {}
    for j in range(i, i + max_row + 1):
        b = kc.betti(i, j)
        if b:
            blocks[j] = b
    rng = np.random.default_rng(seed)
    invertible, homomorphic = True, True
    failures = []
    for j in blocks:
        space = tor_space(ideal, i, j)
        mats = [space.matrix(s.dense()) for s in group]
        for s, T in zip(group, mats):
            if rank_mod_p(T, p) != T.shape[0]:
                invertible = False
                failures.append(("singular", j, s.label))
        for a, b in rng.integers(0, len(group), size=(pairs, 2)).tolist():
            st = compose(group[a], group[b])
            lhs = space.matrix(st.dense())
            rhs = mats[a] @ mats[b] % p
            if not projectively_equal(lhs, rhs, p):
                homomorphic = False
                failures.append(("hom", j, group[a].label, group[b].label))
    return BlockAudit(i, blocks, invertible, homomorphic, pairs * len(blocks), failures)


def character_table_slice(group: Sequence[CandidateAutomorphism], ideal, i: int,
                          j: int) -> dict[int, int]:
    """Trace of every group element on Tor_i(k, S_X)_j, keyed by position in ``group``."""
    space = tor_space(ideal, i, j)
    if space.dim == 0:
        raise ZeroSpace(f"Tor_{i}(k, S_X)_{j} = 0")
    return {k: int(np.trace(space.matrix(s.dense()))) % space.p for k, s in enumerate(group)}
