"""Exact linear algebra over GF(p).

Matrices are stored sparsely (``ExactMatrix``) but eliminated densely with
numpy int64 arithmetic; every entry stays in [0, p) so products fit in 63 bits
for any word-sized prime below 2**31.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

_MAX_P = 2**31


def _check_p(p: int) -> None:
    if not 2 <= p < _MAX_P:
        raise ValueError(f"prime {p} outside supported range [2, 2^31)")


def echelon(A: np.ndarray, p: int, *, ncols: int | None = None,
            full: bool = True) -> tuple[np.ndarray, list[int]]:
    """Row-reduce ``A`` over GF(p), returning ``(R, pivot_columns)``.

    Pivots are searched only in the first ``ncols`` columns (default: all), so
    an augmented block to the right is carried along. The pivot for each
    column is the first row at or below the current position with a nonzero
    entry. With ``full=False`` only entries below pivots are cleared.
    """
    R = np.array(A, dtype=np.int64) % p
    m, n = R.shape
    if ncols is None:
        ncols = n
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        piv = int(R[r, c])
        if piv != 1:
            R[r, c:] = R[r, c:] * pow(piv, -1, p) % p
        if full:
            rows = np.flatnonzero(R[:, c])
            rows = rows[rows != r]
        else:
            rows = r + 1 + np.flatnonzero(R[r + 1:, c])
        if rows.size:
            f = R[rows, c]
            R[rows, c:] = (R[rows, c:] - np.outer(f, R[r, c:])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank_mod_p(A: np.ndarray, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    # loop runs over columns; put the short side there
    if A.shape[1] > A.shape[0]:
        A = A.T
    return len(echelon(A, p, full=False)[1])


def rref_with_transform(A: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Return ``(R, Q, pivots)`` with ``Q @ A == R (mod p)`` and R reduced."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    aug = np.concatenate([A % p, np.eye(m, dtype=np.int64)], axis=1)
    red, pivots = echelon(aug, p, ncols=n)
    return red[:, :n], red[:, n:], pivots


def nullspace_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right kernel of ``A``; shape (ncols, nullity)."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = echelon(A, p)
    free = [c for c in range(n) if c not in set(pivots)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        K[f, k] = 1
        for row, pc in enumerate(pivots):
            K[pc, k] = -R[row, f] % p
    return K


def integer_rank(rows: Iterable[Iterable[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free (Bareiss) elimination."""
    M = [list(map(int, r)) for r in rows]
    if not M or not M[0]:
        return 0
    m, n = len(M), len(M[0])
    rank, prev = 0, 1
    for c in range(n):
        piv = next((i for i in range(rank, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        pr = M[rank]
        for i in range(rank + 1, m):
            row = M[i]
            a = row[c]
            for k in range(c + 1, n):
                row[k] = (pr[c] * row[k] - a * pr[k]) // prev
            row[c] = 0
        prev = pr[c]
        rank += 1
        if rank == m:
            break
    return rank


class ExactMatrix:
    """Immutable sparse matrix over GF(p)."""

    __slots__ = ("rows", "cols", "p", "_entries", "_dense")

    def __init__(self, rows: int, cols: int, p: int, entries=None):
        _check_p(p)
        self.rows, self.cols, self.p = int(rows), int(cols), int(p)
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = int(v) % p
            if v:
                clean[(int(r), int(c))] = v
        self._entries = clean
        self._dense = None

    @classmethod
    def from_dense(cls, arr, p: int) -> "ExactMatrix":
        arr = np.asarray(arr, dtype=np.int64) % p
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        r, c = np.nonzero(arr)
        m = cls(arr.shape[0], arr.shape[1], p,
                {(int(i), int(j)): int(arr[i, j]) for i, j in zip(r, c)})
        return m

    @classmethod
    def identity(cls, n: int, p: int) -> "ExactMatrix":
        return cls(n, n, p, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "ExactMatrix":
        return cls(rows, cols, p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def __getitem__(self, rc) -> int:
        return self._entries.get(rc, 0)

    def dense(self) -> np.ndarray:
        """Dense int64 copy."""
        if self._dense is None:
            d = np.zeros((self.rows, self.cols), dtype=np.int64)
            for (r, c), v in self._entries.items():
                d[r, c] = v
            d.flags.writeable = False
            self._dense = d
        return self._dense.copy()

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, self.p,
                           {(c, r): v for (r, c), v in self._entries.items()})

    def _same_field(self, other: "ExactMatrix") -> None:
        if self.p != other.p:
            raise ValueError("matrices over different fields")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list] = {}
        for (r, c), v in other._entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        p = self.p
        for (r, k), v in self._entries.items():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = (out.get((r, c), 0) + v * w) % p
        return ExactMatrix(self.rows, other.cols, p, out)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out.get(k, 0) + v
        return ExactMatrix(self.rows, self.cols, self.p, out)

    def __neg__(self) -> "ExactMatrix":
        return self.scale(-1)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, c: int) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, self.p,
                           {k: v * c for k, v in self._entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.p == other.p
                and self._entries == other._entries)

    def __hash__(self):
        return hash((self.shape, self.p, frozenset(self._entries.items())))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, p={self.p}, nnz={self.nnz})"

    def is_zero(self) -> bool:
        return not self._entries

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self._entries.get((c, r), 0) == v for (r, c), v in self._entries.items())

    def rank(self) -> int:
        if not self._entries:
            return 0
        return rank_mod_p(self.dense(), self.p)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "ExactMatrix":
        rows, cols = list(rows), list(cols)
        return ExactMatrix.from_dense(self.dense()[np.ix_(rows, cols)], self.p)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "p": self.p,
                "entries": [[r, c, v] for (r, c), v in sorted(self._entries.items())]}

    @classmethod
    def from_json(cls, data) -> "ExactMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["rows"], data["cols"], data["p"],
                   {(r, c): v for r, c, v in data["entries"]})


def rref(M: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix, int]:
    """Reduced row-echelon form: returns ``(R, Q, rank)`` with ``Q @ M == R``."""
    R, Q, pivots = rref_with_transform(M.dense(), M.p)
    return ExactMatrix.from_dense(R, M.p), ExactMatrix.from_dense(Q, M.p), len(pivots)


def kernel_basis(M: ExactMatrix) -> list[np.ndarray]:
    """Basis of the right kernel as a list of length-``cols`` vectors."""
    K = nullspace_mod_p(M.dense(), M.p)
    return [K[:, k].copy() for k in range(K.shape[1])]


def rank(M: ExactMatrix) -> int:
    return M.rank()
