"""Exact integer matrices: Bareiss determinant, adjugate, Smith normal form.

Size note for the attack: at a 500-bit prime the entries of the right-hand
side reach about 3*500 bits and the 5x5 determinant of the augmented system
has magnitude around 2**3500 (bounded crudely by Hadamard at ~2**7600).
Python ints handle this without any special care; nothing here is
constant-time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        rows = [list(map(int, r)) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), n_cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, cols: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls.from_rows(zip(*cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)]
                              for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)]) \
            if self.rows else IntMatrix(self.cols, 0, ())

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.col(j) for j in range(other.cols)]
            return IntMatrix(self.rows, other.cols, tuple(
                sum(a * b for a, b in zip(self.row(i), c))
                for i in range(self.rows) for c in cols))
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(self.row(i), vec))
                     for i in range(self.rows))

    def mod(self, m: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(x % m for x in self.entries))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([[self[i, j] for j in cols] for i in rows])

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.to_rows()]

    @classmethod
    def from_json(cls, data: list[list[str]]) -> "IntMatrix":
        return cls.from_rows([[int(x) for x in r] for r in data])


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ M @ V == S`` with U, V unimodular and S in Smith form."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def divisors(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.shape))]


def det_bareiss(M: IntMatrix) -> int:
    """Exact determinant by fraction-free elimination."""
    n = M.rows
    if M.cols != n:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = M.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def adjugate(M: IntMatrix) -> IntMatrix:
    """Classical adjoint, so that ``M @ adjugate(M) == det(M) * I``."""
    n = M.rows
    if M.cols != n:
        raise ValueError("adjugate of a non-square matrix")
    if n == 0:
        return M
    if n == 1:
        return IntMatrix(1, 1, (1,))
    idx = range(n)
    # adj[i][j] is the (j, i) cofactor
    cof = [[(-1) ** (i + j) * det_bareiss(M.submatrix([r for r in idx if r != i],
                                                      [c for c in idx if c != j]))
            for j in idx] for i in idx]
    return IntMatrix.from_rows([[cof[j][i] for j in idx] for i in idx])


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for r in a:
        r[i], r[j] = r[j], r[i]


def _add_row(a, dst, src, q):
    # row[dst] -= q * row[src]
    rs, rd = a[src], a[dst]
    for k in range(len(rd)):
        if rs[k]:
            rd[k] -= q * rs[k]


def _add_col(a, dst, src, q):
    for r in a:
        if r[src]:
            r[dst] -= q * r[src]


def smith_normal_form(M: IntMatrix) -> SnfDecomposition:
    """Smith normal form with transforms, pivoting on the smallest entry."""
    m, n = M.shape
    a = M.to_rows()
    U = IntMatrix.identity(m).to_rows()
    V = IntMatrix.identity(n).to_rows()
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = a[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                _swap_rows(a, t, pi)
                _swap_rows(U, t, pi)
            if pj != t:
                _swap_cols(a, t, pj)
                _swap_cols(V, t, pj)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // piv
                    _add_row(a, i, t, q)
                    _add_row(U, i, t, q)
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // piv
                    _add_col(a, j, t, q)
                    _add_col(V, j, t, q)
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # pivot row/column are clear; pivot must divide the rest
            bad = next((i for i in range(t + 1, m)
                        for j in range(t + 1, n) if a[i][j] % piv), None)
            if bad is None:
                break
            _add_row(a, t, bad, -1)
            _add_row(U, t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
    return SnfDecomposition(IntMatrix.from_rows(U), IntMatrix.from_rows(a),
                            IntMatrix.from_rows(V) if n else IntMatrix(0, 0, ()))


def _top_minor_gcd(M: IntMatrix) -> int:
    # gcd of the maximal (cols x cols) minors; needs rows >= cols
    from itertools import combinations
    g = 0
    for rows in combinations(range(M.rows), M.cols):
        g = math.gcd(g, det_bareiss(M.submatrix(rows, range(M.cols))))
        if g == 1:
            break
    return g


def _diagonalize_mod(M: IntMatrix, m: int) -> tuple[list[int], list[list[int]]]:
    # Smith-style elimination on representatives mod m; returns the diagonal
    # and a column transform V, invertible mod m, with M V == U^-1 D (mod m)
    rows, cols = M.shape
    a = M.mod(m).to_rows()
    V = IntMatrix.identity(cols).to_rows()
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    v = a[i][j]
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                _swap_rows(a, t, pi)
            if pj != t:
                _swap_cols(a, t, pj)
                _swap_cols(V, t, pj)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // piv
                    a[i] = [(x - q * y) % m for x, y in zip(a[i], a[t])]
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // piv
                    for r in a:
                        r[j] = (r[j] - q * r[t]) % m
                    for r in V:
                        r[j] = (r[j] - q * r[t]) % m
                    dirty = dirty or a[t][j] != 0
            if not dirty:
                break
    diag = [a[t][t] if t < rows else 0 for t in range(cols)]
    return diag, V


def kernel_vector_mod(M: IntMatrix, m: int) -> Optional[tuple[int, ...]]:
    """Nonzero ``v`` with ``M @ v == 0 (mod m)``, or ``None`` if none exists.

    ``None`` means the columns of M are independent modulo every prime
    factor of m.  The vector is ``(m / g) * V[:, t]`` where V comes from a
    diagonalization modulo the relevant part of m and the diagonal entry
    d_t has the largest gcd g with that modulus.
    """
    if m < 2:
        raise ValueError("modulus must be >= 2")
    c = M.cols
    if c == 0:
        return None
    Mm = M.mod(m)
    # dependencies live only at primes dividing the gcd of the maximal
    # minors (the product of the elementary divisors), so solve modulo that
    # common part h and lift by m / h
    h = m
    if M.rows >= c:
        h = math.gcd(_top_minor_gcd(Mm), m)
        if h == 1:
            return None
    diag, V = _diagonalize_mod(Mm, h)
    g, t = max((math.gcd(d, h), t) for t, d in enumerate(diag))
    if g == 1:
        return None
    v = tuple((m // g) * r[t] % m for r in V)
    if any(x % m for x in Mm @ v) or not any(v):
        raise AssertionError("kernel vector failed re-verification")
    return v
