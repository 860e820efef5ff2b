"""Dense matrices over the integers or a prime field.

A :class:`Matrix` is an immutable tuple-of-rows of Python ints together with
its ring: ``modulus=None`` for the integers, a prime ``p`` for Z/p.  All the
protocol objects (keys, transcripts, conjugators) are 4x4 or m x m matrices
of this type, so nothing here tries to be clever about size.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import _kernels
from .arith import NotInvertible, PrimeField


class NoSolution(ArithmeticError):
    """A linear system has no solution."""


def _mod_of(ring) -> Optional[int]:
    if ring is None or ring == "ZZ":
        return None
    return int(ring)


@dataclass(frozen=True)
class Matrix:
    rows: tuple
    modulus: Optional[int] = None

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if self.modulus is not None:
            m = int(self.modulus)
            object.__setattr__(self, "modulus", m)
            rows = tuple(tuple(x % m for x in r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int, modulus=None) -> "Matrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), _mod_of(modulus))

    @classmethod
    def zeros(cls, n: int, m: Optional[int] = None, modulus=None) -> "Matrix":
        return cls(tuple((0,) * (n if m is None else m) for _ in range(n)), _mod_of(modulus))

    @classmethod
    def scalar(cls, n: int, c: int, modulus=None) -> "Matrix":
        return cls(tuple(tuple(c if i == j else 0 for j in range(n)) for i in range(n)), _mod_of(modulus))

    # shape ------------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def is_square(self) -> bool:
        r, c = self.shape
        return r == c

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    def entries(self):
        return [x for r in self.rows for x in r]

    @property
    def T(self) -> "Matrix":
        return Matrix(tuple(zip(*self.rows)), self.modulus)

    # arithmetic -------------------------------------------------------
    def _check(self, other: "Matrix"):
        if self.modulus != other.modulus:
            raise ValueError(f"ring mismatch: {self.modulus} vs {other.modulus}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        cols = tuple(zip(*other.rows))
        if len(cols) and len(self.rows[0]) != len(other.rows):
            raise ValueError("dimension mismatch")
        out = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows)
        return Matrix(out, self.modulus)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.modulus)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.modulus)

    def __neg__(self) -> "Matrix":
        return Matrix(tuple(tuple(-a for a in r) for r in self.rows), self.modulus)

    def scale(self, c: int) -> "Matrix":
        return Matrix(tuple(tuple(c * a for a in r) for r in self.rows), self.modulus)

    def apply(self, v: Sequence[int]) -> tuple:
        """Matrix-vector product."""
        out = tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)
        if self.modulus is not None:
            out = tuple(x % self.modulus for x in out)
        return out

    def mod(self, p) -> "Matrix":
        return Matrix(self.rows, int(p))

    def max_abs(self) -> int:
        return max((abs(x) for r in self.rows for x in r), default=0)

    def det(self):
        return mat_det(self)

    def inv(self) -> "Matrix":
        return mat_inv(self)

    def block(self, i: int, j: int) -> "Matrix":
        return block_get(self, i, j)

    # serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "ring": "ZZ" if self.modulus is None else str(self.modulus),
            "rows": [[str(x) for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Matrix":
        ring = d["ring"]
        rows = tuple(tuple(int(x) for x in r) for r in d["rows"])
        return cls(rows, None if ring == "ZZ" else int(ring))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return a @ b


def mat_det(a: Matrix) -> int:
    if not a.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = a.n
    if a.modulus is not None:
        p = a.modulus
        m = [list(r) for r in a.rows]
        det = 1
        for c in range(n):
            k = next((r for r in range(c, n) if m[r][c]), None)
            if k is None:
                return 0
            if k != c:
                m[c], m[k] = m[k], m[c]
                det = -det
            det = det * m[c][c] % p
            inv = pow(m[c][c], -1, p)
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] * inv % p
                    m[r] = [(x - f * y) % p for x, y in zip(m[r], m[c])]
        return det % p
    # Bareiss fraction-free elimination
    m = [list(r) for r in a.rows]
    sign, prev = 1, 1
    for c in range(n - 1):
        if m[c][c] == 0:
            k = next((r for r in range(c + 1, n) if m[r][c]), None)
            if k is None:
                return 0
            m[c], m[k] = m[k], m[c]
            sign = -sign
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]) // prev
        prev = m[c][c]
    return sign * m[n - 1][n - 1] if n else 1


def mat_inv(a: Matrix) -> Matrix:
    if not a.is_square:
        raise ValueError("inverse of a non-square matrix")
    n = a.n
    if a.modulus is not None:
        p = a.modulus
        m = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a.rows)]
        for c in range(n):
            k = next((r for r in range(c, n) if m[r][c]), None)
            if k is None:
                raise NotInvertible("singular matrix")
            m[c], m[k] = m[k], m[c]
            inv = pow(m[c][c], -1, p)
            m[c] = [x * inv % p for x in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [(x - f * y) % p for x, y in zip(m[r], m[c])]
        return Matrix(tuple(tuple(r[n:]) for r in m), p)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a.rows)]
    for c in range(n):
        k = next((r for r in range(c, n) if m[r][c]), None)
        if k is None:
            raise NotInvertible("singular matrix")
        m[c], m[k] = m[k], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    out = []
    for r in m:
        row = []
        for x in r[n:]:
            if x.denominator != 1:
                raise NotInvertible("inverse is not integral (det != +-1)")
            row.append(x.numerator)
        out.append(tuple(row))
    return Matrix(tuple(out), None)


def block_get(z: Matrix, i: int, j: int) -> Matrix:
    """2x2 block ``Z_ij`` (1-based) of a 4x4 matrix."""
    if z.shape != (4, 4):
        raise ValueError("block_get expects a 4x4 matrix")
    if i not in (1, 2) or j not in (1, 2):
        raise IndexError("block index must be 1 or 2")
    r0, c0 = 2 * (i - 1), 2 * (j - 1)
    return Matrix(tuple(z.rows[r][c0:c0 + 2] for r in (r0, r0 + 1)), z.modulus)


def block_matrix(z11: Matrix, z12: Matrix, z21: Matrix, z22: Matrix) -> Matrix:
    top = tuple(a + b for a, b in zip(z11.rows, z12.rows))
    bot = tuple(a + b for a, b in zip(z21.rows, z22.rows))
    return Matrix(top + bot, z11.modulus)


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    za = Matrix.zeros(a.n, b.n, a.modulus)
    zb = Matrix.zeros(b.n, a.n, a.modulus)
    return block_matrix(a, za, zb, b)


def commutes(a: Matrix, b: Matrix) -> bool:
    return a @ b == b @ a


# --- linear systems over F_p ------------------------------------------

_KERNEL_MIN_CELLS = 400


def rref_rows(rows: Sequence[Sequence[int]], p: int):
    """Reduced row echelon form over F_p.

    Returns ``(rows, pivot_columns)`` with the nonzero rows first.  Large
    systems over primes below 2**32 go through the compiled kernel; the
    result is identical either way since the RREF is unique.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    if p < _kernels.KERNEL_PRIME_LIMIT and len(rows) * ncols >= _KERNEL_MIN_CELLS:
        arr, piv = _kernels.rref(_kernels.as_array(rows, p), p)
        return arr.tolist(), piv
    m = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        k = next((i for i in range(r, len(m)) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], pr)]
        pivots.append(c)
        r += 1
    return m, pivots


def solve_linear(a: Sequence[Sequence[int]], b: Sequence[int], p: int) -> list:
    """One solution x of ``a x = b`` over F_p, free variables set to zero."""
    ncols = len(a[0]) if a else 0
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    red, piv = rref_rows(aug, p)
    if piv and piv[-1] == ncols:
        raise NoSolution("inconsistent linear system")
    x = [0] * ncols
    for i, c in enumerate(piv):
        x[c] = red[i][ncols] % p
    return x


def nullspace(a: Sequence[Sequence[int]], p: int, ncols: Optional[int] = None) -> list:
    """Basis of the right kernel of ``a`` over F_p."""
    ncols = len(a[0]) if a else (ncols or 0)
    red, piv = rref_rows(a, p) if a else ([], [])
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-red[i][f]) % p
        basis.append(v)
    return basis


def solve_right(a: Matrix, b: Matrix) -> Matrix:
    """Some Y with ``a @ Y == b`` (free variables zeroed)."""
    p = a.modulus
    if p is None:
        raise ValueError("solve_right needs a prime field")
    a._check(b)
    cols = []
    for j in range(b.shape[1]):
        cols.append(solve_linear(a.rows, [r[j] for r in b.rows], p))
    return Matrix(tuple(zip(*cols)), p)


def solve_left(a: Matrix, b: Matrix) -> Matrix:
    """Some X with ``X @ a == b`` (free variables zeroed)."""
    return solve_right(a.T, b.T).T


def left_reduce(x: Matrix):
    """Return ``(f, c)`` with f invertible, ``c = f @ x`` the RREF of x."""
    p = x.modulus
    if p is None:
        raise ValueError("left_reduce needs a prime field")
    n = x.n
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(x.rows)]
    m = [r[:] for r in aug]
    r = 0
    for c in range(x.shape[1]):
        if r == n:
            break
        k = next((i for i in range(r, n) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(n):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(v - f * w) % p for v, w in zip(m[i], m[r])]
        r += 1
    w = x.shape[1]
    c = Matrix(tuple(tuple(row[:w]) for row in m), p)
    f = Matrix(tuple(tuple(row[w:]) for row in m), p)
    return f, c


# --- sampling ---------------------------------------------------------

def transvection_word(n: int, word_len: int, rng: random.Random) -> list:
    """Random word of elementary transvections ``E_ij(s)``, i != j, s = +-1."""
    word = []
    for _ in range(word_len):
        i, j = rng.sample(range(n), 2)
        word.append((i, j, rng.choice((1, -1))))
    return word


def apply_word(word, n: int, modulus=None) -> Matrix:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, j, s in word:
        # left-multiply by E_ij(s): row_i += s * row_j
        m[i] = [a + s * b for a, b in zip(m[i], m[j])]
    return Matrix(tuple(map(tuple, m)), _mod_of(modulus))


def sample_sl(n: int, ring, word_len: int, rng: random.Random) -> Matrix:
    """Product of ``word_len`` random elementary transvections (det 1).

    The random choices do not depend on ``ring``, so reducing an integer
    sample mod p gives exactly the mod-p sample drawn from the same state.
    Entries are bounded by 2**word_len.
    """
    if word_len < 0:
        raise ValueError("word_len must be >= 0")
    return apply_word(transvection_word(n, word_len, rng), n, ring)


def sample_sl_uniform(n: int, p, rng: random.Random) -> Matrix:
    """Uniformly random element of SL_n(F_p)."""
    p = int(p)
    while True:
        rows = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        m = Matrix(tuple(map(tuple, rows)), p)
        d = mat_det(m)
        if d:
            inv = pow(d, -1, p)
            rows[0] = [x * inv for x in rows[0]]
            return Matrix(tuple(map(tuple, rows)), p)


def random_matrix(n: int, p: int, rng: random.Random) -> Matrix:
    return Matrix(tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(n)), p)


def random_invertible(n: int, p: int, rng: random.Random) -> Matrix:
    while True:
        m = random_matrix(n, p, rng)
        if mat_det(m):
            return m


def eval_poly(coeffs: Sequence[int], x: Matrix) -> Matrix:
    """``sum coeffs[k] * x**k`` by Horner's rule (x square)."""
    n = x.n
    acc = Matrix.zeros(n, modulus=x.modulus)
    for c in reversed(coeffs):
        acc = acc @ x + Matrix.scalar(n, c, x.modulus)
    return acc


def ring_of(p: Optional[int]):
    return None if p is None else PrimeField(int(p))
