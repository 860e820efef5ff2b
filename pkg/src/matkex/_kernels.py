"""Dense mod-p kernels for primes below 2**32.

Entries are held as ``uint64`` so a product of two residues never wraps.
Two implementations share one contract: a numba ``@njit`` path and a
vectorised numpy path.  ``MATKEX_NUMBA=0`` in the environment forces the
numpy path; it is also used when numba cannot be imported.
"""

from __future__ import annotations

import os

import numpy as np

KERNEL_PRIME_LIMIT = 1 << 32

_want_numba = os.environ.get("MATKEX_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _want_numba:
        raise ImportError("disabled by MATKEX_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def rref_numpy(a: np.ndarray, p: int):
    """Reduced row echelon form of ``a`` (uint64, entries < p) in place.

    Returns ``(a, pivot_columns)``; the pivot rows are the leading rows.
    """
    p = np.uint64(p)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = np.uint64(pow(int(a[r, c]), -1, int(p)))
        a[r] = a[r] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            f = (p - col[hit]) % p
            a[hit] = (a[hit] + np.outer(f, a[r]) % p) % p
        pivots.append(c)
        r += 1
    return a, pivots


def matmul_numpy(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    p = np.uint64(p)
    n, k = a.shape
    out = np.zeros((n, b.shape[1]), dtype=np.uint64)
    for t in range(k):
        out = (out + np.outer(a[:, t], b[t]) % p) % p
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _inv_mod(a, p):
        # Fermat inverse; p is prime
        result = np.uint64(1)
        base = a % p
        e = p - np.uint64(2)
        while e > 0:
            if e & np.uint64(1):
                result = result * base % p
            base = base * base % p
            e >>= np.uint64(1)
        return result

    @njit(cache=True)
    def _rref_numba(a, p, pivots):
        rows, cols = a.shape
        r = 0
        npiv = 0
        for c in range(cols):
            if r == rows:
                break
            k = -1
            for i in range(r, rows):
                if a[i, c] != 0:
                    k = i
                    break
            if k < 0:
                continue
            if k != r:
                for j in range(cols):
                    t = a[r, j]
                    a[r, j] = a[k, j]
                    a[k, j] = t
            inv = _inv_mod(a[r, c], p)
            for j in range(c, cols):
                a[r, j] = a[r, j] * inv % p
            for i in range(rows):
                if i == r:
                    continue
                f = a[i, c]
                if f == 0:
                    continue
                f = p - f
                for j in range(c, cols):
                    a[i, j] = (a[i, j] + f * a[r, j] % p) % p
            pivots[npiv] = c
            npiv += 1
            r += 1
        return npiv

    @njit(cache=True)
    def _matmul_numba(a, b, p):
        n, k = a.shape
        m = b.shape[1]
        out = np.zeros((n, m), dtype=np.uint64)
        for i in range(n):
            for t in range(k):
                x = a[i, t]
                if x == 0:
                    continue
                for j in range(m):
                    out[i, j] = (out[i, j] + x * b[t, j] % p) % p
        return out

    def rref_numba(a: np.ndarray, p: int):
        pivots = np.empty(min(a.shape), dtype=np.int64)
        npiv = _rref_numba(a, np.uint64(p), pivots)
        return a, [int(c) for c in pivots[:npiv]]

    def matmul_numba(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
        return _matmul_numba(a, b, np.uint64(p))

    rref = rref_numba
    matmul = matmul_numba
    BACKEND = "numba"
else:
    rref = rref_numpy
    matmul = matmul_numpy
    BACKEND = "numpy"


def as_array(rows, p: int) -> np.ndarray:
    if isinstance(rows, np.ndarray) and rows.dtype != object:
        return (rows.astype(np.int64) % p).astype(np.uint64)
    return np.array([[x % p for x in row] for row in rows], dtype=np.uint64).reshape(len(rows), -1)
