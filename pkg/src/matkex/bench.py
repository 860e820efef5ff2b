"""Timing of the numba and numpy mod-p kernels against each other."""

from __future__ import annotations

import time

import numpy as np

from . import _kernels


def _best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmark(sizes=(32, 64, 128, 256), p: int = 2147483647, repeats: int = 3, seed: int = 0) -> list:
    """Best-of-``repeats`` seconds for RREF and matmul at each size.

    Every row also records whether both backends produced identical output.
    The numba column is None when numba is unavailable.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        a = rng.integers(0, p, size=(n, n + 1), dtype=np.uint64)
        b = rng.integers(0, p, size=(n + 1, n), dtype=np.uint64)
        row = {"n": n, "p": p}
        ref_r, ref_piv = _kernels.rref_numpy(a.copy(), p)
        ref_m = _kernels.matmul_numpy(a, b, p)
        row["rref_numpy"] = _best(lambda: _kernels.rref_numpy(a.copy(), p), repeats)
        row["matmul_numpy"] = _best(lambda: _kernels.matmul_numpy(a, b, p), repeats)
        if _kernels.HAVE_NUMBA:
            # first call compiles (or loads the cache); keep it out of the timing
            got_r, got_piv = _kernels.rref_numba(a.copy(), p)
            got_m = _kernels.matmul_numba(a, b, p)
            row["agree"] = bool(np.array_equal(got_r, ref_r) and got_piv == ref_piv
                                and np.array_equal(got_m, ref_m))
            row["rref_numba"] = _best(lambda: _kernels.rref_numba(a.copy(), p), repeats)
            row["matmul_numba"] = _best(lambda: _kernels.matmul_numba(a, b, p), repeats)
        else:
            row["agree"] = None
            row["rref_numba"] = row["matmul_numba"] = None
        rows.append(row)
    return rows


def format_table(rows: list) -> str:
    head = f"{'n':>5} {'rref numpy':>12} {'rref numba':>12} {'matmul numpy':>13} {'matmul numba':>13}  agree"
    lines = [head]

    def f(x):
        return f"{x:.5f}" if x is not None else "-"

    for r in rows:
        lines.append(f"{r['n']:>5} {f(r['rref_numpy']):>12} {f(r['rref_numba']):>12} "
                     f"{f(r['matmul_numpy']):>13} {f(r['matmul_numba']):>13}  {r['agree']}")
    return "\n".join(lines)
