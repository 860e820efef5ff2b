"""Roots in F_p of dense univariate polynomials.

Polynomials are coefficient lists, lowest degree first, no trailing zeros.
"""

from __future__ import annotations

import random
from typing import Optional

BRUTE_FORCE_LIMIT = 1 << 16


def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mod(f, g, p):
    f = [x % p for x in f]
    _trim(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv % p
        s = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[s + i] = (f[s + i] - c * gi) % p
        _trim(f)
    return f


def poly_mulmod(a, b, g, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_mod(out, g, p)


def poly_powmod(base, e, g, p):
    result = [1]
    base = poly_mod(base, g, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, g, p)
        base = poly_mulmod(base, base, g, p)
        e >>= 1
    return poly_mod(result, g, p)


def poly_gcd(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def poly_divexact(f, g, p):
    f = [x % p for x in f]
    dg = len(g) - 1
    q = [0] * (len(f) - dg)
    inv = pow(g[-1], -1, p)
    for s in range(len(f) - 1 - dg, -1, -1):
        c = f[s + dg] * inv % p
        q[s] = c
        for i, gi in enumerate(g):
            f[s + i] = (f[s + i] - c * gi) % p
    return _trim(q)


def poly_eval(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def roots_mod_p(f, p: int, rng: Optional[random.Random] = None) -> list:
    """Sorted distinct roots of f in F_p (f nonzero, degree >= 1)."""
    f = _trim([x % p for x in f])
    if len(f) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if p < BRUTE_FORCE_LIMIT:
        return [x for x in range(p) if poly_eval(f, x, p) == 0]
    rng = rng or random.Random(0)
    # product of the distinct linear factors: gcd(f, x^p - x)
    xp = poly_powmod([0, 1], p, f, p)
    g = poly_gcd(f, poly_sub(xp, [0, 1], p), p)
    roots: list = []
    _split(g, p, rng, roots)
    return sorted(roots)


def _split(g, p, rng, out):
    d = len(g) - 1
    if d <= 0:
        return
    if d == 1:
        out.append((-g[0]) * pow(g[1], -1, p) % p)
        return
    # equal-degree splitting for degree-1 factors (Cantor-Zassenhaus)
    while True:
        a = rng.randrange(p)
        h = poly_powmod([a, 1], (p - 1) // 2, g, p)
        h = poly_gcd(g, poly_sub(h, [1], p), p)
        if 0 < len(h) - 1 < d:
            break
    _split(h, p, rng, out)
    _split(poly_divexact(g, h, p), p, rng, out)
