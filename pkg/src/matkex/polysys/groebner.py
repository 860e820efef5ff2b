"""Buchberger's algorithm over F_p.

Pairs are pruned with the Gebauer-Moeller criteria and selected by the
normal strategy (smallest lcm in the active order first).  Every basis
returned is reduced: monic, inter-reduced, sorted by leading monomial.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ring import MPoly, PolyRing, ex_degree, ex_lcm


class BudgetExhausted(RuntimeError):
    """Raised when a Groebner computation exceeds its resource caps."""

    def __init__(self, msg: str, stats: dict):
        super().__init__(msg)
        self.stats = stats


@dataclass
class Budget:
    max_pairs: Optional[int] = None
    max_reductions: Optional[int] = None


@dataclass
class GroebnerBasis:
    ring: PolyRing
    polys: list
    stats: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    @property
    def order(self) -> str:
        return self.ring.order

    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant()

    def reduce(self, f: MPoly) -> MPoly:
        return normal_form(f, self.polys)

    def contains(self, f: MPoly) -> bool:
        return not normal_form(f, self.polys)

    def to_json(self) -> dict:
        return {
            "order": self.ring.order,
            "modulus": str(self.ring.p),
            "nvars": self.ring.nvars,
            "basis": [[[str(c), list(e)] for c, e in g.sorted_terms()] for g in self.polys],
        }


def _reducers(G: Sequence[MPoly]):
    out = []
    for g in G:
        if g:
            lk = g.lm_key
            out.append((lk, g.ring.ex(lk), g))
    return out


def _nf(terms: dict, reducers, ring: PolyRing, full: bool = True) -> dict:
    """Multivariate division remainder; ``reducers`` must be monic."""
    p = ring.p
    ex = ring.ex
    div = ring.divides
    f = dict(terms)
    heap = [-k for k in f]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        k = -heapq.heappop(heap)
        c = f.pop(k, 0)
        if not c:
            continue
        ek = ex(k)
        for lk, le, g in reducers:
            if div(le, ek):
                sh = k - lk
                for gk, gc in g.terms.items():
                    if gk == lk:
                        continue
                    nk = gk + sh
                    old = f.get(nk)
                    if old is None:
                        f[nk] = (-c * gc) % p
                        heapq.heappush(heap, -nk)
                    else:
                        nc = (old - c * gc) % p
                        f[nk] = nc
                break
        else:
            rem[k] = c
            if not full:
                for kk, cc in f.items():
                    if cc:
                        rem[kk] = cc
                return rem
    return rem


def normal_form(f: MPoly, G: Sequence[MPoly]) -> MPoly:
    """Remainder of f under full multivariate division by G."""
    if not f:
        return f
    red = _reducers([g.monic() for g in G])
    return MPoly(f.ring, _nf(f.terms, red, f.ring))


def spoly(f: MPoly, g: MPoly) -> MPoly:
    ring = f.ring
    fl, gl = f.lm_key, g.lm_key
    lcm = ring.ex_to_key(ex_lcm(ring.ex(fl), ring.ex(gl)))
    p = ring.p
    a = f.mul_term(lcm - fl + ring.one_key, pow(f.lc, -1, p))
    b = g.mul_term(lcm - gl + ring.one_key, pow(g.lc, -1, p))
    return a - b


def interreduce(G: Sequence[MPoly]) -> list:
    """Reduced basis from a Groebner basis: drop redundant, tail-reduce, sort."""
    ring = G[0].ring if G else None
    gs = [g.monic() for g in G if g]
    # drop elements whose leading monomial is divisible by another's
    gs.sort(key=lambda g: g.lm_key)
    keep: list = []
    for g in gs:
        le = ring.ex(g.lm_key)
        if any(ring.divides(ring.ex(h.lm_key), le) for h in keep):
            continue
        keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = _reducers(keep[:i] + keep[i + 1:])
        lk = g.lm_key
        tail = {k: c for k, c in g.terms.items() if k != lk}
        r = _nf(tail, others, ring)
        r[lk] = 1
        out.append(MPoly(ring, r))
    out.sort(key=lambda g: g.lm_key)
    return out


def buchberger(gens: Sequence[MPoly], budget: Optional[Budget] = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = [g for g in gens if g]
    if not gens:
        raise ValueError("need at least one nonzero generator")
    ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise ValueError("generators live in different rings")
    budget = budget or Budget()
    stats = {"pairs": 0, "reductions": 0, "zero_reductions": 0, "max_degree": 0, "basis_peak": 0}
    one = ring.one_key
    ex = ring.ex
    div = ring.divides

    G: list = []       # monic polys
    Gex: list = []     # leading exponent words
    alive: list = []
    pairs: list = []   # heap of (lcm_key, seq, i, j, lcm_ex)
    seq = 0

    def update(h: MPoly):
        nonlocal pairs, seq
        le = ex(h.lm_key)
        t = len(G)
        cand = []
        for i in range(t):
            if alive[i]:
                lcm = ex_lcm(Gex[i], le)
                cand.append((lcm, i, lcm == Gex[i] + le))
        # criterion M: drop (i,t) when lcm(j,t) strictly divides lcm(i,t)
        kept = [
            a for a in cand
            if not any(b[0] != a[0] and div(b[0], a[0]) for b in cand)
        ]
        # criterion F plus the coprime (product) criterion
        by_lcm: dict = {}
        for a in kept:
            prev = by_lcm.get(a[0])
            if prev is None or (a[2] and not prev[2]):
                by_lcm[a[0]] = a
        new = [a for a in by_lcm.values() if not a[2]]
        # criterion B on existing pairs
        survivors = []
        for item in pairs:
            _, _, i, j, lcm = item
            if div(le, lcm) and ex_lcm(Gex[i], le) != lcm and ex_lcm(Gex[j], le) != lcm:
                continue
            survivors.append(item)
        for lcm, i, _ in new:
            seq += 1
            survivors.append((ring.ex_to_key(lcm), seq, i, t, lcm))
        heapq.heapify(survivors)
        pairs = survivors
        for i in range(t):
            if alive[i] and div(le, Gex[i]):
                alive[i] = False
        G.append(h)
        Gex.append(le)
        alive.append(True)
        stats["max_degree"] = max(stats["max_degree"], h.total_degree())
        stats["basis_peak"] = max(stats["basis_peak"], sum(alive))

    for g in interreduce_input(gens):
        if g.is_constant():
            return GroebnerBasis(ring, [ring.one()], stats)
        update(g)

    while pairs:
        if budget.max_pairs is not None and stats["pairs"] >= budget.max_pairs:
            raise BudgetExhausted("pair budget exhausted", dict(stats, pending=len(pairs)))
        if budget.max_reductions is not None and stats["reductions"] >= budget.max_reductions:
            raise BudgetExhausted("reduction budget exhausted", dict(stats, pending=len(pairs)))
        lk, _, i, j, _ = heapq.heappop(pairs)
        stats["pairs"] += 1
        gi, gj = G[i], G[j]
        s: dict = dict(gi.mul_term(lk - gi.lm_key + one, 1).terms)
        p = ring.p
        for k, c in gj.mul_term(lk - gj.lm_key + one, 1).terms.items():
            nc = (s.get(k, 0) - c) % p
            if nc:
                s[k] = nc
            else:
                s.pop(k, None)
        stats["reductions"] += 1
        red = [(Gex_k, G[idx]) for idx, Gex_k in enumerate(Gex) if alive[idx]]
        reducers = [(g.lm_key, e, g) for e, g in red]
        h = _nf(s, reducers, ring)
        if not h:
            stats["zero_reductions"] += 1
            continue
        h = MPoly(ring, h).monic()
        if h.is_constant():
            return GroebnerBasis(ring, [ring.one()], stats)
        update(h)

    basis = interreduce([G[i] for i in range(len(G)) if alive[i]])
    return GroebnerBasis(ring, basis, stats)


def interreduce_input(gens: Sequence[MPoly]) -> list:
    """Linear-algebra pre-pass: Gaussian elimination on the generators'
    coefficient rows so that no two inputs share a leading monomial."""
    ring = gens[0].ring
    p = ring.p
    pivots: dict = {}
    for g in sorted(gens, key=lambda g: -g.lm_key):
        t = dict(g.terms)
        while t:
            lk = max(t)
            piv = pivots.get(lk)
            if piv is None:
                inv = pow(t[lk], -1, p)
                pivots[lk] = {k: c * inv % p for k, c in t.items()}
                break
            c = t[lk]
            for k, v in piv.items():
                nc = (t.get(k, 0) - c * v) % p
                if nc:
                    t[k] = nc
                else:
                    t.pop(k, None)
    return [MPoly(ring, t) for _, t in sorted(pivots.items())]


def is_groebner(G: Sequence[MPoly]) -> bool:
    """Every S-polynomial of G reduces to zero modulo G."""
    return not failing_spolys(G)


def failing_spolys(G: Sequence[MPoly]) -> list:
    gs = [g for g in G if g]
    red = _reducers([g.monic() for g in gs])
    out = []
    for a in range(len(gs)):
        for b in range(a + 1, len(gs)):
            s = spoly(gs[a], gs[b])
            if s and _nf(s.terms, red, s.ring):
                out.append((a, b))
    return out
