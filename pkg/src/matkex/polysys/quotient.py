"""Finite-dimensional quotient algebras and FGLM conversion to lex.

A zero-dimensional ideal I in F_p[x_1..x_k] is represented through its
quotient A = F_p[x]/I as a vector space of dimension r: the coordinates
of 1 and one r x r multiplication matrix per generator of A we care about.
The generators need not be the ring variables; FGLM only needs commuting
matrices and a cyclic vector, which lets callers push an algebra through
a change of coordinates (for example adjoining the entries of a matrix
inverse) before converting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..matlin import nullspace, rref_rows
from .groebner import _nf, _reducers
from .ring import MPoly, PolyRing


class NotZeroDimensional(ValueError):
    """The ideal has infinitely many solutions over the algebraic closure."""


def _matvec(m, v, p):
    return [sum(a * b for a, b in zip(row, v)) % p for row in m]


def _matmul(a, b, p):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) % p for c in cols] for r in a]


def _identity(r):
    return [[int(i == j) for j in range(r)] for i in range(r)]


@dataclass
class FiniteAlgebra:
    """Commutative F_p-algebra given by multiplication matrices.

    ``mult[i]`` is the matrix (column convention, ``mult[i] @ v``) of
    multiplication by the i-th distinguished element; ``one`` holds the
    coordinates of the unit.
    """

    p: int
    dim: int
    one: list
    mult: list

    def element_matrix(self, coeffs: dict) -> list:
        """Matrix of a polynomial in the distinguished elements.

        ``coeffs`` maps exponent tuples to coefficients.
        """
        r, p = self.dim, self.p
        acc = [[0] * r for _ in range(r)]
        for e, c in coeffs.items():
            m = _identity(r)
            for i, k in enumerate(e):
                for _ in range(k):
                    m = _matmul(self.mult[i], m, p)
            for a in range(r):
                for b in range(r):
                    acc[a][b] = (acc[a][b] + c * m[a][b]) % p
        return acc

    def localize(self, d: list) -> "FiniteAlgebra":
        """A[1/d] for the element with multiplication matrix ``d``.

        A splits as ker(d^r) + im(d^r) (Fitting); the localisation is the
        quotient by the first summand, an ideal of A.
        """
        r, p = self.dim, self.p
        dr = _identity(r)
        base = d
        e = r
        while e:  # d**r by squaring
            if e & 1:
                dr = _matmul(dr, base, p)
            base = _matmul(base, base, p)
            e >>= 1
        kern = nullspace(dr, p, r)
        if not kern:
            return self
        if len(kern) == r:
            return FiniteAlgebra(p, 0, [], [[] for _ in self.mult])
        # complement of span(kern) from unit vectors
        red, piv = rref_rows(kern, p)
        comp = [c for c in range(r) if c not in set(piv)]
        # basis change P = [e_comp | kern]; coordinates via P^{-1}
        cols = [[int(i == c) for i in range(r)] for c in comp] + kern
        P = [list(row) for row in zip(*cols)]
        Pinv = _inverse(P, p)
        s = len(comp)

        def project(v):
            return _matvec(Pinv, v, p)[:s]

        newmult = []
        for m in self.mult:
            img = [project(_matvec(m, c, p)) for c in cols[:s]]
            newmult.append([list(row) for row in zip(*img)])
        return FiniteAlgebra(p, s, project(self.one), newmult)

    def extend(self, matrices: Sequence[list]) -> "FiniteAlgebra":
        return FiniteAlgebra(self.p, self.dim, self.one, list(self.mult) + list(matrices))

    def select(self, idx: Sequence[int]) -> "FiniteAlgebra":
        return FiniteAlgebra(self.p, self.dim, self.one, [self.mult[i] for i in idx])


def _inverse(m, p):
    n = len(m)
    red, piv = rref_rows([list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m)], p)
    if piv[:n] != list(range(n)):
        raise ArithmeticError("singular matrix")
    return [row[n:] for row in red[:n]]


def standard_monomials(G: Sequence[MPoly], limit: int = 100000) -> list:
    """Keys of the monomials outside the leading-term ideal (sorted)."""
    ring = G[0].ring
    lms = [ring.ex(g.lm_key) for g in G]
    for i in range(ring.nvars):
        if not any(_is_pure_power(ring, le, i) for le in lms):
            raise NotZeroDimensional(f"no pure power of {ring.names[i]} among leading monomials")
    one = ring.one_key
    seen = {one}
    todo = [one]
    out = []
    var_shifts = [ring.var_key(i) - one for i in range(ring.nvars)]
    while todo:
        k = todo.pop()
        if any(ring.divides(le, ring.ex(k)) for le in lms):
            continue
        out.append(k)
        if len(out) > limit:
            raise NotZeroDimensional("quotient too large")
        for sh in var_shifts:
            nk = k + sh
            if nk not in seen:
                seen.add(nk)
                todo.append(nk)
    out.sort()
    return out


def _is_pure_power(ring, le, i):
    e = ring.exps(ring.ex_to_key(le))
    return e[i] > 0 and all(x == 0 for j, x in enumerate(e) if j != i)


def quotient_algebra(G: Sequence[MPoly]) -> tuple:
    """Multiplication matrices of the ring variables on F_p[x]/<G>.

    Returns ``(algebra, basis_keys)``; G must be a Groebner basis of a
    zero-dimensional proper ideal.
    """
    ring = G[0].ring
    if len(G) == 1 and G[0].is_constant():
        return FiniteAlgebra(ring.p, 0, [], [[] for _ in range(ring.nvars)]), []
    basis = standard_monomials(G)
    index = {k: i for i, k in enumerate(basis)}
    r = len(basis)
    red = _reducers([g.monic() for g in G])
    one = ring.one_key
    mult = []
    for v in range(ring.nvars):
        sh = ring.var_key(v) - one
        cols = []
        for k in basis:
            nk = k + sh
            col = [0] * r
            if nk in index:
                col[index[nk]] = 1
            else:
                for kk, c in _nf({nk: 1}, red, ring).items():
                    col[index[kk]] = c
            cols.append(col)
        mult.append([list(row) for row in zip(*cols)])
    onevec = [0] * r
    onevec[index[one]] = 1
    return FiniteAlgebra(ring.p, r, onevec, mult), basis


def fglm(alg: FiniteAlgebra, ring: PolyRing) -> list:
    """Reduced lex Groebner basis of the kernel of F_p[x] -> A.

    ``x_i`` maps to the i-th distinguished element of ``alg``; ``ring``
    must use lex order with ``alg``'s element count as its variables.
    """
    if ring.order != "lex":
        raise ValueError("fglm targets lex order")
    if len(alg.mult) != ring.nvars:
        raise ValueError("algebra and ring disagree on the number of variables")
    p = ring.p
    if alg.dim == 0:
        return [ring.one()]
    one = ring.one_key
    shifts = [ring.var_key(i) - one for i in range(ring.nvars)]

    # echelon of vectors of standard monomials: pivot col -> (vector, combo)
    ech_rows: list = []       # list of (pivot, vec, combo-dict key->coef)
    std_vecs: dict = {}       # monomial key -> vector
    std_vecs[one] = list(alg.one)
    ech_rows.append(_make_pivot(list(alg.one), {one: 1}, p))
    staircase = [one]
    lead_ex: list = []
    basis: list = []
    cand = set()
    for k in staircase:
        for i, sh in enumerate(shifts):
            cand.add((k + sh, k, i))
    import heapq
    heap = [(c[0], c[1], c[2]) for c in cand]
    heapq.heapify(heap)
    done = {one}
    while heap:
        k, parent, var = heapq.heappop(heap)
        if k in done:
            continue
        done.add(k)
        ek = ring.ex(k)
        if any(ring.divides(le, ek) for le in lead_ex):
            continue
        vec = _matvec(alg.mult[var], std_vecs[parent], p)
        residual, combo = _reduce_vec(vec, {k: 1}, ech_rows, p)
        if not any(residual):
            # k + sum(combo) == 0 as an element; combo contains k with coef 1
            g = MPoly(ring, {kk: c % p for kk, c in combo.items() if c % p})
            basis.append(g)
            lead_ex.append(ek)
        else:
            std_vecs[k] = vec
            ech_rows.append(_make_pivot(residual, combo, p))
            staircase.append(k)
            for i, sh in enumerate(shifts):
                nk = k + sh
                if nk not in done:
                    heapq.heappush(heap, (nk, k, i))
    basis.sort(key=lambda g: g.lm_key)
    return basis


def _make_pivot(vec, combo, p):
    piv = next(i for i, x in enumerate(vec) if x)
    inv = pow(vec[piv], -1, p)
    return (piv, [x * inv % p for x in vec], {k: c * inv % p for k, c in combo.items()})


def _reduce_vec(vec, combo, rows, p):
    vec = list(vec)
    combo = dict(combo)
    for piv, rv, rc in rows:
        c = vec[piv]
        if c:
            vec = [(a - c * b) % p for a, b in zip(vec, rv)]
            for k, v in rc.items():
                combo[k] = (combo.get(k, 0) - c * v) % p
    return vec, combo
