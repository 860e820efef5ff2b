"""Solving lex bases in shape position by root extraction and back-substitution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .groebner import GroebnerBasis
from .ring import MPoly
from .univariate import poly_eval, roots_mod_p


class ShapeError(ValueError):
    """The lex basis is not of the form {x_i + f_i(x_v)} + {g(x_v)}."""


@dataclass
class ShapeInfo:
    eliminant_degree: int
    cofactor_degrees: list      # degree of f_i for i = 1..v-1

    @property
    def max_cofactor_degree(self) -> int:
        return max(self.cofactor_degrees, default=0)


def shape_info(basis: Sequence[MPoly]) -> ShapeInfo:
    """Check shape position and return its degree profile."""
    polys = list(basis.polys if isinstance(basis, GroebnerBasis) else basis)
    if not polys:
        raise ShapeError("empty basis")
    ring = polys[0].ring
    if ring.order != "lex":
        raise ShapeError("shape position is a lex notion")
    v = ring.nvars
    last = v - 1
    if len(polys) != v:
        raise ShapeError(f"expected {v} basis elements, found {len(polys)}")
    by_lead = {}
    for g in polys:
        e = g.lm_exps()
        nz = [i for i, x in enumerate(e) if x]
        by_lead.setdefault(tuple(nz), []).append((e, g))
    cof = []
    for i in range(v - 1):
        items = by_lead.get((i,))
        if not items or items[0][0][i] != 1:
            raise ShapeError(f"no element with leading monomial x{i + 1}")
        g = items[0][1]
        tail = dict(g.terms)
        del tail[g.lm_key]
        tail_poly = MPoly(ring, tail)
        if tail_poly.variables() - {last}:
            raise ShapeError(f"x{i + 1} element depends on variables other than the last")
        cof.append(tail_poly.total_degree() if tail_poly else 0)
    items = by_lead.get((last,))
    if not items:
        raise ShapeError("no univariate element in the last variable")
    elim = items[0][1]
    return ShapeInfo(elim.total_degree(), cof)


def shape_solve(basis) -> list:
    """All F_p-rational points of a lex basis in shape position.

    Returns a list of assignment tuples, one per root of the eliminant.
    A basis equal to {1} has no solutions.
    """
    polys = list(basis.polys if isinstance(basis, GroebnerBasis) else basis)
    if len(polys) == 1 and polys[0].is_constant() and polys[0]:
        return []
    ring = polys[0].ring
    p = ring.p
    v = ring.nvars
    if v == 1:
        if len(polys) != 1:
            raise ShapeError("univariate basis must have one element")
        return [(r,) for r in roots_mod_p(polys[0].univariate_coeffs(0), p)]
    shape_info(polys)
    last = v - 1
    elim = None
    subs = {}
    for g in polys:
        e = g.lm_exps()
        nz = [i for i, x in enumerate(e) if x]
        if nz == [last]:
            elim = g
        else:
            i = nz[0]
            tail = {k: c for k, c in g.terms.items() if k != g.lm_key}
            subs[i] = MPoly(ring, tail).univariate_coeffs(last) if tail else []
    roots = roots_mod_p(elim.univariate_coeffs(last), p)
    out = []
    for r in roots:
        pt = [0] * v
        pt[last] = r
        for i, f in subs.items():
            pt[i] = (-poly_eval(f, r, p)) % p
        out.append(tuple(pt))
    return out
