"""Polynomial systems over prime fields: arithmetic, Groebner bases, solving."""

from .groebner import (
    Budget,
    BudgetExhausted,
    GroebnerBasis,
    buchberger,
    failing_spolys,
    interreduce,
    is_groebner,
    normal_form,
    spoly,
)
from .quotient import FiniteAlgebra, NotZeroDimensional, fglm, quotient_algebra, standard_monomials
from .ring import MPoly, PolyRing
from .shape import ShapeError, ShapeInfo, shape_info, shape_solve
from .univariate import roots_mod_p


def univariate_roots(f: MPoly, p: int = None) -> list:
    """Distinct roots in F_p of a polynomial in a single variable."""
    vars_ = f.variables()
    if len(vars_) != 1:
        raise ValueError("expected a polynomial in exactly one variable")
    (v,) = vars_
    return roots_mod_p(f.univariate_coeffs(v), p or f.ring.p)


def lex_basis(gens, budget: Budget = None, direct: bool = False) -> GroebnerBasis:
    """Reduced lex basis of a zero-dimensional ideal.

    By default runs Buchberger in degrevlex and converts with FGLM; with
    ``direct=True`` Buchberger runs in lex from the start.
    """
    ring = gens[0].ring.with_order("lex")
    if direct:
        return buchberger([g.to_ring(ring) for g in gens], budget)
    drl = gens[0].ring.with_order("degrevlex")
    gb = buchberger([g.to_ring(drl) for g in gens], budget)
    if gb.is_unit():
        return GroebnerBasis(ring, [ring.one()], gb.stats)
    alg, _ = quotient_algebra(gb.polys)
    return GroebnerBasis(ring, fglm(alg, ring), dict(gb.stats, fglm_dim=alg.dim))


__all__ = [
    "Budget", "BudgetExhausted", "FiniteAlgebra", "GroebnerBasis", "MPoly", "NotZeroDimensional",
    "PolyRing", "ShapeError", "ShapeInfo", "buchberger", "failing_spolys", "fglm", "interreduce",
    "is_groebner", "lex_basis", "normal_form", "quotient_algebra", "roots_mod_p", "shape_info",
    "shape_solve", "spoly", "standard_monomials", "univariate_roots",
]
