"""Passive attacks on BCFRX, HKS and RU.

BCFRX
    For every prime the adversary looks for an equivalent key N: a matrix
    conjugating U and L onto the secret subgroups just as the long-term
    key M does.  Left multiplying M by a block diagonal matrix keeps that
    property, so N may be taken with both row blocks in reduced row echelon
    form.  The unknown entries of N together with the sixteen entries of
    N^-1 satisfy quadratic equations read off each transcript; solving them
    yields a handful of candidates, each of which gives the session key mod
    p by linear algebra.  Residues for several primes are lifted by CRT.

HKS and RU
    Any matrix with the public commutation properties and ``X d = w_A``
    already computes the key, and those constraints are linear.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .arith import crt_combine, gen_prime
from .matlin import (
    Matrix,
    NoSolution,
    block_get,
    block_matrix,
    left_reduce,
    solve_left,
    solve_linear,
    solve_right,
)
from .polysys import (
    Budget,
    BudgetExhausted,
    FiniteAlgebra,
    MPoly,
    NotZeroDimensional,
    PolyRing,
    ShapeError,
    ShapeInfo,
    buchberger,
    fglm,
    quotient_algebra,
    shape_info,
    shape_solve,
)
from .polysys.quotient import _inverse
from .protocols import BcfrxTranscript, HksInstance, RuInstance


class AttackFailed(RuntimeError):
    """No key could be recovered; ``report`` carries the partial outcome."""

    def __init__(self, msg: str, report=None):
        super().__init__(msg)
        self.report = report


class CandidateRejected(ArithmeticError):
    """A candidate N is inconsistent with the transcript."""


# --- equivalent keys in restricted form -------------------------------------

TOP_ORDER = (0, 1, 2, 3)
BOTTOM_ORDER = (2, 3, 0, 1)

# diagonal block shapes of an echelon row block, in search priority
BLOCK_FORMS = ("I", "[1 a; 0 0]", "0", "[0 1; 0 0]")


def _block_type(pivots, own) -> int:
    a, b = pivots
    if a == own[0] and b == own[1]:
        return 0
    if a == own[0]:
        return 1
    if a not in own and b not in own:
        return 2
    return 3


def _row_template(pivots, order):
    """Per row: column -> 1, 0 or None (a free unknown)."""
    pos = {c: i for i, c in enumerate(order)}
    rows = []
    for c in pivots:
        row = {}
        for col in range(4):
            if col == c:
                row[col] = 1
            elif col in pivots or pos[col] < pos[c]:
                row[col] = 0
            else:
                row[col] = None
        rows.append(row)
    return rows


@dataclass(frozen=True)
class RestrictedCombo:
    """Pivot pattern of an equivalent key N.

    ``top`` holds the pivot columns of rows 1-2 of N in reduced row echelon
    form; ``bottom`` those of rows 3-4, reduced with the columns visited in
    the order 3, 4, 1, 2 (0-based indices throughout).  The diagonal blocks
    N11 and N22 are then one of I, [1 a; 0 0], 0 or [0 1; 0 0].
    """

    top: tuple
    bottom: tuple

    @property
    def kinds(self) -> tuple:
        return _block_type(self.top, (0, 1)), _block_type(self.bottom, (2, 3))

    @property
    def in_paper_set(self) -> bool:
        """Both diagonal blocks are of the form I, diag(1, 0) or 0 up to a free entry."""
        return 3 not in self.kinds

    @property
    def label(self) -> str:
        a, b = self.kinds
        return f"N11={BLOCK_FORMS[a]}, N22={BLOCK_FORMS[b]} top={self.top} bottom={self.bottom}"

    def template(self) -> list:
        """4x4 grid of 1, 0 or None (unknown)."""
        top = _row_template(self.top, TOP_ORDER)
        bot = _row_template(self.bottom, BOTTOM_ORDER)
        return [[row[c] for c in range(4)] for row in top + bot]

    def unknowns(self) -> list:
        """Positions (i, j) of the unknown entries of N, row-major."""
        t = self.template()
        return [(i, j) for i in range(4) for j in range(4) if t[i][j] is None]

    def materialize(self, values: Sequence[int], p: int) -> Matrix:
        t = self.template()
        it = iter(values)
        rows = [[next(it) if x is None else x for x in row] for row in t]
        return Matrix(tuple(tuple(r) for r in rows), p)

    def matches(self, N: Matrix) -> bool:
        t = self.template()
        return all(x is None or N[i, j] == x for i, row in enumerate(t) for j, x in enumerate(row))

    def to_json(self) -> dict:
        return {"top": list(self.top), "bottom": list(self.bottom)}


def _patterns(order):
    return [(order[i], order[j]) for i in range(4) for j in range(i + 1, 4)]


def all_combos() -> list:
    """All 36 pivot patterns, identity blocks first, paper-like shapes before the rest."""
    combos = [RestrictedCombo(t, b) for t in _patterns(TOP_ORDER) for b in _patterns(BOTTOM_ORDER)]

    def rank(c):
        k = c.kinds
        return (not c.in_paper_set, sum(k), k, c.top, c.bottom)

    return sorted(combos, key=rank)


GENERIC = RestrictedCombo((0, 1), (2, 3))


def normal_equivalent_key(M: Matrix):
    """The echelon-form equivalent key of M mod p and its pivot pattern.

    Row block 1 of M is reduced with the natural column order, row block 2
    with columns 3, 4, 1, 2 first; the block diagonal change of rows keeps
    the conjugation property.
    """
    p = M.modulus
    out = []
    pivs = []
    for rows, order in ((M.rows[:2], TOP_ORDER), (M.rows[2:], BOTTOM_ORDER)):
        perm = Matrix(tuple(tuple(r[c] for c in order) for r in rows), p)
        _, red = left_reduce(perm)
        back = [[0] * 4 for _ in range(2)]
        for i in range(2):
            for k, c in enumerate(order):
                back[i][c] = red[i, k]
        out.extend(back)
        piv = []
        for i in range(2):
            k = next(k for k in range(4) if red[i, k])
            piv.append(order[k])
        pivs.append(tuple(piv))
    return Matrix(tuple(tuple(r) for r in out), p), RestrictedCombo(pivs[0], pivs[1])


def lemma_h(M: Matrix) -> Matrix:
    """H = diag(f(M11), f(M22)) with f the left row reduction of each block."""
    f1, _ = left_reduce(block_get(M, 1, 1))
    f2, _ = left_reduce(block_get(M, 2, 2))
    z = Matrix.zeros(2, modulus=M.modulus)
    return block_matrix(f1, z, z, f2)


# --- the quadratic system ---------------------------------------------------

@dataclass
class PolySystem:
    """Equations for one combo: x1..xk are the unknowns of N, then N^-1 row-major."""

    ring: PolyRing
    polys: list
    combo: RestrictedCombo
    n_unknowns: int
    transcripts: tuple

    @property
    def nvars(self) -> int:
        return self.ring.nvars


def _sym_n(combo: RestrictedCombo, ring: PolyRing, offset: int = 0) -> list:
    g = ring.gens()
    it = iter(range(offset, offset + len(combo.unknowns())))
    return [[g[next(it)] if x is None else ring.const(x) for x in row] for row in combo.template()]


def _smul(a, b, ring):
    """Product of matrices whose entries are MPoly or int."""
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ring.zero()
            for t in range(k):
                x, y = a[i][t], b[t][j]
                if isinstance(x, int) and isinstance(y, int):
                    acc = acc + x * y
                elif isinstance(x, int):
                    if x:
                        acc = acc + y * x
                elif isinstance(y, int):
                    if y:
                        acc = acc + x * y
                else:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def _rows(m: Matrix, idx) -> list:
    return [list(m.rows[i]) for i in idx]


def _diff(a: Matrix, b: Matrix) -> list:
    return [list(r) for r in (a - b).rows]


def build_system(t: BcfrxTranscript, combo: RestrictedCombo = GENERIC,
                 extras: Sequence[BcfrxTranscript] = ()) -> PolySystem:
    """Quadratic equations in the unknown entries of N and all entries of N^-1.

    Per transcript: (N D N^-1)_22 = (N C N^-1)_22 and (N D N^-1)_11 =
    (N E N^-1)_11; once: N N^-1 = I.
    """
    p = t.modulus
    k = len(combo.unknowns())
    nv = k + 16
    ring = PolyRing(p, nv, "lex", tuple(f"x{i + 1}" for i in range(nv)))
    N = _sym_n(combo, ring)
    g = ring.gens()
    Ni = [[g[k + 4 * i + j] for j in range(4)] for i in range(4)]
    polys = []
    for tr in (t, *extras):
        top = _smul(_smul(N[2:], _diff(tr.D, tr.C), ring), [r[2:] for r in Ni], ring)
        bot = _smul(_smul(N[:2], _diff(tr.D, tr.E), ring), [r[:2] for r in Ni], ring)
        polys.extend(top[0] + top[1])
        polys.extend(bot[0] + bot[1])
    prod = _smul(N, Ni, ring)
    for i in range(4):
        for j in range(4):
            polys.append(prod[i][j] - int(i == j))
    return PolySystem(ring, polys, combo, k, (t, *extras))


def _kernel_basis(block, pivots, ring):
    """4x2 matrix spanning the right kernel of an echelon 2x4 row block."""
    free = [c for c in range(4) if c not in pivots]
    cols = []
    for f in free:
        v = [ring.zero() for _ in range(4)]
        v[f] = ring.one()
        for i, c in enumerate(pivots):
            v[c] = -block[i][f]
        cols.append(v)
    return [[cols[j][i] for j in range(2)] for i in range(4)]


def kernel_system(transcripts: Sequence[BcfrxTranscript], combo: RestrictedCombo,
                  order: str = "degrevlex") -> tuple:
    """Equations in the unknowns of N alone.

    Columns 3-4 of N^-1 span the kernel of rows 1-2 of N, so the first
    family of equations says R2 (D - C) ker(R1) = 0; symmetrically
    R1 (D - E) ker(R2) = 0.  Equivalent to the full system once det N is
    inverted.  Returns ``(ring, polys, N)`` with N symbolic.
    """
    p = transcripts[0].modulus
    k = len(combo.unknowns())
    ring = PolyRing(p, max(k, 1), order, tuple(f"x{i + 1}" for i in range(max(k, 1))))
    N = _sym_n(combo, ring)
    V_top = _kernel_basis(N[:2], combo.top, ring)
    V_bot = _kernel_basis(N[2:], combo.bottom, ring)
    polys = []
    for tr in transcripts:
        a = _smul(_smul(N[2:], _diff(tr.D, tr.C), ring), V_top, ring)
        b = _smul(_smul(N[:2], _diff(tr.D, tr.E), ring), V_bot, ring)
        polys.extend(x for x in a[0] + a[1] + b[0] + b[1] if x)
    return ring, polys, N


def _embed(f: MPoly, ring: PolyRing) -> MPoly:
    pad = (0,) * (ring.nvars - f.ring.nvars)
    return ring.from_terms((c, tuple(f.ring.exps(k)) + pad) for k, c in f.terms.items())


def _sym_det(m, ring):
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = ring.zero()
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _sym_det(minor, ring)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


# --- solving ----------------------------------------------------------------

@dataclass(frozen=True)
class CandidateN:
    N: Matrix
    N_inv: Matrix
    combo: RestrictedCombo
    root: int


@dataclass
class SolveOutcome:
    combo: RestrictedCombo
    status: str                      # ok | no-solution | shape-failure | positive-dimensional | budget-exhausted
    candidates: list = field(default_factory=list)
    basis: Optional[list] = None     # reduced lex basis in x1..x(k+16)
    shape: Optional[ShapeInfo] = None
    algebra_dim: Optional[int] = None
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0
    message: str = ""

    def summary(self) -> dict:
        d = {
            "combo": self.combo.to_json(), "status": self.status,
            "candidates": len(self.candidates), "algebra_dim": self.algebra_dim,
            "seconds": self.seconds, "message": self.message,
        }
        if self.shape is not None:
            d["eliminant_degree"] = self.shape.eliminant_degree
            d["max_cofactor_degree"] = self.shape.max_cofactor_degree
        return d


def _poly_matrix(alg: FiniteAlgebra, f: MPoly) -> list:
    ring = f.ring
    nm = len(alg.mult)
    coeffs = {}
    for key, c in f.terms.items():
        e = tuple(ring.exps(key)) + (0,) * (nm - ring.nvars)
        coeffs[e[:nm]] = c
    return alg.element_matrix(coeffs)


def _is_invertible(m, p) -> bool:
    try:
        _inverse(m, p)
        return True
    except ArithmeticError:
        return False


def _inverse_blocks(alg: FiniteAlgebra, N, ring) -> list:
    """Multiplication matrices of the entries of N^-1 (row-major)."""
    r, p = alg.dim, alg.p
    big = [[0] * (4 * r) for _ in range(4 * r)]
    for i in range(4):
        for j in range(4):
            m = _poly_matrix(alg, N[i][j])
            for a in range(r):
                for b in range(r):
                    big[i * r + a][j * r + b] = m[a][b]
    inv = _inverse(big, p)
    return [[row[j * r:(j + 1) * r] for row in inv[i * r:(i + 1) * r]] for i in range(4) for j in range(4)]


def _localized_algebra(transcripts, combo, budget):
    """Quotient algebra of the kernel system with det N inverted."""
    ring, polys, N = kernel_system(transcripts, combo)
    p = ring.p
    k = len(combo.unknowns())
    stats = {}
    if k == 0:
        # N is fully determined by the pattern
        if any(polys):
            return None, N, stats
        alg = FiniteAlgebra(p, 1, [1], [[[0]]])
    else:
        if not polys:
            raise NotZeroDimensional("no equations constrain N")
        gb = buchberger(polys, budget)
        stats.update(gb.stats)
        if gb.is_unit():
            return None, N, stats
        try:
            alg, _ = quotient_algebra(gb.polys)
        except NotZeroDimensional:
            # saturate by det N
            ext = PolyRing(p, k + 1, "degrevlex", tuple(f"x{i + 1}" for i in range(k)) + ("t",))
            det = _embed(_sym_det(N, ring), ext)
            gb = buchberger([_embed(f, ext) for f in polys] + [det * ext.gens()[k] - 1], budget)
            stats.update(gb.stats)
            stats["saturated"] = True
            if gb.is_unit():
                return None, N, stats
            alg, _ = quotient_algebra(gb.polys)
            return alg.select(range(k)), N, stats
    d = _poly_matrix(alg, _sym_det(N, ring))
    if not _is_invertible(d, p):
        alg = alg.localize(d)
    return alg, N, stats


def solve_for_N(t: BcfrxTranscript, combo: RestrictedCombo = GENERIC,
                extras: Sequence[BcfrxTranscript] = (), budget: Optional[Budget] = None,
                engine: str = "kernel") -> SolveOutcome:
    """Lex basis of the combo's system and the candidate equivalent keys it yields.

    ``engine='kernel'`` (default) builds the quotient algebra from the
    equations in the unknowns of N only, inverts det N there and converts to
    the lex basis in all k + 16 variables with FGLM.  ``engine='groebner'``
    runs Buchberger on the full system (degrevlex, then FGLM) and
    ``engine='lex'`` runs Buchberger directly in lex.
    """
    t0 = time.perf_counter()
    transcripts = (t, *extras)
    p = t.modulus
    k = len(combo.unknowns())
    lex = PolyRing(p, k + 16, "lex", tuple(f"x{i + 1}" for i in range(k + 16)))
    out = SolveOutcome(combo, "ok")
    try:
        if engine == "kernel":
            alg, Nsym, stats = _localized_algebra(transcripts, combo, budget)
            out.stats = stats
            if alg is None or alg.dim == 0:
                out.status, out.basis = "no-solution", [lex.one()]
            else:
                mats = list(alg.mult[:k]) + _inverse_blocks(alg, Nsym, Nsym[0][0].ring)
                out.algebra_dim = alg.dim
                out.basis = fglm(FiniteAlgebra(p, alg.dim, alg.one, mats), lex)
        elif engine in ("groebner", "lex"):
            sysm = build_system(t, combo, extras)
            gens = list(sysm.polys)
            # N^-1 N = I generates nothing new but speeds up the search
            g = sysm.ring.gens()
            N = _sym_n(combo, sysm.ring)
            Ni = [[g[k + 4 * i + j] for j in range(4)] for i in range(4)]
            prod = _smul(Ni, N, sysm.ring)
            gens += [prod[i][j] - int(i == j) for i in range(4) for j in range(4)]
            if engine == "lex":
                gb = buchberger(gens, budget)
                out.basis = gb.polys
            else:
                drl = sysm.ring.with_order("degrevlex")
                gb = buchberger([f.to_ring(drl) for f in gens], budget)
                if gb.is_unit():
                    out.basis = [lex.one()]
                else:
                    alg, _ = quotient_algebra(gb.polys)
                    out.algebra_dim = alg.dim
                    out.basis = fglm(alg, lex)
            out.stats = dict(gb.stats)
            if len(out.basis) == 1 and out.basis[0].is_constant():
                out.status = "no-solution"
        else:
            raise ValueError(f"unknown engine {engine!r}")
    except BudgetExhausted as exc:
        out.status, out.message, out.stats = "budget-exhausted", str(exc), dict(exc.stats)
    except NotZeroDimensional as exc:
        out.status, out.message = "positive-dimensional", str(exc)
    if out.status == "ok":
        try:
            out.shape = shape_info(out.basis)
            points = shape_solve(out.basis)
        except ShapeError as exc:
            out.status, out.message = "shape-failure", str(exc)
            points = []
        for pt in points:
            N = combo.materialize(pt[:k], p)
            Ni = Matrix(tuple(tuple(pt[k + 4 * i: k + 4 * i + 4]) for i in range(4)), p)
            if N @ Ni == Matrix.identity(4, p):
                out.candidates.append(CandidateN(N, Ni, combo, pt[-1]))
    out.seconds = time.perf_counter() - t0
    return out


# --- per-prime key recovery -------------------------------------------------

def recover_key_mod_p(t: BcfrxTranscript, cand: CandidateN) -> Matrix:
    """Session key mod p from a transcript and an equivalent key N.

    Conjugating by N moves A into U and B into L; the blocks of
    K' = N K N^-1 then follow from C' = N C N^-1, D', E' by solving two
    small linear systems.
    """
    N, Ni = cand.N, cand.N_inv
    Cp, Dp, Ep = (N @ m @ Ni for m in (t.C, t.D, t.E))
    try:
        X = solve_left(block_get(Dp, 1, 2), block_get(Cp, 1, 2))
        Y = solve_right(block_get(Dp, 2, 1), block_get(Cp, 2, 1))
    except NoSolution as exc:
        raise CandidateRejected(str(exc)) from exc
    Kp = block_matrix(block_get(Cp, 1, 1), X @ block_get(Ep, 1, 2),
                      block_get(Ep, 2, 1) @ Y, block_get(Ep, 2, 2))
    return Ni @ Kp @ N


def consistent_with(t: BcfrxTranscript, cand: CandidateN, K: Matrix) -> bool:
    """Replay check: K' blocks reproduce the transcript's conjugated blocks."""
    N, Ni = cand.N, cand.N_inv
    Cp, Dp, Ep, Kp = (N @ m @ Ni for m in (t.C, t.D, t.E, K))
    return block_get(Kp, 1, 1) == block_get(Cp, 1, 1) and block_get(Kp, 2, 2) == block_get(Ep, 2, 2)


@dataclass
class ModPOutcome:
    p: int
    keys: list
    combo: Optional[RestrictedCombo]
    n_candidates: int
    outcomes: list
    seconds: float

    def summary(self) -> dict:
        return {
            "p": str(self.p), "keys": len(self.keys), "n_candidates": self.n_candidates,
            "combo": self.combo.to_json() if self.combo else None,
            "combos_tried": len(self.outcomes), "seconds": self.seconds,
            "outcomes": [o.summary() for o in self.outcomes],
        }


def run_bcfrx_mod_p(t: BcfrxTranscript, extras: Sequence[BcfrxTranscript] = (),
                    combos: Optional[Sequence[RestrictedCombo]] = None,
                    budget: Optional[Budget] = None, engine: str = "kernel") -> ModPOutcome:
    """Combo search; stops at the first combo that yields a key."""
    t0 = time.perf_counter()
    t = t.public()
    extras = tuple(e.public() for e in extras)
    outcomes = []
    for combo in combos or all_combos():
        res = solve_for_N(t, combo, extras, budget, engine)
        outcomes.append(res)
        keys = []
        for cand in res.candidates:
            try:
                K = recover_key_mod_p(t, cand)
            except CandidateRejected:
                continue
            if K.det() != 1:
                continue
            if all(_key_fits(e, cand, K) for e in extras) and K not in keys:
                keys.append(K)
        if keys:
            return ModPOutcome(t.modulus, keys, combo, len(res.candidates), outcomes,
                               time.perf_counter() - t0)
    return ModPOutcome(t.modulus, [], None, 0, outcomes, time.perf_counter() - t0)


def _key_fits(e: BcfrxTranscript, cand: CandidateN, K: Matrix) -> bool:
    # the extra transcript carries its own session key; only check that N works for it
    try:
        recover_key_mod_p(e, cand)
        return True
    except CandidateRejected:
        return False


def attack_bcfrx_mod_p(t: BcfrxTranscript, extras: Sequence[BcfrxTranscript] = (),
                       budget: Optional[Budget] = None, engine: str = "kernel") -> list:
    """Candidate session keys mod p for transcript ``t``."""
    res = run_bcfrx_mod_p(t, extras, budget=budget, engine=engine)
    if not res.keys:
        raise AttackFailed("no combo produced a consistent key", res)
    return res.keys


# --- integer attack ---------------------------------------------------------

@dataclass
class AttackReport:
    protocol: str
    success: bool
    status: str                       # success | attack-failed | budget-exhausted
    recovered_key: Optional[Matrix] = None
    primes: list = field(default_factory=list)
    candidate_counts: list = field(default_factory=list)
    key_counts: list = field(default_factory=list)
    lambda_estimate: Optional[int] = None
    timings: dict = field(default_factory=dict)
    seed: Optional[int] = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "success": self.success,
            "status": self.status,
            "recovered_key": self.recovered_key.to_json() if self.recovered_key is not None else None,
            "primes": [str(p) for p in self.primes],
            "candidate_counts": list(self.candidate_counts),
            "key_counts": list(self.key_counts),
            "lambda_estimate": str(self.lambda_estimate) if self.lambda_estimate is not None else None,
            "timings": dict(self.timings),
            "seed": self.seed,
            "details": self.details,
        }


def _lift(residues: list) -> Matrix:
    """Entry-wise centered CRT of [(Matrix mod p_i)]."""
    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            row.append(crt_combine([(m[i, j], m.modulus) for m in residues]))
        rows.append(tuple(row))
    return Matrix(tuple(rows), None)


def attack_bcfrx_integer(transcripts: Sequence[BcfrxTranscript], prime_bits: int = 32,
                         seed: int = 0, max_primes: int = 64, max_partials: int = 4096,
                         budget: Optional[Budget] = None, engine: str = "kernel") -> AttackReport:
    """Recover the session key of ``transcripts[0]`` over Z.

    Fresh primes are drawn until the entry-wise centered CRT lift stops
    changing and has determinant 1.  With several residues per prime every
    cross-prime combination is tracked, pruned by the same rule.
    """
    if not transcripts:
        raise ValueError("need at least one transcript")
    rng = random.Random(seed)
    pub = [t.public() for t in transcripts]
    report = AttackReport("bcfrx", False, "attack-failed", seed=seed)
    partials = [[]]                   # each: list of residue matrices, one per useful prime
    t_solve = t_crt = 0.0
    t0 = time.perf_counter()
    per_prime = []
    try:
        while len(report.primes) < max_primes:
            p = int(gen_prime(prime_bits, rng, avoid=report.primes))
            report.primes.append(p)
            ts = time.perf_counter()
            res = run_bcfrx_mod_p(pub[0].mod(p), [e.mod(p) for e in pub[1:]], budget=budget, engine=engine)
            t_solve += time.perf_counter() - ts
            report.candidate_counts.append(res.n_candidates)
            report.key_counts.append(len(res.keys))
            per_prime.append(res.summary())
            if not res.keys:
                if any(o.status == "budget-exhausted" for o in res.outcomes):
                    report.status = "budget-exhausted"
                continue
            ts = time.perf_counter()
            nxt = []
            for part in partials:
                lift = _lift(part) if part else None
                for K in res.keys:
                    if lift is not None and lift.mod(p) == K and lift.det() == 1:
                        report.success, report.status, report.recovered_key = True, "success", lift
                        break
                    nxt.append(part + [K])
                if report.success:
                    break
            t_crt += time.perf_counter() - ts
            if report.success:
                break
            report.status = "attack-failed"
            if len(nxt) > max_partials:
                report.details["partials_truncated"] = True
                nxt = nxt[:max_partials]
            partials = nxt
    finally:
        report.timings = {"solve": t_solve, "crt": t_crt, "total": time.perf_counter() - t0}
        report.details["per_prime"] = per_prime
    if report.success:
        report.lambda_estimate = 2 * (report.recovered_key.max_abs() + 1)
        return report
    raise AttackFailed("prime budget exhausted without a stable lift" if report.status != "budget-exhausted"
                       else "solver budget exhausted", report)


# --- linearization attacks --------------------------------------------------

def _int_array(m: Matrix, p: int) -> np.ndarray:
    dtype = np.int64 if p < (1 << 31) else object
    return np.array([[x % p for x in row] for row in m.rows], dtype=dtype)


def _commutant_rows(F: Matrix, p: int) -> np.ndarray:
    """Rows of X F - F X = 0 in the row-major entries of X."""
    f = _int_array(F, p)
    eye = np.eye(F.n, dtype=f.dtype)
    return (np.kron(eye, f.T) - np.kron(f, eye)) % p


def _vector_rows(v: Sequence[int], p: int, m: int) -> np.ndarray:
    """Rows of X v = w (left-hand side only)."""
    dtype = np.int64 if p < (1 << 31) else object
    vv = np.array([x % p for x in v], dtype=dtype).reshape(1, -1)
    return np.kron(np.eye(m, dtype=dtype), vv)


def _solve_commutant(mats: Sequence[Matrix], v: Sequence[int], w: Sequence[int], p: int, m: int) -> Matrix:
    blocks = [_vector_rows(v, p, m)] + [_commutant_rows(F, p) for F in mats]
    A = np.vstack(blocks)
    rhs = list(w) + [0] * (A.shape[0] - m)
    x = solve_linear(A.tolist(), rhs, p)
    return Matrix(tuple(tuple(x[i * m:(i + 1) * m]) for i in range(m)), p)


@dataclass
class LinearAttackResult:
    key: tuple
    X: Matrix
    samples: int
    rounds: int


def attack_hks_detail(public: HksInstance, sampler: Callable[[], Matrix], s: int = 8,
                      holdout: int = 3, max_samples: int = 64) -> LinearAttackResult:
    """Linearization attack on HKS with the post-check described in attack_hks."""
    if s < 1:
        raise ValueError("s must be >= 1")
    p, m = public.p, public.m
    mats = [sampler() for _ in range(s)]
    rounds = 0
    while True:
        rounds += 1
        try:
            X = _solve_commutant(mats, public.b, public.w_A, p, m)
        except NoSolution as exc:
            raise AttackFailed("inconsistent linear system") from exc
        checks = [sampler() for _ in range(holdout)]
        if all(X @ F == F @ X for F in checks) or len(mats) >= max_samples:
            return LinearAttackResult(X.apply(public.w_B), X, len(mats), rounds)
        mats.extend(checks)
        mats.extend(sampler() for _ in range(len(mats)))


def attack_hks(public: HksInstance, sampler: Callable[[], Matrix], s: int = 8, holdout: int = 3,
               max_samples: int = 64) -> tuple:
    """Key vector X w_B for any X with X b = w_A commuting with s samples f(L).

    ``sampler`` returns f(L) for fresh outputs L of Bob's public key
    generation.  If X fails to commute with ``holdout`` further draws the
    samples are doubled and the system re-solved, up to ``max_samples``.
    """
    return attack_hks_detail(public, sampler, s, holdout, max_samples).key


def attack_ru_detail(public: RuInstance) -> LinearAttackResult:
    try:
        X = _solve_commutant([public.C, public.D], public.d, public.w_A, public.q, public.n)
    except NoSolution as exc:
        raise AttackFailed("inconsistent linear system") from exc
    return LinearAttackResult(X.apply(public.w_B), X, 2, 1)


def attack_ru(public: RuInstance) -> tuple:
    """Key vector X w_B for any X commuting with C and D and with X d = w_A."""
    return attack_ru_detail(public).key


__all__ = [
    "AttackFailed", "AttackReport", "CandidateN", "CandidateRejected", "GENERIC", "ModPOutcome",
    "PolySystem", "RestrictedCombo", "SolveOutcome", "all_combos", "attack_bcfrx_integer",
    "attack_bcfrx_mod_p", "attack_hks", "attack_ru", "build_system", "consistent_with",
    "kernel_system", "lemma_h", "normal_equivalent_key", "recover_key_mod_p", "run_bcfrx_mod_p",
    "solve_for_N",
]
