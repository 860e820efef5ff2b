"""Multivariate polynomials over F_p with packed monomials.

A monomial is stored as a single Python int *key* whose integer order is
the monomial order.  Exponents occupy 8-bit fields (at most 127 per
variable, the top bit of each field is a guard for the divisibility test).

* lex:       field of x_1 is most significant.
* degrevlex: total degree on top, then ``127 - e_v`` ... ``127 - e_1``,
  so a smaller exponent of the last variable ranks higher.

In both encodings ``key(a*b) = key(a) + key(b) - key(1)``, so multiplying
a polynomial by a monomial is a constant shift of every key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

W = 8
EMAX = 127
ORDERS = ("lex", "degrevlex")


@dataclass(frozen=True)
class PolyRing:
    p: int
    nvars: int
    order: str = "degrevlex"
    names: Optional[tuple] = None

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"unknown monomial order {self.order!r}")
        if not 1 <= self.nvars <= 64:
            raise ValueError("nvars out of range")
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"x{i + 1}" for i in range(self.nvars)))
        v = self.nvars
        object.__setattr__(self, "_guard", sum(0x80 << (W * i) for i in range(v)))
        object.__setattr__(self, "_low", (1 << (W * v)) - 1)
        object.__setattr__(self, "one_key", 0 if self.order == "lex" else sum(EMAX << (W * i) for i in range(v)))
        # packed exponent words, x_i at field (v-1-i) as in lex
        object.__setattr__(self, "_var_ex", tuple(1 << (W * (v - 1 - i)) for i in range(v)))

    # keys ---------------------------------------------------------------
    def key(self, exps: Sequence[int]) -> int:
        v = self.nvars
        if len(exps) != v:
            raise ValueError("exponent vector has wrong length")
        if any(e < 0 or e > EMAX for e in exps):
            raise ValueError(f"exponent out of range 0..{EMAX}")
        if self.order == "lex":
            k = 0
            for e in exps:
                k = (k << W) | e
            return k
        k = sum(exps)
        for e in reversed(exps):
            k = (k << W) | (EMAX - e)
        return k

    def exps(self, key: int) -> tuple:
        v = self.nvars
        if self.order == "lex":
            return tuple((key >> (W * (v - 1 - i))) & 0xFF for i in range(v))
        return tuple(EMAX - ((key >> (W * i)) & 0xFF) for i in range(v))

    def ex(self, key: int) -> int:
        """Packed exponent word (order independent layout up to field order)."""
        if self.order == "lex":
            return key
        return self.one_key - (key & self._low)

    def divides(self, a_ex: int, b_ex: int) -> bool:
        g = self._guard
        return ((b_ex | g) - a_ex) & g == g

    def degree_of_key(self, key: int) -> int:
        if self.order == "degrevlex":
            return key >> (W * self.nvars)
        return sum(self.exps(key))

    def ex_to_key(self, ex: int) -> int:
        if self.order == "lex":
            return ex
        d = 0
        t = ex
        while t:
            d += t & 0xFF
            t >>= W
        return (d << (W * self.nvars)) | (self.one_key - ex)

    def var_key(self, i: int) -> int:
        return self.key([int(j == i) for j in range(self.nvars)])

    # constructors -------------------------------------------------------
    def zero(self) -> "MPoly":
        return MPoly(self, {})

    def one(self) -> "MPoly":
        return MPoly(self, {self.one_key: 1})

    def const(self, c: int) -> "MPoly":
        c %= self.p
        return MPoly(self, {self.one_key: c} if c else {})

    def gens(self) -> list:
        return [MPoly(self, {self.var_key(i): 1}) for i in range(self.nvars)]

    def from_terms(self, terms: Iterable) -> "MPoly":
        """Build from ``(coefficient, exponent_vector)`` pairs."""
        d: dict = {}
        p = self.p
        for c, e in terms:
            k = self.key(tuple(e))
            d[k] = (d.get(k, 0) + c) % p
        return MPoly(self, {k: c for k, c in d.items() if c})

    def with_order(self, order: str) -> "PolyRing":
        return PolyRing(self.p, self.nvars, order, self.names)


def ex_lcm(a: int, b: int) -> int:
    r = 0
    s = 0
    while a or b:
        x, y = a & 0xFF, b & 0xFF
        r |= (x if x > y else y) << s
        a >>= W
        b >>= W
        s += W
    return r


def ex_degree(a: int) -> int:
    d = 0
    while a:
        d += a & 0xFF
        a >>= W
    return d


class MPoly:
    """Polynomial as ``{key: coefficient}`` with coefficients in [1, p)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[int, int]):
        self.ring = ring
        self.terms = terms if isinstance(terms, dict) else dict(terms)

    # inspection -----------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.ring.const(other)
        return isinstance(other, MPoly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def lm_key(self) -> int:
        return max(self.terms)

    @property
    def lc(self) -> int:
        return self.terms[max(self.terms)]

    def lm_exps(self) -> tuple:
        return self.ring.exps(self.lm_key)

    def total_degree(self) -> int:
        return max((self.ring.degree_of_key(k) for k in self.terms), default=-1)

    def sorted_terms(self) -> list:
        """``(coefficient, exponents)`` in descending monomial order."""
        r = self.ring
        return [(self.terms[k], r.exps(k)) for k in sorted(self.terms, reverse=True)]

    def variables(self) -> set:
        out = set()
        for k in self.terms:
            out.update(i for i, e in enumerate(self.ring.exps(k)) if e)
        return out

    def is_constant(self) -> bool:
        return all(k == self.ring.one_key for k in self.terms)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "MPoly":
        if isinstance(other, int):
            return self.ring.const(other)
        if other.ring != self.ring:
            raise ValueError("polynomials from different rings")
        return other

    def __add__(self, other) -> "MPoly":
        other = self._coerce(other)
        p = self.ring.p
        d = dict(self.terms)
        for k, c in other.terms.items():
            nc = (d.get(k, 0) + c) % p
            if nc:
                d[k] = nc
            else:
                d.pop(k, None)
        return MPoly(self.ring, d)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        p = self.ring.p
        return MPoly(self.ring, {k: p - c for k, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, int):
            c = other % self.ring.p
            if not c:
                return self.ring.zero()
            return MPoly(self.ring, {k: v * c % self.ring.p for k, v in self.terms.items()})
        other = self._coerce(other)
        p = self.ring.p
        one = self.ring.one_key
        d: dict = {}
        for k1, c1 in self.terms.items():
            base = k1 - one
            for k2, c2 in other.terms.items():
                k = k2 + base
                d[k] = (d.get(k, 0) + c1 * c2) % p
        return MPoly(self.ring, {k: c for k, c in d.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "MPoly":
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def mul_term(self, key: int, c: int) -> "MPoly":
        """Multiply by the monomial with the given key and coefficient c."""
        p = self.ring.p
        sh = key - self.ring.one_key
        return MPoly(self.ring, {k + sh: v * c % p for k, v in self.terms.items()})

    def monic(self) -> "MPoly":
        if not self.terms:
            return self
        p = self.ring.p
        inv = pow(self.lc, -1, p)
        return MPoly(self.ring, {k: v * inv % p for k, v in self.terms.items()})

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.ring.p
        total = 0
        for k, c in self.terms.items():
            t = c
            for x, e in zip(point, self.ring.exps(k)):
                if e:
                    t = t * pow(x, e, p) % p
            total += t
        return total % p

    def to_ring(self, ring: PolyRing) -> "MPoly":
        """Re-key into a ring with the same variables (e.g. another order)."""
        if ring.nvars != self.ring.nvars or ring.p != self.ring.p:
            raise ValueError("incompatible rings")
        src = self.ring
        return MPoly(ring, {ring.key(src.exps(k)): c for k, c in self.terms.items()})

    def univariate_coeffs(self, var: int) -> list:
        """Dense coefficient list (low degree first) of a polynomial in one variable."""
        out: list = []
        for k, c in self.terms.items():
            e = self.ring.exps(k)
            if any(x for i, x in enumerate(e) if i != var):
                raise ValueError("polynomial is not univariate in the requested variable")
            d = e[var]
            if d >= len(out):
                out.extend([0] * (d + 1 - len(out)))
            out[d] = c
        return out

    # display / serialisation ---------------------------------------------------
    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.ring.names
        parts = []
        for c, e in self.sorted_terms():
            mono = "*".join(n if x == 1 else f"{n}^{x}" for n, x in zip(names, e) if x)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "order": self.ring.order,
            "modulus": str(self.ring.p),
            "nvars": self.ring.nvars,
            "terms": [[str(c), list(e)] for c, e in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, d: dict) -> "MPoly":
        ring = PolyRing(int(d["modulus"]), int(d["nvars"]), d["order"])
        return ring.from_terms((int(c), e) for c, e in d["terms"])
