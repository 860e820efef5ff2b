"""Honest-party simulators for the BCFRX, HKS and RU protocols.

Every simulator is a pure function of its parameters and a
``random.Random``.  Ground truth (secrets, session keys) is attached to
the returned objects under ``truth`` only when ``keep_truth`` is set;
attack entry points never look at it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .matlin import (
    Matrix,
    block_diag,
    eval_poly,
    mat_inv,
    random_invertible,
    random_matrix,
    sample_sl,
    sample_sl_uniform,
)

SAMPLERS = ("word", "uniform")


# --- BCFRX ------------------------------------------------------------------

@dataclass(frozen=True)
class BcfrxKey:
    M: Matrix
    M_inv: Matrix

    @property
    def modulus(self):
        return self.M.modulus

    def mod(self, p) -> "BcfrxKey":
        return BcfrxKey(self.M.mod(p), self.M_inv.mod(p))


@dataclass(frozen=True)
class BcfrxTranscript:
    C: Matrix
    D: Matrix
    E: Matrix
    truth: Optional[dict] = field(default=None, compare=False)

    @property
    def modulus(self):
        return self.C.modulus

    def mod(self, p) -> "BcfrxTranscript":
        truth = None
        if self.truth is not None:
            truth = {k: (v.mod(p) if isinstance(v, Matrix) else v) for k, v in self.truth.items()}
        return BcfrxTranscript(self.C.mod(p), self.D.mod(p), self.E.mod(p), truth)

    def public(self) -> "BcfrxTranscript":
        return replace(self, truth=None)

    def to_json(self) -> dict:
        return {"C": self.C.to_json(), "D": self.D.to_json(), "E": self.E.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "BcfrxTranscript":
        return cls(Matrix.from_json(d["C"]), Matrix.from_json(d["D"]), Matrix.from_json(d["E"]))


def _sl2(ring, word_len, rng, sampler):
    if sampler == "uniform":
        return sample_sl_uniform(2, ring, rng)
    return sample_sl(2, ring, word_len, rng)


def _sl2_inverse(s: Matrix) -> Matrix:
    (a, b), (c, d) = s.rows
    return Matrix(((d, -b), (-c, a)), s.modulus)


def bcfrx_keygen(ring, word_len: int, rng: random.Random, sampler: str = "word") -> BcfrxKey:
    """Long-term key M in SL_4 (integers when ``ring`` is None, else Z/p)."""
    if sampler == "uniform":
        if ring is None:
            raise ValueError("uniform sampling needs a finite ring")
        M = sample_sl_uniform(4, ring, rng)
    else:
        M = sample_sl(4, ring, word_len, rng)
    return BcfrxKey(M, mat_inv(M))


def _subgroup_pair(key: BcfrxKey, which: str, word_len: int, rng, sampler: str):
    """An element of A (which='A') or B (which='B') and its inverse."""
    ring = key.modulus
    s = _sl2(ring, word_len, rng, sampler)
    eye = Matrix.identity(2, ring)
    if which == "A":
        u, ui = block_diag(s, eye), block_diag(_sl2_inverse(s), eye)
    elif which == "B":
        u, ui = block_diag(eye, s), block_diag(eye, _sl2_inverse(s))
    else:
        raise ValueError("which must be 'A' or 'B'")
    return key.M_inv @ u @ key.M, key.M_inv @ ui @ key.M


def bcfrx_sample_subgroup(key: BcfrxKey, which: str, word_len: int, rng: random.Random,
                          sampler: str = "word") -> Matrix:
    """``M^-1 u M`` for a random u in U (which='A') or L (which='B')."""
    return _subgroup_pair(key, which, word_len, rng, sampler)[0]


def bcfrx_run(key: BcfrxKey, K: Matrix, rng: random.Random, word_len: int = 12,
              sampler: str = "word", keep_truth: bool = False) -> BcfrxTranscript:
    """One three-pass run transporting the session key K."""
    B, Bi = _subgroup_pair(key, "B", word_len, rng, sampler)
    B2, B2i = _subgroup_pair(key, "B", word_len, rng, sampler)
    A, Ai = _subgroup_pair(key, "A", word_len, rng, sampler)
    A2, A2i = _subgroup_pair(key, "A", word_len, rng, sampler)
    BK = B @ K
    C = BK @ B2                      # Bob -> Alice
    AC = A @ C
    D = AC @ A2                      # Alice -> Bob
    BiD = Bi @ D
    E = BiD @ B2i                    # Bob -> Alice
    truth = None
    if keep_truth:
        mats = (key.M, key.M_inv, K, A, Ai, A2, A2i, B, Bi, B2, B2i, BK, C, AC, D, BiD, E)
        truth = {
            "K": K, "A": A, "A2": A2, "B": B, "B2": B2,
            "A_inv": Ai, "A2_inv": A2i,
            "lambda": lambda_bound(mats),
        }
    return BcfrxTranscript(C, D, E, truth)


def alice_recover(t: BcfrxTranscript) -> Matrix:
    """Alice's last step ``A^-1 E A'^-1`` (needs the truth record)."""
    return t.truth["A_inv"] @ t.E @ t.truth["A2_inv"]


def bcfrx_session(key: BcfrxKey, word_len: int, rng: random.Random, sampler: str = "word",
                  keep_truth: bool = True) -> BcfrxTranscript:
    """Bob draws a session key from the platform group and runs the protocol."""
    ring = key.modulus
    if sampler == "uniform":
        K = sample_sl_uniform(4, ring, rng)
    else:
        K = sample_sl(4, ring, word_len, rng)
    return bcfrx_run(key, K, rng, word_len, sampler, keep_truth)


def lambda_bound(mats: Sequence[Matrix]) -> int:
    """Smallest even Lambda with every entry strictly inside (-Lambda/2, Lambda/2)."""
    return 2 * (max(m.max_abs() for m in mats) + 1)


# --- HKS --------------------------------------------------------------------

def poly_sum_eval(J: Matrix, n: int) -> Matrix:
    """``J + J^2 + ... + J^(n-1)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return eval_poly([0] + [1] * (n - 1), J)


@dataclass
class HksInstance:
    p: int
    m: int
    n: int
    deg: int
    Q: Matrix
    b: tuple
    w_A: tuple
    w_B: tuple
    truth: Optional[dict] = None

    def public(self) -> "HksInstance":
        return replace(self, truth=None)

    def bob_algorithm(self, rng: random.Random) -> Matrix:
        """The public key-generation algorithm M_B: a random polynomial in Q."""
        return eval_poly(_rand_coeffs(self.deg, self.p, rng), self.Q)

    def sampler(self, rng: random.Random) -> Callable[[], Matrix]:
        """Matrices f(L) for fresh outputs L of M_B."""
        return lambda: poly_sum_eval(self.bob_algorithm(rng), self.n)

    def to_json(self) -> dict:
        d = {
            "protocol": "hks",
            "params": {"p": str(self.p), "m": self.m, "n": self.n, "deg": self.deg},
            "public": {
                "Q": self.Q.to_json(),
                "b": [str(x) for x in self.b],
                "w_A": [str(x) for x in self.w_A],
                "w_B": [str(x) for x in self.w_B],
            },
        }
        if self.truth:
            d["truth"] = {
                "J": self.truth["J"].to_json(), "K": self.truth["K"].to_json(),
                "key": [str(x) for x in self.truth["key"]],
            }
        return d

    @classmethod
    def from_json(cls, d: dict) -> "HksInstance":
        pr, pub = d["params"], d["public"]
        truth = None
        if d.get("truth"):
            t = d["truth"]
            truth = {"J": Matrix.from_json(t["J"]), "K": Matrix.from_json(t["K"]),
                     "key": tuple(int(x) for x in t["key"])}
        return cls(int(pr["p"]), int(pr["m"]), int(pr["n"]), int(pr["deg"]),
                   Matrix.from_json(pub["Q"]), tuple(int(x) for x in pub["b"]),
                   tuple(int(x) for x in pub["w_A"]), tuple(int(x) for x in pub["w_B"]), truth)


def _rand_coeffs(deg: int, p: int, rng: random.Random) -> list:
    return [rng.randrange(p) for _ in range(max(deg, 1))]


def hks_from_secrets(p: int, n: int, Q: Matrix, b: Sequence[int], J: Matrix, K: Matrix,
                     deg: int = 1, keep_truth: bool = True) -> HksInstance:
    fJ = poly_sum_eval(J, n)
    fK = poly_sum_eval(K, n)
    w_A = fJ.apply(b)
    w_B = fK.apply(b)
    k_A = fJ.apply(w_B)
    k_B = fK.apply(w_A)
    truth = {"J": J, "K": K, "key": k_A, "key_B": k_B} if keep_truth else None
    return HksInstance(int(p), Q.n, n, deg, Q, tuple(x % p for x in b), w_A, w_B, truth)


def hks_setup(p: int, m: int, n: int, deg: int, rng: random.Random,
              keep_truth: bool = True) -> HksInstance:
    """Random HKS run with J, K polynomials of degree < deg in a public Q."""
    if m < 2 or n < 2:
        raise ValueError("need m >= 2 and n >= 2")
    Q = random_matrix(m, p, rng)
    b = tuple(rng.randrange(p) for _ in range(m))
    J = eval_poly(_rand_coeffs(deg, p, rng), Q)
    K = eval_poly(_rand_coeffs(deg, p, rng), Q)
    return hks_from_secrets(p, n, Q, b, J, K, deg, keep_truth)


# --- RU ---------------------------------------------------------------------

def eval_bivariate(f: dict, C: Matrix, D: Matrix) -> Matrix:
    """``sum f[(i, j)] C^i D^j`` for commuting C, D."""
    n, q = C.n, C.modulus
    cp = [Matrix.identity(n, q)]
    for _ in range(max((i for i, _ in f), default=0)):
        cp.append(cp[-1] @ C)
    dp = [Matrix.identity(n, q)]
    for _ in range(max((j for _, j in f), default=0)):
        dp.append(dp[-1] @ D)
    acc = Matrix.zeros(n, modulus=q)
    for (i, j), c in sorted(f.items()):
        if c:
            acc = acc + (cp[i] @ dp[j]).scale(c)
    return acc


@dataclass
class RuInstance:
    q: int
    n: int
    deg: int
    C: Matrix
    D: Matrix
    d: tuple
    w_A: tuple
    w_B: tuple
    truth: Optional[dict] = None

    def public(self) -> "RuInstance":
        return replace(self, truth=None)

    def to_json(self) -> dict:
        d = {
            "protocol": "ru",
            "params": {"q": str(self.q), "n": self.n, "deg": self.deg},
            "public": {
                "C": self.C.to_json(), "D": self.D.to_json(),
                "d": [str(x) for x in self.d],
                "w_A": [str(x) for x in self.w_A],
                "w_B": [str(x) for x in self.w_B],
            },
        }
        if self.truth:
            d["truth"] = {
                "f_A": [[i, j, str(c)] for (i, j), c in sorted(self.truth["f_A"].items())],
                "f_B": [[i, j, str(c)] for (i, j), c in sorted(self.truth["f_B"].items())],
                "key": [str(x) for x in self.truth["key"]],
            }
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RuInstance":
        pr, pub = d["params"], d["public"]
        truth = None
        if d.get("truth"):
            t = d["truth"]
            truth = {
                "f_A": {(int(i), int(j)): int(c) for i, j, c in t["f_A"]},
                "f_B": {(int(i), int(j)): int(c) for i, j, c in t["f_B"]},
                "key": tuple(int(x) for x in t["key"]),
            }
        return cls(int(pr["q"]), int(pr["n"]), int(pr["deg"]),
                   Matrix.from_json(pub["C"]), Matrix.from_json(pub["D"]),
                   tuple(int(x) for x in pub["d"]),
                   tuple(int(x) for x in pub["w_A"]), tuple(int(x) for x in pub["w_B"]), truth)


def _rand_bivariate(deg: int, q: int, rng: random.Random) -> dict:
    return {(i, j): rng.randrange(q) for i in range(deg + 1) for j in range(deg + 1 - i)}


def ru_from_secrets(q: int, C: Matrix, D: Matrix, d: Sequence[int], f_A: dict, f_B: dict,
                    deg: int = 0, keep_truth: bool = True) -> RuInstance:
    FA = eval_bivariate(f_A, C, D)
    FB = eval_bivariate(f_B, C, D)
    w_A = FA.apply(d)
    w_B = FB.apply(d)
    k_A = FA.apply(w_B)
    k_B = FB.apply(w_A)
    truth = {"f_A": dict(f_A), "f_B": dict(f_B), "key": k_A, "key_B": k_B} if keep_truth else None
    return RuInstance(int(q), C.n, deg, C, D, tuple(x % q for x in d), w_A, w_B, truth)


def ru_setup(q: int, n: int, deg: int, rng: random.Random, keep_truth: bool = True) -> RuInstance:
    """Random RU run: C invertible, D = h(C) invertible, f_A, f_B of total degree <= deg."""
    if n < 2:
        raise ValueError("need n >= 2")
    C = random_invertible(n, q, rng)
    while True:
        D = eval_poly([rng.randrange(q) for _ in range(n)], C)
        if D.det():
            break
    d = tuple(rng.randrange(q) for _ in range(n))
    return ru_from_secrets(q, C, D, d, _rand_bivariate(deg, q, rng), _rand_bivariate(deg, q, rng),
                           deg, keep_truth)
