"""Prime fields, prime generation and centered Chinese remainder lifting.

Integers are plain Python ``int`` (arbitrary precision, signed); residues
are ints in ``[0, p)`` paired with a :class:`PrimeField`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import gmpy2

MR_ROUNDS = 64


class NotInvertible(ArithmeticError):
    """Raised when an inverse is requested for a non-unit."""


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p <= 2 or not is_probable_prime(self.p):
            raise ValueError(f"{self.p} is not an odd prime")

    @property
    def bit_length(self) -> int:
        return self.p.bit_length()

    def __int__(self) -> int:
        return self.p

    def __call__(self, value: int) -> int:
        return value % self.p

    def to_json(self) -> str:
        return str(self.p)

    @classmethod
    def from_json(cls, s: str) -> "PrimeField":
        return cls(int(s))


Modulus = Union[int, PrimeField]


def is_probable_prime(n: int, rounds: int = MR_ROUNDS) -> bool:
    return bool(gmpy2.is_prime(n, rounds))


def gen_prime(bits: int, rng: random.Random, avoid: Iterable[int] = ()) -> PrimeField:
    """Draw a uniformly random prime with exactly ``bits`` bits.

    Primes listed in ``avoid`` are rejected and redrawn, which keeps the
    moduli of a CRT run pairwise distinct.
    """
    if bits < 3:
        raise ValueError("bits must be >= 3")
    avoid = set(int(a) for a in avoid)
    lo = 1 << (bits - 1)
    while True:
        cand = lo | rng.getrandbits(bits - 1) | 1
        if cand not in avoid and is_probable_prime(cand):
            return PrimeField(cand)


def mod_inverse(a: int, p: Modulus) -> int:
    p = int(p)
    a %= p
    if a == 0:
        raise NotInvertible(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def centered(x: int, n: int) -> int:
    """Representative of ``x mod n`` in the half-open interval (-n/2, n/2]."""
    x %= n
    return x - n if 2 * x > n else x


def crt_combine(residues: Sequence[tuple[int, Modulus]]) -> int:
    """Centered CRT lift of ``[(value_i, p_i), ...]``.

    Returns the unique x in (-n/2, n/2], n = prod p_i, with x = value_i mod p_i.
    """
    if not residues:
        raise ValueError("need at least one residue")
    x, n = 0, 1
    seen = set()
    for value, p in residues:
        p = int(p)
        if p in seen:
            raise ValueError(f"duplicate modulus {p}")
        seen.add(p)
        if not 0 <= value < p:
            raise ValueError(f"residue {value} out of range for modulus {p}")
        # Garner step: x + n*t = value (mod p)
        t = (value - x) * pow(n, -1, p) % p
        x += n * t
        n *= p
    return centered(x, n)
