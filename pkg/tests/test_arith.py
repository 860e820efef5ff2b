import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matkex.arith import (
    NotInvertible,
    PrimeField,
    centered,
    crt_combine,
    gen_prime,
    is_probable_prime,
    mod_inverse,
)

from oracles import trial_division_is_prime


def test_gen_prime_8_bits():
    p = int(gen_prime(8, random.Random(1)))
    assert 128 <= p < 256
    assert all(p % d for d in range(2, 16))


def test_251_is_an_8_bit_prime():
    assert is_probable_prime(251) and (251).bit_length() == 8


def test_gen_prime_3_bits():
    assert {int(gen_prime(3, random.Random(s))) for s in range(40)} == {5, 7}


@pytest.mark.parametrize("seed", range(5))
def test_gen_prime_64_bits_independent_oracle(seed):
    p = int(gen_prime(64, random.Random(seed)))
    assert 2**63 <= p < 2**64
    assert trial_division_is_prime(p)


def test_gen_prime_deterministic():
    assert gen_prime(48, random.Random(9)) == gen_prime(48, random.Random(9))


def test_gen_prime_rejects_small_bits():
    with pytest.raises(ValueError):
        gen_prime(2, random.Random(0))


def test_gen_prime_avoid_keeps_primes_distinct():
    rng = random.Random(3)
    seen = []
    for _ in range(10):
        seen.append(int(gen_prime(5, rng, avoid=seen)))
        if len(seen) == 5:  # only 17, 19, 23, 29, 31 exist
            break
    assert len(set(seen)) == len(seen)
    assert set(seen) <= {17, 19, 23, 29, 31}


def test_prime_field_validation():
    assert PrimeField(7).bit_length == 3
    for bad in (2, 9, 1, 0):
        with pytest.raises(ValueError):
            PrimeField(bad)
    assert PrimeField.from_json(PrimeField(101).to_json()) == PrimeField(101)


def test_crt_examples():
    assert crt_combine([(2, 5), (3, 7)]) == 17
    assert crt_combine([(3, 7)]) == 3
    assert crt_combine([(6, 7)]) == -1


def test_crt_example_by_brute_force():
    # the unique x in (-17.5, 17.5] with x = 2 mod 5 and x = 3 mod 7
    hits = [x for x in range(-17, 18) if x % 5 == 2 and x % 7 == 3]
    assert hits == [crt_combine([(2, 5), (3, 7)])]


def test_crt_duplicate_modulus_rejected():
    with pytest.raises(ValueError):
        crt_combine([(1, 7), (2, 7)])


def test_crt_residue_out_of_range():
    with pytest.raises(ValueError):
        crt_combine([(7, 7)])


def test_crt_round_trip_1000():
    rng = random.Random(77)
    for _ in range(1000):
        k = rng.randint(1, 4)
        ps = []
        while len(ps) < k:
            ps.append(int(gen_prime(rng.randint(5, 40), rng, avoid=ps)))
        n = math.prod(ps)
        x = rng.randrange(-(n - 1) // 2, n // 2 + 1)
        assert crt_combine([(x % p, p) for p in ps]) == x


def test_centered_half_open_interval():
    assert centered(5, 10) == 5
    assert centered(6, 10) == -4
    assert centered(3, 7) == 3 and centered(4, 7) == -3


def test_mod_inverse_examples():
    assert mod_inverse(1, 101) == 1
    assert mod_inverse(3, 7) == 5
    with pytest.raises(NotInvertible):
        mod_inverse(0, 7)


def test_mod_inverse_1000_across_fields():
    rng = random.Random(5)
    fields = [gen_prime(rng.randint(8, 64), rng) for _ in range(10)]
    for _ in range(1000):
        f = rng.choice(fields)
        a = rng.randrange(1, int(f))
        assert a * mod_inverse(a, f) % int(f) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-10**30, max_value=10**30))
def test_crt_round_trip_property(x):
    ps = [2**61 - 1, 2**31 - 1, 1000000007]
    n = math.prod(ps)
    x = centered(x, n)
    assert crt_combine([(x % p, p) for p in ps]) == x
