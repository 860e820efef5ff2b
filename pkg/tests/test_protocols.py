import random

import pytest

from matkex.matlin import Matrix, block_get, commutes, eval_poly, mat_det, random_matrix
from matkex.protocols import (
    BcfrxTranscript,
    HksInstance,
    RuInstance,
    alice_recover,
    bcfrx_keygen,
    bcfrx_run,
    bcfrx_sample_subgroup,
    bcfrx_session,
    eval_bivariate,
    hks_from_secrets,
    hks_setup,
    lambda_bound,
    poly_sum_eval,
    ru_from_secrets,
    ru_setup,
)

P = 4294967291


def test_keygen_zero_word_is_identity():
    key = bcfrx_keygen(None, 0, random.Random(1))
    assert key.M == Matrix.identity(4)


def test_keygen_det_one():
    rng = random.Random(2)
    for i in range(200):
        key = bcfrx_keygen(None if i % 2 else P, 12, rng, "word")
        assert mat_det(key.M) == 1 and key.M @ key.M_inv == Matrix.identity(4, key.modulus)
    for _ in range(50):
        assert mat_det(bcfrx_keygen(P, 0, rng, "uniform").M) == 1


def test_key_reduction_is_a_valid_tp_key():
    key = bcfrx_keygen(None, 30, random.Random(3))
    red = key.mod(101)
    assert mat_det(red.M) == 1 and red.M @ red.M_inv == Matrix.identity(4, 101)


def test_subgroup_zero_word_is_identity():
    key = bcfrx_keygen(None, 10, random.Random(4))
    assert bcfrx_sample_subgroup(key, "A", 0, random.Random(5)) == Matrix.identity(4)


def test_subgroup_with_identity_key_has_block_shape():
    key = bcfrx_keygen(P, 0, random.Random(6))
    rng = random.Random(7)
    a = bcfrx_sample_subgroup(key, "A", 0, rng, "uniform")
    b = bcfrx_sample_subgroup(key, "B", 0, rng, "uniform")
    eye, zero = Matrix.identity(2, P), Matrix.zeros(2, modulus=P)
    assert block_get(a, 2, 2) == eye and block_get(a, 1, 2) == zero and block_get(a, 2, 1) == zero
    assert block_get(b, 1, 1) == eye and block_get(b, 1, 2) == zero and block_get(b, 2, 1) == zero


def test_subgroups_commute_1000():
    rng = random.Random(8)
    for i in range(1000):
        if i % 100 == 0:
            ring = None if i % 200 else P
            key = bcfrx_keygen(ring, 12, rng)
        a = bcfrx_sample_subgroup(key, "A", 12, rng)
        b = bcfrx_sample_subgroup(key, "B", 12, rng)
        assert commutes(a, b)


def test_subgroup_bad_label():
    key = bcfrx_keygen(P, 3, random.Random(0))
    with pytest.raises(ValueError):
        bcfrx_sample_subgroup(key, "C", 3, random.Random(0))


def test_run_with_trivial_randomness():
    key = bcfrx_keygen(None, 8, random.Random(9))
    K = bcfrx_keygen(None, 8, random.Random(10)).M
    t = bcfrx_run(key, K, random.Random(11), word_len=0)
    assert t.C == t.D == t.E == K


def test_run_identities():
    rng = random.Random(12)
    for ring in (None, P):
        key = bcfrx_keygen(ring, 12, rng)
        t = bcfrx_session(key, 12, rng)
        tr = t.truth
        assert t.C == tr["B"] @ tr["K"] @ tr["B2"]
        assert t.D == tr["A"] @ t.C @ tr["A2"]
        assert t.E == tr["A"] @ tr["K"] @ tr["A2"]
        assert alice_recover(t) == tr["K"]


def test_bcfrx_correctness_1000():
    rng = random.Random(13)
    for i in range(1000):
        ring = None if i % 2 else P
        key = bcfrx_keygen(ring, 12, rng)
        t = bcfrx_session(key, 12, rng)
        assert alice_recover(t) == t.truth["K"]


def test_lambda_bound_soundness():
    rng = random.Random(14)
    for _ in range(50):
        key = bcfrx_keygen(None, 20, rng)
        t = bcfrx_session(key, 20, rng)
        lam = t.truth["lambda"]
        for m in (t.C, t.D, t.E, t.truth["K"], key.M, t.truth["A"], t.truth["B2"]):
            assert 2 * m.max_abs() < lam
    assert lambda_bound([Matrix(((3, -7), (0, 1)))]) == 16


def test_reduction_homomorphism():
    for seed in range(50):
        key = bcfrx_keygen(None, 12, random.Random(seed))
        key_p = bcfrx_keygen(101, 12, random.Random(seed))
        assert key.mod(101) == key_p
        t = bcfrx_session(key, 12, random.Random(seed + 1000))
        tp = bcfrx_session(key_p, 12, random.Random(seed + 1000))
        assert t.mod(101).public() == tp.public()
        assert t.truth["K"].mod(101) == tp.truth["K"]


def test_transcript_json_round_trip():
    key = bcfrx_keygen(None, 12, random.Random(15))
    t = bcfrx_session(key, 12, random.Random(16))
    assert BcfrxTranscript.from_json(t.to_json()) == t.public()


def test_poly_sum_eval_examples():
    assert poly_sum_eval(Matrix.identity(3), 5) == Matrix.scalar(3, 4)
    assert poly_sum_eval(Matrix.zeros(3), 4) == Matrix.zeros(3)
    assert poly_sum_eval(Matrix.scalar(2, 2, 7), 3) == Matrix.scalar(2, 6, 7)
    with pytest.raises(ValueError):
        poly_sum_eval(Matrix.identity(2), 1)


def test_hks_identity_polynomial_instance():
    p, n = 101, 5
    Q = Matrix.identity(3, p)
    b = (1, 2, 3)
    inst = hks_from_secrets(p, n, Q, b, Q, Q)
    assert inst.w_A == inst.w_B == tuple((n - 1) * x % p for x in b)
    assert inst.truth["key"] == tuple((n - 1) ** 2 * x % p for x in b)


def test_hks_zero_b():
    rng = random.Random(17)
    Q = random_matrix(4, P, rng)
    inst = hks_from_secrets(P, 5, Q, (0, 0, 0, 0), eval_poly([1, 2], Q), eval_poly([3, 4], Q))
    assert inst.w_A == inst.w_B == inst.truth["key"] == (0, 0, 0, 0)


def test_hks_agreement_1000():
    rng = random.Random(18)
    for _ in range(1000):
        inst = hks_setup(2147483647, 4, 5, 3, rng)
        assert inst.truth["key"] == inst.truth["key_B"]
        fJ, fK = poly_sum_eval(inst.truth["J"], 5), poly_sum_eval(inst.truth["K"], 5)
        assert fJ @ fK == fK @ fJ


def test_hks_json_round_trip():
    inst = hks_setup(101, 3, 4, 2, random.Random(19))
    back = HksInstance.from_json(inst.to_json())
    assert back.public() == inst.public() and back.truth["key"] == inst.truth["key"]


def test_hks_sampler_outputs_commute_with_secrets():
    inst = hks_setup(101, 4, 5, 3, random.Random(20))
    draw = inst.sampler(random.Random(21))
    fJ = poly_sum_eval(inst.truth["J"], 5)
    for _ in range(5):
        assert commutes(draw(), fJ)


def test_ru_constant_polynomials():
    rng = random.Random(22)
    C = random_matrix(3, 101, rng)
    inst = ru_from_secrets(101, C, C @ C, (4, 5, 6), {(0, 0): 1}, {(0, 0): 1})
    assert inst.w_A == inst.w_B == inst.truth["key"] == (4, 5, 6)


def test_ru_agreement_1000():
    rng = random.Random(23)
    for _ in range(1000):
        inst = ru_setup(2147483647, 4, 3, rng)
        assert inst.truth["key"] == inst.truth["key_B"]
        assert commutes(inst.C, inst.D)
        assert inst.C.det() and inst.D.det()


def test_eval_bivariate_matches_naive():
    rng = random.Random(24)
    C = random_matrix(3, 101, rng)
    D = eval_poly([1, 2, 3], C)
    f = {(2, 1): 5, (0, 0): 7, (1, 0): 0}
    naive = (C @ C @ D).scale(5) + Matrix.scalar(3, 7, 101)
    assert eval_bivariate(f, C, D) == naive


def test_ru_json_round_trip():
    inst = ru_setup(101, 3, 2, random.Random(25))
    back = RuInstance.from_json(inst.to_json())
    assert back.public() == inst.public() and back.truth["f_A"] == inst.truth["f_A"]
