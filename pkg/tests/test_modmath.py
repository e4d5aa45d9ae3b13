import numpy as np
from hypothesis import given, settings, strategies as st

from fdfb import modmath as mm
from fdfb.params import Q2, TOY_MODULUS

MODULI = [97, TOY_MODULUS, Q2]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(MODULI), st.data())
def test_mul_add_sub_against_python(q, data):
    xs = data.draw(st.lists(st.integers(0, q - 1), min_size=1, max_size=20))
    ys = data.draw(st.lists(st.integers(0, q - 1), min_size=len(xs), max_size=len(xs)))
    a = np.array(xs, dtype=np.uint64)
    b = np.array(ys, dtype=np.uint64)
    assert [int(v) for v in mm.mul_mod(a, b, q)] == [(x * y) % q for x, y in zip(xs, ys)]
    assert [int(v) for v in mm.add_mod(a, b, q)] == [(x + y) % q for x, y in zip(xs, ys)]
    assert [int(v) for v in mm.sub_mod(a, b, q)] == [(x - y) % q for x, y in zip(xs, ys)]
    assert [int(v) for v in mm.neg_mod(a, q)] == [(-x) % q for x in xs]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(MODULI), st.data())
def test_small_matmul(q, data):
    rows = data.draw(st.integers(1, 5))
    k = data.draw(st.integers(1, 30))
    cols = data.draw(st.integers(1, 4))
    small = np.array(data.draw(st.lists(st.integers(0, 1023), min_size=rows * k, max_size=rows * k)),
                     dtype=np.int64).reshape(rows, k)
    big = np.array(data.draw(st.lists(st.integers(0, q - 1), min_size=k * cols, max_size=k * cols)),
                   dtype=np.uint64).reshape(k, cols)
    want = (small.astype(object) @ big.astype(object)) % q
    got = mm.small_matmul_mod(small, big, q)
    assert np.array_equal(got.astype(object), want)
    signed = small - 512
    want = (signed.astype(object) @ big.astype(object)) % q
    assert np.array_equal(mm.signed_small_matmul_mod(signed, big, q).astype(object), want)


def test_centered():
    q = 17
    assert [int(v) for v in mm.centered(np.array([0, 8, 9, 16], dtype=np.uint64), q)] == [0, 8, -8, -1]
    assert mm.centered_int(16, q) == -1


def test_ntt_prime_search():
    p = mm.find_ntt_prime(20, 16)
    assert mm.is_prime(p) and p % 32 == 1 and p < 2**20
    w = mm.primitive_root_of_unity(32, p)
    assert pow(w, 16, p) == p - 1
