import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdfb import modmath as mm
from fdfb.errors import DomainMismatch, ModulusMismatch, NonNttModulus, OutOfRangeExponent
from fdfb.params import Q1, TOY_MODULUS
from fdfb.ring import (Direction, Domain, Modulus, RingElement, monomial_mul, ntt_table,
                       ntt_transform, ring_mul, schoolbook_multiply)
from fdfb.sampling import ErrorSampler, SampleContext, SampleKind, Sampler, sample

Q_SMALL = mm.find_ntt_prime(30, 256)
Q_BIG = Q1  # exercises the wide-modulus path


def rand_elem(s: Sampler, n: int, q: int) -> RingElement:
    return RingElement(s.uniform(q, (n,)), q)


@pytest.mark.parametrize("q", [Q_SMALL, TOY_MODULUS, Q_BIG])
def test_ntt_roundtrip(q, sampler):
    n = 256
    table = ntt_table(n, q)
    x = sampler.uniform(q, (50, n))
    assert np.array_equal(table.inverse(table.forward(x)), x)


def test_zero_fixed_point():
    z = RingElement.zero(64, TOY_MODULUS)
    f = ntt_transform(z, Direction.FORWARD)
    assert f.domain is Domain.EVALUATION
    assert not f.coeffs.any()
    assert ntt_transform(f, Direction.INVERSE) == z


@pytest.mark.parametrize("q", [Q_SMALL, Q_BIG])
@pytest.mark.parametrize("n", [1, 2, 8, 64])
def test_ring_mul_matches_schoolbook(q, n, sampler):
    if (q - 1) % (2 * n):
        pytest.skip("modulus not NTT friendly for this degree")
    for _ in range(5):
        x, y = rand_elem(sampler, n, q), rand_elem(sampler, n, q)
        assert ring_mul(x, y).to_list() == schoolbook_multiply(x.coeffs, y.coeffs, q)


def test_pointwise_product_in_evaluation_domain(sampler):
    q, n = TOY_MODULUS, 64
    x, y = rand_elem(sampler, n, q), rand_elem(sampler, n, q)
    fx, fy = ntt_transform(x, Direction.FORWARD), ntt_transform(y, Direction.FORWARD)
    assert ntt_transform(fx * fy, Direction.INVERSE) == ring_mul(x, y)


def test_multiplicative_identity(sampler):
    x = rand_elem(sampler, 64, TOY_MODULUS)
    assert x * RingElement.constant(1, 64, TOY_MODULUS) == x


def test_x_to_the_n_is_minus_one():
    q, n = TOY_MODULUS, 64
    prod = ring_mul(RingElement.monomial(n - 1, n, q), RingElement.monomial(1, n, q))
    assert prod == RingElement.constant(q - 1, n, q)
    assert monomial_mul(RingElement.constant(1, n, q), n) == RingElement.constant(q - 1, n, q)


def test_monomial_matches_ring_mul(sampler):
    q, n = TOY_MODULUS, 64
    x = rand_elem(sampler, n, q)
    assert monomial_mul(x, 0) == x
    assert monomial_mul(x, 37) == ring_mul(x, RingElement.monomial(37, n, q))


def test_errors():
    q = TOY_MODULUS
    with pytest.raises(NonNttModulus):
        ntt_table(64, 2**20)
    with pytest.raises(OutOfRangeExponent):
        monomial_mul(RingElement.zero(8, q), 16)
    x = RingElement.zero(8, q)
    with pytest.raises(DomainMismatch):
        ntt_transform(x, Direction.INVERSE)
    with pytest.raises(DomainMismatch):
        x + ntt_transform(x, Direction.FORWARD)
    with pytest.raises(ModulusMismatch):
        ring_mul(x, RingElement.zero(8, Q_SMALL))


def test_modulus_flags():
    assert Modulus(TOY_MODULUS, 1024).is_ntt_prime
    assert not Modulus(2**20, 8).is_ntt_prime
    assert not Modulus(Q_SMALL + 2, 8).is_ntt_prime


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, TOY_MODULUS - 1), min_size=32, max_size=32), st.integers(0, 63))
def test_monomial_inverse_law(coeffs, k):
    x = RingElement(coeffs, TOY_MODULUS)
    y = monomial_mul(x, k)
    assert monomial_mul(y, (64 - k) % 64) == x
    assert monomial_mul(x, 32) == -x


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, Q_BIG - 1), min_size=16, max_size=16),
       st.lists(st.integers(0, Q_BIG - 1), min_size=16, max_size=16))
def test_ring_mul_property_wide(xs, ys):
    x, y = RingElement(xs, Q_BIG), RingElement(ys, Q_BIG)
    assert ring_mul(x, y).to_list() == schoolbook_multiply(xs, ys, Q_BIG)


# ---------------------------------------------------------------- sampling


def test_sampler_determinism():
    a, b = Sampler(b"seed"), Sampler(b"seed")
    assert np.array_equal(a.uniform(TOY_MODULUS, 100), b.uniform(TOY_MODULUS, 100))
    assert np.array_equal(a.gaussian(3.2, 100), b.gaussian(3.2, 100))
    assert not np.array_equal(Sampler(1).words(8), Sampler(2).words(8))
    assert np.array_equal(Sampler(5).fork("x").words(4), Sampler(5).fork("x").words(4))


def test_gaussian_variance_and_mean():
    e = ErrorSampler(3.2, b"\x01" * 32).draw(100_000)
    assert e.dtype.kind == "i"
    var = float(np.var(e))
    assert 9.2 <= var <= 11.3
    assert abs(float(np.mean(e))) < 0.05
    assert np.abs(e).max() <= 6 * 3.2


def test_uniform_mean():
    q = TOY_MODULUS
    u = Sampler(9).uniform(q, 100_000).astype(np.float64)
    assert abs(u.mean() - (q - 1) / 2) < 0.01 * q


def test_sample_kinds():
    ctx = SampleContext(Sampler(3), TOY_MODULUS, degree=16, dimension=7)
    assert sample(SampleKind.UNIFORM_RING, ctx).degree == 16
    assert sample(SampleKind.ERROR_RING, ctx).degree == 16
    assert sample(SampleKind.UNIFORM_LWE_MASK, ctx).shape == (7,)
    assert isinstance(sample(SampleKind.ERROR_SCALAR, ctx), int)


def test_binary_keys():
    s = Sampler(4).binary(700, 64)
    assert set(np.unique(s)) <= {0, 1} and int(s.sum()) == 64
