import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdfb.errors import DomainMismatch, GadgetMismatch
from fdfb.gadget import GadgetParams, decompose_array, decompose_ring, decompose_scalar, recompose
from fdfb.params import Q2, TOY_MODULUS
from fdfb.ring import Direction, RingElement, ntt_transform


def test_levels():
    assert GadgetParams(4, 256).levels == 4
    assert GadgetParams(2**10, TOY_MODULUS).levels == 5
    assert GadgetParams(2, Q2).levels == 63
    with pytest.raises(ValueError):
        GadgetParams(1, 256)
    with pytest.raises(ValueError):
        GadgetParams(4, 256, levels=3)


def test_known_digits():
    g = GadgetParams(4, 256)
    assert decompose_scalar(0, g) == [0, 0, 0, 0]
    assert decompose_scalar(27, g) == [3, 2, 1, 0]
    assert recompose([3, 2, 1, 0], g) == 27
    assert recompose([0, 0, 0, 0], g) == 0


def test_ring_digits():
    g = GadgetParams(4, 256)
    # 256 is not an NTT modulus, but decomposition only needs coefficients
    a = RingElement.constant(27, 8, 256)
    parts = decompose_ring(a, g)
    assert [int(p.coeffs[0]) for p in parts] == [3, 2, 1, 0]
    assert all(not p.coeffs[1:].any() for p in parts)
    assert recompose(parts, g) == a
    zero = decompose_ring(RingElement.zero(8, 256), g)
    assert len(zero) == 4 and all(not p.coeffs.any() for p in zero)


def test_ring_recompose_random(sampler):
    g = GadgetParams(2**7, TOY_MODULUS)
    a = RingElement(sampler.uniform(TOY_MODULUS, 64), TOY_MODULUS)
    parts = decompose_ring(a, g)
    assert all(int(p.coeffs.max()) < g.base for p in parts)
    assert recompose(parts, g) == a


def test_ring_errors():
    g = GadgetParams(2**10, TOY_MODULUS)
    a = RingElement.zero(16, TOY_MODULUS)
    with pytest.raises(DomainMismatch):
        decompose_ring(ntt_transform(a, Direction.FORWARD), g)
    with pytest.raises(GadgetMismatch):
        recompose([0, 0], g)


@pytest.mark.parametrize("base", [2, 3, 8, 10])
def test_exhaustive_small_modulus(base):
    q = 2**13
    g = GadgetParams(base, q)
    values = np.arange(q, dtype=np.uint64)
    digits = decompose_array(values, g)
    assert int(digits.max()) < base
    back = sum(digits[i].astype(object) * base ** i for i in range(g.levels))
    assert np.array_equal(back, np.arange(q))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 5, 2**6, 2**11, 1000]), st.integers(0, Q2 - 1))
def test_scalar_roundtrip_wide(base, a):
    g = GadgetParams(base, Q2)
    digits = decompose_scalar(a, g)
    assert all(0 <= d < base for d in digits)
    assert recompose(digits, g) == a
    assert [int(v) for v in decompose_array(np.array([a], dtype=np.uint64), g)[:, 0]] == digits
