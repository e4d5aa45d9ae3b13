"""Vectorized modular arithmetic on ``uint64`` residue arrays.

Moduli below 2^51 use a floating point quotient estimate followed by an exact
wrapping correction, which keeps everything inside numpy's native integer
kernels.  Larger moduli (up to 2^63) fall back to Python integers.
"""

from __future__ import annotations

import numpy as np
import sympy

FAST_LIMIT = 1 << 51
MAX_MODULUS = 1 << 63
_FLOAT_EXACT_BITS = 53

U64 = np.uint64


def bit_length(x: int) -> int:
    return int(x).bit_length()


def to_residues(values, modulus: int) -> np.ndarray:
    """Reduce arbitrary integers (ints, int arrays, object arrays) into uint64."""
    arr = np.asarray(values)
    if arr.dtype == np.uint64:
        if arr.size and int(arr.max()) >= modulus:
            return (arr % U64(modulus)).astype(U64)
        return arr.copy()
    if arr.dtype.kind in "iu" and arr.dtype.itemsize <= 8:
        arr = arr.astype(np.int64)
        out = np.mod(arr, np.int64(modulus))
        return out.astype(U64)
    obj = np.array(arr, dtype=object) % modulus
    return obj.astype(U64)


def centered(x, modulus: int) -> np.ndarray:
    """Representative in (-modulus/2, modulus/2] as int64."""
    arr = np.asarray(x, dtype=U64).astype(np.int64)
    half = modulus // 2
    return np.where(arr > half, arr - np.int64(modulus), arr)


def centered_int(x: int, modulus: int) -> int:
    x %= modulus
    return x - modulus if x > modulus // 2 else x


def add_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    s = np.add(a, b, dtype=U64)
    return np.where(s >= U64(modulus), s - U64(modulus), s)


def sub_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    a = np.asarray(a, dtype=U64)
    b = np.asarray(b, dtype=U64)
    return np.where(a >= b, a - b, a + (U64(modulus) - b))


def neg_mod(a: np.ndarray, modulus: int) -> np.ndarray:
    a = np.asarray(a, dtype=U64)
    return np.where(a == 0, a, U64(modulus) - a)


def _correct(r: np.ndarray, modulus: int) -> np.ndarray:
    m = np.int64(modulus)
    r = np.where(r < 0, r + m, r)
    r = np.where(r >= m, r - m, r)
    return r.astype(U64)


def mul_mod(a, b, modulus: int) -> np.ndarray:
    """Elementwise ``a * b mod modulus`` with broadcasting."""
    a = np.asarray(a, dtype=U64)
    b = np.asarray(b, dtype=U64)
    if modulus < FAST_LIMIT:
        quo = np.floor(a.astype(np.float64) * b.astype(np.float64) / float(modulus))
        r = (a * b - quo.astype(U64) * U64(modulus)).view(np.int64)
        return _correct(r, modulus)
    prod = np.multiply(a.astype(object), b.astype(object)) % modulus
    return np.asarray(prod).astype(U64)


def mul_mod_shoup(a: np.ndarray, w: np.ndarray, w_scaled: np.ndarray, modulus: int) -> np.ndarray:
    """``a * w mod modulus`` where ``w_scaled = w / modulus`` is precomputed."""
    if modulus < FAST_LIMIT:
        quo = np.floor(a.astype(np.float64) * w_scaled)
        r = (a * w - quo.astype(U64) * U64(modulus)).view(np.int64)
        return _correct(r, modulus)
    return mul_mod(a, w, modulus)


def scalar_mul_mod(a: np.ndarray, c: int, modulus: int) -> np.ndarray:
    c %= modulus
    if c == 0:
        return np.zeros_like(np.asarray(a, dtype=U64))
    if c == 1:
        return np.asarray(a, dtype=U64).copy()
    return mul_mod(a, np.full(1, c, dtype=U64), modulus)


def sum_mod(a: np.ndarray, axis: int, modulus: int) -> np.ndarray:
    """Sum residues along ``axis`` without overflowing uint64."""
    a = np.asarray(a, dtype=U64)
    count = a.shape[axis]
    if count * (modulus - 1) < (1 << 64):
        return np.sum(a, axis=axis, dtype=U64) % U64(modulus)
    return (np.sum(a.astype(object), axis=axis) % modulus).astype(U64)


def small_matmul_mod(small: np.ndarray, big: np.ndarray, modulus: int,
                     small_bound: int | None = None, limbs: list[np.ndarray] | None = None,
                     limb_bits: int | None = None) -> np.ndarray:
    """Exact ``small @ big mod modulus`` for a nonnegative left factor of bounded size.

    ``big`` is split into limbs so that every partial product sum stays below
    2^53 and float64 BLAS is exact.  ``limbs``/``limb_bits`` may be supplied
    from :func:`split_limbs` to avoid repeated splitting of a fixed key.
    """
    small = np.asarray(small)
    rows = small.shape[-1]
    if small_bound is None:
        small_bound = int(small.max()) if small.size else 0
    if small_bound == 0:
        return np.zeros(small.shape[:-1] + big.shape[1:], dtype=U64)
    if limbs is None:
        limb_bits = limb_width(small_bound, rows)
        limbs = split_limbs(big, limb_bits)
    left = small.astype(np.float64)
    total = None
    for index, limb in enumerate(limbs):
        part = np.rint(left @ limb).astype(U64) % U64(modulus)
        if index:
            part = scalar_mul_mod(part, pow(2, limb_bits * index, modulus), modulus)
        total = part if total is None else add_mod(total, part, modulus)
    return total


def limb_width(small_bound: int, rows: int) -> int:
    width = _FLOAT_EXACT_BITS - bit_length(small_bound) - bit_length(rows)
    if width < 1:
        raise ValueError("left factor too large for exact float accumulation")
    return width


def split_limbs(big: np.ndarray, limb_bits: int) -> list[np.ndarray]:
    big = np.asarray(big, dtype=U64)
    top = int(big.max()) if big.size else 0
    count = max(1, -(-bit_length(top) // limb_bits))
    mask = U64((1 << limb_bits) - 1)
    return [((big >> U64(limb_bits * i)) & mask).astype(np.float64) for i in range(count)]


def signed_small_matmul_mod(weights: np.ndarray, big: np.ndarray, modulus: int) -> np.ndarray:
    """``weights @ big mod modulus`` for small signed integer weights."""
    weights = np.asarray(weights, dtype=np.int64)
    pos = np.where(weights > 0, weights, 0)
    neg = np.where(weights < 0, -weights, 0)
    out = small_matmul_mod(pos, big, modulus)
    if neg.any():
        out = sub_mod(out, small_matmul_mod(neg, big, modulus), modulus)
    return out


def is_prime(value: int) -> bool:
    return bool(sympy.isprime(value))


def primitive_root_of_unity(order: int, modulus: int) -> int:
    """Smallest-generator-derived primitive ``order``-th root of unity (order a power of two)."""
    if (modulus - 1) % order:
        raise ValueError("order does not divide modulus - 1")
    cofactor = (modulus - 1) // order
    for g in range(2, modulus):
        w = pow(g, cofactor, modulus)
        if pow(w, order // 2, modulus) == modulus - 1:
            return w
    raise ValueError("no primitive root found")


def find_ntt_prime(bits: int, degree: int) -> int:
    """Largest prime below 2^bits congruent to 1 mod 2*degree."""
    step = 2 * degree
    k = ((1 << bits) - 2) // step
    while k > 0:
        candidate = k * step + 1
        if is_prime(candidate):
            return candidate
        k -= 1
    raise ValueError("no prime found")
