"""Plaintext codecs, CRT splitting and homomorphic application operations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import modmath as mm
from .bootstrap import BootstrapKeySet, LookupTable, fdfb_bootstrap, setup_polynomial
from .errors import MessageOutOfRange, NonCoprimeModuli
from .samples import LweSample, LweSecretKey, lwe_encrypt, lwe_phase, round_to_plaintext
from .sampling import Sampler

U64 = np.uint64


@dataclass(frozen=True)
class PlaintextEncoding:
    t: int
    q: int

    @property
    def delta(self) -> int:
        return (2 * self.q + self.t) // (2 * self.t)


def encode(m: int, enc: PlaintextEncoding) -> int:
    if not 0 <= m < enc.t:
        raise MessageOutOfRange(f"message {m} outside [0, {enc.t})")
    return (m * enc.delta) % enc.q


def decode(x: int, enc: PlaintextEncoding) -> int:
    return round_to_plaintext(x, enc.q, enc.t)


def to_signed(m: int, t: int) -> int:
    """Upper half of Z_t read as negatives."""
    m %= t
    return m - t if m >= (t + 1) // 2 else m


def encrypt(sk: LweSecretKey, m: int, enc: PlaintextEncoding, stddev: float,
            sampler: Sampler) -> LweSample:
    return lwe_encrypt(sk, encode(m, enc), stddev, enc.q, sampler)


def decrypt(ct: LweSample, sk: LweSecretKey, t: int) -> int:
    return decode(lwe_phase(ct, sk), PlaintextEncoding(t, ct.modulus))


# ---------------------------------------------------------------- leveled ops


def hom_affine(cts, weights, bias: int = 0, enc: PlaintextEncoding | None = None) -> LweSample:
    """``sum w_i ct_i + bias * delta`` with integer (possibly negative) weights."""
    cts = list(cts)
    if not cts:
        raise ValueError("need at least one ciphertext")
    q = cts[0].modulus
    rows = np.stack([c.data for c in cts])
    w = np.asarray(list(weights), dtype=np.int64)
    if w.shape[0] != rows.shape[0]:
        raise ValueError("one weight per ciphertext")
    out = mm.signed_small_matmul_mod(w[None, :], rows, q)[0]
    if bias:
        scale = enc.delta if enc is not None else 1
        out[0] = (int(out[0]) + bias * scale) % q
    return LweSample(out, q)


def hom_add(x: LweSample, y: LweSample) -> LweSample:
    return x + y


def hom_sub(x: LweSample, y: LweSample) -> LweSample:
    return x - y


# ---------------------------------------------------------------- bootstrapped ops


def lut_pair(keys: BootstrapKeySet, f, t: int, t_out: int | None = None):
    t_out = t if t_out is None else t_out
    table = LookupTable.from_function(f, t, t_out, keys.Q)
    return setup_polynomial(table, keys.N)


def eval_lut(ct: LweSample, f, keys: BootstrapKeySet, t: int, t_out: int | None = None,
             final_mod_switch: bool = True, pair=None) -> LweSample:
    """Bootstrap ``ct`` (encoding ``m`` in Z_t) to an encoding of ``f(m)`` in Z_t_out."""
    if pair is None:
        pair = lut_pair(keys, f, t, t_out)
    return fdfb_bootstrap(keys, ct, pair, final_mod_switch=final_mod_switch)


def quarter_square(t_in: int, t_out: int):
    """Table ``g`` with ``g(x + y) - g(x - y) = x * y (mod t_out)``.

    Even ``t_out``: ``floor(z^2 / 4)`` where ``z = x + y`` is read unsigned
    (``plus``) and ``z = x - y`` signed (``minus``); needs ``x + y < t_in``
    and ``|x - y| < t_in / 2``.  Odd ``t``: ``z^2 / 4`` in Z_t (``t_in == t_out``).
    """
    if t_out % 2:
        if t_in != t_out:
            raise ValueError("odd moduli need t_in == t_out")
        inv4 = pow(4, -1, t_out)
        f = lambda z: (z * z * inv4) % t_out  # noqa: E731
        return f, f

    def plus(z):
        return (z * z // 4) % t_out

    def minus(z):
        s = to_signed(z, t_in)
        return (s * s // 4) % t_out

    return plus, minus


def hom_mul(ct_x: LweSample, ct_y: LweSample, keys: BootstrapKeySet, t_in: int,
            t_out: int | None = None) -> LweSample:
    """``x * y`` via two bootstraps of ``x + y`` and ``x - y``."""
    t_out = t_in if t_out is None else t_out
    plus, minus = quarter_square(t_in, t_out)
    s = eval_lut(ct_x + ct_y, plus, keys, t_in, t_out)
    d = eval_lut(ct_x - ct_y, minus, keys, t_in, t_out)
    return s - d


def relu_signed(t: int):
    return lambda m: max(0, to_signed(m, t)) % t


def hom_max(ct_x: LweSample, ct_y: LweSample, keys: BootstrapKeySet, t: int) -> LweSample:
    """``max(x - y, 0) + y`` for values in the signed window of Z_t."""
    r = eval_lut(ct_x - ct_y, relu_signed(t), keys, t)
    if r.modulus != ct_y.modulus:
        raise ValueError("bootstrap output modulus differs from the input")
    return r + ct_y


# ---------------------------------------------------------------- CRT


@dataclass(frozen=True)
class CrtContext:
    moduli: tuple[int, ...]

    def __post_init__(self):
        for i, a in enumerate(self.moduli):
            for b in self.moduli[i + 1:]:
                if math.gcd(a, b) != 1:
                    raise NonCoprimeModuli(f"{a} and {b} share a factor")

    @property
    def t(self) -> int:
        return reduce(lambda a, b: a * b, self.moduli, 1)


def crt_split(m: int, ctx: CrtContext) -> tuple[int, ...]:
    if not 0 <= m < ctx.t:
        raise MessageOutOfRange(f"{m} outside [0, {ctx.t})")
    return tuple(m % ti for ti in ctx.moduli)


def crt_combine(components, ctx: CrtContext) -> int:
    t = ctx.t
    total = 0
    for r, ti in zip(components, ctx.moduli):
        rest = t // ti
        total += int(r) * rest * pow(rest, -1, ti)
    return total % t


def crt_encrypt(sk: LweSecretKey, m: int, ctx: CrtContext, q: int, stddev: float,
                sampler: Sampler) -> list[LweSample]:
    return [encrypt(sk, r, PlaintextEncoding(ti, q), stddev, sampler)
            for r, ti in zip(crt_split(m, ctx), ctx.moduli)]


def crt_decrypt(cts, sk: LweSecretKey, ctx: CrtContext) -> int:
    return crt_combine([decrypt(c, sk, ti) for c, ti in zip(cts, ctx.moduli)], ctx)


def crt_hom_mul(xs, ys, keys: BootstrapKeySet, ctx: CrtContext) -> list[LweSample]:
    """Componentwise product; the key set does not depend on the plaintext modulus."""
    return [hom_mul(x, y, keys, ti) for x, y, ti in zip(xs, ys, ctx.moduli)]


def crt_hom_add(xs, ys) -> list[LweSample]:
    return [x + y for x, y in zip(xs, ys)]
