"""LWE, RLWE and RGSW ciphertexts with encryption, phase, linear ops and the external product.

Ciphertexts keep their body first: an LWE sample is one ``uint64`` row
``[b, a_0, ..., a_{n-1}]`` and an RLWE sample is a ``(2, N)`` array ``[b, a]``.
Phase is always ``b - <a, s>``.  RGSW rows are cached in the NTT domain since
they are only ever consumed by external products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import modmath as mm
from .errors import DimensionMismatch, GadgetMismatch, ModulusMismatch, ParamMismatch
from .gadget import GadgetParams, decompose_array
from .ring import Domain, RingElement, negacyclic_shift, ntt_table
from .sampling import Sampler

U64 = np.uint64


# ---------------------------------------------------------------- keys


@dataclass
class LweSecretKey:
    """Secret vector for LWE.  Entries are small signed integers or residues."""

    s: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=np.int64)

    @property
    def dimension(self) -> int:
        return self.s.shape[0]

    @property
    def hamming_weight(self) -> int:
        return int(np.count_nonzero(self.s))

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.s == 0) | (self.s == 1)))

    @classmethod
    def generate(cls, sampler: Sampler, dimension: int, hamming_weight: int | None = None):
        return cls(sampler.binary(dimension, hamming_weight))


@dataclass
class RlweSecretKey:
    """Uniform ring secret; its NTT image is cached for encryption and phase."""

    s: RingElement
    _ntt: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def generate(cls, sampler: Sampler, degree: int, modulus: int):
        return cls(RingElement(sampler.uniform(modulus, (degree,)), modulus))

    @property
    def degree(self) -> int:
        return self.s.degree

    @property
    def modulus(self) -> int:
        return self.s.modulus

    @property
    def ntt(self) -> np.ndarray:
        if self._ntt is None:
            self._ntt = ntt_table(self.degree, self.modulus).forward(self.s.coeffs)
        return self._ntt


def inner_mod(a: np.ndarray, s: np.ndarray, modulus: int) -> np.ndarray:
    """``<a, s> mod modulus`` along the last axis of ``a``."""
    a = np.asarray(a, dtype=U64)
    s = np.asarray(s, dtype=np.int64)
    lead = a.shape[:-1]
    flat = a.reshape(-1, a.shape[-1])
    bound = int(np.abs(s).max()) if s.size else 0
    if bound < (1 << 16) and s.size < (1 << 20):
        out = mm.signed_small_matmul_mod(s[None, :], flat.T, modulus)[0]
    else:
        res = mm.to_residues(s, modulus).astype(object)
        out = (flat.astype(object) @ res) % modulus
        out = np.asarray(out).astype(U64)
    return out.reshape(lead)


# ---------------------------------------------------------------- LWE


@dataclass
class LweSample:
    data: np.ndarray
    modulus: int

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=U64)
        if self.data.ndim != 1:
            raise ValueError("LWE sample is a single row")

    @classmethod
    def from_parts(cls, b: int, a, modulus: int) -> "LweSample":
        data = np.empty(len(a) + 1, dtype=U64)
        data[0] = int(b) % modulus
        data[1:] = mm.to_residues(a, modulus)
        return cls(data, modulus)

    @classmethod
    def trivial(cls, value: int, dimension: int, modulus: int) -> "LweSample":
        data = np.zeros(dimension + 1, dtype=U64)
        data[0] = int(value) % modulus
        return cls(data, modulus)

    @property
    def b(self) -> int:
        return int(self.data[0])

    @property
    def a(self) -> np.ndarray:
        return self.data[1:]

    @property
    def dimension(self) -> int:
        return self.data.shape[0] - 1

    def _check(self, other: "LweSample"):
        if self.modulus != other.modulus:
            raise ModulusMismatch("LWE moduli differ")
        if self.dimension != other.dimension:
            raise DimensionMismatch("LWE dimensions differ")

    def __add__(self, other: "LweSample") -> "LweSample":
        self._check(other)
        return LweSample(mm.add_mod(self.data, other.data, self.modulus), self.modulus)

    def __sub__(self, other: "LweSample") -> "LweSample":
        self._check(other)
        return LweSample(mm.sub_mod(self.data, other.data, self.modulus), self.modulus)

    def __neg__(self) -> "LweSample":
        return LweSample(mm.neg_mod(self.data, self.modulus), self.modulus)

    def scale(self, c: int) -> "LweSample":
        return LweSample(mm.scalar_mul_mod(self.data, c, self.modulus), self.modulus)

    def add_constant(self, c: int) -> "LweSample":
        data = self.data.copy()
        data[0] = (int(data[0]) + int(c)) % self.modulus
        return LweSample(data, self.modulus)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LweSample) and self.modulus == other.modulus
                and np.array_equal(self.data, other.data))


def lwe_encrypt(sk: LweSecretKey, message: int, stddev: float, modulus: int,
                sampler: Sampler) -> LweSample:
    """Encrypt an already scaled message ``message`` in ``[0, modulus)``."""
    return LweSample(lwe_encrypt_many(sk, np.array([message]), stddev, modulus, sampler)[0], modulus)


def lwe_encrypt_many(sk: LweSecretKey, messages: np.ndarray, stddev: float, modulus: int,
                     sampler: Sampler) -> np.ndarray:
    """Rows ``[b, a]`` for a batch of scaled messages (any Python ints)."""
    count = len(messages)
    a = sampler.uniform(modulus, (count, sk.dimension))
    e = sampler.gaussian(stddev, (count,))
    body = mm.add_mod(inner_mod(a, sk.s, modulus), mm.to_residues(e, modulus), modulus)
    body = mm.add_mod(body, mm.to_residues(np.array(list(messages), dtype=object), modulus), modulus)
    out = np.empty((count, sk.dimension + 1), dtype=U64)
    out[:, 0] = body
    out[:, 1:] = a
    return out


def lwe_phase(ct: LweSample, sk: LweSecretKey) -> int:
    if ct.dimension != sk.dimension:
        raise DimensionMismatch(f"ciphertext dimension {ct.dimension} vs key {sk.dimension}")
    return int(lwe_phase_rows(ct.data[None, :], sk, ct.modulus)[0])


def lwe_phase_rows(rows: np.ndarray, sk: LweSecretKey, modulus: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=U64)
    if rows.shape[-1] - 1 != sk.dimension:
        raise DimensionMismatch("ciphertext and key dimensions differ")
    return mm.sub_mod(rows[..., 0], inner_mod(rows[..., 1:], sk.s, modulus), modulus)


def lwe_error(ct: LweSample, sk: LweSecretKey, message: int) -> int:
    return mm.centered_int(lwe_phase(ct, sk) - int(message), ct.modulus)


def round_to_plaintext(phase: int, modulus: int, t: int) -> int:
    """Nearest ``m`` with ``phase ~ m * q / t``, ties rounded up."""
    return ((2 * t * int(phase) + modulus) // (2 * modulus)) % t


def decrypt_rounded(ct: LweSample, sk: LweSecretKey, t: int) -> int:
    return round_to_plaintext(lwe_phase(ct, sk), ct.modulus, t)


# ---------------------------------------------------------------- RLWE


@dataclass
class RlweSample:
    data: np.ndarray
    modulus: int

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=U64)
        if self.data.ndim != 2 or self.data.shape[0] != 2:
            raise ValueError("RLWE sample is a (2, N) array")

    @classmethod
    def from_parts(cls, b: RingElement, a: RingElement) -> "RlweSample":
        if b.modulus != a.modulus or b.degree != a.degree:
            raise ModulusMismatch("body and mask ring parameters differ")
        return cls(np.stack([b.coeffs, a.coeffs]), b.modulus)

    @classmethod
    def trivial(cls, message: RingElement) -> "RlweSample":
        return cls(np.stack([message.coeffs, np.zeros_like(message.coeffs)]), message.modulus)

    @property
    def b(self) -> RingElement:
        return RingElement(self.data[0], self.modulus)

    @property
    def a(self) -> RingElement:
        return RingElement(self.data[1], self.modulus)

    @property
    def degree(self) -> int:
        return self.data.shape[1]

    def _check(self, other: "RlweSample"):
        if self.modulus != other.modulus or self.degree != other.degree:
            raise ModulusMismatch("RLWE parameters differ")

    def __add__(self, other: "RlweSample") -> "RlweSample":
        self._check(other)
        return RlweSample(mm.add_mod(self.data, other.data, self.modulus), self.modulus)

    def __sub__(self, other: "RlweSample") -> "RlweSample":
        self._check(other)
        return RlweSample(mm.sub_mod(self.data, other.data, self.modulus), self.modulus)

    def __neg__(self) -> "RlweSample":
        return RlweSample(mm.neg_mod(self.data, self.modulus), self.modulus)

    def scale(self, c: int) -> "RlweSample":
        return RlweSample(mm.scalar_mul_mod(self.data, c, self.modulus), self.modulus)

    def rotate(self, k: int) -> "RlweSample":
        return RlweSample(negacyclic_shift(self.data, k, self.modulus), self.modulus)

    def multiply(self, p: RingElement) -> "RlweSample":
        table = ntt_table(self.degree, self.modulus)
        return RlweSample(table.multiply(self.data, p.coeffs[None, :]), self.modulus)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RlweSample) and self.modulus == other.modulus
                and np.array_equal(self.data, other.data))


def rlwe_encrypt_many(sk: RlweSecretKey, messages: np.ndarray, stddev: float,
                      sampler: Sampler) -> np.ndarray:
    """RLWE rows for a batch of message polynomials of shape ``(..., N)``."""
    q, n = sk.modulus, sk.degree
    messages = mm.to_residues(messages, q)
    lead = messages.shape[:-1]
    table = ntt_table(n, q)
    a = sampler.uniform(q, lead + (n,))
    e = mm.to_residues(sampler.gaussian(stddev, lead + (n,)), q)
    a_s = table.inverse(mm.mul_mod(table.forward(a), sk.ntt, q))
    out = np.empty(lead + (2, n), dtype=U64)
    out[..., 0, :] = mm.add_mod(mm.add_mod(a_s, e, q), messages, q)
    out[..., 1, :] = a
    return out


def rlwe_encrypt(sk: RlweSecretKey, message: RingElement, stddev: float,
                 sampler: Sampler) -> RlweSample:
    return RlweSample(rlwe_encrypt_many(sk, message.coeffs[None, :], stddev, sampler)[0], sk.modulus)


def rlwe_phase_rows(rows: np.ndarray, sk: RlweSecretKey) -> np.ndarray:
    rows = np.asarray(rows, dtype=U64)
    if rows.shape[-1] != sk.degree:
        raise DimensionMismatch("ring degree differs from key")
    table = ntt_table(sk.degree, sk.modulus)
    a_s = table.inverse(mm.mul_mod(table.forward(rows[..., 1, :]), sk.ntt, sk.modulus))
    return mm.sub_mod(rows[..., 0, :], a_s, sk.modulus)


def rlwe_phase(ct: RlweSample, sk: RlweSecretKey) -> RingElement:
    if ct.modulus != sk.modulus:
        raise ModulusMismatch("ciphertext and key moduli differ")
    return RingElement(rlwe_phase_rows(ct.data, sk), ct.modulus)


def rlwe_error(ct: RlweSample, sk: RlweSecretKey, message: RingElement) -> np.ndarray:
    diff = mm.sub_mod(rlwe_phase(ct, sk).coeffs, message.coeffs, ct.modulus)
    return mm.centered(diff, ct.modulus)


def phase(ct, sk):
    if isinstance(ct, LweSample):
        return lwe_phase(ct, sk)
    return rlwe_phase(ct, sk)


def error(ct, sk, message):
    if isinstance(ct, LweSample):
        return lwe_error(ct, sk, message)
    return rlwe_error(ct, sk, message)


def glwe_linear(ops):
    """Linear combination of samples.

    ``ops`` is a list of ``(coefficient, sample)``.  A coefficient may be an
    integer or (for RLWE samples) a :class:`RingElement`.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("empty combination")
    first = ops[0][1]
    acc = None
    for coeff, ct in ops:
        if type(ct) is not type(first):
            raise ParamMismatch("mixed sample kinds")
        first._check(ct)
        if isinstance(coeff, RingElement):
            if not isinstance(ct, RlweSample):
                raise ParamMismatch("ring coefficients need RLWE samples")
            term = ct.multiply(coeff)
        else:
            term = ct.scale(int(coeff))
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------- RGSW


@dataclass
class RgswSample:
    """RGSW rows in the NTT domain, shape ``(2l, 2, N)``.

    Row ``i < l`` adds ``m * L^i`` to the body, row ``l + i`` adds it to the mask.
    """

    rows_ntt: np.ndarray
    gadget: GadgetParams

    @property
    def degree(self) -> int:
        return self.rows_ntt.shape[-1]

    @property
    def modulus(self) -> int:
        return self.gadget.modulus

    @property
    def rows(self) -> list[RlweSample]:
        table = ntt_table(self.degree, self.modulus)
        coeff = table.inverse(self.rows_ntt)
        return [RlweSample(r, self.modulus) for r in coeff]


def gadget_offsets(message: np.ndarray, g: GadgetParams) -> np.ndarray:
    """``m * G`` for messages of shape ``(..., N)``: result ``(..., 2l, 2, N)``."""
    q, levels = g.modulus, g.levels
    message = mm.to_residues(message, q)
    lead = message.shape[:-1]
    n = message.shape[-1]
    out = np.zeros(lead + (2 * levels, 2, n), dtype=U64)
    for i, p in enumerate(g.powers):
        scaled = mm.scalar_mul_mod(message, p, q)
        out[..., i, 0, :] = scaled
        out[..., levels + i, 1, :] = scaled
    return out


def rgsw_encrypt_many(sk: RlweSecretKey, messages: np.ndarray, g: GadgetParams, stddev: float,
                      sampler: Sampler) -> np.ndarray:
    """NTT-domain RGSW rows for messages of shape ``(..., N)``: ``(..., 2l, 2, N)``."""
    if g.modulus != sk.modulus:
        raise GadgetMismatch("gadget modulus differs from key modulus")
    messages = np.asarray(messages)
    lead = messages.shape[:-1]
    zeros = np.zeros(lead + (2 * g.levels, sk.degree), dtype=U64)
    rows = rlwe_encrypt_many(sk, zeros, stddev, sampler)
    rows = mm.add_mod(rows, gadget_offsets(messages, g), g.modulus)
    return ntt_table(sk.degree, sk.modulus).forward(rows)


def rgsw_encrypt(sk: RlweSecretKey, message: RingElement, g: GadgetParams, stddev: float,
                 sampler: Sampler) -> RgswSample:
    return RgswSample(rgsw_encrypt_many(sk, message.coeffs[None, :], g, stddev, sampler)[0], g)


def external_product_rows(rows_ntt: np.ndarray, d: np.ndarray, g: GadgetParams) -> np.ndarray:
    """External product of NTT-domain RGSW rows with RLWE arrays ``(..., 2, N)``."""
    q, levels = g.modulus, g.levels
    n = d.shape[-1]
    table = ntt_table(n, q)
    digits = decompose_array(d, g)                   # (l, ..., 2, N)
    digits = np.moveaxis(digits, 0, -2)              # (..., 2, l, N)
    digits = digits.reshape(d.shape[:-2] + (2 * levels, n))
    dn = table.forward(digits)
    if table.compiled:
        lead = dn.shape[:-2]
        acc = _kernels.mac_rows(dn.reshape((-1,) + dn.shape[-2:]), rows_ntt, U64(q))
        acc = acc.reshape(lead + acc.shape[-2:])
    else:
        prod = mm.mul_mod(dn[..., :, None, :], rows_ntt, q)   # (..., 2l, 2, N)
        acc = mm.sum_mod(prod, axis=-3, modulus=q)
    return table.inverse(acc)


def external_product(c: RgswSample, d: RlweSample) -> RlweSample:
    if c.modulus != d.modulus or c.degree != d.degree:
        raise GadgetMismatch("RGSW and RLWE parameters differ")
    return RlweSample(external_product_rows(c.rows_ntt, d.data, c.gadget), d.modulus)


def cmux(c: RgswSample, g: RlweSample, h: RlweSample) -> RlweSample:
    """``h`` when ``c`` encrypts 0, ``g`` when it encrypts 1."""
    if g.modulus != h.modulus or g.degree != h.degree:
        raise ParamMismatch("branches have different parameters")
    return external_product(c, g - h) + h
