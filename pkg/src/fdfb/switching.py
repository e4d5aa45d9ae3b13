"""Modulus switching, sample/key extraction and gadget key switching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import modmath as mm
from .errors import DimensionMismatch, IndexOutOfRange
from .gadget import GadgetParams, decompose_array
from .samples import (LweSample, LweSecretKey, RlweSample, RlweSecretKey, lwe_encrypt_many,
                      rlwe_encrypt_many)
from .sampling import Sampler

U64 = np.uint64


def mod_switch_rows(rows: np.ndarray, source: int, target: int) -> np.ndarray:
    """Entrywise ``round(target * x / source)`` with ties rounded up, then mod ``target``."""
    rows = np.asarray(rows, dtype=U64)
    if source == target:
        return rows.copy()
    if 2 * target * source + source < (1 << 64):
        num = rows * U64(2 * target) + U64(source)
        return (num // U64(2 * source)) % U64(target)
    obj = rows.astype(object)
    out = (obj * (2 * target) + source) // (2 * source) % target
    return np.asarray(out).astype(U64)


def mod_switch(ct: LweSample, source: int, target: int) -> LweSample:
    if ct.modulus != source:
        raise ValueError(f"ciphertext modulus {ct.modulus} differs from source {source}")
    return LweSample(mod_switch_rows(ct.data, source, target), target)


def key_extract(sk: RlweSecretKey) -> LweSecretKey:
    return LweSecretKey(sk.s.coeffs.astype(np.int64))


def sample_extract_rows(rows: np.ndarray, index: int, modulus: int) -> np.ndarray:
    """LWE rows holding coefficient ``index`` (0-based) of RLWE rows ``(..., 2, N)``."""
    n = rows.shape[-1]
    b = rows[..., 0, :]
    a = rows[..., 1, :]
    out = np.empty(rows.shape[:-2] + (n + 1,), dtype=U64)
    out[..., 0] = b[..., index]
    out[..., 1:index + 2] = a[..., index::-1]
    out[..., index + 2:] = mm.neg_mod(a[..., :index:-1], modulus)
    return out


def sample_extract(ct: RlweSample, k: int = 1) -> LweSample:
    """LWE encryption of coefficient ``k`` (1-based) under the extracted key."""
    if not 1 <= k <= ct.degree:
        raise IndexOutOfRange(f"coefficient index {k} outside [1, {ct.degree}]")
    return LweSample(sample_extract_rows(ct.data, k - 1, ct.modulus), ct.modulus)


@dataclass
class KeySwitchKey:
    """Gadget encryptions of ``s_src[i] * L^j`` under the target key.

    ``matrix`` has one row per ``(i, j)`` pair in row-major order.  A row is
    ``[b, a_0..a_{n'-1}]`` for an LWE target (``degree == 1``) or the
    flattened ``[b(X), a(X)]`` for an RLWE target.
    """

    matrix: np.ndarray
    source_dim: int
    target_dim: int
    degree: int
    gadget: GadgetParams
    stddev: float
    _limbs: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def modulus(self) -> int:
        return self.gadget.modulus

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.source_dim, self.gadget.levels

    @property
    def to_ring(self) -> bool:
        return self.degree > 1

    def limbs(self):
        if self._limbs is None:
            rows = self.matrix.shape[0]
            bits = mm.limb_width(self.gadget.base - 1, rows)
            self._limbs = (bits, mm.split_limbs(self.matrix, bits))
        return self._limbs


def key_switch_setup(stddev: float, source_dim: int, target_dim: int, degree: int, modulus: int,
                     s_src: LweSecretKey, s_dst, base: int, sampler: Sampler) -> KeySwitchKey:
    """Key from ``s_src`` (LWE, dimension ``source_dim``) to ``s_dst``.

    ``s_dst`` is an :class:`LweSecretKey` of dimension ``target_dim`` when
    ``degree == 1`` and an :class:`RlweSecretKey` of degree ``degree`` when
    ``target_dim == 1``.
    """
    if s_src.dimension != source_dim:
        raise DimensionMismatch("source key length differs from source_dim")
    g = GadgetParams(base, modulus)
    src = mm.to_residues(s_src.s, modulus)
    msgs = [(int(src[i]) * p) % modulus for i in range(source_dim) for p in g.powers]
    if degree == 1:
        if not isinstance(s_dst, LweSecretKey) or s_dst.dimension != target_dim:
            raise DimensionMismatch("LWE target key has the wrong dimension")
        matrix = lwe_encrypt_many(s_dst, np.array(msgs, dtype=object), stddev, modulus, sampler)
    else:
        if target_dim != 1 or not isinstance(s_dst, RlweSecretKey) or s_dst.degree != degree:
            raise DimensionMismatch("ring target needs an RLWE key of the stated degree")
        poly = np.zeros((len(msgs), degree), dtype=U64)
        poly[:, 0] = np.array(msgs, dtype=object).astype(U64)
        rows = rlwe_encrypt_many(s_dst, poly, stddev, sampler)
        matrix = rows.reshape(len(msgs), 2 * degree)
    return KeySwitchKey(matrix, source_dim, target_dim, degree, g, float(stddev))


def key_switch_rows(rows: np.ndarray, ksk: KeySwitchKey) -> np.ndarray:
    """Key-switch a batch of LWE rows ``(..., n_src + 1)``."""
    rows = np.asarray(rows, dtype=U64)
    if rows.shape[-1] - 1 != ksk.source_dim:
        raise DimensionMismatch(f"ciphertext dimension {rows.shape[-1] - 1} vs key {ksk.source_dim}")
    q = ksk.modulus
    lead = rows.shape[:-1]
    flat = rows.reshape(-1, rows.shape[-1])
    digits = decompose_array(flat[:, 1:], ksk.gadget)          # (l, batch, n_src)
    digits = np.moveaxis(digits, 0, -1).reshape(flat.shape[0], -1)
    bits, limbs = ksk.limbs()
    acc = mm.small_matmul_mod(digits, ksk.matrix, q, small_bound=ksk.gadget.base - 1,
                              limbs=limbs, limb_bits=bits)
    out = mm.neg_mod(acc, q)
    out[:, 0] = mm.add_mod(out[:, 0], flat[:, 0], q)
    if ksk.to_ring:
        return out.reshape(lead + (2, ksk.degree))
    return out.reshape(lead + (ksk.target_dim + 1,))


def key_switch(ct: LweSample, ksk: KeySwitchKey):
    if ct.modulus != ksk.modulus:
        raise DimensionMismatch("ciphertext modulus differs from key modulus")
    out = key_switch_rows(ct.data, ksk)
    if ksk.to_ring:
        return RlweSample(out, ct.modulus)
    return LweSample(out, ct.modulus)

