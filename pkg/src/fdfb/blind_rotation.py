"""Blind rotation keys and the CMux-driven accumulator rotation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import modmath as mm
from .errors import ModulusNot2N, UnrepresentableKeyCoefficient
from .gadget import GadgetParams
from .ring import negacyclic_shift
from .samples import (LweSample, LweSecretKey, RlweSample, RlweSecretKey,
                      external_product_rows, rgsw_encrypt_many)
from .sampling import Sampler

U64 = np.uint64


@dataclass
class BlindRotateKey:
    """RGSW encryptions of the bits ``Y[i, j]`` with ``s[i] = sum_j Y[i, j] * u[j]``.

    ``rows_ntt`` has shape ``(n, u, 2l, 2, N)``.
    """

    rows_ntt: np.ndarray
    u_vec: tuple[int, ...]
    gadget: GadgetParams
    stddev: float

    @property
    def dimension(self) -> int:
        return self.rows_ntt.shape[0]

    @property
    def degree(self) -> int:
        return self.rows_ntt.shape[-1]

    @property
    def modulus(self) -> int:
        return self.gadget.modulus


def key_bits(s: np.ndarray, u_vec) -> np.ndarray:
    """Bit matrix ``Y`` (n x u) with ``Y @ u == s``, preferring the sparsest choice."""
    u_vec = tuple(int(v) for v in u_vec)
    options: dict[int, tuple[int, ...]] = {}
    for bits in sorted(itertools.product((0, 1), repeat=len(u_vec)), key=sum):
        value = sum(b * v for b, v in zip(bits, u_vec))
        options.setdefault(value, bits)
    out = np.zeros((len(s), len(u_vec)), dtype=np.int64)
    for i, coeff in enumerate(np.asarray(s, dtype=np.int64)):
        if int(coeff) not in options:
            raise UnrepresentableKeyCoefficient(f"key coefficient {int(coeff)} not a 0/1 combination of {u_vec}")
        out[i] = options[int(coeff)]
    return out


def br_keygen(s: LweSecretKey, u_vec, stddev: float, s_ring: RlweSecretKey, base: int,
              sampler: Sampler) -> BlindRotateKey:
    y = key_bits(s.s, u_vec)
    g = GadgetParams(base, s_ring.modulus)
    msgs = np.zeros(y.shape + (s_ring.degree,), dtype=U64)
    msgs[..., 0] = y.astype(U64)
    rows = rgsw_encrypt_many(s_ring, msgs, g, stddev, sampler)
    return BlindRotateKey(rows, tuple(int(v) for v in u_vec), g, float(stddev))


def blind_rotate_rows(brk: BlindRotateKey, acc: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Rotate accumulators ``(..., 2, N)`` by ``X^{-<mask, s>}`` (mask residues mod 2N)."""
    two_n = 2 * brk.degree
    q = brk.modulus
    acc = np.array(acc, dtype=U64, copy=True)
    for i, a_i in enumerate(np.asarray(mask, dtype=np.int64)):
        for j, u_j in enumerate(brk.u_vec):
            k = (-int(a_i) * u_j) % two_n
            if k == 0:
                continue
            diff = mm.sub_mod(negacyclic_shift(acc, k, q), acc, q)
            acc = mm.add_mod(external_product_rows(brk.rows_ntt[i, j], diff, brk.gadget), acc, q)
    return acc


def blind_rotate(brk: BlindRotateKey, acc: RlweSample, ct: LweSample) -> RlweSample:
    """Multiply the accumulator message by ``X^{-<a, s>}``; the body of ``ct`` is not used."""
    if ct.modulus != 2 * brk.degree:
        raise ModulusNot2N(f"rotation input must live mod {2 * brk.degree}, got {ct.modulus}")
    if ct.dimension != brk.dimension:
        raise ValueError("ciphertext dimension differs from key dimension")
    return RlweSample(blind_rotate_rows(brk, acc.data, ct.a), acc.modulus)
