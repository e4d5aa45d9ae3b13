"""Full-domain functional bootstrapping and the half-domain baseline.

The full-domain bootstrap runs in two rounds of blind rotation:

1. A sign ladder: ``l_boot`` accumulators holding ``L^i * sgnP / 2`` are
   rotated by the input.  After extraction and adding ``L^i / 2`` each one
   encrypts ``L^i`` when the rotated phase is in ``[0, N)`` and ``0`` otherwise.
2. The ladder drives a public multiplexer that picks one of two rotation
   polynomials, and that accumulator is rotated by the same input again.

Halving is done with the inverse of 2 mod Q, so the ladder entries carry
the bit at unit scale and the selected polynomial comes out unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import modmath as mm
from .blind_rotation import BlindRotateKey, blind_rotate_rows, br_keygen
from .errors import InvalidLadderBase, LadderLengthMismatch, ParamMismatch, TableTooLarge
from .gadget import GadgetParams, decompose_array
from .params import ParameterSet
from .ring import RingElement, negacyclic_shift, ntt_table
from .samples import LweSample, LweSecretKey, RlweSample, RlweSecretKey
from .sampling import Sampler
from .switching import (KeySwitchKey, key_extract, key_switch_rows, key_switch_setup,
                        mod_switch_rows, sample_extract_rows)

U64 = np.uint64


# ---------------------------------------------------------------- tables


@dataclass(frozen=True)
class LookupTable:
    """``entries[m]`` is the value (already scaled into Z_Q) the bootstrap outputs for ``m``."""

    entries: tuple[int, ...]
    t: int
    modulus: int

    def __post_init__(self):
        if len(self.entries) != self.t:
            raise ValueError(f"table has {len(self.entries)} entries, expected {self.t}")

    @classmethod
    def from_function(cls, f, t: int, t_out: int, modulus: int) -> "LookupTable":
        """Table for ``f: Z_t -> Z_t_out`` scaled by ``round(Q / t_out)``."""
        delta = (2 * modulus + t_out) // (2 * t_out)
        return cls(tuple((delta * (int(f(m)) % t_out)) % modulus for m in range(t)), t, modulus)

    @classmethod
    def from_values(cls, values, t_out: int, modulus: int) -> "LookupTable":
        values = list(values)
        return cls.from_function(lambda m: values[m], len(values), t_out, modulus)


@dataclass
class RotationPolynomialPair:
    rotP_0: RingElement
    rotP_1: RingElement


def nearest_message(y: int, N: int, t: int) -> int:
    """Message whose encoding in Z_2N is closest to phase ``y`` (ties round up)."""
    return ((t * y + N) // (2 * N)) % t


def setup_polynomial(table: LookupTable, N: int) -> RotationPolynomialPair:
    """Two test polynomials covering the phase halves ``[0, N)`` and ``[N, 2N)``.

    Phase ``y`` is mapped to ``nearest_message(y)``, so every phase decodes
    to the message it rounds to.
    """
    t, q = table.t, table.modulus
    if t > 2 * N:
        raise TableTooLarge(f"t={t} exceeds 2N={2 * N}")
    p0 = [0] * N
    p1 = [0] * N
    for y in range(2 * N):
        val = table.entries[nearest_message(y, N, t)] % q
        if y == 0:
            p0[0] = val
        elif y < N:
            p0[N - y] = (-val) % q
        elif y == N:
            p1[0] = (-val) % q
        else:
            p1[2 * N - y] = val
    return RotationPolynomialPair(RingElement(p0, q), RingElement(p1, q))


def tfhe_rotation_polynomial(table: LookupTable, N: int) -> RingElement:
    """Single test polynomial for the lower half ``m < t/2``; the upper half comes out negated.

    Phases just below N round to ``t/2`` and get ``-f(0)``, matching the
    negated image of ``f(0)`` just below 2N.
    """
    t, q = table.t, table.modulus
    if t > 2 * N:
        raise TableTooLarge(f"t={t} exceeds 2N={2 * N}")
    lower = (t + 1) // 2
    p = [0] * N
    for y in range(N):
        m = nearest_message(y, N, t)
        val = table.entries[m] if m < lower else -table.entries[m - t // 2]
        if y == 0:
            p[0] = val % q
        else:
            p[N - y] = (-val) % q
    return RingElement(p, q)


def rotate_by_phase(poly: RingElement, y: int) -> int:
    """Constant coefficient of ``poly * X^y`` (plaintext reference)."""
    return int(negacyclic_shift(poly.coeffs, y, poly.modulus)[0])


# ---------------------------------------------------------------- keys


@dataclass
class SecretKeys:
    lwe: LweSecretKey
    ring: RlweSecretKey

    @property
    def extracted(self) -> LweSecretKey:
        return key_extract(self.ring)


@dataclass
class BootstrapKeySet:
    brk: BlindRotateKey
    ksk: KeySwitchKey
    params: ParameterSet
    pk: KeySwitchKey | None = None
    boot_gadget: GadgetParams | None = None
    u_vec: tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.boot_gadget is not None:
            g = self.boot_gadget
            if g.modulus != self.brk.modulus or g.base ** g.levels < self.brk.modulus:
                raise InvalidLadderBase("sign-ladder base does not cover Q")

    @property
    def N(self) -> int:
        return self.brk.degree

    @property
    def Q(self) -> int:
        return self.brk.modulus


def generate_secret_keys(params: ParameterSet, sampler: Sampler) -> SecretKeys:
    lwe = LweSecretKey.generate(sampler.fork("lwe-key"), params.n, params.hamming_weight)
    ring = RlweSecretKey.generate(sampler.fork("ring-key"), params.N, params.Q)
    return SecretKeys(lwe, ring)


def generate_bootstrap_keys(params: ParameterSet, secrets: SecretKeys, sampler: Sampler) -> BootstrapKeySet:
    params.validate()
    brk = br_keygen(secrets.lwe, params.u_vec, params.sigma_ring, secrets.ring, params.L_RGSW,
                    sampler.fork("brk"))
    extracted = secrets.extracted
    ksk = key_switch_setup(params.sigma_ksK, params.N, params.n, 1, params.Q, extracted,
                           secrets.lwe, params.L_ksK, sampler.fork("ksk"))
    pk = None
    boot = None
    if params.fdfb:
        pk = key_switch_setup(params.sigma_ring, params.N, 1, params.N, params.Q, extracted,
                              secrets.ring, params.L_pK, sampler.fork("pk"))
        boot = GadgetParams(params.L_boot, params.Q)
    return BootstrapKeySet(brk, ksk, params, pk, boot, params.u_vec)


# ---------------------------------------------------------------- building blocks


def _poly_mac(digits: np.ndarray, rows: np.ndarray, modulus: int) -> np.ndarray:
    """``sum_k digits[k] * rows[k]`` for polynomials ``digits (K, N)`` and RLWE rows ``(K, 2, N)``."""
    n = digits.shape[-1]
    table = ntt_table(n, modulus)
    dn = table.forward(digits)
    rn = table.forward(rows)
    if table.compiled:
        acc = _kernels.mac_rows(dn[None], rn, U64(modulus))[0]
    else:
        acc = mm.sum_mod(mm.mul_mod(dn[:, None, :], rn, modulus), axis=0, modulus=modulus)
    return table.inverse(acc)


def pub_mux(ladder, p0, p1, base: int, delta: int = 1):
    """Encryption of ``delta * p_m`` from a ladder encrypting ``m * delta * L^i``.

    ``ladder`` holds RLWE samples (``p0``, ``p1`` ring elements) or LWE
    samples (``p0``, ``p1`` integers).
    """
    ladder = list(ladder)
    if not ladder:
        raise LadderLengthMismatch("empty ladder")
    q = ladder[0].modulus
    g = GadgetParams(base, q)
    if len(ladder) != g.levels:
        raise LadderLengthMismatch(f"ladder has {len(ladder)} samples, base {base} needs {g.levels}")
    if isinstance(ladder[0], RlweSample):
        diff = mm.sub_mod(p1.coeffs, p0.coeffs, q)
        digits = decompose_array(diff, g)
        rows = np.stack([c.data for c in ladder])
        out = _poly_mac(digits, rows, q)
        out[0] = mm.add_mod(out[0], mm.scalar_mul_mod(p0.coeffs, delta, q), q)
        return RlweSample(out, q)
    digits = [int(d) for d in decompose_array(np.array([(int(p1) - int(p0)) % q], dtype=U64), g)[:, 0]]
    rows = np.stack([c.data for c in ladder]).astype(object)
    acc = (np.array(digits, dtype=object) @ rows) % q
    acc[0] = (acc[0] + delta * int(p0)) % q
    return LweSample(np.asarray(acc).astype(U64), q)


def build_acc(ladder, p0: RingElement, p1: RingElement, pk: KeySwitchKey, base: int) -> RlweSample:
    """Pack each ladder LWE sample into RLWE, then select ``p0`` or ``p1``."""
    rows = np.stack([c.data for c in ladder])
    packed = key_switch_rows(rows, pk)
    return pub_mux([RlweSample(r, pk.modulus) for r in packed], p0, p1, base)


def sign_polynomial(N: int, modulus: int) -> np.ndarray:
    """``1 - X - X^2 - ... - X^{N-1}``."""
    p = np.full(N, modulus - 1, dtype=U64)
    p[0] = 1
    return p


def sign_ladder(keys: BootstrapKeySet, ct_2n: LweSample) -> list[LweSample]:
    """Ladder samples encrypting ``L^i`` when the phase of ``ct_2n`` lies in ``[0, N)``, else 0."""
    N, Q = keys.N, keys.Q
    g = keys.boot_gadget
    half = pow(2, -1, Q)
    sgn = negacyclic_shift(sign_polynomial(N, Q), ct_2n.b, Q)
    acc = np.zeros((g.levels, 2, N), dtype=U64)
    for i, p in enumerate(g.powers):
        acc[i, 0] = mm.scalar_mul_mod(sgn, p * half, Q)
    acc = blind_rotate_rows(keys.brk, acc, ct_2n.a)
    rows = sample_extract_rows(acc, 0, Q)
    for i, p in enumerate(g.powers):
        rows[i, 0] = (int(rows[i, 0]) + p * half) % Q
    return [LweSample(r, Q) for r in rows]


def to_rotation_modulus(ct: LweSample, N: int) -> LweSample:
    if ct.modulus == 2 * N:
        return ct
    return LweSample(mod_switch_rows(ct.data, ct.modulus, 2 * N), 2 * N)


def _finish(keys: BootstrapKeySet, acc: np.ndarray, final_mod_switch: bool) -> LweSample:
    extracted = sample_extract_rows(acc, 0, keys.Q)
    switched = key_switch_rows(extracted, keys.ksk)
    if final_mod_switch and keys.params.q != keys.Q:
        return LweSample(mod_switch_rows(switched, keys.Q, keys.params.q), keys.params.q)
    return LweSample(switched, keys.Q)


@dataclass
class BootstrapResult:
    output: LweSample
    ladder: list[LweSample] = field(default_factory=list)
    rotation_input: LweSample | None = None


def fdfb_bootstrap_full(keys: BootstrapKeySet, ct: LweSample, pair: RotationPolynomialPair,
                        final_mod_switch: bool = True, ladder=None) -> BootstrapResult:
    """Full-domain bootstrap returning the sign ladder for reuse with further tables.

    Pass ``ladder`` (and the same ``ct``) to skip the first round.
    """
    if keys.pk is None or keys.boot_gadget is None:
        raise ParamMismatch("full-domain bootstrapping needs a packing key and ladder base")
    N, Q = keys.N, keys.Q
    if pair.rotP_0.modulus != Q or pair.rotP_0.degree != N:
        raise ParamMismatch("rotation polynomials do not match the key ring")
    ct_2n = to_rotation_modulus(ct, N)
    if ladder is None:
        ladder = sign_ladder(keys, ct_2n)
    b = ct_2n.b
    r0 = RingElement(negacyclic_shift(pair.rotP_0.coeffs, b, Q), Q)
    r1 = RingElement(negacyclic_shift(pair.rotP_1.coeffs, b, Q), Q)
    # Ladder bit 1 means the phase sits in [0, N), which is rotP_0's half.
    acc = build_acc(ladder, r1, r0, keys.pk, keys.boot_gadget.base)
    acc = blind_rotate_rows(keys.brk, acc.data, ct_2n.a)
    return BootstrapResult(_finish(keys, acc, final_mod_switch), ladder, ct_2n)


def fdfb_bootstrap(keys: BootstrapKeySet, ct: LweSample, pair: RotationPolynomialPair,
                   final_mod_switch: bool = True) -> LweSample:
    return fdfb_bootstrap_full(keys, ct, pair, final_mod_switch).output


def tfhe_bootstrap(brk: BlindRotateKey, u_vec, ct: LweSample, rotP: RingElement, ksk: KeySwitchKey,
                   q_out: int | None = None) -> LweSample:
    """Half-domain bootstrap: correct for phases in ``[0, N)``, negated image above."""
    if tuple(u_vec) != brk.u_vec:
        raise ParamMismatch("u_vec differs from the one the rotation key was built with")
    N, Q = brk.degree, brk.modulus
    ct_2n = to_rotation_modulus(ct, N)
    acc = np.zeros((2, N), dtype=U64)
    acc[0] = negacyclic_shift(rotP.coeffs, ct_2n.b, Q)
    acc = blind_rotate_rows(brk, acc, ct_2n.a)
    switched = key_switch_rows(sample_extract_rows(acc, 0, Q), ksk)
    if q_out is not None and q_out != Q:
        return LweSample(mod_switch_rows(switched, Q, q_out), q_out)
    return LweSample(switched, Q)


def delta(modulus: int, t: int) -> int:
    """``round(modulus / t)``."""
    return (2 * modulus + t) // (2 * t)

