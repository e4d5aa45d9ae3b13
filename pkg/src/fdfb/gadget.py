"""Powers-of-L gadget vectors and unsigned base-L digit decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modmath as mm
from .errors import DomainMismatch, GadgetMismatch
from .ring import Domain, RingElement

U64 = np.uint64


def levels_for(base: int, modulus: int) -> int:
    """Smallest l with base**l >= modulus."""
    levels, power = 0, 1
    while power < modulus:
        power *= base
        levels += 1
    return max(1, levels)


@dataclass(frozen=True)
class GadgetParams:
    base: int
    modulus: int
    levels: int = 0

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("gadget base must be at least 2")
        if self.levels == 0:
            object.__setattr__(self, "levels", levels_for(self.base, self.modulus))
        if self.base ** self.levels < self.modulus:
            raise ValueError("base**levels must cover the modulus")

    @property
    def powers(self) -> list[int]:
        return [pow(self.base, i, self.modulus) for i in range(self.levels)]

    @property
    def is_power_of_two(self) -> bool:
        return self.base & (self.base - 1) == 0


def decompose_array(values: np.ndarray, g: GadgetParams) -> np.ndarray:
    """Digits of every entry, stacked on a new leading axis of length l."""
    v = np.asarray(values, dtype=U64)
    out = np.empty((g.levels,) + v.shape, dtype=U64)
    if g.is_power_of_two:
        bits = g.base.bit_length() - 1
        mask = U64(g.base - 1)
        for i in range(g.levels):
            out[i] = (v >> U64(bits * i)) & mask
        return out
    base = U64(g.base)
    rest = v.copy()
    for i in range(g.levels):
        out[i] = rest % base
        rest //= base
    return out


def decompose_scalar(a: int, g: GadgetParams) -> list[int]:
    a = int(a)
    if not 0 <= a < g.modulus:
        raise ValueError("scalar not reduced")
    digits = []
    for _ in range(g.levels):
        digits.append(a % g.base)
        a //= g.base
    return digits


def decompose_ring(a: RingElement, g: GadgetParams) -> list[RingElement]:
    if a.domain is not Domain.COEFFICIENT:
        raise DomainMismatch("decomposition needs coefficient domain")
    if a.modulus != g.modulus:
        raise GadgetMismatch("gadget modulus differs from ring modulus")
    return [RingElement(d, a.modulus) for d in decompose_array(a.coeffs, g)]


def recompose(digits, g: GadgetParams):
    """Inverse of decomposition for scalars or ring elements."""
    digits = list(digits)
    if len(digits) != g.levels:
        raise GadgetMismatch(f"expected {g.levels} digits, got {len(digits)}")
    if digits and isinstance(digits[0], RingElement):
        acc = np.zeros(digits[0].degree, dtype=U64)
        for d, p in zip(digits, g.powers):
            acc = mm.add_mod(acc, mm.scalar_mul_mod(d.coeffs, p, g.modulus), g.modulus)
        return RingElement(acc, g.modulus)
    return sum(int(d) * g.base ** i for i, d in enumerate(digits)) % g.modulus
