"""Arithmetic in Z_Q[X]/(X^N + 1) with a negacyclic NTT."""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import modmath as mm
from .errors import DomainMismatch, ModulusMismatch, NonNttModulus, OutOfRangeExponent

U64 = np.uint64


class Domain(enum.Enum):
    COEFFICIENT = "coefficient"
    EVALUATION = "evaluation"


class Direction(enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True)
class Modulus:
    value: int
    degree: int = 1

    def __post_init__(self):
        if not 2 <= self.value < mm.MAX_MODULUS:
            raise ValueError(f"modulus {self.value} outside [2, 2^63)")

    @property
    def is_ntt_prime(self) -> bool:
        return self.value % (2 * self.degree) == 1 and mm.is_prime(self.value)


def _bit_reverse(k: int, bits: int) -> int:
    return int(format(k, f"0{bits}b")[::-1], 2) if bits else 0


class NttTable:
    """Bit-reversed twiddles for the negacyclic transform of one (N, Q) pair."""

    def __init__(self, degree: int, modulus: int):
        if degree < 1 or degree & (degree - 1):
            raise ValueError("degree must be a power of two")
        if not Modulus(modulus, degree).is_ntt_prime:
            raise NonNttModulus(f"{modulus} is not a prime congruent to 1 mod {2 * degree}")
        self.degree = degree
        self.modulus = modulus
        bits = degree.bit_length() - 1
        psi = mm.primitive_root_of_unity(2 * degree, modulus)
        psi_inv = pow(psi, -1, modulus)
        order = [_bit_reverse(k, bits) for k in range(degree)]
        self.root_powers = np.array([pow(psi, e, modulus) for e in order], dtype=U64)
        self.inverse_root_powers = np.array([pow(psi_inv, e, modulus) for e in order], dtype=U64)
        self._root_scaled = self.root_powers.astype(np.float64) / modulus
        self._inv_scaled = self.inverse_root_powers.astype(np.float64) / modulus
        self.n_inv = pow(degree, -1, modulus)
        self.compiled = modulus < mm.FAST_LIMIT

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Transform the last axis; accepts any batch shape."""
        a = np.array(x, dtype=U64, copy=True, order="C")
        lead = a.shape[:-1]
        if self.compiled:
            _kernels.ntt_forward(a.reshape(-1, self.degree), self.root_powers,
                                 self._root_scaled, U64(self.modulus))
            return a
        n, q = self.degree, self.modulus
        m, t = 1, n
        while m < n:
            t //= 2
            a = a.reshape(lead + (m, 2, t))
            w = self.root_powers[m:2 * m, None]
            ws = self._root_scaled[m:2 * m, None]
            u = a[..., 0, :]
            v = mm.mul_mod_shoup(a[..., 1, :], w, ws, q)
            top = mm.add_mod(u, v, q)
            a[..., 1, :] = mm.sub_mod(u, v, q)
            a[..., 0, :] = top
            m *= 2
        return a.reshape(lead + (n,))

    def inverse(self, x: np.ndarray) -> np.ndarray:
        a = np.array(x, dtype=U64, copy=True, order="C")
        lead = a.shape[:-1]
        if self.compiled:
            _kernels.ntt_inverse(a.reshape(-1, self.degree), self.inverse_root_powers,
                                 self._inv_scaled, U64(self.modulus), U64(self.n_inv),
                                 self.n_inv / self.modulus)
            return a
        n, q = self.degree, self.modulus
        m, t = n, 1
        while m > 1:
            h = m // 2
            a = a.reshape(lead + (h, 2, t))
            w = self.inverse_root_powers[h:2 * h, None]
            ws = self._inv_scaled[h:2 * h, None]
            u = a[..., 0, :]
            v = a[..., 1, :]
            top = mm.add_mod(u, v, q)
            a[..., 1, :] = mm.mul_mod_shoup(mm.sub_mod(u, v, q), w, ws, q)
            a[..., 0, :] = top
            t *= 2
            m = h
        a = a.reshape(lead + (n,))
        return mm.scalar_mul_mod(a, self.n_inv, q)

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Negacyclic product of coefficient arrays (broadcast over batch axes)."""
        return self.inverse(mm.mul_mod(self.forward(x), self.forward(y), self.modulus))


@functools.lru_cache(maxsize=32)
def ntt_table(degree: int, modulus: int) -> NttTable:
    return NttTable(degree, modulus)


def negacyclic_shift(x: np.ndarray, k: int, modulus: int) -> np.ndarray:
    """Multiply coefficient arrays (last axis) by X^k, any integer k."""
    n = x.shape[-1]
    k %= 2 * n
    negate = k >= n
    k %= n
    out = np.roll(x, k, axis=-1)
    if k:
        out[..., :k] = mm.neg_mod(out[..., :k], modulus)
    if negate:
        out = mm.neg_mod(out, modulus)
    return out


def schoolbook_multiply(x, y, modulus: int) -> list[int]:
    """O(N^2) negacyclic product on Python integers; the reference for the NTT path."""
    x = [int(v) for v in x]
    y = [int(v) for v in y]
    n = len(x)
    out = [0] * n
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            k = i + j
            if k < n:
                out[k] += xi * yj
            else:
                out[k - n] -= xi * yj
    return [v % modulus for v in out]


class RingElement:
    """Polynomial of degree < N with residues mod Q, tagged with its domain."""

    __slots__ = ("coeffs", "modulus", "domain")

    def __init__(self, coeffs, modulus: int, domain: Domain = Domain.COEFFICIENT):
        arr = np.asarray(coeffs, dtype=U64)
        if arr.ndim != 1:
            raise ValueError("ring element needs a 1-d coefficient vector")
        n = arr.shape[0]
        if n < 1 or n & (n - 1):
            raise ValueError("degree must be a power of two")
        if arr.size and int(arr.max()) >= modulus:
            raise ValueError("coefficient not reduced")
        self.coeffs = arr
        self.modulus = int(modulus)
        self.domain = domain

    @classmethod
    def from_ints(cls, values, modulus: int) -> "RingElement":
        return cls(mm.to_residues(values, modulus), modulus)

    @classmethod
    def zero(cls, degree: int, modulus: int) -> "RingElement":
        return cls(np.zeros(degree, dtype=U64), modulus)

    @classmethod
    def constant(cls, value: int, degree: int, modulus: int) -> "RingElement":
        c = np.zeros(degree, dtype=U64)
        c[0] = value % modulus
        return cls(c, modulus)

    @classmethod
    def monomial(cls, exponent: int, degree: int, modulus: int, scale: int = 1) -> "RingElement":
        base = cls.constant(scale, degree, modulus)
        return monomial_mul(base, exponent % (2 * degree))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree_log(self) -> int:
        return self.degree.bit_length() - 1

    def _check(self, other: "RingElement"):
        if self.modulus != other.modulus or self.degree != other.degree:
            raise ModulusMismatch("ring parameters differ")
        if self.domain is not other.domain:
            raise DomainMismatch("operands live in different domains")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(mm.add_mod(self.coeffs, other.coeffs, self.modulus), self.modulus, self.domain)

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        return RingElement(mm.sub_mod(self.coeffs, other.coeffs, self.modulus), self.modulus, self.domain)

    def __neg__(self) -> "RingElement":
        return RingElement(mm.neg_mod(self.coeffs, self.modulus), self.modulus, self.domain)

    def scale(self, c: int) -> "RingElement":
        return RingElement(mm.scalar_mul_mod(self.coeffs, c, self.modulus), self.modulus, self.domain)

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return ring_mul(self, other)
        return self.scale(int(other))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, RingElement) and self.modulus == other.modulus
                and self.domain is other.domain and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.modulus, self.domain, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        head = ", ".join(str(int(c)) for c in self.coeffs[:4])
        return f"RingElement(N={self.degree}, Q={self.modulus}, {self.domain.value}, [{head}, ...])"

    def to_list(self) -> list[int]:
        return [int(c) for c in self.coeffs]

    def centered(self) -> np.ndarray:
        return mm.centered(self.coeffs, self.modulus)


def ntt_transform(x: RingElement, direction: Direction) -> RingElement:
    table = ntt_table(x.degree, x.modulus)
    if direction is Direction.FORWARD:
        if x.domain is not Domain.COEFFICIENT:
            raise DomainMismatch("forward transform expects coefficient domain")
        return RingElement(table.forward(x.coeffs), x.modulus, Domain.EVALUATION)
    if x.domain is not Domain.EVALUATION:
        raise DomainMismatch("inverse transform expects evaluation domain")
    return RingElement(table.inverse(x.coeffs), x.modulus, Domain.COEFFICIENT)


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    x._check(y)
    if x.domain is Domain.EVALUATION:
        return RingElement(mm.mul_mod(x.coeffs, y.coeffs, x.modulus), x.modulus, Domain.EVALUATION)
    table = ntt_table(x.degree, x.modulus)
    return RingElement(table.multiply(x.coeffs, y.coeffs), x.modulus)


def monomial_mul(x: RingElement, k: int) -> RingElement:
    """x * X^k for 0 <= k < 2N."""
    if not 0 <= k < 2 * x.degree:
        raise OutOfRangeExponent(f"exponent {k} outside [0, {2 * x.degree})")
    if x.domain is not Domain.COEFFICIENT:
        raise DomainMismatch("monomial multiplication needs coefficient domain")
    return RingElement(negacyclic_shift(x.coeffs, k, x.modulus), x.modulus)
