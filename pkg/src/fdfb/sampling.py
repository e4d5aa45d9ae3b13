"""Deterministic randomness from a SHAKE-256 stream.

Every key generation and encryption call takes a :class:`Sampler`, so tests
and the CLI are reproducible from a 32-byte seed.  Independent consumers get
domain-separated children via :meth:`Sampler.fork`.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass

import numpy as np

SEED_BYTES = 32
TAIL_CUT = 6.0


def normalize_seed(seed) -> bytes:
    if isinstance(seed, bytes) and len(seed) == SEED_BYTES:
        return seed
    if isinstance(seed, int):
        seed = seed.to_bytes(max(1, (seed.bit_length() + 8) // 8), "little", signed=True)
    elif isinstance(seed, str):
        seed = seed.encode()
    return hashlib.shake_256(b"fdfb-seed" + bytes(seed)).digest(SEED_BYTES)


def _shape(shape) -> tuple:
    return (int(shape),) if np.isscalar(shape) else tuple(int(d) for d in shape)


class Sampler:
    def __init__(self, seed=0):
        self.seed = normalize_seed(seed)
        self._counter = 0

    def fork(self, label: str) -> "Sampler":
        child = hashlib.shake_256(self.seed + b"/fork/" + label.encode()).digest(SEED_BYTES)
        return Sampler(child)

    def random_bytes(self, count: int) -> bytes:
        block = self._counter.to_bytes(8, "little")
        self._counter += 1
        return hashlib.shake_256(self.seed + block).digest(count)

    def words(self, count: int) -> np.ndarray:
        return np.frombuffer(self.random_bytes(8 * count), dtype="<u8").astype(np.uint64)

    def uniform(self, modulus: int, shape) -> np.ndarray:
        """Uniform residues in [0, modulus) by rejection sampling."""
        shape = _shape(shape)
        total = int(np.prod(shape, dtype=np.int64))
        mask = np.uint64((1 << max(1, (modulus - 1).bit_length())) - 1)
        out = np.empty(total, dtype=np.uint64)
        filled = 0
        while filled < total:
            need = total - filled
            draw = self.words(need + need // 4 + 8) & mask
            draw = draw[draw < np.uint64(modulus)][:need]
            out[filled:filled + draw.size] = draw
            filled += draw.size
        return out.reshape(shape)

    def unit_floats(self, count: int) -> np.ndarray:
        """Floats in (0, 1] with 53 bits of precision."""
        return ((self.words(count) >> np.uint64(11)).astype(np.float64) + 1.0) / float(1 << 53)

    def gaussian(self, stddev: float, shape) -> np.ndarray:
        """Rounded Gaussian integers with variance ``stddev**2``, truncated at six widths.

        Rounding adds 1/12 to the variance of a continuous Gaussian, so for
        ``stddev >= 1`` the continuous width is shrunk to compensate.
        """
        shape = _shape(shape)
        total = int(np.prod(shape, dtype=np.int64))
        if stddev == 0 or total == 0:
            return np.zeros(shape, dtype=np.int64)
        width = math.sqrt(stddev * stddev - 1.0 / 12.0) if stddev >= 1 else float(stddev)
        out = np.empty(total, dtype=np.int64)
        filled = 0
        while filled < total:
            pairs = (total - filled) // 2 + 1
            u1 = self.unit_floats(pairs)
            u2 = self.unit_floats(pairs)
            radius = np.sqrt(-2.0 * np.log(u1))
            z = np.concatenate([radius * np.cos(2 * np.pi * u2), radius * np.sin(2 * np.pi * u2)])
            z = z[np.abs(z) <= TAIL_CUT]
            vals = np.rint(z * width).astype(np.int64)[: total - filled]
            out[filled:filled + vals.size] = vals
            filled += vals.size
        return out.reshape(shape)

    def binary(self, dimension: int, hamming_weight: int | None = None) -> np.ndarray:
        if hamming_weight is None:
            return (self.words(dimension) & np.uint64(1)).astype(np.int64)
        if not 0 <= hamming_weight <= dimension:
            raise ValueError("hamming weight out of range")
        order = np.argsort(self.words(dimension), kind="stable")
        key = np.zeros(dimension, dtype=np.int64)
        key[order[:hamming_weight]] = 1
        return key

    def choice(self, values, count: int) -> np.ndarray:
        values = np.asarray(values)
        idx = self.uniform(len(values), (count,)).astype(np.int64)
        return values[idx]


class SampleKind(enum.Enum):
    UNIFORM_RING = "uniform_ring"
    ERROR_RING = "error_ring"
    UNIFORM_LWE_MASK = "uniform_lwe_mask"
    ERROR_SCALAR = "error_scalar"


@dataclass
class SampleContext:
    sampler: Sampler
    modulus: int
    degree: int = 1
    dimension: int = 1
    stddev: float = 3.2


@dataclass
class ErrorSampler:
    stddev: float
    rng_seed: bytes

    def __post_init__(self):
        self._sampler = Sampler(self.rng_seed)

    def draw(self, shape) -> np.ndarray:
        return self._sampler.gaussian(self.stddev, shape)


def sample(kind: SampleKind, ctx: SampleContext):
    """Draw one object of the requested kind; ring kinds return a RingElement."""
    from .ring import RingElement

    if kind is SampleKind.UNIFORM_RING:
        return RingElement(ctx.sampler.uniform(ctx.modulus, (ctx.degree,)), ctx.modulus)
    if kind is SampleKind.ERROR_RING:
        e = ctx.sampler.gaussian(ctx.stddev, (ctx.degree,))
        return RingElement.from_ints(e, ctx.modulus)
    if kind is SampleKind.UNIFORM_LWE_MASK:
        return ctx.sampler.uniform(ctx.modulus, (ctx.dimension,))
    if kind is SampleKind.ERROR_SCALAR:
        return int(ctx.sampler.gaussian(ctx.stddev, (1,))[0])
    raise ValueError(kind)
