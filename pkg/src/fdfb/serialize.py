"""Little-endian binary formats for samples, keys, key bundles and ciphertext files.

Every object begins with a 4-byte tag.  Integers are ``u64`` unless noted,
arrays are prefixed with their ``u64`` length, and ring elements are stored
as coefficient-domain residues (RGSW rows are converted out of the NTT
domain on write and back on read).
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass

import numpy as np

from .blind_rotation import BlindRotateKey
from .bootstrap import BootstrapKeySet, SecretKeys
from .errors import CorruptFile, FdfbError, UnknownPreset
from .gadget import GadgetParams
from .params import ParameterSet, get_preset
from .ring import RingElement, ntt_table
from .samples import LweSample, LweSecretKey, RgswSample, RlweSample, RlweSecretKey
from .switching import KeySwitchKey

BUNDLE_MAGIC = b"FDFB1"
CIPHERTEXT_MAGIC = b"FDFBC"
FORMAT_VERSION = 1

U64 = np.uint64


class Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def raw(self, data: bytes):
        self.buf.write(data)

    def u16(self, v: int):
        self.buf.write(struct.pack("<H", v))

    def u64(self, v: int):
        self.buf.write(struct.pack("<Q", v))

    def i64(self, v: int):
        self.buf.write(struct.pack("<q", v))

    def f64(self, v: float):
        self.buf.write(struct.pack("<d", v))

    def blob(self, data: bytes):
        self.u64(len(data))
        self.buf.write(data)

    def text(self, s: str):
        self.blob(s.encode())

    def array(self, arr: np.ndarray, dtype: str = "<u8"):
        arr = np.ascontiguousarray(arr)
        self.u64(arr.ndim)
        for d in arr.shape:
            self.u64(d)
        self.buf.write(arr.astype(dtype).tobytes())

    def getvalue(self) -> bytes:
        return self.buf.getvalue()


class Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def raw(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise CorruptFile("unexpected end of data")
        out = bytes(self.data[self.pos:self.pos + count])
        self.pos += count
        return out

    def u16(self) -> int:
        return struct.unpack("<H", self.raw(2))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.raw(8))[0]

    def i64(self) -> int:
        return struct.unpack("<q", self.raw(8))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.raw(8))[0]

    def blob(self) -> bytes:
        return self.raw(self.u64())

    def text(self) -> str:
        try:
            return self.blob().decode()
        except UnicodeDecodeError:
            raise CorruptFile("invalid text field") from None

    def array(self, dtype: str = "<u8") -> np.ndarray:
        ndim = self.u64()
        if ndim > 8:
            raise CorruptFile("array rank too large")
        shape = tuple(self.u64() for _ in range(ndim))
        count = math.prod(shape)
        itemsize = np.dtype(dtype).itemsize
        if count * itemsize > len(self.data) - self.pos:
            raise CorruptFile("array extends past end of data")
        raw = self.raw(count * itemsize)
        base = np.uint64 if dtype == "<u8" else np.int64
        return np.frombuffer(raw, dtype=dtype).astype(base).reshape(shape)

    def expect(self, tag: bytes):
        got = self.raw(len(tag))
        if got != tag:
            raise CorruptFile(f"expected tag {tag!r}, found {got!r}")

    def done(self):
        if self.pos != len(self.data):
            raise CorruptFile("trailing bytes")


def _check_reduced(arr: np.ndarray, modulus: int):
    if arr.size and int(arr.max()) >= modulus:
        raise CorruptFile("residue not reduced modulo the stated modulus")


# ---------------------------------------------------------------- writers


def write_gadget(w: Writer, g: GadgetParams):
    w.raw(b"GDG0")
    w.u64(g.base)
    w.u64(g.modulus)
    w.u64(g.levels)


def write_obj(w: Writer, obj):
    """Dispatch on type."""
    if isinstance(obj, LweSample):
        w.raw(b"LWE0")
        w.u64(obj.modulus)
        w.array(obj.data)
    elif isinstance(obj, RlweSample):
        w.raw(b"RLW0")
        w.u64(obj.modulus)
        w.array(obj.data)
    elif isinstance(obj, RingElement):
        w.raw(b"RNG0")
        w.u64(obj.modulus)
        coeffs = obj.coeffs
        if obj.domain.value == "evaluation":
            coeffs = ntt_table(obj.degree, obj.modulus).inverse(coeffs)
        w.array(coeffs)
    elif isinstance(obj, RgswSample):
        w.raw(b"RGS0")
        write_gadget(w, obj.gadget)
        w.array(ntt_table(obj.degree, obj.modulus).inverse(obj.rows_ntt))
    elif isinstance(obj, LweSecretKey):
        w.raw(b"LSK0")
        w.array(obj.s, "<i8")
    elif isinstance(obj, RlweSecretKey):
        w.raw(b"RSK0")
        write_obj(w, obj.s)
    elif isinstance(obj, KeySwitchKey):
        w.raw(b"KSK0")
        w.u64(obj.source_dim)
        w.u64(obj.target_dim)
        w.u64(obj.degree)
        w.f64(obj.stddev)
        write_gadget(w, obj.gadget)
        w.array(obj.matrix)
    elif isinstance(obj, BlindRotateKey):
        w.raw(b"BRK0")
        w.u64(len(obj.u_vec))
        for v in obj.u_vec:
            w.i64(v)
        w.f64(obj.stddev)
        write_gadget(w, obj.gadget)
        w.array(ntt_table(obj.degree, obj.modulus).inverse(obj.rows_ntt))
    elif isinstance(obj, SecretKeys):
        w.raw(b"SKS0")
        write_obj(w, obj.lwe)
        write_obj(w, obj.ring)
    elif isinstance(obj, BootstrapKeySet):
        w.raw(b"BKS0")
        w.text(obj.params.name)
        write_obj(w, obj.brk)
        write_obj(w, obj.ksk)
        w.u64(1 if obj.pk is not None else 0)
        if obj.pk is not None:
            write_obj(w, obj.pk)
            write_gadget(w, obj.boot_gadget)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------- readers


def read_gadget(r: Reader) -> GadgetParams:
    r.expect(b"GDG0")
    base, modulus, levels = r.u64(), r.u64(), r.u64()
    try:
        return GadgetParams(base, modulus, levels)
    except ValueError as exc:
        raise CorruptFile(str(exc)) from None


def _rotation_key_rows(r: Reader, g: GadgetParams) -> np.ndarray:
    coeff = r.array()
    if coeff.ndim < 3 or coeff.shape[-3:-1] != (2 * g.levels, 2):
        raise CorruptFile("RGSW rows have the wrong shape")
    _check_reduced(coeff, g.modulus)
    try:
        return ntt_table(coeff.shape[-1], g.modulus).forward(coeff)
    except (FdfbError, ValueError) as exc:
        raise CorruptFile(f"RGSW rows: {exc}") from None


def read_obj(r: Reader, params: ParameterSet | None = None):
    tag = r.raw(4)
    if tag == b"LWE0":
        q = r.u64()
        data = r.array()
        if data.ndim != 1:
            raise CorruptFile("LWE sample must be one row")
        _check_reduced(data, q)
        return LweSample(data, q)
    if tag == b"RLW0":
        q = r.u64()
        data = r.array()
        if data.ndim != 2 or data.shape[0] != 2:
            raise CorruptFile("RLWE sample must be (2, N)")
        _check_reduced(data, q)
        return RlweSample(data, q)
    if tag == b"RNG0":
        q = r.u64()
        coeffs = r.array()
        _check_reduced(coeffs, q)
        try:
            return RingElement(coeffs, q)
        except ValueError as exc:
            raise CorruptFile(str(exc)) from None
    if tag == b"RGS0":
        g = read_gadget(r)
        return RgswSample(_rotation_key_rows(r, g), g)
    if tag == b"LSK0":
        return LweSecretKey(r.array("<i8"))
    if tag == b"RSK0":
        s = read_obj(r)
        if not isinstance(s, RingElement):
            raise CorruptFile("ring key must hold a ring element")
        return RlweSecretKey(s)
    if tag == b"KSK0":
        src, dst, deg = r.u64(), r.u64(), r.u64()
        stddev = r.f64()
        g = read_gadget(r)
        matrix = r.array()
        width = 2 * deg if deg > 1 else dst + 1
        if matrix.shape != (src * g.levels, width):
            raise CorruptFile("key-switching matrix has the wrong shape")
        _check_reduced(matrix, g.modulus)
        return KeySwitchKey(matrix, src, dst, deg, g, stddev)
    if tag == b"BRK0":
        u = tuple(r.i64() for _ in range(r.u64()))
        stddev = r.f64()
        g = read_gadget(r)
        rows = _rotation_key_rows(r, g)
        if rows.ndim != 5 or rows.shape[1] != len(u):
            raise CorruptFile("rotation key has the wrong shape")
        return BlindRotateKey(rows, u, g, stddev)
    if tag == b"SKS0":
        lwe = read_obj(r)
        ring = read_obj(r)
        if not isinstance(lwe, LweSecretKey) or not isinstance(ring, RlweSecretKey):
            raise CorruptFile("secret key block malformed")
        return SecretKeys(lwe, ring)
    if tag == b"BKS0":
        name = r.text()
        p = params if params is not None else _preset(name)
        brk = read_obj(r)
        ksk = read_obj(r)
        pk = boot = None
        if r.u64():
            pk = read_obj(r)
            boot = read_gadget(r)
        return BootstrapKeySet(brk, ksk, p, pk, boot, brk.u_vec)
    raise CorruptFile(f"unknown object tag {tag!r}")


def _preset(name: str) -> ParameterSet:
    try:
        return get_preset(name)
    except UnknownPreset as exc:
        raise CorruptFile(str(exc)) from None


def serialize(obj) -> bytes:
    w = Writer()
    write_obj(w, obj)
    return w.getvalue()


def deserialize(data: bytes, params: ParameterSet | None = None):
    r = Reader(data)
    obj = read_obj(r, params)
    r.done()
    return obj


# ---------------------------------------------------------------- files


@dataclass
class KeyBundle:
    preset: str
    seed: bytes
    secrets: SecretKeys
    eval_keys: BootstrapKeySet | None = None


def write_bundle(bundle: KeyBundle) -> bytes:
    if len(bundle.seed) != 32:
        raise ValueError("seed record must be 32 bytes")
    w = Writer()
    w.raw(BUNDLE_MAGIC)
    w.u16(FORMAT_VERSION)
    w.text(bundle.preset)
    w.raw(bundle.seed)
    write_obj(w, bundle.secrets)
    w.u64(1 if bundle.eval_keys is not None else 0)
    if bundle.eval_keys is not None:
        write_obj(w, bundle.eval_keys)
    return w.getvalue()


def read_bundle(data: bytes) -> KeyBundle:
    r = Reader(data)
    if r.raw(len(BUNDLE_MAGIC)) != BUNDLE_MAGIC:
        raise CorruptFile("not a key bundle")
    version = r.u16()
    if version != FORMAT_VERSION:
        raise CorruptFile(f"unsupported bundle version {version}")
    preset = r.text()
    params = _preset(preset)
    seed = r.raw(32)
    secrets = read_obj(r)
    if not isinstance(secrets, SecretKeys):
        raise CorruptFile("bundle lacks secret keys")
    if secrets.lwe.dimension != params.n or secrets.ring.degree != params.N:
        raise CorruptFile("secret key shapes do not match the preset")
    eval_keys = read_obj(r, params) if r.u64() else None
    r.done()
    return KeyBundle(preset, seed, secrets, eval_keys)


@dataclass
class CiphertextFile:
    preset: str
    plaintext_modulus: int
    variance: float
    samples: list[LweSample]

    @property
    def modulus(self) -> int:
        return self.samples[0].modulus if self.samples else 0


def write_ciphertexts(cf: CiphertextFile) -> bytes:
    w = Writer()
    w.raw(CIPHERTEXT_MAGIC)
    w.u16(FORMAT_VERSION)
    w.text(cf.preset)
    w.u64(cf.modulus)
    w.u64(cf.plaintext_modulus)
    w.f64(cf.variance)
    w.u64(len(cf.samples))
    for s in cf.samples:
        write_obj(w, s)
    return w.getvalue()


def read_ciphertexts(data: bytes) -> CiphertextFile:
    r = Reader(data)
    if r.raw(len(CIPHERTEXT_MAGIC)) != CIPHERTEXT_MAGIC:
        raise CorruptFile("not a ciphertext file")
    version = r.u16()
    if version != FORMAT_VERSION:
        raise CorruptFile(f"unsupported ciphertext version {version}")
    preset = r.text()
    _preset(preset)
    modulus = r.u64()
    t = r.u64()
    variance = r.f64()
    count = r.u64()
    samples = []
    for _ in range(count):
        s = read_obj(r)
        if not isinstance(s, LweSample) or s.modulus != modulus:
            raise CorruptFile("ciphertext entry does not match the header")
        samples.append(s)
    r.done()
    if t < 2:
        raise CorruptFile("plaintext modulus must be at least 2")
    return CiphertextFile(preset, t, variance, samples)
