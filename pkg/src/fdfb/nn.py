"""Tiny integer dense networks evaluated on LWE ciphertexts.

Inputs are encrypted at the large modulus Q so that affine layers add no
rounding noise; each hidden neuron is refreshed (and activated) by one
full-domain bootstrap that stays at Q.  The activation folds in the
discretization factor ``delta``: ``h = min(round(relu(a) / delta), h_max)``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .arith import PlaintextEncoding, encrypt, eval_lut, hom_affine, lut_pair, to_signed
from .bootstrap import BootstrapKeySet
from .errors import CorruptFile
from .samples import LweSample, LweSecretKey, lwe_phase, round_to_plaintext
from .sampling import Sampler


@dataclass
class DenseLayer:
    weights: np.ndarray   # (out, in) integers
    bias: np.ndarray      # (out,) integers

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


@dataclass
class TinyModel:
    layers: list[DenseLayer]
    delta: int
    t: int
    h_max: int

    @property
    def dims(self) -> list[int]:
        return [self.layers[0].shape[1]] + [layer.shape[0] for layer in self.layers]

    def activation(self, m: int) -> int:
        a = max(0, to_signed(m, self.t))
        return min((2 * a + self.delta) // (2 * self.delta), self.h_max) % self.t


# ---------------------------------------------------------------- plaintext reference


def plaintext_forward(model: TinyModel, x: np.ndarray) -> np.ndarray:
    """Signed output logits with every intermediate value reduced mod t."""
    h = np.asarray(x, dtype=np.int64)
    for k, layer in enumerate(model.layers):
        a = (layer.weights @ h + layer.bias) % model.t
        if k < len(model.layers) - 1:
            h = np.array([model.activation(int(v)) for v in a], dtype=np.int64)
        else:
            h = np.array([to_signed(int(v), model.t) for v in a], dtype=np.int64)
    return h


def pre_activations(model: TinyModel, x: np.ndarray) -> list[np.ndarray]:
    """Unreduced pre-activation integers per layer (for window checks)."""
    out = []
    h = np.asarray(x, dtype=np.int64)
    for k, layer in enumerate(model.layers):
        a = layer.weights @ h + layer.bias
        out.append(a)
        if k < len(model.layers) - 1:
            h = np.array([model.activation(int(v) % model.t) for v in a], dtype=np.int64)
    return out


def generate_toy_model(sampler: Sampler, dims=(784, 16, 4), t: int = 32, delta: int = 2,
                       h_max: int = 7, density: float = 0.02, inputs: int = 20,
                       input_density: float = 0.25):
    """Random sparse ternary net and binary inputs whose values stay in the signed window.

    Neurons whose pre-activation leaves ``[-t/2, t/2)`` on any input are redrawn.
    """
    half = t // 2
    xs = (sampler.unit_floats(inputs * dims[0]) < input_density).astype(np.int64)
    xs = xs.reshape(inputs, dims[0])

    def draw(rows, cols, dens):
        mask = sampler.unit_floats(rows * cols) < dens
        sign = np.where(sampler.words(rows * cols) & np.uint64(1), 1, -1)
        return (mask * sign).reshape(rows, cols).astype(np.int64)

    layers: list[DenseLayer] = []
    h = xs
    for k in range(len(dims) - 1):
        d_in, d_out = dims[k], dims[k + 1]
        dens = density if k == 0 else 0.5
        w = draw(d_out, d_in, dens)
        b = sampler.uniform(5, (d_out,)).astype(np.int64) - 2
        for j in range(d_out):
            for _ in range(200):
                a = h @ w[j] + b[j]
                if np.all((a >= -half) & (a < half)) and np.ptp(a) > 0:
                    break
                w[j] = draw(1, d_in, dens)[0]
            else:
                raise RuntimeError("could not fit neuron into the plaintext window")
        layers.append(DenseLayer(w, b))
        if k < len(dims) - 2:
            model = TinyModel(layers, delta, t, h_max)
            h = np.array([[model.activation(int(v) % t) for v in row] for row in (h @ w.T + b)])
    return TinyModel(layers, delta, t, h_max), xs


# ---------------------------------------------------------------- encrypted evaluation


def dense_layer(cts, weights, bias, f, keys: BootstrapKeySet, t: int,
                final_mod_switch: bool = False) -> list[LweSample]:
    """Affine map per neuron followed by a bootstrapped table ``f`` (``None`` skips it)."""
    q = cts[0].modulus
    enc = PlaintextEncoding(t, q)
    pair = lut_pair(keys, f, t) if f is not None else None
    out = []
    for w_row, b in zip(np.asarray(weights), np.asarray(bias)):
        a = hom_affine(cts, w_row, int(b), enc)
        if f is not None:
            a = eval_lut(a, f, keys, t, final_mod_switch=final_mod_switch, pair=pair)
        out.append(a)
    return out


def encrypt_input(sk: LweSecretKey, x, t: int, modulus: int, stddev: float,
                  sampler: Sampler) -> list[LweSample]:
    enc = PlaintextEncoding(t, modulus)
    return [encrypt(sk, int(v) % t, enc, stddev, sampler) for v in x]


def encrypted_forward(model: TinyModel, cts, keys: BootstrapKeySet) -> list[LweSample]:
    h = list(cts)
    last = len(model.layers) - 1
    for k, layer in enumerate(model.layers):
        f = model.activation if k < last else None
        h = dense_layer(h, layer.weights, layer.bias, f, keys, model.t)
    return h


def decrypt_logits(cts, sk: LweSecretKey, t: int) -> np.ndarray:
    return np.array([to_signed(round_to_plaintext(lwe_phase(c, sk), c.modulus, t), t) for c in cts])


def argmax(values) -> int:
    """First index of the maximum."""
    return int(np.argmax(np.asarray(values)))


# ---------------------------------------------------------------- file format


def dump_model(model: TinyModel) -> str:
    buf = io.StringIO()
    buf.write("dims " + " ".join(str(d) for d in model.dims) + "\n")
    buf.write(f"delta {model.delta}\nt {model.t}\nhmax {model.h_max}\n")
    for layer in model.layers:
        for row in layer.weights:
            buf.write(" ".join(str(int(v)) for v in row) + "\n")
        buf.write(" ".join(str(int(v)) for v in layer.bias) + "\n")
    return buf.getvalue()


def load_model(text: str) -> TinyModel:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        header = {ln[0]: ln[1:] for ln in lines[:4]}
        dims = [int(v) for v in header["dims"]]
        delta, t, h_max = int(header["delta"][0]), int(header["t"][0]), int(header["hmax"][0])
        pos = 4
        layers = []
        for d_in, d_out in zip(dims, dims[1:]):
            w = np.array([[int(v) for v in lines[pos + r]] for r in range(d_out)], dtype=np.int64)
            pos += d_out
            b = np.array([int(v) for v in lines[pos]], dtype=np.int64)
            pos += 1
            if w.shape != (d_out, d_in) or b.shape != (d_out,):
                raise ValueError("layer shape mismatch")
            layers.append(DenseLayer(w, b))
    except (KeyError, IndexError, ValueError) as exc:
        raise CorruptFile(f"bad model file: {exc}") from None
    return TinyModel(layers, delta, t, h_max)
