"""Analytic variance bounds and the erfc correctness model.

All bounds are variances of the centered error.  Gadget terms use
``L^2 / 3`` as the second moment of an unsigned digit in ``[0, L-1]``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import modmath as mm
from .errors import IncompleteParams
from .gadget import GadgetParams, decompose_array
from .params import TABLE_PRESETS, ParameterSet, get_preset

EXPONENT_CAP = 128
PROBABILITY_FLOOR = 0.01

# second moment terms of a binary secret viewed as a {0, 1} distribution
BINARY_KEY_VARIANCE = 0.25
BINARY_KEY_MEAN = 0.5


# ---------------------------------------------------------------- per-operation bounds


def gadget_term(count: int, levels: int, base: int, variance: float) -> float:
    """Variance of ``sum`` of ``count * levels`` digit-times-error products."""
    return count * levels * base * base * variance / 3.0


def external_product_bound(N: int, levels: int, base: int, B_rgsw: float, B_d: float,
                           message_norm2: float = 1.0) -> float:
    """Output variance of RGSW(m) x RLWE with RGSW error ``B_rgsw``.

    ``message_norm2`` is the squared norm of ``m`` (1 for a bit or a signed monomial).
    """
    return gadget_term(N, 2 * levels, base, B_rgsw) + message_norm2 * B_d


def cmux_bound(N: int, levels: int, base: int, B_rgsw: float, B_g: float, B_h: float) -> float:
    return gadget_term(N, 2 * levels, base, B_rgsw) + max(B_g, B_h)


def mod_switch_constant(hamming_weight: float, key_variance: float = BINARY_KEY_VARIANCE,
                        key_mean: float = BINARY_KEY_MEAN) -> float:
    return 2.0 / 3.0 + (2.0 / 3.0) * hamming_weight * (key_variance + key_mean ** 2)


def mod_switch_bound(B: float, source: int, target: int, hamming_weight: float,
                     key_variance: float = BINARY_KEY_VARIANCE,
                     key_mean: float = BINARY_KEY_MEAN) -> float:
    if source == target:
        return B
    return (target / source) ** 2 * B + mod_switch_constant(hamming_weight, key_variance, key_mean)


def key_switch_increment(source_dim: int, levels: int, base: int, B_key: float) -> float:
    return gadget_term(source_dim, levels, base, B_key)


def key_switch_bound(B_c: float, source_dim: int, levels: int, base: int, B_key: float) -> float:
    return B_c + key_switch_increment(source_dim, levels, base, B_key)


def blind_rotate_increment(n: int, u: int, N: int, levels: int, base: int, B_brk: float) -> float:
    return 2.0 * gadget_term(n * u * N, levels, base, B_brk)


def blind_rotate_bound(B_acc: float, n: int, u: int, N: int, levels: int, base: int,
                       B_brk: float) -> float:
    return B_acc + blind_rotate_increment(n, u, N, levels, base, B_brk)


def pub_mux_bound(N: int, levels: int, base: int, B_c: float) -> float:
    return gadget_term(N, levels, base, B_c)


def build_acc_bound(N: int, levels: int, base: int, B_ladder: float, B_pk_switch: float) -> float:
    return pub_mux_bound(N, levels, base, B_ladder + B_pk_switch)


def digit_norms(coeffs, base: int, modulus: int) -> np.ndarray:
    """``||d_i||`` for each gadget digit polynomial of a public polynomial."""
    d = decompose_array(np.asarray(coeffs, dtype=np.uint64), GadgetParams(base, modulus))
    return np.sqrt(np.sum(d.astype(np.float64) ** 2, axis=-1))


def pub_mux_table_bound(p0, p1, base: int, B_c: float) -> float:
    """Per-coefficient variance of the multiplexer for the actual ``p0``, ``p1``.

    Ladder samples share key material, and unsigned digits have nonzero
    mean, so their errors are correlated.  ``(sum_i ||d_i||)^2 B_c`` holds
    whatever the correlation; the generic ``N l L^2 B_c / 3`` assumes
    independent errors and uniform digits.
    """
    q = p0.modulus
    return float(np.sum(digit_norms(mm.sub_mod(p1.coeffs, p0.coeffs, q), base, q))) ** 2 * B_c


def build_acc_table_bound(p0, p1, base: int, B_ladder: float, B_pk_switch: float) -> float:
    return pub_mux_table_bound(p0, p1, base, B_ladder + B_pk_switch)


def bootstrap_table_bound(params: ParameterSet, p0, p1) -> float:
    """Output variance at Q (before the final modulus switch) for the selected pair ``p0``, ``p1``.

    The second rotation reuses the ladder's key and mask, so its error is
    added by standard deviation.
    """
    b = budget(params)
    B_F = build_acc_table_bound(p0, p1, params.L_boot, b.B_BR, b.B_P)
    return (math.sqrt(B_F) + math.sqrt(b.B_BR)) ** 2 + b.B_KS


# ---------------------------------------------------------------- bootstrap budget


@dataclass
class NoiseBudget:
    B_BR: float
    B_P: float
    B_F: float
    B_KS: float
    B_out: float
    B_N: float
    mod_switch_term: float
    formulas: dict = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("formulas")
        return d

    @property
    def key_share(self) -> float:
        """Fraction of the output variance contributed by the final modulus switch."""
        return self.mod_switch_term / self.B_out if self.B_out else 0.0


FORMULAS = {
    "B_BR": "(2/3) n u N l_RGSW L_RGSW^2 B_brk",
    "B_P": "(1/3) N l_pK L_pK^2 B_pK",
    "B_F": "(1/3) N l_boot L_boot^2 (B_BR + B_P)",
    "B_KS": "(1/3) N l_ksK L_ksK^2 sigma_ksK^2",
    "B_out": "(q/Q)^2 (B_F + B_BR + B_KS) + 2/3 + (2/3) Ham(s) (Var(s) + E(s)^2)",
    "B_N": "B_out after switching to 2N; equals B_out when q = 2N",
}


def effective_hamming_weight(params: ParameterSet) -> float:
    return params.hamming_weight if params.hamming_weight is not None else params.n / 2


def budget(params: ParameterSet, hamming_weight: float | None = None,
           affine_weight_norm2: float = 0.0) -> NoiseBudget:
    """Closed-form bounds for one bootstrap with ``params``.

    ``affine_weight_norm2`` models a leveled affine map applied to the
    bootstrap output at modulus Q (before key switching); it multiplies the
    accumulator-side variance.
    """
    for attr in ("n", "N", "q", "Q", "L_RGSW", "L_ksK"):
        if getattr(params, attr) in (None, 0):
            raise IncompleteParams(f"{params.name}: missing {attr}")
    n, N, q, Q = params.n, params.N, params.q, params.Q
    B = params.B_fresh
    u = len(params.u_vec)
    ham = effective_hamming_weight(params) if hamming_weight is None else hamming_weight
    B_BR = blind_rotate_increment(n, u, N, params.ell_RGSW, params.L_RGSW, B)
    B_KS = key_switch_increment(N, params.ell_ksK, params.L_ksK, params.sigma_ksK ** 2)
    if params.fdfb:
        B_P = key_switch_increment(N, params.ell_pK, params.L_pK, B)
        B_F = build_acc_bound(N, params.ell_boot, params.L_boot, B_BR, B_P)
    else:
        B_P = 0.0
        B_F = 0.0
    acc_side = B_F + B_BR
    if affine_weight_norm2:
        acc_side *= affine_weight_norm2
    const = mod_switch_constant(ham)
    if q == Q:
        B_out = acc_side + B_KS
        const = 0.0
    else:
        B_out = (q / Q) ** 2 * (acc_side + B_KS) + const
    B_N = B_out if q == 2 * N else mod_switch_bound(B_out, q, 2 * N, ham)
    return NoiseBudget(B_BR, B_P, B_F, B_KS, B_out, B_N, const, dict(FORMULAS))


def precondition_threshold(params: ParameterSet, t: int) -> float:
    """Largest admissible input variance: the stricter of ``N/t`` and ``q/(2t)``."""
    return min(params.N / t, params.q / (2 * t))


def within_budget(B: float, params: ParameterSet, t: int) -> bool:
    return B <= precondition_threshold(params, t)


# ---------------------------------------------------------------- correctness model


def error_probability(B: float, q: int, t: int) -> float:
    """``1 - erf(q / (2 t sigma sqrt 2))`` with ``sigma = sqrt(B)``."""
    if B <= 0:
        return 0.0
    return math.erfc(q / (2 * t * math.sqrt(B) * math.sqrt(2)))


def correctness_exponent(B: float, q: int, t: int) -> int:
    """Smallest ``i`` with ``2^-i <= error probability``, capped at 128."""
    p = error_probability(B, q, t)
    if p <= 2.0 ** -EXPONENT_CAP:
        return EXPONENT_CAP
    return min(EXPONENT_CAP, math.ceil(-math.log2(p)))


@dataclass(frozen=True)
class Cell:
    probability: float
    exponent: int

    @property
    def is_probability(self) -> bool:
        return self.probability >= PROBABILITY_FLOOR

    def render(self) -> str:
        if self.exponent >= EXPONENT_CAP:
            return "0.0"
        if self.is_probability:
            return f"{self.probability:.2f}"
        return f"2^-{self.exponent}"


def make_cell(B: float, q: int, t: int) -> Cell:
    return Cell(error_probability(B, q, t), correctness_exponent(B, q, t))


@dataclass
class TableRow:
    preset: str
    log_t: list[int]
    bootstrap: list[Cell]
    affine: list[Cell]
    key_share: float
    budget: NoiseBudget


def emit_correctness_table(presets=None, t_list=None, affine_size: int = 784) -> list[TableRow]:
    """Error-probability cells per preset and plaintext modulus.

    The affine column adds ``affine_size`` ciphertexts with weights bounded by ``t``
    to bootstrap outputs taken at Q, which scales the accumulator-side
    variance by ``affine_size * t^2``.
    """
    presets = list(TABLE_PRESETS if presets is None else presets)
    t_list = [2 ** k for k in range(6, 12)] if t_list is None else list(t_list)
    rows = []
    for name in presets:
        params = get_preset(name) if isinstance(name, str) else name
        base = budget(params)
        boot_cells, affine_cells = [], []
        for t in t_list:
            boot_cells.append(make_cell(base.B_out, params.q, t))
            if affine_size and params.fdfb:
                aff = budget(params, affine_weight_norm2=affine_size * t * t)
                affine_cells.append(make_cell(aff.B_out, params.q, t))
            else:
                affine_cells.append(boot_cells[-1])
        rows.append(TableRow(params.name, [int(math.log2(t)) for t in t_list], boot_cells,
                             affine_cells, base.key_share, base))
    return rows
