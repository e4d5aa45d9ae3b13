"""Named parameter sets."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import IncompleteParams, UnknownPreset
from .gadget import levels_for

RING_STDDEV = 3.2

Q1 = 2**62 - 65535
Q2 = 2**63 - 278527
Q3 = 2**48 - 163839
Q4 = 2**32 - 139263
TOY_MODULUS = 1125899903827969  # 50-bit prime, 1 mod 2^17


@dataclass(frozen=True)
class ParameterSet:
    name: str
    n: int
    N: int
    q: int
    Q: int
    L_RGSW: int
    L_ksK: int
    L_boot: int | None = None
    L_pK: int | None = None
    sigma_ksK: float = RING_STDDEV
    sigma_ring: float = RING_STDDEV
    hamming_weight: int | None = 64
    u_vec: tuple[int, ...] = (1,)
    fdfb: bool = True
    extras: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def B_fresh(self) -> float:
        return self.sigma_ring ** 2

    @property
    def ell_RGSW(self) -> int:
        return levels_for(self.L_RGSW, self.Q)

    @property
    def ell_ksK(self) -> int:
        return levels_for(self.L_ksK, self.Q)

    @property
    def ell_boot(self) -> int:
        self._need_fdfb()
        return levels_for(self.L_boot, self.Q)

    @property
    def ell_pK(self) -> int:
        self._need_fdfb()
        return levels_for(self.L_pK, self.Q)

    def _need_fdfb(self):
        if self.L_boot is None or self.L_pK is None:
            raise IncompleteParams(f"{self.name} has no sign-ladder or packing base")

    def validate(self):
        for attr in ("n", "N", "q", "Q", "L_RGSW", "L_ksK"):
            if getattr(self, attr) in (None, 0):
                raise IncompleteParams(f"{self.name}: missing {attr}")
        if self.fdfb:
            self._need_fdfb()
        return self

    def with_(self, **changes) -> "ParameterSet":
        return replace(self, **changes)


def _fdfb(name, n, N, q, Q, L_boot, L_RGSW, L_ksK, L_pK, sigma_ksK):
    return ParameterSet(name, n, N, q, Q, L_RGSW=L_RGSW, L_ksK=L_ksK, L_boot=L_boot, L_pK=L_pK,
                        sigma_ksK=float(sigma_ksK))


def _tfhe(name, n, N, q, Q, L_RGSW, L_ksK, sigma_ksK, hamming_weight):
    return ParameterSet(name, n, N, q, Q, L_RGSW=L_RGSW, L_ksK=L_ksK, sigma_ksK=float(sigma_ksK),
                        hamming_weight=hamming_weight, fdfb=False)


PRESETS: dict[str, ParameterSet] = {p.name: p for p in [
    _fdfb("FDFB:80:6", 700, 2**11, 2**12, Q1, 2**11, 2**11, 2**6, 2**13, 2**38),
    _fdfb("FDFB:100:6", 1050, 2**11, 2**12, Q1, 2**11, 2**11, 2, 2**13, 2**41),
    _fdfb("FDFB:80:7", 700, 2**12, 2**13, Q2, 2**11, 2**9, 2**4, 2**13, 2**39),
    _fdfb("FDFB:100:7", 1100, 2**12, 2**13, Q2, 2**11, 2**9, 2, 2**13, 2**41),
    _fdfb("FDFB:80:8", 700, 2**13, 2**14, Q2, 2**8, 2**9, 2**4, 2**13, 2**39),
    _fdfb("FDFB:100:8", 1100, 2**13, 2**14, Q2, 2**8, 2**9, 2, 2**13, 2**41),
    _tfhe("TFHE:100:7", 1500, 2**12, 2**13, Q3, 2**16, 2, 2**18, 64),
    _tfhe("TFHE:80:2", 424, 2**10, 2**11, Q4, 2**11, 2**4, 2**16, None),
    _tfhe("TFHE:100:2", 525, 2**10, 2**11, Q4, 2**11, 2**4, 2**16, None),
    # Desk-scale set used by the executable tests; no security claim.
    ParameterSet("TOY", 64, 1024, 2048, TOY_MODULUS, L_RGSW=2**10, L_ksK=2**5, L_boot=2**10,
                 L_pK=2**13, hamming_weight=None),
]}

TABLE_PRESETS = ["FDFB:80:6", "FDFB:100:6", "FDFB:80:7", "FDFB:100:7", "FDFB:80:8", "FDFB:100:8",
                 "TFHE:100:7", "TFHE:80:2", "TFHE:100:2"]


def get_preset(name: str) -> ParameterSet:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
