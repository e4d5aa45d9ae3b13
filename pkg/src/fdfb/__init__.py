"""Full-domain functional bootstrapping over LWE/RLWE with a negacyclic NTT ring."""

from .arith import (CrtContext, PlaintextEncoding, crt_combine, crt_decrypt, crt_encrypt,
                    crt_hom_add, crt_hom_mul, crt_split, decode, decrypt, encode, encrypt,
                    eval_lut, hom_add, hom_affine, hom_max, hom_mul, hom_sub)
from .blind_rotation import BlindRotateKey, blind_rotate, br_keygen
from .bootstrap import (BootstrapKeySet, LookupTable, RotationPolynomialPair, SecretKeys,
                        build_acc, fdfb_bootstrap, fdfb_bootstrap_full, generate_bootstrap_keys,
                        generate_secret_keys, pub_mux, setup_polynomial, tfhe_bootstrap,
                        tfhe_rotation_polynomial)
from .errors import *  # noqa: F401,F403
from .gadget import GadgetParams, decompose_ring, decompose_scalar, recompose
from .noise import budget, correctness_exponent, emit_correctness_table, error_probability
from .params import PRESETS, ParameterSet, get_preset
from .ring import Domain, Modulus, RingElement, ntt_transform, ring_mul
from .samples import (LweSample, LweSecretKey, RgswSample, RlweSample, RlweSecretKey, cmux,
                      external_product, lwe_encrypt, lwe_phase, rgsw_encrypt, rlwe_encrypt,
                      rlwe_phase)
from .sampling import ErrorSampler, Sampler
from .serialize import deserialize, serialize
from .switching import KeySwitchKey, key_switch, key_switch_setup, mod_switch, sample_extract

__version__ = "0.1.0"
