"""Command-line interface: ``fdfb keygen | enc | dec | eval-lut | estimate | bench | infer``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import nn, report
from .arith import PlaintextEncoding, decrypt, encrypt
from .bootstrap import (BootstrapKeySet, LookupTable, fdfb_bootstrap, generate_bootstrap_keys,
                        generate_secret_keys, setup_polynomial)
from .errors import BudgetExceeded, CorruptFile, FdfbError, MessageOutOfRange, ParamMismatch
from .noise import budget, emit_correctness_table, precondition_threshold
from .params import TABLE_PRESETS, get_preset
from .sampling import Sampler, normalize_seed
from .serialize import (CiphertextFile, KeyBundle, read_bundle, read_ciphertexts, write_bundle,
                        write_ciphertexts)

SEED_ENV = "FDFB_SEED"


def resolve_seed(flag):
    """``FDFB_SEED`` wins over ``--seed``; ``None`` when neither is set."""
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return env
    return flag


# ---------------------------------------------------------------- keys


def make_bundle(preset: str, seed, with_eval_keys: bool = False) -> KeyBundle:
    params = get_preset(preset)
    seed_bytes = normalize_seed(0 if seed is None else seed)
    root = Sampler(seed_bytes)
    secrets = generate_secret_keys(params, root.fork("secrets"))
    bundle = KeyBundle(params.name, seed_bytes, secrets)
    if with_eval_keys:
        bundle.eval_keys = generate_bootstrap_keys(params, secrets, root.fork("eval"))
    return bundle


def eval_keys(bundle: KeyBundle) -> BootstrapKeySet:
    """Stored evaluation keys, or the same keys regenerated from the seed record."""
    if bundle.eval_keys is None:
        params = get_preset(bundle.preset)
        bundle.eval_keys = generate_bootstrap_keys(params, bundle.secrets,
                                                   Sampler(bundle.seed).fork("eval"))
    return bundle.eval_keys


def cmd_keygen(preset: str, seed, out_path, with_eval_keys: bool = False) -> KeyBundle:
    bundle = make_bundle(preset, seed, with_eval_keys)
    Path(out_path).write_bytes(write_bundle(bundle))
    return bundle


def load_bundle(path) -> KeyBundle:
    return read_bundle(Path(path).read_bytes())


# ---------------------------------------------------------------- ciphertexts


def cmd_enc(bundle: KeyBundle, messages, t: int, seed=None, large_modulus: bool = False) -> CiphertextFile:
    params = get_preset(bundle.preset)
    modulus = params.Q if large_modulus else params.q
    sampler = Sampler(seed) if seed is not None else Sampler(bundle.seed).fork("enc")
    enc = PlaintextEncoding(t, modulus)
    samples = []
    for m in messages:
        if not 0 <= int(m) < t:
            raise MessageOutOfRange(f"message {m} outside [0, {t})")
        samples.append(encrypt(bundle.secrets.lwe, int(m), enc, params.sigma_ring, sampler))
    return CiphertextFile(params.name, t, params.sigma_ring ** 2, samples)


def cmd_dec(bundle: KeyBundle, cf: CiphertextFile) -> list[int]:
    if cf.preset != bundle.preset:
        raise ParamMismatch(f"ciphertexts are for {cf.preset}, keys for {bundle.preset}")
    return [decrypt(c, bundle.secrets.lwe, cf.plaintext_modulus) for c in cf.samples]


def parse_lut(text: str) -> tuple[list[int], int | None]:
    """Whitespace-separated outputs ``f(0) .. f(t-1)``; optional ``t_out <k>`` line; ``#`` comments."""
    values: list[int] = []
    t_out = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "t_out":
            if len(tokens) != 2 or t_out is not None:
                raise CorruptFile("malformed t_out line")
            t_out = _int(tokens[1])
            continue
        values.extend(_int(tok) for tok in tokens)
    if not values:
        raise CorruptFile("lookup table is empty")
    return values, t_out


def _int(tok: str) -> int:
    try:
        return int(tok, 0)
    except ValueError:
        raise CorruptFile(f"not an integer: {tok!r}") from None


def preflight(params, t: int, variance: float, t_out: int):
    limit = precondition_threshold(params, t)
    if variance > limit:
        raise BudgetExceeded(f"input variance {variance:.3g} exceeds {limit:.3g} for t={t}")
    out = budget(params).B_out
    limit_out = precondition_threshold(params, t_out)
    if out > limit_out:
        raise BudgetExceeded(f"bootstrap output variance {out:.3g} exceeds {limit_out:.3g} "
                             f"for t_out={t_out}")


def _fan_out(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def cmd_eval_lut(bundle: KeyBundle, cf: CiphertextFile, lut_text: str, threads: int = 1) -> CiphertextFile:
    if cf.preset != bundle.preset:
        raise ParamMismatch(f"ciphertexts are for {cf.preset}, keys for {bundle.preset}")
    values, t_out = parse_lut(lut_text)
    t = cf.plaintext_modulus
    if len(values) != t:
        raise CorruptFile(f"lookup table has {len(values)} entries, ciphertexts use t={t}")
    t_out = t if t_out is None else t_out
    if any(not 0 <= v < t_out for v in values):
        raise CorruptFile(f"lookup table values must lie in [0, {t_out})")
    params = get_preset(bundle.preset)
    preflight(params, t, cf.variance, t_out)
    keys = eval_keys(bundle)
    pair = setup_polynomial(LookupTable.from_values(values, t_out, keys.Q), keys.N)
    out = _fan_out(lambda c: fdfb_bootstrap(keys, c, pair), cf.samples, threads)
    return CiphertextFile(params.name, t_out, budget(params).B_out, out)


# ---------------------------------------------------------------- estimate / bench / infer


def cmd_estimate(presets=None, fmt: str = "text", out_dir=None) -> str:
    rows = emit_correctness_table(presets or TABLE_PRESETS)
    text = report.render_csv(rows) if fmt == "csv" else report.render_text(rows)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "correctness.txt").write_text(report.render_text(rows))
        (out / "correctness.csv").write_text(report.render_csv(rows))
        (out / "budget.csv").write_text(report.render_budget_csv(rows))
        report.plot_table(rows, out / "correctness.png")
    return text


def cmd_bench(preset: str, trials: int, threads: int, seed=None, t: int = 16, out_dir=None) -> str:
    bundle = make_bundle(preset, seed, with_eval_keys=True)
    keys = bundle.eval_keys
    rng = Sampler(bundle.seed).fork("bench")
    messages = [int(v) for v in rng.uniform(t, (trials,))]
    cf = cmd_enc(bundle, messages, t)
    pair = setup_polynomial(LookupTable.from_function(lambda m: m, t, t, keys.Q), keys.N)
    fdfb_bootstrap(keys, cf.samples[0], pair)  # warm kernels

    def timed(c):
        start = time.perf_counter()
        r = fdfb_bootstrap(keys, c, pair)
        return r, time.perf_counter() - start

    start = time.perf_counter()
    results = _fan_out(timed, cf.samples, threads)
    wall = time.perf_counter() - start
    times = [dt for _, dt in results]
    errors = sum(decrypt(r, bundle.secrets.lwe, t) != m for (r, _), m in zip(results, messages))
    text = report.render_bench(bundle.preset, times, threads) + \
        f"wall_seconds {wall:.4f}\nthroughput_per_second {trials / wall:.3f}\nerrors {errors}\n"
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.txt").write_text(text)
        report.plot_bench(times, out / "bench.png")
    return text


def parse_inputs(text: str) -> np.ndarray:
    rows = [[_int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise CorruptFile("input rows must be non-empty and of equal length")
    return np.array(rows, dtype=np.int64)


def cmd_infer(bundle: KeyBundle, model: nn.TinyModel, inputs: np.ndarray, fmt: str = "text",
              seed=None) -> str:
    params = get_preset(bundle.preset)
    if inputs.shape[1] != model.dims[0]:
        raise CorruptFile(f"inputs have {inputs.shape[1]} features, model expects {model.dims[0]}")
    if budget(params).B_N > precondition_threshold(params, model.t):
        raise BudgetExceeded(f"preset {params.name} cannot bootstrap t={model.t}")
    keys = eval_keys(bundle)
    sampler = Sampler(seed) if seed is not None else Sampler(bundle.seed).fork("infer")
    sep = "," if fmt == "csv" else " "
    lines = [sep.join(["index", "encrypted_argmax", "plaintext_argmax", "logits"])]
    for i, x in enumerate(inputs):
        cts = nn.encrypt_input(bundle.secrets.lwe, x, model.t, keys.Q, params.sigma_ring, sampler)
        logits = nn.decrypt_logits(nn.encrypted_forward(model, cts, keys), bundle.secrets.lwe, model.t)
        plain = nn.plaintext_forward(model, x)
        lines.append(sep.join([str(i), str(nn.argmax(logits)), str(nn.argmax(plain)),
                               ";".join(str(int(v)) for v in logits)]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdfb", description="Full-domain functional bootstrapping toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, keys=True):
        p.add_argument("--seed", default=None, help=f"seed string (overridden by ${SEED_ENV})")
        p.add_argument("--threads", type=int, default=1)
        if keys:
            p.add_argument("--keys", required=True, help="key bundle path")

    p = sub.add_parser("keygen", help="generate a key bundle")
    p.add_argument("--preset", default="TOY", help="preset name")
    p.add_argument("--out", required=True)
    p.add_argument("--eval-keys", action="store_true", help="store evaluation keys in the bundle")
    common(p, keys=False)

    p = sub.add_parser("enc", help="encrypt integers")
    common(p)
    p.add_argument("--t", type=int, default=16, help="plaintext modulus")
    p.add_argument("--large-modulus", action="store_true", help="encrypt at Q instead of q")
    p.add_argument("--out", required=True)
    p.add_argument("messages", nargs="+", type=int)

    p = sub.add_parser("dec", help="decrypt a ciphertext file")
    common(p)
    p.add_argument("--in", dest="inp", required=True)

    p = sub.add_parser("eval-lut", help="bootstrap every ciphertext through a lookup table")
    common(p)
    p.add_argument("--lut", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="print the error-probability table")
    p.add_argument("--preset", action="append", help="preset name")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out-dir", default=None, help="also write text, CSV and a PNG figure here")

    p = sub.add_parser("bench", help="time bootstraps")
    common(p, keys=False)
    p.add_argument("--preset", default="TOY", help="preset name")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--t", type=int, default=16)
    p.add_argument("--out-dir", default=None)

    p = sub.add_parser("infer", help="encrypted inference with a tiny dense model")
    common(p)
    p.add_argument("--model", default=None, help="model file; a toy model is drawn when omitted")
    p.add_argument("--inputs", default=None, help="one whitespace-separated input per line")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    return parser


def run(args) -> str:
    seed = resolve_seed(getattr(args, "seed", None))
    if args.command == "keygen":
        b = cmd_keygen(args.preset, seed, args.out, args.eval_keys)
        p = get_preset(b.preset)
        return f"wrote {args.out}: preset {p.name} n={p.n} N={p.N} q={p.q} Q={p.Q}\n"
    if args.command == "estimate":
        return cmd_estimate(args.preset, args.format, args.out_dir)
    if args.command == "bench":
        return cmd_bench(args.preset, args.trials, args.threads, seed, args.t, args.out_dir)
    bundle = load_bundle(args.keys)
    if args.command == "enc":
        cf = cmd_enc(bundle, args.messages, args.t, seed, args.large_modulus)
        Path(args.out).write_bytes(write_ciphertexts(cf))
        return f"wrote {len(cf.samples)} ciphertexts to {args.out}\n"
    if args.command == "dec":
        cf = read_ciphertexts(Path(args.inp).read_bytes())
        return "".join(f"{m}\n" for m in cmd_dec(bundle, cf))
    if args.command == "eval-lut":
        cf = read_ciphertexts(Path(args.inp).read_bytes())
        out = cmd_eval_lut(bundle, cf, Path(args.lut).read_text(), args.threads)
        Path(args.out).write_bytes(write_ciphertexts(out))
        return f"wrote {len(out.samples)} ciphertexts to {args.out}\n"
    if args.command == "infer":
        if args.model is not None:
            model = nn.load_model(Path(args.model).read_text())
            if args.inputs is None:
                raise CorruptFile("--inputs is required with --model")
            inputs = parse_inputs(Path(args.inputs).read_text())
        else:
            model, inputs = nn.generate_toy_model(Sampler(bundle.seed).fork("model"), inputs=4)
            if args.inputs is not None:
                inputs = parse_inputs(Path(args.inputs).read_text())
        return cmd_infer(bundle, model, inputs, args.format, seed)
    raise AssertionError(args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sys.stdout.write(run(args))
    except (FdfbError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
