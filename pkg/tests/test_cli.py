import numpy as np
import pytest

from fdfb import cli, nn
from fdfb.errors import CorruptFile
from fdfb.noise import emit_correctness_table
from fdfb.sampling import Sampler


@pytest.fixture
def keys(tmp_path):
    path = tmp_path / "keys.bin"
    assert cli.main(["keygen", "--preset", "TOY", "--seed", "cli-tests", "--out", str(path)]) == 0
    return path


def run_ok(capsys, argv):
    capsys.readouterr()
    assert cli.main(argv) == 0, capsys.readouterr().err
    return capsys.readouterr().out


def run_err(capsys, argv):
    capsys.readouterr()
    assert cli.main(argv) == 2
    return capsys.readouterr().err


def test_keygen_deterministic(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    paths = [tmp_path / f"k{i}.bin" for i in range(3)]
    for p, seed in zip(paths, ["a", "a", "b"]):
        run_ok(capsys, ["keygen", "--seed", seed, "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_bytes() != paths[2].read_bytes()


def test_env_seed_overrides_flag(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "from-env")
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    run_ok(capsys, ["keygen", "--seed", "x", "--out", str(a)])
    run_ok(capsys, ["keygen", "--seed", "y", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.delenv(cli.SEED_ENV)
    run_ok(capsys, ["keygen", "--seed", "from-env", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_enc_deterministic_and_roundtrip(keys, tmp_path, capsys):
    c1, c2 = tmp_path / "c1.bin", tmp_path / "c2.bin"
    msgs = ["0", "5", "63"]
    base = ["enc", "--keys", str(keys), "--t", "64", "--seed", "e"]
    run_ok(capsys, base + ["--out", str(c1)] + msgs)
    run_ok(capsys, base + ["--out", str(c2)] + msgs)
    assert c1.read_bytes() == c2.read_bytes()
    out = run_ok(capsys, ["dec", "--keys", str(keys), "--in", str(c1)])
    assert out.split() == msgs


def test_enc_large_modulus(keys, tmp_path, capsys):
    c = tmp_path / "c.bin"
    run_ok(capsys, ["enc", "--keys", str(keys), "--large-modulus", "--out", str(c), "9"])
    assert run_ok(capsys, ["dec", "--keys", str(keys), "--in", str(c)]).split() == ["9"]


def test_enc_rejects_out_of_range(keys, tmp_path, capsys):
    err = run_err(capsys, ["enc", "--keys", str(keys), "--t", "16", "--out", str(tmp_path / "c"), "16"])
    assert "MessageOutOfRange" in err


def test_unknown_preset(tmp_path, capsys):
    err = run_err(capsys, ["keygen", "--preset", "FDFB:1:1", "--out", str(tmp_path / "k")])
    assert "UnknownPreset" in err


def test_corrupt_key_file(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"not a bundle")
    err = run_err(capsys, ["dec", "--keys", str(bad), "--in", str(bad)])
    assert "CorruptFile" in err


def test_missing_file(tmp_path, capsys):
    assert "error" in run_err(capsys, ["dec", "--keys", str(tmp_path / "none"), "--in", "x"])


def test_eval_lut(keys, tmp_path, capsys):
    c, o, lut = tmp_path / "c.bin", tmp_path / "o.bin", tmp_path / "f.lut"
    msgs = [0, 7, 8, 15]
    run_ok(capsys, ["enc", "--keys", str(keys), "--out", str(c)] + [str(m) for m in msgs])
    lut.write_text("# square mod 16\n" + " ".join(str(m * m % 16) for m in range(16)) + "\n")
    run_ok(capsys, ["eval-lut", "--keys", str(keys), "--lut", str(lut), "--in", str(c), "--out", str(o),
                    "--threads", "2"])
    out = run_ok(capsys, ["dec", "--keys", str(keys), "--in", str(o)])
    assert [int(v) for v in out.split()] == [m * m % 16 for m in msgs]


def test_eval_lut_changes_plaintext_modulus(keys, tmp_path, capsys):
    c, o, lut = tmp_path / "c.bin", tmp_path / "o.bin", tmp_path / "f.lut"
    run_ok(capsys, ["enc", "--keys", str(keys), "--out", str(c), "3", "12"])
    lut.write_text("t_out 4\n" + " ".join(str(m // 4) for m in range(16)))
    run_ok(capsys, ["eval-lut", "--keys", str(keys), "--lut", str(lut), "--in", str(c), "--out", str(o)])
    assert run_ok(capsys, ["dec", "--keys", str(keys), "--in", str(o)]).split() == ["0", "3"]


def test_eval_lut_budget_exceeded(keys, tmp_path, capsys):
    c, lut = tmp_path / "c.bin", tmp_path / "f.lut"
    run_ok(capsys, ["enc", "--keys", str(keys), "--t", "128", "--out", str(c), "1"])
    lut.write_text(" ".join(str(m) for m in range(128)))
    err = run_err(capsys, ["eval-lut", "--keys", str(keys), "--lut", str(lut), "--in", str(c),
                           "--out", str(tmp_path / "o")])
    assert "BudgetExceeded" in err


@pytest.mark.parametrize("text", ["", "1 2 3", "t_out\n" + "0 " * 16, " ".join(["99"] * 16), "a " * 16])
def test_eval_lut_bad_table(keys, tmp_path, capsys, text):
    c, lut = tmp_path / "c.bin", tmp_path / "f.lut"
    run_ok(capsys, ["enc", "--keys", str(keys), "--out", str(c), "1"])
    lut.write_text(text)
    err = run_err(capsys, ["eval-lut", "--keys", str(keys), "--lut", str(lut), "--in", str(c),
                           "--out", str(tmp_path / "o")])
    assert "CorruptFile" in err


def test_preset_mismatch(keys, tmp_path, capsys):
    other, c = tmp_path / "other.bin", tmp_path / "c.bin"
    run_ok(capsys, ["keygen", "--preset", "FDFB:80:6", "--out", str(other)])
    run_ok(capsys, ["enc", "--keys", str(keys), "--out", str(c), "1"])
    assert "ParamMismatch" in run_err(capsys, ["dec", "--keys", str(other), "--in", str(c)])


def test_parse_lut():
    assert cli.parse_lut("1 2 # c\n 0x3\nt_out 8\n") == ([1, 2, 3], 8)
    with pytest.raises(CorruptFile):
        cli.parse_lut("t_out 4\nt_out 4\n1")


def test_estimate_matches_oracle(tmp_path, capsys):
    out = run_ok(capsys, ["estimate", "--preset", "FDFB:80:6", "--format", "csv", "--out-dir", str(tmp_path)])
    header, row = out.strip().splitlines()
    row_cells = row.split(",")
    oracle = emit_correctness_table(["FDFB:80:6"])[0]
    assert row_cells[0] == "FDFB:80:6"
    assert row_cells[1:7] == [c.render() for c in oracle.bootstrap]
    for name in ("correctness.txt", "correctness.csv", "budget.csv", "correctness.png"):
        assert (tmp_path / name).stat().st_size > 0
    assert (tmp_path / "correctness.png").read_bytes()[:4] == b"\x89PNG"


def test_estimate_text_default(capsys):
    out = run_ok(capsys, ["estimate"])
    assert "FDFB:100:8" in out and "TFHE:80:2" in out


def test_bench(tmp_path, capsys):
    out = run_ok(capsys, ["bench", "--trials", "2", "--seed", "b", "--out-dir", str(tmp_path)])
    fields = dict(line.split() for line in out.strip().splitlines())
    assert fields["trials"] == "2" and fields["errors"] == "0"
    assert (tmp_path / "bench.png").exists()


def test_infer_with_model_file(keys, tmp_path, capsys):
    model, xs = nn.generate_toy_model(Sampler("cli-net"), dims=(10, 3, 2), density=0.5, inputs=2)
    mpath, ipath = tmp_path / "m.txt", tmp_path / "x.txt"
    mpath.write_text(nn.dump_model(model))
    ipath.write_text("\n".join(" ".join(str(v) for v in x) for x in xs))
    out = run_ok(capsys, ["infer", "--keys", str(keys), "--model", str(mpath), "--inputs", str(ipath),
                          "--format", "csv"])
    lines = out.strip().splitlines()
    assert lines[0] == "index,encrypted_argmax,plaintext_argmax,logits"
    for i, line in enumerate(lines[1:]):
        idx, enc, plain, logits = line.split(",")
        assert enc == plain
        assert [int(v) for v in logits.split(";")] == nn.plaintext_forward(model, xs[i]).tolist()


def test_infer_rejects_wrong_width(keys, tmp_path, capsys):
    model, _ = nn.generate_toy_model(Sampler("cli-net"), dims=(10, 3, 2), density=0.5, inputs=2)
    mpath, ipath = tmp_path / "m.txt", tmp_path / "x.txt"
    mpath.write_text(nn.dump_model(model))
    ipath.write_text("1 0 1\n")
    assert "CorruptFile" in run_err(capsys, ["infer", "--keys", str(keys), "--model", str(mpath),
                                             "--inputs", str(ipath)])


def test_parse_inputs():
    assert cli.parse_inputs("1 0\n0 1\n").tolist() == [[1, 0], [0, 1]]
    with pytest.raises(CorruptFile):
        cli.parse_inputs("1 0\n1\n")
