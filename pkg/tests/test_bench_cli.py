"""Benchmark helpers, accuracy experiments and the command-line harness."""

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from adaptfft._validation import parse_sizes
from adaptfft.bench import (
    ACCURACY_FIELDS,
    BENCH_FIELDS,
    accuracy,
    bench,
    bit_reversal_permutation,
    bit_reverse,
    fft_error,
    textbook_fft,
    write_records,
)
from adaptfft.cli import main, read_samples, write_samples
from adaptfft.oracle import naive_dft, rel_l2_error


def test_bit_reversal():
    assert bit_reverse(1, 3) == 4
    assert list(bit_reversal_permutation(8)) == [0, 4, 2, 6, 1, 5, 3, 7]


@pytest.mark.parametrize("n", [1, 2, 8, 64])
@pytest.mark.parametrize("sign", [-1, 1])
def test_textbook_fft(n, sign):
    x = np.random.default_rng(n).standard_normal(n) + 1j
    assert rel_l2_error(textbook_fft(x, sign), naive_dft(x, sign)) <= 1e-14


def test_textbook_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        textbook_fft(np.ones(6))


def test_bench_record(tmp_path):
    (r,) = bench([256], repetitions=1, min_time=1e-4)
    assert r.n == 256 and r.mode == "estimate" and r.seconds > 0 and r.ratio > 0
    write_records(tmp_path / "b.csv", [r], BENCH_FIELDS)
    assert tuple(next(csv.reader(open(tmp_path / "b.csv")))) == BENCH_FIELDS
    with pytest.raises(ValueError):
        bench([16], baseline="numpy")


def test_accuracy_records():
    recs = accuracy([64, 256], twiddle="rec-naive", trials=1)
    assert [r.n for r in recs] == [64, 256]
    assert all(r.twiddle == "rec-naive" and r.fft_rel_rms_error < 1e-12 for r in recs)
    assert fft_error(64) < 1e-15
    assert "fft_rel_rms_error" in ACCURACY_FIELDS


def test_parse_sizes():
    assert parse_sizes("2^10..2^12,3600") == [1024, 2048, 4096, 3600]
    assert parse_sizes("16, 2^5") == [16, 32]
    with pytest.raises(ValueError):
        parse_sizes("")
    with pytest.raises(ValueError):
        parse_sizes("ten")
    with pytest.raises(ValueError):
        parse_sizes("0")


# ---- CLI -------------------------------------------------------------------------


def test_sample_file_round_trip(tmp_path):
    z = np.array([1 + 2j, -3.5 + 0.25j])
    write_samples(tmp_path / "s.bin", z)
    raw = np.fromfile(tmp_path / "s.bin", dtype="<f8")
    np.testing.assert_array_equal(raw, [1, 2, -3.5, 0.25])
    np.testing.assert_array_equal(read_samples(tmp_path / "s.bin"), z)


def test_transform_impulse_and_wisdom(tmp_path, capsys):
    inp, out, wis = tmp_path / "x.bin", tmp_path / "y.bin", tmp_path / "w.txt"
    write_samples(inp, np.array([1, 0, 0, 0], complex))
    assert main(["transform", "--n", "4", "--in", str(inp), "--out", str(out), "--wisdom", str(wis)]) == 0
    np.testing.assert_array_equal(read_samples(out), np.ones(4))
    assert wis.read_text() == "# adaptfft wisdom v1\ndft n={4:1:1} v={} inplace=0 sign=-1 := (direct 4)\n"
    # second run reads the wisdom and never times anything
    assert main(["transform", "--n", "4", "--mode", "measure", "--in", str(inp), "--out", str(out), "--wisdom", str(wis)]) == 0
    assert "timings=0" in capsys.readouterr().out


def test_transform_batch_and_inverse(tmp_path):
    x = np.random.default_rng(1).standard_normal(24) + 0j
    inp, out = tmp_path / "x.bin", tmp_path / "y.bin"
    write_samples(inp, x)
    assert main(["transform", "--n", "8", "--in", str(inp), "--out", str(out)]) == 0
    y = read_samples(out)
    np.testing.assert_allclose(y.reshape(3, 8), [naive_dft(r) for r in x.reshape(3, 8)], atol=1e-13)
    write_samples(inp, y)
    assert main(["transform", "--n", "8", "--inverse", "--in", str(inp), "--out", str(out)]) == 0
    np.testing.assert_allclose(read_samples(out), 8 * x, atol=1e-12)


def test_transform_errors(tmp_path, capsys):
    inp = tmp_path / "x.bin"
    write_samples(inp, np.ones(6, complex))
    assert main(["transform", "--n", "4", "--in", str(inp), "--out", str(tmp_path / "y")]) == 2
    assert "not a positive multiple" in capsys.readouterr().err
    np.ones(3).tofile(inp)
    assert main(["transform", "--n", "1", "--in", str(inp), "--out", str(tmp_path / "y")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense\n")
    write_samples(inp, np.ones(4, complex))
    assert main(["transform", "--n", "4", "--in", str(inp), "--out", str(tmp_path / "y"), "--wisdom", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_cachesim_cli(tmp_path, capsys):
    assert main(["cachesim", "--strategy", "bf", "--n", "8", "--Z", "2", "--csv", str(tmp_path / "c.csv")]) == 0
    assert "misses=24 accesses=48" in capsys.readouterr().out
    assert main(["cachesim", "--strategy", "bf", "--n", "12", "--Z", "2"]) == 2


def test_codelet_cli(tmp_path, capsys):
    assert main(["codelet", "--n", "4", "--emit", "stats"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert (stats["adds"], stats["mults"]) == (16, 0)
    out = tmp_path / "k.c"
    assert main(["codelet", "--n", "8", "--alg", "splitradix", "--out", str(out)]) == 0
    assert out.read_text().startswith("/* codelet kind=notw n=8 alg=splitradix sign=-1 */")
    assert main(["codelet", "--n", "5", "--emit", "dag-json", "--kind", "twiddle"]) == 0
    assert json.loads(capsys.readouterr().out)["spec"]["kind"] == "twiddle"
    assert main(["codelet", "--n", "6", "--alg", "splitradix"]) == 2


def test_bench_and_accuracy_cli(tmp_path, capsys):
    assert main(["bench", "--sizes", "64", "--repetitions", "1", "--csv", str(tmp_path / "b.csv")]) == 0
    assert "ratio=" in capsys.readouterr().out
    assert main(["accuracy", "--sizes", "64,128", "--twiddle", "twotable", "--trials", "1"]) == 0
    assert capsys.readouterr().out.count("twiddle=twotable") == 2


def test_selftest_cli(capsys):
    assert main(["selftest", "--n", "27", "--trials", "5"]) == 0
    assert "PASS" in capsys.readouterr().out.upper()


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "adaptfft.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("transform", "bench", "accuracy", "cachesim", "codelet", "selftest"):
        assert cmd in r.stdout
