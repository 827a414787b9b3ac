import logging
import pickle
import shutil
import struct
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from histwords_convert import (
    ConvertError,
    UpstreamDecade,
    convert_all,
    convert_decade,
    find_decades,
)
from histwords_convert.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def _decade(year=1800, root=FIXTURES):
    return UpstreamDecade(year, root / f"{year}-w.npy", root / f"{year}-vocab.pkl")


def _primary_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "diachron", *args], capture_output=True, text=True
    )


def _parse_text_row(path, token):
    """Independent minimal parse of one line of the text format."""
    lines = path.read_text(encoding="utf-8").split("\n")
    count, dim = (int(x) for x in lines[0].split(" "))
    for line in lines[1 : count + 1]:
        fields = line.split(" ")
        if fields[0] == token:
            assert len(fields) == dim + 1
            return np.array([np.float32(float(v)) for v in fields[1:]], dtype=np.float32)
    raise AssertionError(f"{token} not found in {path}")


class TestConvertDecade:
    def test_tiny_fixture_byte_exact(self, tmp_path):
        out = tmp_path / "1800.txt"
        words, dim = convert_decade(_decade(), out)
        assert (words, dim) == (3, 4)
        assert out.read_bytes() == (FIXTURES / "expected_1800.txt").read_bytes()

    def test_mismatch_rejected(self, tmp_path):
        with pytest.raises(ConvertError) as exc:
            convert_decade(_decade(1900, FIXTURES / "mismatch"), tmp_path / "x.txt")
        assert exc.value.kind == "count-mismatch"
        assert "1900" in exc.value.detail

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConvertError) as exc:
            convert_decade(
                UpstreamDecade(1800, tmp_path / "none.npy", tmp_path / "none.pkl"),
                tmp_path / "x.txt",
            )
        assert exc.value.kind == "io"

    def test_whitespace_and_duplicate_tokens_dropped_with_index(self, tmp_path, caplog):
        np.save(tmp_path / "1900-w.npy", np.eye(4, 2, dtype=np.float32))
        with open(tmp_path / "1900-vocab.pkl", "wb") as fh:
            pickle.dump(["good", "bad token", "good", "fine"], fh)
        with caplog.at_level(logging.WARNING, logger="histwords_convert"):
            words, dim = convert_decade(_decade(1900, tmp_path), tmp_path / "o.txt")
        assert (words, dim) == (2, 2)
        messages = [r.message for r in caplog.records]
        assert any("token 1" in m and "not representable" in m for m in messages)
        assert any("token 2" in m and "duplicate" in m for m in messages)
        body = (tmp_path / "o.txt").read_text().splitlines()
        assert body[0] == "2 2"
        assert [line.split()[0] for line in body[1:]] == ["good", "fine"]

    def test_idempotent_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        convert_decade(_decade(), a)
        convert_decade(_decade(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_py2_style_bytes_vocab(self, tmp_path):
        np.save(tmp_path / "1920-w.npy", np.ones((2, 2), dtype=np.float32))
        with open(tmp_path / "1920-vocab.pkl", "wb") as fh:
            pickle.dump([b"alpha", b"beta"], fh, protocol=2)
        words, _ = convert_decade(_decade(1920, tmp_path), tmp_path / "o.txt")
        assert words == 2
        assert (tmp_path / "o.txt").read_text().splitlines()[1].startswith("alpha ")


class TestConvertAll:
    def test_two_fixture_decades(self, tmp_path):
        manifest = tmp_path / "manifest.tsv"
        summary = convert_all(FIXTURES, tmp_path / "out", manifest)
        assert [(y, w) for y, w, _ in summary] == [(1800, 3), (1810, 2)]
        assert manifest.read_text() == "1800\tout/1800.txt\n1810\tout/1810.txt\n"

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ConvertError) as exc:
            convert_all(tmp_path, tmp_path / "out", tmp_path / "m.tsv")
        assert exc.value.kind == "no-decades-found"

    def test_missing_vocab_aborts_naming_decade(self, tmp_path):
        shutil.copy(FIXTURES / "1800-w.npy", tmp_path / "1800-w.npy")
        with pytest.raises(ConvertError) as exc:
            find_decades(tmp_path)
        assert exc.value.kind == "missing-vocab"
        assert "1800" in exc.value.detail


class TestCli:
    def test_success_and_manifest_consumable_by_primary(self, tmp_path):
        manifest = tmp_path / "converted" / "manifest.tsv"
        code = main([
            "--in", str(FIXTURES), "--out", str(tmp_path / "converted"),
            "--manifest", str(manifest),
        ])
        assert code == 0
        result = _primary_cli("stats", "--manifest", str(manifest))
        assert result.returncode == 0
        assert result.stdout == "epoch,word_count\n1800,3\n1810,2\n"

    def test_mismatch_exit_code(self, tmp_path, capsys):
        code = main([
            "--in", str(FIXTURES / "mismatch"), "--out", str(tmp_path / "o"),
            "--manifest", str(tmp_path / "m.tsv"),
        ])
        assert code == 2
        assert capsys.readouterr().err.splitlines()[-1].startswith(
            "error: count-mismatch: "
        )

    def test_usage_error(self):
        result = subprocess.run(
            [sys.executable, "-m", "histwords_convert", "--in", "x"],
            capture_output=True, text=True,
        )
        assert result.returncode == 1
        assert result.stderr.startswith("error: usage: ")


def test_acceptance_converter_fidelity(tmp_path):
    """Byte-exact fixture conversion + primary-tool load-back with bit equality."""
    try:
        # tiny fixture: known bytes
        out = tmp_path / "1800.txt"
        convert_decade(_decade(), out)
        assert out.read_bytes() == (FIXTURES / "expected_1800.txt").read_bytes()

        # synthetic full-entropy decade: converted file loads in the primary
        # tool and preserves every sampled vector bit for bit
        rng = np.random.default_rng(77)
        n, dim = 160, 8
        upstream = rng.standard_normal((n, dim)).astype(np.float32)
        upstream[3] = 0.0  # a dead row, as in the real distribution
        vocab = [f"tok{i}" for i in range(n)]
        np.save(tmp_path / "1850-w.npy", upstream)
        with open(tmp_path / "1850-vocab.pkl", "wb") as fh:
            pickle.dump(vocab, fh, protocol=2)

        converted = tmp_path / "1850.txt"
        words, _ = convert_decade(_decade(1850, tmp_path), converted)
        assert words == n  # vocab count equals upstream vocabulary length

        result = _primary_cli(
            "convert", "--in", str(converted), "--out", str(tmp_path / "1850.dwe")
        )
        assert result.returncode == 0, result.stderr

        # native file written by the primary holds identical float32 bits
        payload = (tmp_path / "1850.dwe").read_bytes()
        assert payload[:4] == b"DWE1"
        _, hdim, hcount = struct.unpack_from("<HIQ", payload, 4)
        assert (hdim, hcount) == (dim, n)

        sample = rng.choice(n, size=100, replace=False)
        for i in sample:
            got = _parse_text_row(converted, vocab[i])
            assert got.tobytes() == upstream[i].tobytes()
    except BaseException:
        print("ACCEPTANCE converter-fidelity: FAIL", flush=True)
        raise
    print("ACCEPTANCE converter-fidelity: PASS", flush=True)
