import json

import numpy as np
import pytest

from gebq.bench import make_synthetic
from gebq.cli import main

F32 = np.float32


@pytest.fixture
def workdir(tmp_path):
    data = make_synthetic(20000, "smooth", seed=5)
    inp = tmp_path / "in.bin"
    data.tofile(inp)
    return tmp_path, inp, data


class TestHappyPath:
    def test_compress_decompress_verify_roundtrip(self, workdir, capsys):
        tmp, inp, data = workdir
        out = tmp / "out.gebq"
        rec = tmp / "rec.bin"
        assert main(["compress", "--mode", "abs", "--eb", "1e-3", "--dtype", "f32",
                     "-i", str(inp), "-o", str(out)]) == 0
        assert out.stat().st_size > 0
        assert main(["decompress", "-i", str(out), "-o", str(rec)]) == 0
        assert rec.stat().st_size == inp.stat().st_size
        assert main(["verify", "--mode", "abs", "--eb", "1e-3", "--dtype", "f32",
                     "--original", str(inp), "--reconstructed", str(rec)]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_noa_roundtrip_with_computed_range(self, workdir):
        tmp, inp, _ = workdir
        out = tmp / "o.gebq"
        rec = tmp / "r.bin"
        assert main(["compress", "--mode", "noa", "--eb", "1e-3", "-i", str(inp), "-o", str(out)]) == 0
        assert main(["decompress", "-i", str(out), "-o", str(rec)]) == 0
        assert main(["verify", "--mode", "noa", "--eb", "1e-3",
                     "--original", str(inp), "--reconstructed", str(rec)]) == 0

    def test_json_reports(self, workdir, capsys):
        tmp, inp, _ = workdir
        out = tmp / "o.gebq"
        assert main(["compress", "--mode", "rel", "--eb", "1e-2", "-i", str(inp),
                     "-o", str(out), "--report", "json"]) == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["values_total"] == 20000

    def test_identical_invocations_identical_files(self, workdir):
        tmp, inp, _ = workdir
        a, b = tmp / "a.gebq", tmp / "b.gebq"
        for path, threads in ((a, "1"), (b, "16")):
            assert main(["compress", "--mode", "abs", "--eb", "1e-3",
                         "--threads", threads, "-i", str(inp), "-o", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_sampled_sweep(self, capsys):
        assert main(["sweep", "--mode", "abs", "--eb", "1e-3", "--samples", "100000",
                     "--seed", "7"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_f64_sweep(self, capsys):
        assert main(["sweep", "--mode", "rel", "--eb", "1e-3", "--dtype", "f64",
                     "--samples", "100000"]) == 0

    def test_golden(self, capsys):
        assert main(["golden"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_bench_csv(self, workdir, capsys):
        tmp, inp, _ = workdir
        manifest = tmp / "m.tsv"
        manifest.write_text(f"SYN\t{inp}\tf32\t20000\n")
        csv_out = tmp / "runs.csv"
        assert main(["bench", "--manifest", str(manifest), "--modes", "abs",
                     "--ebs", "1e-3", "--variants", "protected,unprotected",
                     "--reps", "1", "-o", str(csv_out)]) == 0
        lines = csv_out.read_text().strip().splitlines()
        assert lines[0].startswith("dataset,file,mode,eb,variant")
        assert len(lines) == 3


class TestFailurePaths:
    def test_verification_failure_is_exit_1(self, workdir, capsys):
        tmp, inp, data = workdir
        bad = tmp / "bad.bin"
        (data + F32(1.0)).tofile(bad)
        assert main(["verify", "--mode", "abs", "--eb", "1e-3",
                     "--original", str(inp), "--reconstructed", str(bad)]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_unprotected_sweep_failure_is_exit_1(self, capsys):
        assert main(["sweep", "--mode", "abs", "--eb", "1e-3", "--samples", "3000000",
                     "--seed", "1", "--unsafe-no-double-check"]) == 1

    def test_usage_errors_are_exit_2(self, workdir, capsys):
        tmp, inp, _ = workdir
        assert main(["compress", "--mode", "abs", "--eb", "-1",
                     "-i", str(inp), "-o", str(tmp / "x")]) == 2
        assert main(["compress", "--mode", "abs", "--eb", "nan",
                     "-i", str(inp), "-o", str(tmp / "x")]) == 2
        assert main(["compress", "--mode", "warp", "--eb", "1e-3",
                     "-i", str(inp), "-o", str(tmp / "x")]) == 2
        assert main(["sweep", "--mode", "abs", "--eb", "1e-3"]) == 2  # no scope
        assert main(["sweep", "--mode", "noa", "--eb", "1e-3", "--samples", "10"]) == 2
        capsys.readouterr()

    def test_io_errors_are_exit_3(self, workdir, capsys):
        tmp, inp, _ = workdir
        assert main(["compress", "--mode", "abs", "--eb", "1e-3",
                     "-i", str(tmp / "missing.bin"), "-o", str(tmp / "x")]) == 3
        # ragged input file
        ragged = tmp / "ragged.bin"
        ragged.write_bytes(bytes(401))
        assert main(["compress", "--mode", "abs", "--eb", "1e-3",
                     "-i", str(ragged), "-o", str(tmp / "x")]) == 3
        # not a stream
        assert main(["decompress", "-i", str(inp), "-o", str(tmp / "y")]) == 3
        capsys.readouterr()

    def test_corrupt_stream_is_exit_3(self, workdir):
        tmp, inp, _ = workdir
        out = tmp / "o.gebq"
        main(["compress", "--mode", "abs", "--eb", "1e-3", "-i", str(inp), "-o", str(out)])
        blob = bytearray(out.read_bytes())
        blob[0] ^= 0xFF
        out.write_bytes(bytes(blob))
        assert main(["decompress", "-i", str(out), "-o", str(tmp / "r.bin")]) == 3
