import json

import numpy as np
import pytest

from gebq import QuantConfig, compress, decompress_to_array
from gebq.quantizers import ABS, NOA, REL
from gebq.verify import (
    GOLDEN_CONFIGS,
    GOLDEN_COUNT,
    LengthMismatch,
    check_golden,
    compute_golden_record,
    golden_corpus_bits,
    load_golden_record,
    verify,
    verify_stream,
)

F32 = np.float32


class TestVerifyPredicates:
    def test_identity_passes(self):
        r = verify(np.array([1.0], dtype=F32), np.array([1.0], dtype=F32), ABS, 1e-3)
        assert r.passed and r.max_abs_err == 0.0

    def test_abs_bound_pass_and_fail(self):
        o = np.array([3.2], dtype=F32)
        rcn = np.array([3.0], dtype=F32)
        assert verify(o, rcn, ABS, 0.5).passed
        r = verify(o, rcn, ABS, 0.1)
        assert not r.passed
        assert r.violations == 1 and r.first_violation_index == 0

    def test_equality_with_bound_passes(self):
        o = np.array([7.5], dtype=F32)
        rcn = np.array([8.0], dtype=F32)
        assert verify(o, rcn, ABS, 0.5).passed

    def test_special_bit_exactness_required(self):
        o = np.array([0x7FC00000], dtype=np.uint32).view(F32)
        rcn = np.array([0x7FC00001], dtype=np.uint32).view(F32)
        r = verify(o, rcn, ABS, 1e-3)
        assert not r.passed
        assert r.special_mismatch_count == 1
        assert r.special_mismatches[0] == (0, 0x7FC00000, 0x7FC00001)
        assert r.violations == 0  # special mismatches are tracked separately

    def test_nan_reconstruction_of_normal_is_violation(self):
        o = np.array([1.0], dtype=F32)
        rcn = np.array([np.nan], dtype=F32)
        assert verify(o, rcn, ABS, 1e-3).violations == 1

    def test_rel_predicate(self):
        o = np.array([3.0, -3.0], dtype=F32)
        rcn = np.array([4.0, -4.0], dtype=F32)
        assert verify(o, rcn, REL, 1.0).passed
        assert verify(o, rcn, REL, 0.1).violations == 2

    def test_rel_sign_flip_is_violation(self):
        o = np.array([3.0], dtype=F32)
        rcn = np.array([-3.0], dtype=F32)
        assert not verify(o, rcn, REL, 10.0).passed

    def test_rel_implies_erel_bound(self):
        # accepted ratio range is inside the |1 - r/o| <= eb ball
        rng = np.random.default_rng(0)
        o = np.exp(rng.uniform(-20, 20, 5000)).astype(F32)
        eb = 1e-2
        stream, _ = compress(o, QuantConfig(mode=REL, eb=eb))
        r = decompress_to_array(stream)
        rep = verify(o, r, REL, eb)
        assert rep.passed
        e_rel = np.abs(1.0 - r.astype(np.float64) / o.astype(np.float64))
        assert float(e_rel.max()) <= eb * (1 + 1e-7)

    def test_noa_needs_range(self):
        o = np.array([1.0], dtype=F32)
        with pytest.raises(ValueError):
            verify(o, o, NOA, 1e-3)
        assert verify(o, o, NOA, 1e-3, 10.0).passed

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            verify(np.zeros(2, F32), np.zeros(3, F32), ABS, 1e-3)

    def test_never_crashes_on_any_pattern(self):
        rng = np.random.default_rng(1)
        o = rng.integers(0, 2**32, 20000, dtype=np.uint64).astype(np.uint32).view(F32)
        r = rng.integers(0, 2**32, 20000, dtype=np.uint64).astype(np.uint32).view(F32)
        for mode, rng_arg in ((ABS, None), (REL, None), (NOA, 5.0)):
            verify(o, r, mode, 1e-3, rng_arg)  # must not raise

    def test_json_and_summary(self):
        o = np.array([1.0], dtype=F32)
        rep = verify(o, o, ABS, 1e-3)
        d = json.loads(rep.to_json())
        for key in ("mode", "eb", "count", "max_abs_err", "max_rel_ratio_deviation",
                    "max_noa_err", "violations", "first_violation_index",
                    "special_mismatches", "passed"):
            assert key in d
        assert "PASS" in rep.summary()

    def test_verify_stream_helper(self):
        vals = np.linspace(-1, 1, 1000, dtype=F32)
        stream, _ = compress(vals, QuantConfig(mode=NOA, eb=1e-3))
        assert verify_stream(vals, stream).passed


class TestGolden:
    def test_corpus_is_deterministic_and_mixed(self):
        a = golden_corpus_bits()
        b = golden_corpus_bits()
        assert np.array_equal(a, b)
        assert len(a) == GOLDEN_COUNT
        f32bits = (a & np.uint64(0xFFFFFFFF)).astype(np.uint32)
        expo = (f32bits >> 23) & 0xFF
        # unfiltered splitmix words cover every value class
        assert (expo == 255).sum() > 0 and (expo == 0).sum() > 0

    def test_same_build_reruns_identical(self):
        a = compute_golden_record(workers=1)
        b = compute_golden_record(workers=1)
        assert a == b

    def test_committed_digest_matches(self):
        result = check_golden(workers=1)
        assert result["passed"], result

    def test_thread_counts_1_4_16_identical(self):
        recs = [compute_golden_record(workers=w) for w in (1, 4, 16)]
        assert recs[0] == recs[1] == recs[2]

    def test_perturbed_corpus_detected(self):
        record = load_golden_record()
        # flip one bit in one block of the first config by simulating with a
        # doctored expected record instead (cheap, equivalent detection path)
        doctored = json.loads(json.dumps(record))
        doctored["configs"][0]["block_sha256_16"][3] = "0" * 16
        doctored["configs"][0]["sha256"] = "0" * 64
        doctored["overall"] = "0" * 64
        result = check_golden(expected=doctored, workers=1)
        assert not result["passed"]
        assert result["first_difference"] == (0, 3)

    def test_record_structure(self):
        record = load_golden_record()
        assert len(record["configs"]) == len(GOLDEN_CONFIGS)
        for c in record["configs"]:
            assert len(c["sha256"]) == 64
            assert len(c["block_sha256_16"]) == GOLDEN_COUNT // 4096
