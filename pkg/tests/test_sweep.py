import numpy as np
import pytest

from gebq.quantizers import ABS, NOA, REL
from gebq.sweep import (
    CLASS_NAMES,
    structured_f64_bits,
    sweep_f32,
    sweep_f32_random,
    sweep_f64,
)


def total_of(report, outcome):
    return sum(c[outcome] for c in report.per_class.values())


class TestF32Subranges:
    def test_denormal_zero_band_abs(self):
        # patterns 0x00000000..0x01000000: zeros, denormals, small normals
        (r,) = sweep_f32(ABS, [1e-3], count=1 << 24)
        assert r.violations == 0
        assert r.patterns_tested == 1 << 24
        assert r.per_class["zero"]["quantized"] == 1  # +0 quantizes to bin 0

    def test_special_band_rel(self):
        # 0x7F000000..0x80000000 covers top normals, +inf, and all +NaN payloads
        (r,) = sweep_f32(REL, [1e-3], start=0x7F000000, count=1 << 24)
        assert r.violations == 0
        assert r.per_class["infinity"]["lossless"] == 1
        assert r.per_class["infinity"]["quantized"] == 0
        assert r.per_class["nan"]["lossless"] == (1 << 23) - 1
        assert r.per_class["nan"]["quantized"] == 0

    def test_rel_exponent_zero_band_is_all_lossless(self):
        (r,) = sweep_f32(REL, [1e-3], count=1 << 24)
        assert r.per_class["zero"]["lossless"] == 1
        assert r.per_class["denormal"]["lossless"] == (1 << 23) - 1
        assert r.per_class["denormal"]["quantized"] == 0
        assert r.per_class["zero"]["quantized"] == 0

    def test_noa_pinned_range(self):
        for rng in (1.0, 1e10, 1e-10):
            (r,) = sweep_f32(NOA, [1e-3], value_range=rng, start=0x3F000000, count=1 << 20)
            assert r.violations == 0, rng

    def test_tally_sums(self):
        (r,) = sweep_f32(ABS, [1e-1], start=0x40000000, count=1 << 20)
        assert total_of(r, "quantized") + total_of(r, "lossless") + total_of(r, "violation") == r.patterns_tested

    def test_chunk_independence(self):
        a = sweep_f32(ABS, [1e-3], start=0x40000000, count=1 << 20, chunk=1 << 20)[0]
        b = sweep_f32(ABS, [1e-3], start=0x40000000, count=1 << 20, chunk=4097)[0]
        assert a.per_class == b.per_class

    def test_worker_independence(self):
        a = sweep_f32(REL, [1e-3], start=0x10000000, count=1 << 22, workers=1)[0]
        b = sweep_f32(REL, [1e-3], start=0x10000000, count=1 << 22, workers=8)[0]
        assert a.per_class == b.per_class

    def test_unprotected_shows_violations_somewhere(self):
        # the whole point of the double check: without it, rounding near bin
        # edges breaks the bound for some patterns
        (r,) = sweep_f32(ABS, [1e-3], start=0x3F800000, count=1 << 22, unsafe=True)
        assert r.violations > 0
        assert r.first_violation_bits is not None

    def test_multiple_bounds_give_one_report_each(self):
        reports = sweep_f32(ABS, [1e-1, 1e-3], start=0x42000000, count=1 << 18)
        assert len(reports) == 2
        assert all(rep.violations == 0 for rep in reports)


class TestF32Random:
    def test_seeded_sampled_sweep(self):
        (r,) = sweep_f32_random(ABS, [1e-3], n=200000, seed=42)
        assert r.violations == 0
        assert r.patterns_tested == 200000

    def test_rerun_identical(self):
        a = sweep_f32_random(REL, [1e-3], n=100000, seed=7)[0]
        b = sweep_f32_random(REL, [1e-3], n=100000, seed=7)[0]
        assert a.per_class == b.per_class


class TestF64:
    def test_structured_corpus_shape(self):
        bits = structured_f64_bits(seed=0)
        assert len(bits) == 2048 * 6 * 2
        assert len(np.unique(bits)) > len(bits) * 0.99
        expo = (bits >> np.uint64(52)) & np.uint64(0x7FF)
        assert set(np.unique(expo)) == set(range(2048))
        # both signs present
        assert (bits >> np.uint64(63) == 1).sum() == len(bits) // 2
        # deterministic given the seed
        assert np.array_equal(bits, structured_f64_bits(seed=0))
        assert not np.array_equal(bits, structured_f64_bits(seed=1))

    @pytest.mark.parametrize("mode", [ABS, REL])
    def test_structured_plus_random(self, mode):
        (r,) = sweep_f64(mode, [1e-3], n_random=500000, seed=1)
        assert r.violations == 0
        assert r.patterns_tested == 2048 * 12 + 500000
        assert r.per_class["infinity"]["lossless"] >= 2
        assert r.per_class["nan"]["quantized"] == 0

    def test_neg_inf_pattern_lossless(self):
        (r,) = sweep_f64(ABS, [1e-3], n_random=0, seed=0)
        assert r.per_class["infinity"]["lossless"] == 2  # +-inf from the structured corpus
        assert r.violations == 0

    def test_report_fields(self):
        (r,) = sweep_f64(ABS, [1e-3], n_random=1000, seed=9)
        d = r.to_dict()
        for key in ("mode", "eb", "width", "patterns_tested", "violations",
                    "lossless_fraction", "per_class", "elapsed"):
            assert key in d
        assert set(d["per_class"]) == set(CLASS_NAMES)
