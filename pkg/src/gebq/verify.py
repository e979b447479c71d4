"""Independent checking of reconstructed data against the error-bound
definitions, plus the golden-vector determinism check.

The verifier evaluates the same IEEE predicates the compressor's
double-check uses (ABS/NOA: |orig - recon| <= eb_eff; REL: same sign and
q = |recon|/|orig| with q <= 1+eb and q*(1+eb) >= 1), so the two can never
disagree about an accepted value.  Special values (NaN, infinities) must
round-trip bit-exactly, payloads included.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from . import _kernels, pipeline
from .quantizers import ABS, MODES, NOA, REL, InvalidBound, QuantConfig, _derive

__all__ = [
    "VerifyReport",
    "LengthMismatch",
    "verify",
    "verify_stream",
    "GOLDEN_SEED",
    "GOLDEN_COUNT",
    "GOLDEN_CONFIGS",
    "golden_corpus_bits",
    "compute_golden_record",
    "check_golden",
]

_SPECIAL_MISMATCH_CAP = 10000


class LengthMismatch(ValueError):
    pass


@dataclass
class VerifyReport:
    mode: str
    eb: float
    count: int
    max_abs_err: float = 0.0
    max_rel_ratio_deviation: float = 0.0
    max_noa_err: float = 0.0
    violations: int = 0
    first_violation_index: Optional[int] = None
    special_mismatches: list = field(default_factory=list)
    special_mismatch_count: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.special_mismatch_count == 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "eb": self.eb,
            "count": self.count,
            "max_abs_err": self.max_abs_err,
            "max_rel_ratio_deviation": self.max_rel_ratio_deviation,
            "max_noa_err": self.max_noa_err,
            "violations": self.violations,
            "first_violation_index": self.first_violation_index,
            "special_mismatches": [list(m) for m in self.special_mismatches],
            "special_mismatch_count": self.special_mismatch_count,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return (
            f"{state} mode={self.mode} eb={self.eb:g} count={self.count} "
            f"violations={self.violations} special_mismatches={self.special_mismatch_count} "
            f"max_abs_err={self.max_abs_err:g} max_rel_dev={self.max_rel_ratio_deviation:g}"
        )


def verify(original, reconstructed, mode: str, eb: float, value_range=None) -> VerifyReport:
    """Check every element of ``reconstructed`` against its original.

    Inputs are float32/float64 arrays of equal length.  ``value_range``
    (R) is required for NOA.  Original NaN/INF elements must match
    bit-exactly; all others must satisfy the mode's bound predicate.
    """
    o = np.ascontiguousarray(original)
    r = np.ascontiguousarray(reconstructed)
    if o.shape != r.shape or o.dtype != r.dtype:
        raise LengthMismatch(
            f"original {o.dtype}[{o.size}] vs reconstructed {r.dtype}[{r.size}]"
        )
    if o.dtype == np.float32:
        width, itype = 32, np.uint32
    elif o.dtype == np.float64:
        width, itype = 64, np.uint64
    else:
        raise TypeError(f"unsupported dtype {o.dtype}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    eb = float(eb)
    if not np.isfinite(eb) or eb <= 0.0:
        raise InvalidBound(f"error bound must be positive and finite, got {eb!r}")
    if mode == NOA and value_range is None:
        raise ValueError("NOA verification needs the data range R")

    d = _derive(mode, eb, width, value_range)
    report = VerifyReport(mode=mode, eb=eb, count=o.size)
    ob = o.view(itype)
    rb = r.view(itype)
    bits_equal = ob == rb
    special = np.isnan(o) | np.isinf(o)

    mism = special & ~bits_equal
    report.special_mismatch_count = int(np.count_nonzero(mism))
    if report.special_mismatch_count:
        idx = np.flatnonzero(mism)[:_SPECIAL_MISMATCH_CAP]
        report.special_mismatches = [
            (int(i), int(ob[i]), int(rb[i])) for i in idx
        ]

    regular = ~special
    inexact = regular & ~bits_equal  # bit-identical elements contribute zero error
    with np.errstate(all="ignore"):
        if mode == REL:
            same_sign = np.signbit(o) == np.signbit(r)
            q = np.abs(r) / np.abs(o)
            ok = same_sign & (q <= d.op_eps) & (q * d.op_eps >= o.dtype.type(1.0))
            dev = np.abs(q[inexact].astype(np.float64) - 1.0)
            if dev.size:
                report.max_rel_ratio_deviation = float(np.max(np.where(np.isnan(dev), np.inf, dev)))
        else:
            err = np.abs(o - r)
            ok = err <= d.eb_eff
            e = err[inexact].astype(np.float64)
            if e.size:
                report.max_abs_err = float(np.max(np.where(np.isnan(e), np.inf, e)))
                if mode == NOA:
                    rng = float(value_range)
                    report.max_noa_err = report.max_abs_err / rng if rng else 0.0
    bad = regular & ~(bits_equal | ok)
    report.violations = int(np.count_nonzero(bad))
    if report.violations:
        report.first_violation_index = int(np.flatnonzero(bad)[0])
    return report


def verify_stream(original, stream: bytes, workers=None) -> VerifyReport:
    """Decompress a stream and verify it against the original array."""
    from .container import decode_stream

    header, _ = decode_stream(stream)
    recon = pipeline.decompress_to_array(stream, workers=workers)
    value_range = header.value_range if header.mode == NOA else None
    return verify(original, recon, header.mode, header.eb, value_range)


# ---------------------------------------------------------------------------
# golden vectors: a fixed pseudo-random corpus compressed under fixed
# configurations must hash to the committed digest on every conforming
# build, platform, and thread count.
# ---------------------------------------------------------------------------

GOLDEN_SEED = 0x9E3779B97F4A7C15
GOLDEN_COUNT = 1 << 20

# (mode, eb, width, pinned NOA range)
GOLDEN_CONFIGS = (
    (ABS, 1e-3, 32, None),
    (REL, 1e-3, 32, None),
    (NOA, 1e-3, 32, 1.0),
    (ABS, 1e-3, 64, None),
    (REL, 1e-3, 64, None),
)


def golden_corpus_bits() -> np.ndarray:
    """2^20 64-bit splitmix64 outputs for the golden seed.

    The low 32-bit words are the binary32 corpus (used unfiltered as bit
    patterns, so every value class occurs); the full words double as the
    binary64 corpus.
    """
    out = np.empty(GOLDEN_COUNT, dtype=np.uint64)
    _kernels.splitmix64_fill(out, np.uint64(GOLDEN_SEED), np.int64(0))
    return out


def _golden_values(width: int) -> np.ndarray:
    words = golden_corpus_bits()
    if width == 32:
        return (words & np.uint64(0xFFFFFFFF)).astype(np.uint32).view(np.float32)
    return words.view(np.float64)


def compute_golden_record(workers: int = 1) -> dict:
    """Compress the golden corpus under the fixed configs and digest it.

    Per-config block digests (truncated sha256) locate the first differing
    block on mismatch; stream digests and the overall digest are full
    sha256 and are the authoritative comparison.
    """
    overall = hashlib.sha256()
    configs = []
    for mode, eb, width, rng in GOLDEN_CONFIGS:
        cfg = QuantConfig(mode=mode, eb=eb, width=width, value_range=rng)
        stream, _ = pipeline.compress(_golden_values(width), cfg, workers=workers)
        overall.update(stream)
        from .container import HEADER_SIZE, StreamHeader

        header = StreamHeader.unpack(stream)
        nblocks = header.n_blocks()
        index_end = HEADER_SIZE + 8 + 8 * nblocks
        offsets = np.frombuffer(stream, dtype="<u8", count=nblocks, offset=HEADER_SIZE + 8)
        blocks = []
        for b in range(nblocks):
            start = index_end + int(offsets[b])
            end = index_end + int(offsets[b + 1]) if b + 1 < nblocks else len(stream)
            blocks.append(hashlib.sha256(stream[start:end]).hexdigest()[:16])
        configs.append(
            {
                "mode": mode,
                "eb": eb,
                "width": width,
                "value_range": rng,
                "sha256": hashlib.sha256(stream).hexdigest(),
                "block_sha256_16": blocks,
            }
        )
    return {"seed": hex(GOLDEN_SEED), "count": GOLDEN_COUNT, "overall": overall.hexdigest(), "configs": configs}


def load_golden_record() -> dict:
    with resources.files(__package__).joinpath("golden.json").open("r") as f:
        return json.load(f)


def check_golden(expected: Optional[dict] = None, workers: int = 1) -> dict:
    """Recompute the golden record and compare to the committed one.

    Returns {"passed": bool, "overall": hex, "expected": hex,
    "first_difference": None | (config_index, block_index_or_-1)}.
    """
    if expected is None:
        expected = load_golden_record()
    got = compute_golden_record(workers=workers)
    result = {
        "passed": got["overall"] == expected["overall"],
        "overall": got["overall"],
        "expected": expected["overall"],
        "first_difference": None,
    }
    if not result["passed"]:
        for ci, (g, e) in enumerate(zip(got["configs"], expected["configs"])):
            if g["sha256"] == e["sha256"]:
                continue
            for bi, (gb, eb_) in enumerate(zip(g["block_sha256_16"], e["block_sha256_16"])):
                if gb != eb_:
                    result["first_difference"] = (ci, bi)
                    break
            else:
                result["first_difference"] = (ci, -1)
            break
    return result
