"""Exhaustive and sampled round-trip testing.

The binary32 space is small enough to test completely: every one of the
2^32 patterns is quantized, reconstructed, and checked against the bound
predicate, with outcomes tallied per IEEE value class.  The binary64 space
is covered by a structured exponent-by-mantissa corpus plus seeded random
patterns.  Work is chunked; tallies merge commutatively, so the report does
not depend on the chunking or the worker count.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .quantizers import REL, QuantConfig

__all__ = [
    "CLASS_NAMES",
    "SweepReport",
    "sweep_f32",
    "sweep_f32_random",
    "sweep_f64",
    "structured_f64_bits",
    "F32_TOTAL",
]

CLASS_NAMES = ("zero", "denormal", "normal", "infinity", "nan")
OUTCOME_NAMES = ("quantized", "lossless", "violation")
F32_TOTAL = 1 << 32
DEFAULT_CHUNK = 1 << 24


@dataclass
class SweepReport:
    mode: str
    eb: float
    width: int
    patterns_tested: int = 0
    violations: int = 0
    per_class: dict = field(default_factory=dict)
    first_violation_bits: Optional[int] = None
    elapsed: float = 0.0
    value_range: Optional[float] = None
    unsafe: bool = False

    @property
    def lossless_fraction(self) -> float:
        total = sum(c["lossless"] for c in self.per_class.values())
        return total / self.patterns_tested if self.patterns_tested else 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "eb": self.eb,
            "width": self.width,
            "value_range": self.value_range,
            "unsafe": self.unsafe,
            "patterns_tested": self.patterns_tested,
            "violations": self.violations,
            "first_violation_bits": self.first_violation_bits,
            "lossless_fraction": self.lossless_fraction,
            "per_class": self.per_class,
            "elapsed": self.elapsed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return (
            f"{state} mode={self.mode} eb={self.eb:g} f{self.width} "
            f"patterns={self.patterns_tested} violations={self.violations} "
            f"lossless={self.lossless_fraction:.4%} elapsed={self.elapsed:.1f}s"
        )


def _tally_to_dict(tally: np.ndarray) -> dict:
    return {
        CLASS_NAMES[c]: {OUTCOME_NAMES[o]: int(tally[c, o]) for o in range(3)}
        for c in range(5)
    }


def _kernel_and_args(cfg: QuantConfig):
    d = cfg.derived
    if cfg.mode == REL:
        fn = _kernels.sweep_rel32_on if cfg.width == 32 else _kernels.sweep_rel64_on
        return fn, (d.op_eps, d.w, d.thr, cfg.unsafe_no_double_check)
    fn = _kernels.sweep_abs32_on if cfg.width == 32 else _kernels.sweep_abs64_on
    return fn, (d.eb_eff, d.eb2, d.inv_eb2, d.thr, cfg.unsafe_no_double_check)


def _run_chunks(cfg: QuantConfig, chunks, total: int, workers: int, progress=None) -> SweepReport:
    """chunks: iterable of (bits ndarray, pattern_of_index callable)."""
    fn, args = _kernel_and_args(cfg)
    report = SweepReport(
        mode=cfg.mode,
        eb=float(cfg.eb),
        width=cfg.width,
        value_range=cfg.value_range,
        unsafe=cfg.unsafe_no_double_check,
    )
    tally = np.zeros((5, 3), dtype=np.int64)
    t0 = time.perf_counter()
    ftype = np.float32 if cfg.width == 32 else np.float64

    def run(chunk):
        bits, resolve = chunk
        t, fv = fn(bits, bits.view(ftype), *args)
        return t, fv, bits, resolve

    done = 0

    def consume(result):
        nonlocal done, tally
        t, fv, bits, resolve = result
        tally += t
        if fv >= 0 and report.first_violation_bits is None:
            report.first_violation_bits = int(resolve(bits, int(fv)))
        done += len(bits)
        if progress is not None:
            progress(done, total)

    it = iter(chunks)
    if workers <= 1:
        for chunk in it:
            consume(run(chunk))
    else:
        # bounded in-flight window: chunks are large arrays, so eager
        # submission of the whole iterator would hold them all in memory;
        # consumption stays in chunk order, keeping reports deterministic
        from collections import deque

        with ThreadPoolExecutor(max_workers=workers) as pool:
            pending = deque()
            for chunk in it:
                pending.append(pool.submit(run, chunk))
                if len(pending) > workers + 1:
                    consume(pending.popleft().result())
            while pending:
                consume(pending.popleft().result())
    report.per_class = _tally_to_dict(tally)
    report.violations = int(tally[:, 2].sum())
    report.patterns_tested = int(tally.sum())
    report.elapsed = time.perf_counter() - t0
    return report


def _resolve_identity(bits, idx):
    return bits[idx]


def _f32_range_chunks(start: int, count: int, chunk: int):
    for s in range(start, start + count, chunk):
        n = min(chunk, start + count - s)
        bits = (np.arange(n, dtype=np.uint32) + np.uint32(s & 0xFFFFFFFF))
        yield bits, _resolve_identity


def sweep_f32(
    mode: str,
    eb_list: Sequence[float],
    value_range=None,
    unsafe: bool = False,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
    start: int = 0,
    count: int = F32_TOTAL,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list[SweepReport]:
    """Round-trip every f32 pattern in [start, start+count) for each bound."""
    reports = []
    for eb in eb_list:
        cfg = QuantConfig(mode=mode, eb=float(eb), width=32, value_range=value_range,
                          unsafe_no_double_check=unsafe)
        reports.append(
            _run_chunks(cfg, _f32_range_chunks(start, count, chunk), count, workers, progress)
        )
    return reports


def _random_chunks(n: int, seed: int, chunk: int, width: int, start_index: int = 0):
    for s in range(0, n, chunk):
        m = min(chunk, n - s)
        words = np.empty(m, dtype=np.uint64)
        _kernels.splitmix64_fill(words, np.uint64(seed), np.int64(start_index + s))
        if width == 32:
            yield (words & np.uint64(0xFFFFFFFF)).astype(np.uint32), _resolve_identity
        else:
            yield words, _resolve_identity


def sweep_f32_random(
    mode: str,
    eb_list: Sequence[float],
    n: int,
    seed: int,
    value_range=None,
    unsafe: bool = False,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
    progress=None,
) -> list[SweepReport]:
    """Sampled f32 sweep: n splitmix64 low words used as bit patterns."""
    reports = []
    for eb in eb_list:
        cfg = QuantConfig(mode=mode, eb=float(eb), width=32, value_range=value_range,
                          unsafe_no_double_check=unsafe)
        reports.append(
            _run_chunks(cfg, _random_chunks(n, seed, chunk, 32), n, workers, progress)
        )
    return reports


# Structured f64 corpus: every exponent field x {zero, all-ones, 4 seeded
# random} mantissas x both signs.  Random mantissas use splitmix64 stream
# indices [0, 4*2048); random full patterns continue the stream after that.
_STRUCT_RANDOM_MANTISSAS = 4
_STRUCT_STREAM_RESERVED = _STRUCT_RANDOM_MANTISSAS * 2048


def structured_f64_bits(seed: int) -> np.ndarray:
    words = np.empty(_STRUCT_STREAM_RESERVED, dtype=np.uint64)
    _kernels.splitmix64_fill(words, np.uint64(seed), np.int64(0))
    mant_mask = np.uint64((1 << 52) - 1)
    expos = np.arange(2048, dtype=np.uint64) << np.uint64(52)
    mants = np.concatenate(
        [
            np.zeros(2048, dtype=np.uint64)[:, None],
            np.full(2048, (1 << 52) - 1, dtype=np.uint64)[:, None],
            (words & mant_mask).reshape(2048, _STRUCT_RANDOM_MANTISSAS),
        ],
        axis=1,
    )
    base = (expos[:, None] | mants).ravel()
    return np.concatenate([base, base | np.uint64(1 << 63)])


def sweep_f64(
    mode: str,
    eb_list: Sequence[float],
    n_random: int = 0,
    seed: int = 0,
    value_range=None,
    unsafe: bool = False,
    workers: int = 1,
    chunk: int = 1 << 22,
    progress=None,
) -> list[SweepReport]:
    """Structured-corpus plus sampled f64 sweep for each bound."""
    structured = structured_f64_bits(seed)
    total = len(structured) + n_random

    def chunks():
        yield structured, _resolve_identity
        yield from _random_chunks(n_random, seed, chunk, 64, start_index=_STRUCT_STREAM_RESERVED)

    reports = []
    for eb in eb_list:
        cfg = QuantConfig(mode=mode, eb=float(eb), width=64, value_range=value_range,
                          unsafe_no_double_check=unsafe)
        reports.append(_run_chunks(cfg, chunks(), total, workers, progress))
    return reports
