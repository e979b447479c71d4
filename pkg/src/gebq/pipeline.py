"""End-to-end compression and decompression.

compress() runs the NOA range pass if needed, derives the quantizer
constants once, applies the mode's kernel block-parallel, and assembles the
serialized stream.  Workers only change scheduling: every task covers a
fixed value range and the assembly is order-preserving, so the output bytes
are identical for any thread count.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels, container
from .container import StreamHeader
from .quantizers import (
    NOA,
    REL,
    CodedArray,
    InvalidBound,
    QuantConfig,
    compute_noa_range,
)

__all__ = [
    "CompressStats",
    "LengthNotMultipleOfWidth",
    "InvalidBound",
    "compress",
    "compress_coded",
    "decompress",
    "decompress_to_array",
    "default_workers",
]

TASK_VALUES = 1 << 20  # values per parallel task (rounded to whole blocks)


class LengthNotMultipleOfWidth(ValueError):
    """Raw input byte length is not a multiple of the value width."""


@dataclass
class CompressStats:
    """Per-run accounting; lossless counts are split by what triggered them."""

    values_total: int = 0
    values_lossless: int = 0
    bytes_in: int = 0
    bytes_out: int = 0
    triggers: dict = field(default_factory=lambda: {"nan": 0, "inf": 0, "guard": 0, "double_check": 0})
    wall_time: dict = field(default_factory=dict)

    @property
    def lossless_fraction(self) -> float:
        return self.values_lossless / self.values_total if self.values_total else 0.0

    @property
    def double_check_fraction(self) -> float:
        return self.triggers["double_check"] / self.values_total if self.values_total else 0.0

    @property
    def ratio(self) -> float:
        return self.bytes_in / self.bytes_out if self.bytes_out else 0.0

    def to_dict(self) -> dict:
        return {
            "values_total": self.values_total,
            "values_lossless": self.values_lossless,
            "lossless_fraction": self.lossless_fraction,
            "bytes_in": self.bytes_in,
            "bytes_out": self.bytes_out,
            "ratio": self.ratio,
            "triggers": dict(self.triggers),
            "wall_time": dict(self.wall_time),
        }


def default_workers() -> int:
    env = os.environ.get("GEBQ_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _as_value_array(values, width: int) -> np.ndarray:
    ftype = np.float32 if width == 32 else np.float64
    if isinstance(values, (bytes, bytearray, memoryview)):
        nbytes = len(values)
        if nbytes % (width // 8):
            raise LengthNotMultipleOfWidth(
                f"{nbytes} bytes is not a multiple of {width // 8}"
            )
        return np.frombuffer(values, dtype=np.dtype(ftype).newbyteorder("<"))
    arr = np.ascontiguousarray(values)
    if arr.dtype != ftype:
        raise TypeError(f"expected {np.dtype(ftype)} values for width {width}, got {arr.dtype}")
    return arr.ravel()


def _quantize_fn(cfg: QuantConfig):
    if cfg.mode == REL:
        return _kernels.quantize_rel32 if cfg.width == 32 else _kernels.quantize_rel64
    return _kernels.quantize_abs32 if cfg.width == 32 else _kernels.quantize_abs64


def compress_coded(values, cfg: QuantConfig, workers: Optional[int] = None):
    """Quantize an array without serializing; returns (CodedArray, cfg, stats).

    ``cfg`` comes back with the NOA range filled in.  Useful for inspecting
    coded values; compress() builds on this.
    """
    workers = workers or default_workers()
    arr = _as_value_array(values, cfg.width)
    stats = CompressStats(values_total=len(arr), bytes_in=arr.nbytes)

    t0 = time.perf_counter()
    if cfg.mode == NOA and cfg.value_range is None:
        cfg = cfg.with_range(float(compute_noa_range(arr)))
    stats.wall_time["range_s"] = time.perf_counter() - t0

    d = cfg.derived
    bits = arr.view(np.uint32 if cfg.width == 32 else np.uint64)
    codes = np.empty(len(arr), dtype=bits.dtype)
    lossless = np.empty(len(arr), dtype=np.bool_)
    fn = _quantize_fn(cfg)
    if cfg.mode == REL:
        args = (d.op_eps, d.w, d.thr, cfg.unsafe_no_double_check)
    else:
        args = (d.eb_eff, d.eb2, d.inv_eb2, d.thr, cfg.unsafe_no_double_check)

    trig_totals = np.zeros(4, dtype=np.int64)
    t0 = time.perf_counter()
    task = max(cfg.block_size, TASK_VALUES // cfg.block_size * cfg.block_size)
    spans = [(s, min(s + task, len(arr))) for s in range(0, len(arr), task)] or []
    results = [None] * len(spans)

    def run(i):
        s, e = spans[i]
        results[i] = fn(bits[s:e], arr[s:e], codes[s:e], lossless[s:e], *args)

    if workers <= 1 or len(spans) <= 1:
        for i in range(len(spans)):
            run(i)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(spans))))
    for trig in results:
        trig_totals += trig
    stats.wall_time["quantize_s"] = time.perf_counter() - t0

    stats.triggers = {
        "nan": int(trig_totals[_kernels.TRIG_NAN]),
        "inf": int(trig_totals[_kernels.TRIG_INF]),
        "guard": int(trig_totals[_kernels.TRIG_GUARD]),
        "double_check": int(trig_totals[_kernels.TRIG_DCHECK]),
    }
    stats.values_lossless = int(trig_totals.sum())
    coded = CodedArray(mode=cfg.mode, width=cfg.width, lossless=lossless, codes=codes)
    return coded, cfg, stats


def compress(values, cfg: QuantConfig, workers: Optional[int] = None):
    """Compress a float array (or raw little-endian bytes) to a stream.

    Returns (stream bytes, CompressStats).  Raises InvalidBound for a bad
    error bound and LengthNotMultipleOfWidth for ragged raw input.
    """
    workers = workers or default_workers()
    coded, cfg, stats = compress_coded(values, cfg, workers)
    header = StreamHeader(
        width=cfg.width,
        mode=cfg.mode,
        count=len(coded),
        eb_bits=int(np.float64(cfg.eb).view(np.uint64)),
        derived_bits=cfg.derived.header_bits,
        range_bits=int(np.float64(cfg.value_range or 0.0).view(np.uint64)) if cfg.mode == NOA else 0,
        block_size=cfg.block_size,
        flags=container.FLAG_NO_DOUBLE_CHECK if cfg.unsafe_no_double_check else 0,
    )
    t0 = time.perf_counter()
    stream = container.encode_stream(coded, header, workers=workers)
    stats.wall_time["encode_s"] = time.perf_counter() - t0
    stats.bytes_out = len(stream)
    return stream, stats


def decompress_to_array(stream: bytes, workers: Optional[int] = None) -> np.ndarray:
    """Decompress a stream to a float array using only header constants."""
    workers = workers or default_workers()
    header, coded = container.decode_stream(stream, workers=workers)
    ftype = np.float32 if header.width == 32 else np.float64
    out = np.empty(header.count, dtype=ftype)
    out_bits = out.view(np.uint32 if header.width == 32 else np.uint64)
    derived = header.derived_value
    if header.mode == REL:
        fn = _kernels.reconstruct_rel32 if header.width == 32 else _kernels.reconstruct_rel64
    else:
        fn = _kernels.reconstruct_abs32 if header.width == 32 else _kernels.reconstruct_abs64

    task = max(header.block_size, TASK_VALUES // header.block_size * header.block_size)
    spans = [(s, min(s + task, header.count)) for s in range(0, header.count, task)]

    def run(span):
        s, e = span
        fn(coded.codes[s:e], coded.lossless[s:e], out_bits[s:e], out[s:e], derived)

    if workers <= 1 or len(spans) <= 1:
        for span in spans:
            run(span)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, spans))
    return out


def decompress(stream: bytes, workers: Optional[int] = None) -> bytes:
    """Decompress a stream to raw little-endian value bytes."""
    return decompress_to_array(stream, workers).tobytes()
