"""Benchmark harness: dataset ingestion, protected-vs-unprotected and
approx-vs-library-log comparisons, and the rounding-outlier census.

Timed regions cover only the compress/decompress calls; file reads and
verification run outside them.  Each cell is repeated (default 9 times) and
the median throughput is reported.  Verification always runs afterwards and
violation counts are recorded, never asserted: the unprotected variant is
expected to violate the bound on adversarial data.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels, container, pipeline
from .container import StreamHeader
from .quantizers import NOA, REL, CodedArray, QuantConfig
from .verify import verify as verify_arrays

__all__ = [
    "SizeNotMultiple",
    "Unreadable",
    "DatasetSpec",
    "BenchRun",
    "VARIANTS",
    "CSV_HEADER",
    "ingest",
    "parse_manifest",
    "run_matrix",
    "runs_to_csv",
    "outlier_census",
    "make_synthetic",
    "timer_overhead",
]

VARIANTS = ("protected", "unprotected", "approx_log", "library_log")
CSV_HEADER = "dataset,file,mode,eb,variant,reps,comp_MBps,decomp_MBps,ratio,lossless_pct"


class SizeNotMultiple(ValueError):
    pass


class Unreadable(OSError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    path: str
    dtype: str  # "f32" | "f64"
    dims: tuple = ()

    @property
    def width(self) -> int:
        return 32 if self.dtype == "f32" else 64


@dataclass
class BenchRun:
    dataset: str
    file: str
    mode: str
    eb: float
    variant: str
    reps: int
    comp_MBps: float = 0.0
    decomp_MBps: float = 0.0
    ratio: float = 0.0
    lossless_pct: float = 0.0
    double_check_pct: float = 0.0
    violations: int = 0
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "file": self.file,
            "mode": self.mode,
            "eb": self.eb,
            "variant": self.variant,
            "reps": self.reps,
            "comp_MBps": self.comp_MBps,
            "decomp_MBps": self.decomp_MBps,
            "ratio": self.ratio,
            "lossless_pct": self.lossless_pct,
            "double_check_pct": self.double_check_pct,
            "violations": self.violations,
            "error": self.error,
        }


def ingest(path, dtype: str = "f32") -> np.ndarray:
    """Load a headerless raw little-endian float file into memory.

    Dimensions are irrelevant to point-wise quantization and are only used
    for file sizing, so a flat array is returned.
    """
    ftype = np.float32 if dtype == "f32" else np.float64
    itemsize = np.dtype(ftype).itemsize
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise Unreadable(f"cannot read {path}: {e}") from e
    if len(raw) % itemsize:
        raise SizeNotMultiple(f"{path}: {len(raw)} bytes is not a multiple of {itemsize}")
    return np.frombuffer(raw, dtype=np.dtype(ftype).newbyteorder("<"))


def parse_manifest(path) -> list[DatasetSpec]:
    """One dataset per line: name<TAB>path<TAB>dtype<TAB>dims ("x"-separated)."""
    specs = []
    base = Path(path).parent
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
        name, fpath, dtype, dims = parts
        if dtype not in ("f32", "f64"):
            raise ValueError(f"{path}:{lineno}: dtype must be f32 or f64")
        dim_tuple = tuple(
            int(d) for d in dims.replace("×", "x").lower().split("x") if d
        )
        p = Path(fpath)
        if not p.is_absolute():
            p = base / p
        specs.append(DatasetSpec(name=name, path=str(p), dtype=dtype, dims=dim_tuple))
    return specs


# ---------------------------------------------------------------------------
# library-log REL variant (f32): identical guard chain, but the log2/pow2
# approximations are replaced by the platform libm in binary64.  This is the
# non-parity baseline the approximation functions are compared against; its
# streams stay in memory and are decoded with the matching kernel.
# ---------------------------------------------------------------------------

def _compress_rel_lib(values: np.ndarray, cfg: QuantConfig, workers: int):
    arr = np.ascontiguousarray(values)
    bits = arr.view(np.uint32)
    codes = np.empty(len(arr), dtype=np.uint32)
    lossless = np.empty(len(arr), dtype=np.bool_)
    d = cfg.derived
    trig = _kernels.quantize_rel32_lib(
        bits, arr, codes, lossless, d.op_eps, d.w, d.thr, cfg.unsafe_no_double_check
    )
    coded = CodedArray(mode=REL, width=32, lossless=lossless, codes=codes)
    header = StreamHeader(
        width=32,
        mode=REL,
        count=len(arr),
        eb_bits=int(np.float64(cfg.eb).view(np.uint64)),
        derived_bits=cfg.derived.header_bits,
        block_size=cfg.block_size,
    )
    stream = container.encode_stream(coded, header, workers=workers)
    stats = pipeline.CompressStats(values_total=len(arr), bytes_in=arr.nbytes, bytes_out=len(stream))
    stats.values_lossless = int(trig.sum())
    stats.triggers = {
        "nan": int(trig[_kernels.TRIG_NAN]),
        "inf": int(trig[_kernels.TRIG_INF]),
        "guard": int(trig[_kernels.TRIG_GUARD]),
        "double_check": int(trig[_kernels.TRIG_DCHECK]),
    }
    return stream, stats


def _decompress_rel_lib(stream: bytes, workers: int) -> np.ndarray:
    header, coded = container.decode_stream(stream, workers=workers)
    out = np.empty(header.count, dtype=np.float32)
    _kernels.reconstruct_rel32_lib(
        coded.codes, coded.lossless, out.view(np.uint32), out, header.derived_value
    )
    return out


def _variant_calls(variant: str, mode: str, width: int):
    """Returns (compress_fn(values, cfg, workers), decompress_fn(stream, workers))."""
    if variant in ("protected", "approx_log"):
        cfg_unsafe = False
    elif variant == "unprotected":
        cfg_unsafe = True
    elif variant == "library_log":
        if mode != REL:
            raise ValueError("library_log only applies to the REL quantizer")
        if width != 32:
            raise ValueError("library_log comparison is implemented for f32 data")
        return (
            lambda v, cfg, w: _compress_rel_lib(v, cfg, w),
            lambda s, w: _decompress_rel_lib(s, w),
            False,
        )
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "approx_log" and mode != REL:
        raise ValueError("approx_log only applies to the REL quantizer")
    return (
        lambda v, cfg, w: pipeline.compress(v, cfg, workers=w),
        lambda s, w: pipeline.decompress_to_array(s, workers=w),
        cfg_unsafe,
    )


def _median(xs: list[float]) -> float:
    return float(np.median(xs))


def bench_one(
    values: np.ndarray,
    mode: str,
    eb: float,
    variant: str,
    reps: int = 9,
    workers: int = 1,
    block_size: int = 4096,
) -> dict:
    """Time one (data, mode, eb, variant) cell; returns metrics and streams nothing."""
    width = 32 if values.dtype == np.float32 else 64
    compress_fn, decompress_fn, unsafe = _variant_calls(variant, mode, width)
    cfg = QuantConfig(mode=mode, eb=eb, width=width, block_size=block_size,
                      unsafe_no_double_check=unsafe)
    comp_times, decomp_times = [], []
    stream, stats = compress_fn(values, cfg, workers)
    for _ in range(reps):
        t0 = time.perf_counter()
        stream, stats = compress_fn(values, cfg, workers)
        comp_times.append(time.perf_counter() - t0)
    recon = decompress_fn(stream, workers)
    for _ in range(reps):
        t0 = time.perf_counter()
        recon = decompress_fn(stream, workers)
        decomp_times.append(time.perf_counter() - t0)
    value_range = None
    if mode == NOA:
        value_range = StreamHeader.unpack(stream).value_range
    report = verify_arrays(values, recon, mode, eb, value_range)
    nbytes = values.nbytes
    return {
        "comp_MBps": nbytes / _median(comp_times) / 1e6,
        "decomp_MBps": nbytes / _median(decomp_times) / 1e6,
        "ratio": nbytes / len(stream),
        "lossless_pct": 100.0 * stats.values_lossless / max(stats.values_total, 1),
        "double_check_pct": 100.0 * stats.triggers["double_check"] / max(stats.values_total, 1),
        "violations": report.violations + report.special_mismatch_count,
    }


def run_matrix(
    datasets: Sequence[DatasetSpec],
    modes: Sequence[str],
    ebs: Sequence[float],
    variants: Sequence[str],
    reps: int = 9,
    workers: int = 1,
    block_size: int = 4096,
) -> list[BenchRun]:
    """Full cartesian benchmark; per-cell errors are recorded and the matrix
    continues."""
    runs = []
    for ds in datasets:
        try:
            values = ingest(ds.path, ds.dtype)
        except (SizeNotMultiple, Unreadable) as e:
            for mode in modes:
                for eb in ebs:
                    for variant in variants:
                        runs.append(BenchRun(ds.name, ds.path, mode, eb, variant, reps,
                                             error=str(e)))
            continue
        for mode in modes:
            for eb in ebs:
                for variant in variants:
                    run = BenchRun(ds.name, ds.path, mode, eb, variant, reps)
                    try:
                        cell = bench_one(values, mode, eb, variant, reps, workers, block_size)
                    except ValueError as e:
                        run.error = str(e)
                    else:
                        run.comp_MBps = cell["comp_MBps"]
                        run.decomp_MBps = cell["decomp_MBps"]
                        run.ratio = cell["ratio"]
                        run.lossless_pct = cell["lossless_pct"]
                        run.double_check_pct = cell["double_check_pct"]
                        run.violations = cell["violations"]
                    runs.append(run)
    return runs


def runs_to_csv(runs: Sequence[BenchRun]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in runs:
        writer.writerow(
            [
                r.dataset,
                r.file,
                r.mode,
                f"{r.eb:g}",
                r.variant,
                r.reps,
                f"{r.comp_MBps:.2f}",
                f"{r.decomp_MBps:.2f}",
                f"{r.ratio:.4f}",
                f"{r.lossless_pct:.4f}",
            ]
        )
    return buf.getvalue()


def outlier_census(
    datasets: Sequence[DatasetSpec],
    mode: str,
    eb: float,
    workers: int = 1,
) -> dict:
    """Per-file double-check-triggered lossless fractions plus suite stats."""
    files = []
    for ds in datasets:
        values = ingest(ds.path, ds.dtype)
        cfg = QuantConfig(mode=mode, eb=eb, width=ds.width)
        _, _, stats = pipeline.compress_coded(values, cfg, workers=workers)
        files.append(
            {
                "dataset": ds.name,
                "file": ds.path,
                "values": stats.values_total,
                "lossless_pct": 100.0 * stats.lossless_fraction,
                "double_check_pct": 100.0 * stats.double_check_fraction,
            }
        )
    suites = {}
    for row in files:
        suites.setdefault(row["dataset"], []).append(row["double_check_pct"])
    suite_stats = {
        name: {"avg_double_check_pct": float(np.mean(v)), "max_double_check_pct": float(np.max(v))}
        for name, v in suites.items()
    }
    return {"mode": mode, "eb": eb, "files": files, "suites": suite_stats}


# ---------------------------------------------------------------------------
# synthetic inputs and harness calibration
# ---------------------------------------------------------------------------

def make_synthetic(n: int, kind: str = "smooth", seed: int = 0, dtype: str = "f32") -> np.ndarray:
    """Deterministic synthetic datasets.

    smooth: slow sine plus small noise (typical simulation field, ABS-friendly)
    loguniform: magnitudes uniform in log space over ~12 decades, both signs
    """
    rng = np.random.default_rng(seed)
    ftype = np.float32 if dtype == "f32" else np.float64
    if kind == "smooth":
        x = np.sin(np.linspace(0.0, n / 5e4, n)) * 5.0
        out = (x + rng.standard_normal(n) * 0.02).astype(ftype)
    elif kind == "loguniform":
        mag = np.exp(rng.uniform(np.log(1e-6), np.log(1e6), n))
        sign = rng.choice([-1.0, 1.0], n)
        out = (mag * sign).astype(ftype)
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    return out


def timer_overhead(reps: int = 101) -> float:
    """Median cost of one timed no-op, for checking harness overhead."""
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        t1 = time.perf_counter()
        samples.append(t1 - t0)
    return float(np.median(samples))
