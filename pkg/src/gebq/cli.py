"""Command-line interface.

Thin shell over the library: every subcommand calls the same functions the
API exposes and behaves identically.  Exit codes: 0 success, 1 verification
or sweep failure, 2 usage error, 3 I/O or stream-format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import container, pipeline, sweep as sweep_mod
from .quantizers import InvalidBound, MODES, NOA, QuantConfig
from .verify import check_golden, compute_golden_record, verify as verify_arrays

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _positive_bound(text: str) -> float:
    # Decimal parsing is correctly rounded to binary64; those bits define the
    # stream constants, so "1e-3" means the same thing on every machine.
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not np.isfinite(v) or v <= 0.0:
        raise argparse.ArgumentTypeError(f"error bound must be positive and finite: {text}")
    return v


def _dtype_width(dtype: str) -> int:
    return 32 if dtype == "f32" else 64


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gebq", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, mode=True, eb=True, dtype=True):
        if mode:
            sp.add_argument("--mode", choices=MODES, required=True)
        if eb:
            sp.add_argument("--eb", type=_positive_bound, required=True,
                            help="error bound (positive finite decimal)")
        if dtype:
            sp.add_argument("--dtype", choices=("f32", "f64"), default="f32")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: GEBQ_THREADS or all cores)")
        sp.add_argument("--report", choices=("text", "json"), default="text")

    c = sub.add_parser("compress", help="compress a raw float file")
    add_common(c)
    c.add_argument("--block", type=int, default=4096, help="values per block")
    c.add_argument("--unsafe-no-double-check", action="store_true",
                   help="skip the reconstruct-and-compare step (voids the bound guarantee)")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=cmd_compress)

    d = sub.add_parser("decompress", help="decompress a stream to raw floats")
    d.add_argument("--threads", type=int, default=None)
    d.add_argument("--report", choices=("text", "json"), default="text")
    d.add_argument("-i", "--input", required=True)
    d.add_argument("-o", "--output", required=True)
    d.set_defaults(func=cmd_decompress)

    v = sub.add_parser("verify", help="check a reconstruction against the original")
    add_common(v)
    v.add_argument("--original", required=True)
    v.add_argument("--reconstructed", required=True)
    v.add_argument("--range", type=float, default=None,
                   help="data range R for NOA (default: computed from the original)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="round-trip structured bit-pattern domains")
    add_common(s)
    scope = s.add_mutually_exclusive_group(required=True)
    scope.add_argument("--exhaustive", action="store_true",
                       help="all 2^32 patterns (f32 only)")
    scope.add_argument("--samples", type=int, default=None,
                       help="number of seeded random patterns")
    s.add_argument("--seed", type=lambda t: int(t, 0), default=0)
    s.add_argument("--range", type=float, default=None,
                   help="pinned data range R for NOA sweeps")
    s.add_argument("--unsafe-no-double-check", action="store_true")
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("golden", help="compare golden-corpus digests against the committed record")
    g.add_argument("--threads", type=int, default=None)
    g.add_argument("--report", choices=("text", "json"), default="text")
    g.add_argument("--print-record", action="store_true",
                   help="print the full recomputed record (for cross-platform comparison)")
    g.set_defaults(func=cmd_golden)

    b = sub.add_parser("bench", help="benchmark matrix over a dataset manifest")
    b.add_argument("--manifest", required=True,
                   help="TSV manifest: name<TAB>path<TAB>dtype<TAB>dims")
    b.add_argument("--modes", default="abs", help="comma-separated modes")
    b.add_argument("--ebs", default="1e-3", help="comma-separated error bounds")
    b.add_argument("--variants", default="protected,unprotected",
                   help=f"comma-separated from {bench_mod.VARIANTS}")
    b.add_argument("--reps", type=int, default=9)
    b.add_argument("--block", type=int, default=4096)
    b.add_argument("--census", action="store_true",
                   help="report double-check outlier fractions instead of timing")
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--report", choices=("text", "json"), default="text")
    b.add_argument("-o", "--output", default=None, help="write CSV here (default stdout)")
    b.set_defaults(func=cmd_bench)
    return p


def _workers(args) -> int:
    return args.threads if args.threads else pipeline.default_workers()


def cmd_compress(args) -> int:
    raw = Path(args.input).read_bytes()
    cfg = QuantConfig(
        mode=args.mode,
        eb=args.eb,
        width=_dtype_width(args.dtype),
        block_size=args.block,
        unsafe_no_double_check=args.unsafe_no_double_check,
    )
    stream, stats = pipeline.compress(raw, cfg, workers=_workers(args))
    Path(args.output).write_bytes(stream)
    if args.report == "json":
        print(json.dumps(stats.to_dict()))
    else:
        print(
            f"{args.input}: {stats.values_total} values -> {stats.bytes_out} bytes "
            f"(ratio {stats.ratio:.3f}, lossless {stats.lossless_fraction:.4%})"
        )
    return EXIT_OK


def cmd_decompress(args) -> int:
    stream = Path(args.input).read_bytes()
    out = pipeline.decompress(stream, workers=_workers(args))
    Path(args.output).write_bytes(out)
    if args.report == "json":
        print(json.dumps({"bytes_out": len(out)}))
    else:
        print(f"{args.input}: {len(out)} bytes reconstructed")
    return EXIT_OK


def cmd_verify(args) -> int:
    width = _dtype_width(args.dtype)
    orig = bench_mod.ingest(args.original, args.dtype)
    recon = bench_mod.ingest(args.reconstructed, args.dtype)
    value_range = args.range
    if args.mode == NOA and value_range is None:
        from .quantizers import compute_noa_range

        value_range = float(compute_noa_range(orig))
    report = verify_arrays(orig, recon, args.mode, args.eb, value_range)
    print(report.to_json() if args.report == "json" else report.summary())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_sweep(args) -> int:
    workers = _workers(args)
    if args.mode == NOA and args.range is None:
        print("gebq: sweep --mode noa needs --range (a pinned data range)", file=sys.stderr)
        return EXIT_USAGE

    def progress(done, total):
        print(f"\r  {done}/{total} patterns", end="", file=sys.stderr)

    kwargs = dict(value_range=args.range, unsafe=args.unsafe_no_double_check,
                  workers=workers, progress=progress)
    if args.exhaustive:
        if args.dtype != "f32":
            print("gebq: --exhaustive is only feasible for --dtype f32", file=sys.stderr)
            return EXIT_USAGE
        reports = sweep_mod.sweep_f32(args.mode, [args.eb], **kwargs)
    elif args.dtype == "f32":
        reports = sweep_mod.sweep_f32_random(args.mode, [args.eb], args.samples, args.seed, **kwargs)
    else:
        reports = sweep_mod.sweep_f64(args.mode, [args.eb], args.samples, args.seed, **kwargs)
    print(file=sys.stderr)
    ok = True
    for r in reports:
        ok &= r.passed
        print(r.to_json() if args.report == "json" else r.summary())
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_golden(args) -> int:
    if args.print_record:
        print(json.dumps(compute_golden_record(workers=_workers(args)), indent=2))
        return EXIT_OK
    result = check_golden(workers=_workers(args))
    if args.report == "json":
        print(json.dumps(result))
    else:
        state = "PASS" if result["passed"] else "FAIL"
        print(f"{state} golden digest {result['overall']}" +
              ("" if result["passed"] else f" != expected {result['expected']}"))
        if result["first_difference"] is not None:
            ci, bi = result["first_difference"]
            print(f"first difference: config {ci}, block {bi}")
    return EXIT_OK if result["passed"] else EXIT_CHECK_FAILED


def cmd_bench(args) -> int:
    datasets = bench_mod.parse_manifest(args.manifest)
    workers = _workers(args)
    if args.census:
        modes = args.modes.split(",")
        out = [
            bench_mod.outlier_census(datasets, mode, eb, workers=workers)
            for mode in modes
            for eb in (float(e) for e in args.ebs.split(","))
        ]
        print(json.dumps(out, indent=2))
        return EXIT_OK
    runs = bench_mod.run_matrix(
        datasets,
        modes=args.modes.split(","),
        ebs=[float(e) for e in args.ebs.split(",")],
        variants=args.variants.split(","),
        reps=args.reps,
        workers=workers,
        block_size=args.block,
    )
    if args.report == "json":
        text = json.dumps([r.to_dict() for r in runs], indent=2)
    else:
        text = bench_mod.runs_to_csv(runs)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except InvalidBound as e:
        print(f"gebq: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (container.ContainerError, pipeline.LengthNotMultipleOfWidth,
            bench_mod.SizeNotMultiple, OSError) as e:
        print(f"gebq: error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"gebq: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
