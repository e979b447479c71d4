"""Benchmark matrix on synthetic data.

Times compression/decompression (median of N timed repetitions, file I/O
and verification excluded), and contrasts the protected quantizer against
the unprotected one, plus the parity-safe log2/pow2 approximations against
the platform libm for REL. Violations are recorded, never asserted: the
unprotected variant is allowed to break the bound, that is its point.
"""

import tempfile
from pathlib import Path

from gebq.bench import (
    DatasetSpec,
    make_synthetic,
    outlier_census,
    run_matrix,
    runs_to_csv,
)

tmp = Path(tempfile.mkdtemp(prefix="gebq_bench_"))
smooth = tmp / "smooth.bin"
logu = tmp / "loguniform.bin"
make_synthetic(2_000_000, "smooth", seed=1).tofile(smooth)
make_synthetic(2_000_000, "loguniform", seed=2).tofile(logu)

datasets = [
    DatasetSpec("SMOOTH", str(smooth), "f32", (2_000_000,)),
    DatasetSpec("LOGUNI", str(logu), "f32", (2_000_000,)),
]

print("ABS: rounding-error protection on vs off")
runs = run_matrix(datasets, ["abs"], [1e-3], ["protected", "unprotected"], reps=3)
print(runs_to_csv(runs))
for r in runs:
    if r.variant == "unprotected" and r.violations:
        print(f"  note: {r.dataset} unprotected produced {r.violations} violations")

print("REL: parity-safe approximations vs platform libm")
runs = run_matrix(datasets, ["rel"], [1e-3], ["approx_log", "library_log"], reps=3)
print(runs_to_csv(runs))

print("double-check outlier census (ABS, eb=1e-3):")
census = outlier_census(datasets, "abs", 1e-3)
for row in census["files"]:
    print(f"  {row['dataset']}: lossless {row['lossless_pct']:.3f}%, "
          f"double-check {row['double_check_pct']:.3f}%")

# Real datasets: write a manifest (name<TAB>path<TAB>dtype<TAB>dims per line)
# and run: gebq bench --manifest manifest.tsv --modes abs,rel --ebs 1e-3
