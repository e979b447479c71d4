"""Domain sweeps: every bit pattern is a test case.

The binary32 space is small enough to round-trip completely (the release
gate does all 2^32 patterns per mode and bound; here we sweep interesting
bands). binary64 uses a structured exponent-by-mantissa corpus plus seeded
random patterns. A sweep quantizes, reconstructs, and checks the bound for
each pattern, tallying outcomes per IEEE value class.
"""

from gebq.sweep import sweep_f32, sweep_f64

bands = {
    "zeros + denormals + small normals": (0x00000000, 1 << 24),
    "around 1.0": (0x3F000000, 1 << 24),
    "top normals + INF + NaN payloads": (0x7F000000, 1 << 24),
    "negative mirror of the top": (0xFF000000, 1 << 24),
}

for label, (start, count) in bands.items():
    (r,) = sweep_f32("rel", [1e-3], start=start, count=count)
    print(f"f32 REL eb=1e-3, {label}:")
    print(f"  violations={r.violations}  lossless={r.lossless_fraction:.2%}")
    for cls, t in r.per_class.items():
        if sum(t.values()):
            print(f"    {cls:>9}: {t}")

print("\nf64 ABS eb=1e-3, structured corpus + 10^6 seeded random patterns:")
(r,) = sweep_f64("abs", [1e-3], n_random=10**6, seed=11)
print(f"  patterns={r.patterns_tested} violations={r.violations} "
      f"elapsed={r.elapsed:.1f}s")
print("  per class:", {k: v for k, v in r.per_class.items() if sum(v.values())})

# The exhaustive release gate: pytest -s tests/test_acceptance.py -k criterion_1
# or: gebq sweep --mode abs --eb 1e-3 --exhaustive
