"""Why quantizers double-check: rounding at bin edges.

Quantization multiplies by 1/(2*eb) and rounds to a bin index. For values
within a few ulps of a bin border, that multiply's rounding error can push
the value into the neighboring bin, whose center is farther than eb away:
a bound violation even though the arithmetic error is microscopic.

The double-check reconstructs each value immediately and demotes anything
out of bound to lossless storage. Disabling it (unsafe mode) exposes the
raw rounding behavior.
"""

import numpy as np

from gebq import QuantConfig, compress, decompress_to_array, verify

eb = 1e-3
d = QuantConfig(mode="abs", eb=eb).derived
rng = np.random.default_rng(7)

# values within 4 ulps of bin borders (k + 0.5) * eb2
k = rng.integers(-(10**6), 10**6, 50000)
edge = ((k + 0.5) * float(d.eb2)).astype(np.float32)
parts = [edge]
up, down = edge.copy(), edge.copy()
for _ in range(4):
    up = np.nextafter(up, np.float32(np.inf))
    down = np.nextafter(down, np.float32(-np.inf))
    parts += [up.copy(), down.copy()]
corpus = np.concatenate(parts)
print(f"adversarial corpus: {len(corpus)} values hugging bin borders")

for unsafe in (False, True):
    cfg = QuantConfig(mode="abs", eb=eb, unsafe_no_double_check=unsafe)
    stream, stats = compress(corpus, cfg)
    report = verify(corpus, decompress_to_array(stream), "abs", eb)
    label = "unprotected" if unsafe else "protected"
    print(f"\n{label}:")
    print(f"  demoted to lossless by the double-check: {stats.triggers['double_check']}")
    print(f"  bound violations after decompression:    {report.violations}")
    if report.violations:
        i = report.first_violation_index
        print(f"  first violation at index {i}: {corpus[i]!r} -> "
              f"{decompress_to_array(stream)[i]!r} (|err| > {eb})")

print("\nThe protected run trades a slightly larger stream for a hard guarantee.")
