"""The bit-manipulation log2/pow2 pair used by the REL quantizer.

Platform log()/pow() differ between libms (and between CPU and GPU), which
silently breaks bit-parity of compressed streams. These replacements use
only integer field surgery plus individually rounded IEEE adds, so every
conforming machine computes identical bits. The price is accuracy: the
fraction is treated linearly, log2(m) ~ m-1, good to about 8.6e-2 in the
log domain but exactly invertible by the matching pow2 construction.
"""

import numpy as np

from gebq.numerics import (
    det_log2,
    log2approx32,
    pow2approx32,
    pow2_in_domain32,
)

print("exact on powers of two:")
for k in (-126, -1, 0, 1, 10, 127):
    print(f"  log2approx(2^{k:>4}) = {float(log2approx32(np.float32(2.0**k))):>6.1f}")

print("\npiecewise-linear inside an octave (vs true log2):")
for x in (1.0, 1.25, 1.4427, 1.75, 2.0, 3.0):
    approx = float(log2approx32(np.float32(x)))
    print(f"  x={x:<6} approx={approx:<8.5f} true={np.log2(x):<8.5f} "
          f"diff={approx - np.log2(x):+.5f}")

print("\nthe inverse reconstructs the approximation exactly:")
for x in (1.5, 3.0, 0.7, 1234.5):
    l = log2approx32(np.float32(x))
    back = pow2approx32(l)
    print(f"  pow2approx(log2approx({x})) = {float(back)} "
          f"(relative dev {abs(float(back)/x - 1):.2e})")

print("\ndomain edge: the top ~1e-5 sliver of the f32 range re-biases into the")
print("infinity exponent, so the REL quantizer routes it to lossless storage:")
for bits in (0x7F7FFFA0, 0x7F7FFFA1, 0x7F7FFFFF):
    x = np.uint32(bits).view(np.float32)
    l = log2approx32(x)
    print(f"  {bits:#010x} ({float(x):.7e}): l={float(l)}, "
          f"pow2 domain: {pow2_in_domain32(l)}")

print("\ndeterministic log2 (digit recurrence, for deriving the REL bin width):")
for y in (2.0, 1.5, 1.001):
    print(f"  det_log2({y}) = {float(det_log2(y)):.12f}  "
          f"(true {np.log2(y):.12f})")
