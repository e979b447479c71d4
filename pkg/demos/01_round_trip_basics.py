"""Round-trip basics: compress, decompress, verify.

Every value either lands in a quantization bin whose reconstruction is
within the bound, or travels losslessly bit-for-bit. Special values (NaN,
infinities) always take the lossless path, payload bits included.
"""

import numpy as np

from gebq import QuantConfig, compress, decompress_to_array, verify

data = np.array(
    [3.2, -0.0, np.nan, np.inf, -np.inf, 1e-40, 7.5, -123.456, 0.25],
    dtype=np.float32,
)
print("input:", data)

cfg = QuantConfig(mode="abs", eb=0.5)
stream, stats = compress(data, cfg)
print(f"\ncompressed {stats.values_total} values -> {stats.bytes_out} bytes")
print(f"lossless: {stats.values_lossless} ({stats.lossless_fraction:.1%}),"
      f" by trigger: {stats.triggers}")

recon = decompress_to_array(stream)
print("\nreconstruction:", recon)
print("NaN payload preserved:",
      hex(data.view(np.uint32)[2]), "->", hex(recon.view(np.uint32)[2]))

report = verify(data, recon, "abs", 0.5)
print("\nverify:", report.summary())
print("max |orig - recon| =", report.max_abs_err, "(bound 0.5; equality passes)")

# The stream is self-describing: decompression needed no parameters, and the
# 7.5 -> 8.0 case shows ties-to-even at a bin edge landing exactly on the bound.
