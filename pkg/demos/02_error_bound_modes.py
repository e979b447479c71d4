"""The three bound modes on the same data.

ABS bounds |orig - recon| by eb. REL keeps recon/orig inside [1/(1+eb), 1+eb]
with the sign preserved, so tiny and huge magnitudes are treated alike.
NOA is ABS with eb scaled by the data range (max - min), computed in a first
pass and recorded in the stream header.
"""

import numpy as np

from gebq import QuantConfig, compress, decompress_to_array, verify
from gebq.container import StreamHeader

rng = np.random.default_rng(1)
data = np.concatenate(
    [
        rng.normal(100.0, 5.0, 30000),
        np.exp(rng.uniform(np.log(1e-8), np.log(1e8), 30000)),
    ]
).astype(np.float32)

for mode, eb in (("abs", 1e-2), ("rel", 1e-2), ("noa", 1e-4)):
    stream, stats = compress(data, QuantConfig(mode=mode, eb=eb))
    recon = decompress_to_array(stream)
    header = StreamHeader.unpack(stream)
    value_range = header.value_range if mode == "noa" else None
    report = verify(data, recon, mode, eb, value_range)
    extra = f", data range R={value_range:g}" if mode == "noa" else ""
    print(f"{mode:>4} eb={eb:g}: ratio {stats.ratio:5.2f}, "
          f"lossless {stats.lossless_fraction:7.3%}, "
          f"max_abs_err {report.max_abs_err:.3g}, "
          f"max_ratio_dev {report.max_rel_ratio_deviation:.3g}{extra} "
          f"-> {'OK' if report.passed else 'VIOLATED'}")

# ABS quantizes the large magnitudes coarsely relative to their size; REL
# keeps relative fidelity everywhere but refuses (stores losslessly) values
# its log-domain bins cannot reach; NOA follows the spread of the data.
