"""Guaranteed-error-bounded lossy quantization for floating-point arrays.

Compression quantizes each value into an integer bin under a point-wise
bound (ABS: absolute, REL: relative ratio, NOA: absolute normalized by the
data range) and immediately double-checks the reconstruction; anything that
cannot be represented within the bound, including NaN/INF/denormal special
cases and bin overflows, is stored losslessly bit-for-bit.  All arithmetic
is a fixed sequence of individually rounded IEEE-754 operations, so streams
are byte-identical across platforms, builds, and thread counts.
"""

from .quantizers import (
    ABS,
    NOA,
    REL,
    CodedArray,
    CodedValue,
    DerivedConstants,
    InvalidBound,
    QuantConfig,
    compute_noa_range,
    quantize,
    quantize_abs,
    quantize_rel,
    reconstruct,
    reconstruct_abs,
    reconstruct_rel,
)
from .container import (
    BadMagic,
    BadVersion,
    ContainerError,
    CountMismatch,
    NonCanonicalVarint,
    StreamHeader,
    TruncatedStream,
    decode_stream,
    encode_stream,
)
from .pipeline import (
    CompressStats,
    LengthNotMultipleOfWidth,
    compress,
    decompress,
    decompress_to_array,
)
from .verify import VerifyReport, check_golden, verify, verify_stream
from .sweep import SweepReport, sweep_f32, sweep_f32_random, sweep_f64

__version__ = "0.1.0"

__all__ = [
    "ABS",
    "REL",
    "NOA",
    "QuantConfig",
    "DerivedConstants",
    "CodedValue",
    "CodedArray",
    "InvalidBound",
    "quantize",
    "quantize_abs",
    "quantize_rel",
    "reconstruct",
    "reconstruct_abs",
    "reconstruct_rel",
    "compute_noa_range",
    "StreamHeader",
    "ContainerError",
    "BadMagic",
    "BadVersion",
    "TruncatedStream",
    "NonCanonicalVarint",
    "CountMismatch",
    "encode_stream",
    "decode_stream",
    "compress",
    "decompress",
    "decompress_to_array",
    "CompressStats",
    "LengthNotMultipleOfWidth",
    "verify",
    "verify_stream",
    "VerifyReport",
    "check_golden",
    "SweepReport",
    "sweep_f32",
    "sweep_f32_random",
    "sweep_f64",
    "__version__",
]
