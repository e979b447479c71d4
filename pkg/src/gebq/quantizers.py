"""Per-value quantize/reconstruct kernels for ABS, REL, and NOA bounds.

Each quantizer runs a fixed guard chain (NaN, magnitude, bin range) followed
by a double-check: the value is immediately reconstructed and kept only if
the reconstruction satisfies the bound under IEEE evaluation.  Anything that
fails any step is passed through losslessly, so every input bit pattern maps
to a coded value and the bound can never be violated.

The functions here are the scalar reference implementation; the pipeline and
sweep run bit-identical compiled loops from ``_kernels``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import numerics
from .numerics import (
    bits_to_float32,
    bits_to_float64,
    det_log2,
    log2approx32,
    log2approx64,
    pow2approx32,
    pow2approx64,
    round_to_bin,
)

__all__ = [
    "ABS",
    "REL",
    "NOA",
    "MODES",
    "InvalidBound",
    "QuantConfig",
    "DerivedConstants",
    "CodedValue",
    "CodedArray",
    "quantize_abs",
    "quantize_rel",
    "reconstruct_abs",
    "reconstruct_rel",
    "quantize",
    "reconstruct",
    "compute_noa_range",
]

ABS = "abs"
REL = "rel"
NOA = "noa"
MODES = (ABS, REL, NOA)

MAXBIN32 = 1 << 30
MAXBIN64 = 1 << 62


class InvalidBound(ValueError):
    """The error bound is not a positive finite number."""


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived once per (mode, eb, width[, range]) and then frozen.

    All fields are numpy scalars of the value width.  Decompression reads
    these from the stream header verbatim rather than re-deriving them, so
    the compressing machine's constants are authoritative.
    """

    width: int
    maxbin: int
    thr: np.floating  # float(maxbin - 1): bin guard threshold, compared pre-conversion
    eb_eff: Optional[np.floating] = None  # ABS: eb; NOA: eb * R
    eb2: Optional[np.floating] = None
    inv_eb2: Optional[np.floating] = None
    op_eps: Optional[np.floating] = None  # REL: 1 + eb
    w: Optional[np.floating] = None  # REL: 2 * det_log2(op_eps)

    @property
    def header_bits(self) -> int:
        """Raw pattern of eb2 (ABS/NOA) or w (REL), zero-extended for f32."""
        v = self.w if self.eb2 is None else self.eb2
        if self.width == 32:
            return int(np.float32(v).view(np.uint32))
        return int(np.float64(v).view(np.uint64))


def _derive(mode: str, eb: float, width: int, value_range) -> DerivedConstants:
    ftype = np.float32 if width == 32 else np.float64
    maxbin = MAXBIN32 if width == 32 else MAXBIN64
    thr = ftype(maxbin - 1)
    if mode == REL:
        op_eps = ftype(1.0) + ftype(eb)
        if np.isinf(op_eps):
            w = ftype(np.inf)
        elif op_eps <= ftype(1.0):
            # eb underflowed at this width; w = 0 sends everything lossless
            w = ftype(0.0)
        else:
            w = ftype(2.0) * det_log2(op_eps, width)  # doubling is exact
        return DerivedConstants(width=width, maxbin=maxbin, thr=thr, op_eps=op_eps, w=w)
    eps_w = ftype(eb)
    if mode == NOA:
        if value_range is None:
            raise ValueError("NOA constants need the data range; run the range pass first")
        eb_eff = eps_w * ftype(value_range)
    else:
        eb_eff = eps_w
    eb2 = eb_eff + eb_eff
    with np.errstate(divide="ignore"):
        inv_eb2 = ftype(1.0) / eb2  # inf when eb_eff == 0: everything goes lossless
    return DerivedConstants(
        width=width, maxbin=maxbin, thr=thr, eb_eff=eb_eff, eb2=eb2, inv_eb2=inv_eb2
    )


@dataclass(frozen=True)
class QuantConfig:
    """User-facing quantizer configuration.

    ``eb`` is the bound as parsed from decimal input (binary64); derived
    constants round it once to the value width.  For NOA, ``value_range``
    holds R from the range pass and must be set before quantizing.
    ``unsafe_no_double_check`` disables only the reconstruct-and-compare
    step; it exists for benchmarking the cost of that protection and voids
    the bound guarantee.
    """

    mode: str
    eb: float
    width: int = 32
    block_size: int = 4096
    unsafe_no_double_check: bool = False
    value_range: Optional[float] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.width not in (32, 64):
            raise ValueError(f"width must be 32 or 64, got {self.width!r}")
        eb = float(self.eb)
        if not np.isfinite(eb) or eb <= 0.0:
            raise InvalidBound(f"error bound must be positive and finite, got {self.eb!r}")
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size!r}")

    @cached_property
    def derived(self) -> DerivedConstants:
        return _derive(self.mode, float(self.eb), self.width, self.value_range)

    def with_range(self, value_range: float) -> "QuantConfig":
        return replace(self, value_range=float(value_range))


@dataclass(frozen=True)
class CodedValue:
    """Outcome for one value: a quantized bin or the raw bit pattern.

    ``sign`` is meaningful for REL only (1 = negative).  ``raw`` carries the
    exact original pattern for lossless values, NaN payloads included.
    """

    lossless: bool
    bin: int = 0
    sign: int = 0
    raw: int = 0

    @classmethod
    def quantized(cls, bin: int, sign: int = 0) -> "CodedValue":
        return cls(lossless=False, bin=bin, sign=sign)

    @classmethod
    def from_raw(cls, raw: int) -> "CodedValue":
        return cls(lossless=True, raw=int(raw))


@dataclass
class CodedArray:
    """Structure-of-arrays form of a coded sequence.

    ``codes`` holds the container's per-value wire code (zigzagged bin for
    ABS/NOA, zigzagged bin plus sign bit for REL, raw pattern for lossless
    values); ``lossless`` flags which is which.  This is the exact payload
    representation, so encoding is a straight serialization.
    """

    mode: str
    width: int
    lossless: np.ndarray  # bool[n]
    codes: np.ndarray  # uint32[n] or uint64[n]

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CodedArray)
            and self.mode == other.mode
            and self.width == other.width
            and np.array_equal(self.lossless, other.lossless)
            and np.array_equal(self.codes, other.codes)
        )


# ---------------------------------------------------------------------------
# scalar kernels
# ---------------------------------------------------------------------------

def _quiet_ieee(fn):
    # Overflow/invalid results are ordinary control flow here (they route
    # values into the guards), not conditions worth warning about.
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(all="ignore"):
            return fn(*args, **kwargs)

    return wrapper


@_quiet_ieee
def quantize_abs(bits: int, cfg: QuantConfig) -> CodedValue:
    """ABS/NOA quantizer for one value given as its bit pattern.

    Guard order is normative: NaN, magnitude guard in the float domain
    (before any integer conversion), the two-sided bin-range check, then the
    reconstruct-and-compare double-check.
    """
    d = cfg.derived
    bits = int(bits)
    x = bits_to_float32(bits) if cfg.width == 32 else bits_to_float64(bits)
    if np.isnan(x):
        return CodedValue.from_raw(bits)
    t = x * d.inv_eb2
    if not (abs(t) < d.thr):  # also catches non-finite t
        return CodedValue.from_raw(bits)
    b = round_to_bin(t)
    if b >= d.maxbin or b <= -d.maxbin:
        return CodedValue.from_raw(bits)
    if not cfg.unsafe_no_double_check:
        recon = _ftype(cfg)(b) * d.eb2
        err = abs(x - recon)
        if not (err <= d.eb_eff):
            return CodedValue.from_raw(bits)
    return CodedValue.quantized(b)


@_quiet_ieee
def reconstruct_abs(c: CodedValue, cfg: QuantConfig) -> int:
    """Bit pattern of the reconstruction of an ABS/NOA coded value."""
    if c.lossless:
        return c.raw
    v = _ftype(cfg)(c.bin) * cfg.derived.eb2
    return _to_bits(v, cfg.width)


@_quiet_ieee
def quantize_rel(bits: int, cfg: QuantConfig) -> CodedValue:
    """REL quantizer for one value given as its bit pattern.

    NaN, infinities, zeros, and denormals are passed through losslessly up
    front; normal values are binned in the piecewise-linear log2 domain and
    double-checked with the ratio predicate q <= 1+eb and q*(1+eb) >= 1.
    """
    d = cfg.derived
    bits = int(bits)
    w32 = cfg.width == 32
    x = bits_to_float32(bits) if w32 else bits_to_float64(bits)
    if np.isnan(x):
        return CodedValue.from_raw(bits)
    signbit = bits >> (31 if w32 else 63)
    abs_bits = bits & ((1 << (31 if w32 else 63)) - 1)
    expo_field = abs_bits >> (23 if w32 else 52)
    if expo_field == (0xFF if w32 else 0x7FF):  # +-infinity
        return CodedValue.from_raw(bits)
    if expo_field == 0:  # zero or denormal
        return CodedValue.from_raw(bits)
    ax = bits_to_float32(abs_bits) if w32 else bits_to_float64(abs_bits)
    l = log2approx32(ax) if w32 else log2approx64(ax)
    t = l / d.w
    if not (abs(t) < d.thr):
        return CodedValue.from_raw(bits)
    k = round_to_bin(t)
    if k >= d.maxbin or k <= -d.maxbin:
        return CodedValue.from_raw(bits)
    p = _ftype(cfg)(k) * d.w
    in_dom = numerics.pow2_in_domain32(p) if w32 else numerics.pow2_in_domain64(p)
    if not in_dom:
        return CodedValue.from_raw(bits)
    if not cfg.unsafe_no_double_check:
        recon_mag = pow2approx32(p) if w32 else pow2approx64(p)
        q = recon_mag / ax
        if not (q <= d.op_eps and q * d.op_eps >= _ftype(cfg)(1.0)):
            return CodedValue.from_raw(bits)
    return CodedValue.quantized(k, sign=int(signbit))


@_quiet_ieee
def reconstruct_rel(c: CodedValue, cfg: QuantConfig) -> int:
    """Bit pattern of the reconstruction of a REL coded value."""
    if c.lossless:
        return c.raw
    d = cfg.derived
    p = _ftype(cfg)(c.bin) * d.w
    mag = pow2approx32(p) if cfg.width == 32 else pow2approx64(p)
    return _to_bits(mag, cfg.width) | (c.sign << (31 if cfg.width == 32 else 63))


def quantize(bits: int, cfg: QuantConfig) -> CodedValue:
    """Dispatch to the mode's quantizer (NOA reuses the ABS kernel)."""
    return quantize_rel(bits, cfg) if cfg.mode == REL else quantize_abs(bits, cfg)


def reconstruct(c: CodedValue, cfg: QuantConfig) -> int:
    return reconstruct_rel(c, cfg) if cfg.mode == REL else reconstruct_abs(c, cfg)


def _ftype(cfg: QuantConfig):
    return np.float32 if cfg.width == 32 else np.float64


def _to_bits(v, width: int) -> int:
    if width == 32:
        return int(np.float32(v).view(np.uint32))
    return int(np.float64(v).view(np.uint64))


# ---------------------------------------------------------------------------
# NOA range pass
# ---------------------------------------------------------------------------

def compute_noa_range(values: Sequence[float] | np.ndarray):
    """Range R = max - min over the finite values (NaN and infinities skipped).

    Returns a scalar of the input dtype (float64 for plain sequences); 0.0
    when there are no finite values or all finite values are equal.  The
    subtraction is one rounded IEEE operation in that dtype.
    """
    arr = np.asarray(values)
    if arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64)
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        return arr.dtype.type(0.0)
    with np.errstate(over="ignore"):
        return finite.max() - finite.min()
