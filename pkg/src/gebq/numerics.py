"""Bit-level IEEE-754 utilities.

Everything in this module is expressed as a fixed sequence of individually
rounded IEEE-754 operations (or pure integer bit manipulation), so that any
two conforming builds produce identical bit patterns.  No operation here may
be fused (FMA), reassociated, or routed through a platform libm.
"""

from __future__ import annotations

import enum
from typing import Union

import numpy as np

__all__ = [
    "ValueClass",
    "FloatBits",
    "float_to_bits32",
    "float_to_bits64",
    "bits_to_float32",
    "bits_to_float64",
    "classify32",
    "classify64",
    "log2approx32",
    "log2approx64",
    "pow2approx32",
    "pow2approx64",
    "pow2_in_domain32",
    "pow2_in_domain64",
    "round_to_bin",
    "det_log2",
]

FloatBits = Union[int, np.uint32, np.uint64]

# Field layout constants for binary32 / binary64.
MANTBITS32 = 23
MANTBITS64 = 52
EXPMASK32 = 0xFF
EXPMASK64 = 0x7FF
MANTMASK32 = (1 << MANTBITS32) - 1
MANTMASK64 = (1 << MANTBITS64) - 1
SIGNBIT32 = 1 << 31
SIGNBIT64 = 1 << 63

# 2^(e - bias) tables used for the exact power-of-two scaling inside
# pow2approx.  Scaling a [1,2) fraction by an in-range power of two is a
# single exact IEEE operation.
_POW2_32 = np.ldexp(np.float64(1.0), np.arange(256) - 127)
_POW2_64 = np.concatenate(
    [np.ldexp(np.float64(1.0), np.arange(2047) - 1023), [np.inf]]
)


class ValueClass(enum.Enum):
    """IEEE-754 value classes, decoded from the exponent/mantissa fields."""

    ZERO = "zero"
    DENORMAL = "denormal"
    NORMAL = "normal"
    INFINITY = "infinity"
    NAN = "nan"


def float_to_bits32(x) -> int:
    """Bit pattern of a binary32 value (pure bit copy, NaN payloads intact)."""
    return int(np.float32(x).view(np.uint32))


def float_to_bits64(x) -> int:
    """Bit pattern of a binary64 value (pure bit copy)."""
    return int(np.float64(x).view(np.uint64))


def bits_to_float32(bits: FloatBits) -> np.float32:
    """binary32 value for a 32-bit pattern (pure bit copy)."""
    return np.uint32(bits).view(np.float32)


def bits_to_float64(bits: FloatBits) -> np.float64:
    """binary64 value for a 64-bit pattern (pure bit copy)."""
    return np.uint64(bits).view(np.float64)


def classify32(bits: FloatBits) -> tuple[ValueClass, int]:
    """Classify a 32-bit pattern; returns (class, sign) with sign in {+1, -1}."""
    b = int(bits)
    sign = -1 if b & SIGNBIT32 else 1
    expo = (b >> MANTBITS32) & EXPMASK32
    mant = b & MANTMASK32
    return _decode(expo, mant, EXPMASK32), sign


def classify64(bits: FloatBits) -> tuple[ValueClass, int]:
    """Classify a 64-bit pattern; returns (class, sign) with sign in {+1, -1}."""
    b = int(bits)
    sign = -1 if b & SIGNBIT64 else 1
    expo = (b >> MANTBITS64) & EXPMASK64
    mant = b & MANTMASK64
    return _decode(expo, mant, EXPMASK64), sign


def _decode(expo: int, mant: int, expmask: int) -> ValueClass:
    if expo == expmask:
        return ValueClass.NAN if mant else ValueClass.INFINITY
    if expo == 0:
        return ValueClass.DENORMAL if mant else ValueClass.ZERO
    return ValueClass.NORMAL


def log2approx32(x) -> np.float32:
    """Piecewise-linear base-2 log of a positive normal binary32 value.

    Isolates the exponent field, rebuilds the fraction with biased exponent
    127 so it lands in [1, 2), and returns ``frac + (expo - 128)`` as one
    rounded binary32 addition.  Behaviour on zero/denormal/INF/NaN input is
    unspecified; callers must route those around this function.
    """
    b = int(np.float32(x).view(np.uint32))
    expo = (b >> MANTBITS32) & EXPMASK32
    frac = np.uint32((127 << MANTBITS32) | (b & MANTMASK32)).view(np.float32)
    return frac + np.float32(expo - 128)


def log2approx64(x) -> np.float64:
    """binary64 variant of :func:`log2approx32` (bias 1023, de-bias 1024)."""
    b = int(np.float64(x).view(np.uint64))
    expo = (b >> MANTBITS64) & EXPMASK64
    frac = np.uint64((1023 << MANTBITS64) | (b & MANTMASK64)).view(np.float64)
    return frac + np.float64(expo - 1024)


def pow2approx32(l) -> np.float32:
    """Inverse of :func:`log2approx32`.

    ``biased = l + 127`` (one rounded add), exponent = truncation of biased,
    fraction = ``biased - (expo - 1)`` (one rounded subtract, lands in
    [1, 2)), then reassemble exponent and fraction bits.  The caller must
    ensure the biased exponent lands in [1, 254]; see
    :func:`pow2_in_domain32`.
    """
    biased = np.float32(l) + np.float32(127)
    expo = int(biased)  # truncate toward zero
    frac = biased - np.float32(expo - 1)
    fbits = int(frac.view(np.uint32)) & MANTMASK32
    return np.uint32((expo << MANTBITS32) | fbits).view(np.float32)


def pow2approx64(l) -> np.float64:
    """binary64 variant of :func:`pow2approx32` (re-bias 1023)."""
    biased = np.float64(l) + np.float64(1023)
    expo = int(biased)
    frac = biased - np.float64(expo - 1)
    fbits = int(frac.view(np.uint64)) & MANTMASK64
    return np.uint64((expo << MANTBITS64) | fbits).view(np.float64)


def pow2_in_domain32(l) -> bool:
    """True when pow2approx32(l) lands on a normal value (biased exp 1..254)."""
    biased = np.float32(l) + np.float32(127)
    return bool(biased >= np.float32(1.0)) and bool(biased < np.float32(255.0))


def pow2_in_domain64(l) -> bool:
    """True when pow2approx64(l) lands on a normal value (biased exp 1..2046)."""
    biased = np.float64(l) + np.float64(1023)
    return bool(biased >= 1.0) and bool(biased < 2047.0)


def round_to_bin(t) -> int:
    """Float to integer, round-to-nearest with ties to even.

    The caller guarantees |t| is below the bin guard threshold, so the
    conversion can never overflow.
    """
    # t - floor(t) is exact, so the tie comparison is exact in any width.
    f = float(np.floor(t))
    r = float(t) - f
    b = int(f)
    if r > 0.5:
        return b + 1
    if r < 0.5:
        return b
    return b if (b & 1) == 0 else b + 1


def det_log2(y, width: int = 64):
    """Deterministic binary logarithm via digit recurrence.

    Extracts the integer exponent by bit operations so the remaining
    fraction m lies in [1, 2), then runs 32 iterations of m := m*m (each a
    single rounded binary64 multiply), emitting one fraction bit and halving
    m (exact) whenever m >= 2.  The exponent and fraction bits are assembled
    exactly in binary64 and rounded once to the target width.

    The operation sequence is fully specified, so every conforming platform
    produces identical bits.  Accuracy is dominated by the 32-bit fraction
    truncation (about 2^-31), far finer than any practical error bound.
    """
    y64 = np.float64(y)
    if np.isnan(y64) or np.isinf(y64) or y64 <= 1.0:
        raise ValueError(f"det_log2 requires a finite argument > 1, got {y!r}")
    b = int(y64.view(np.uint64))
    e = ((b >> MANTBITS64) & EXPMASK64) - 1023
    m = np.uint64((1023 << MANTBITS64) | (b & MANTMASK64)).view(np.float64)
    frac_num = 0  # fraction bits, MSB first, assembled as an integer
    for _ in range(32):
        m = m * m
        frac_num <<= 1
        if m >= np.float64(2.0):
            frac_num |= 1
            m = m * np.float64(0.5)
    # e + frac_num * 2^-32 is exact in binary64 (<= 11 + 32 significant bits).
    acc = np.float64(e) + np.float64(frac_num) * np.float64(2.0**-32)
    if width == 32:
        return np.float32(acc)
    return acc
