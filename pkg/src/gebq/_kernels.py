"""Compiled hot paths (numba).

Every floating-point statement in this file is a single individually rounded
IEEE-754 operation; numba/LLVM is used with default strict FP semantics, so
no FMA contraction or reassociation can occur.  The per-value logic mirrors
the scalar reference functions in ``quantizers``/``numerics`` exactly; tests
assert bit-for-bit agreement between the two.

Convention: callers pass the same buffer twice, once viewed as unsigned bits
and once as floats, so kernels can move between representations without any
per-element conversion cost.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, int64, uint8, uint32, uint64

F32 = np.float32
F64 = np.float64

# 2^(e - bias) scaling tables; index = biased exponent field.  Multiplying a
# [1,2) fraction by an entry is one exact IEEE operation (result is a normal
# number for in-domain exponents).
_POW2_32 = np.ldexp(np.float64(1.0), np.arange(256) - 127)
_POW2_64 = np.concatenate([np.ldexp(np.float64(1.0), np.arange(2047) - 1023), [np.inf]])

MAXBIN32 = 1 << 30
MAXBIN64 = 1 << 62

# decode status codes
DEC_OK = 0
DEC_TRUNCATED = 1
DEC_NONCANONICAL = 2
DEC_COUNT_MISMATCH = 3

# lossless trigger indices used in counter arrays
TRIG_NAN = 0
TRIG_INF = 1
TRIG_GUARD = 2
TRIG_DCHECK = 3


# Widening 1.0f to binary64 is exact, so this constant keeps the +1 bump in
# the operand's own precision for both kernel widths.
_ONEF = np.float32(1.0)


@njit(cache=True, inline="always")
def _round_bin(t):
    """Round-to-nearest-ties-to-even as (int64 bin, float(bin)).

    t - floor(t) is exact, so the tie test is exact in any precision.  The
    float form needs no conversion: below 2^24 (2^53 for binary64) the +1
    bump is exact, and at or above, t is already an integer so the bump
    cannot fire.
    """
    f = np.floor(t)
    r = t - f
    b = int64(f)
    if r > 0.5:
        return b + 1, f + _ONEF
    if r < 0.5:
        return b, f
    if (b & 1) == 0:
        return b, f
    return b + 1, f + _ONEF


@njit(cache=True, inline="always")
def _zigzag(b):
    return (b << 1) ^ (b >> 63)


@njit(cache=True, inline="always")
def _unzigzag(z):
    return int64(z >> uint64(1)) ^ -int64(z & uint64(1))


# ---------------------------------------------------------------------------
# quantize kernels
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def quantize_abs32(bits, vals, codes, lossless, eb_eff, eb2, inv_eb2, thr, unsafe):
    """ABS/NOA quantizer over binary32 values; returns lossless trigger counts."""
    trig = np.zeros(4, dtype=np.int64)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        if xf != xf:  # NaN, any payload
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_NAN] += 1
            continue
        t = xf * inv_eb2
        if not (abs(t) < thr):  # catches INF/NaN t and out-of-range magnitudes
            lossless[i] = True
            codes[i] = xb
            if (xb & uint32(0x7FFFFFFF)) == uint32(0x7F800000):
                trig[TRIG_INF] += 1
            else:
                trig[TRIG_GUARD] += 1
            continue
        b, bf = _round_bin(t)
        if b >= MAXBIN32 or b <= -MAXBIN32:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        if not unsafe:
            recon = bf * eb2
            err = abs(xf - recon)
            if not (err <= eb_eff):
                lossless[i] = True
                codes[i] = xb
                trig[TRIG_DCHECK] += 1
                continue
        lossless[i] = False
        codes[i] = uint32(_zigzag(b))
    return trig


@njit(nogil=True, cache=True)
def quantize_abs64(bits, vals, codes, lossless, eb_eff, eb2, inv_eb2, thr, unsafe):
    trig = np.zeros(4, dtype=np.int64)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        if xf != xf:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_NAN] += 1
            continue
        t = xf * inv_eb2
        if not (abs(t) < thr):
            lossless[i] = True
            codes[i] = xb
            if (xb & uint64(0x7FFFFFFFFFFFFFFF)) == uint64(0x7FF0000000000000):
                trig[TRIG_INF] += 1
            else:
                trig[TRIG_GUARD] += 1
            continue
        b, bf = _round_bin(t)
        if b >= MAXBIN64 or b <= -MAXBIN64:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        if not unsafe:
            recon = bf * eb2
            err = abs(xf - recon)
            if not (err <= eb_eff):
                lossless[i] = True
                codes[i] = xb
                trig[TRIG_DCHECK] += 1
                continue
        lossless[i] = False
        codes[i] = uint64(_zigzag(b))
    return trig


@njit(nogil=True, cache=True)
def quantize_rel32(bits, vals, codes, lossless, op_eps, w, thr, unsafe):
    """REL quantizer over binary32 values; explicit NaN/INF/zero/denormal guards."""
    trig = np.zeros(4, dtype=np.int64)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        if xf != xf:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_NAN] += 1
            continue
        ab = xb & uint32(0x7FFFFFFF)
        aexpo = int64(ab >> uint32(23))
        if aexpo == 0xFF:  # +-infinity (NaN already handled)
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_INF] += 1
            continue
        if aexpo == 0:  # zero or denormal
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        amant = ab & uint32(0x7FFFFF)
        frac = F32(1.0) + F32(amant) * F32(2.0**-23)
        l = frac + F32(aexpo - 128)
        t = l / w
        if not (abs(t) < thr):
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        k, kf = _round_bin(t)
        if k >= MAXBIN32 or k <= -MAXBIN32:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        p = kf * w
        biased = p + F32(127.0)
        if not (biased >= F32(1.0) and biased < F32(255.0)):
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        if not unsafe:
            expo = int64(biased)
            rfrac = biased - F32(expo - 1)
            recon_mag = F32(F64(rfrac) * _POW2_32[expo])
            q = recon_mag / abs(xf)
            if not (q <= op_eps and q * op_eps >= F32(1.0)):
                lossless[i] = True
                codes[i] = xb
                trig[TRIG_DCHECK] += 1
                continue
        sign = uint64(xb >> uint32(31))
        lossless[i] = False
        codes[i] = uint32((uint64(_zigzag(k)) << uint64(1)) | sign)
    return trig


@njit(nogil=True, cache=True)
def quantize_rel64(bits, vals, codes, lossless, op_eps, w, thr, unsafe):
    trig = np.zeros(4, dtype=np.int64)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        if xf != xf:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_NAN] += 1
            continue
        ab = xb & uint64(0x7FFFFFFFFFFFFFFF)
        aexpo = int64(ab >> uint64(52))
        if aexpo == 0x7FF:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_INF] += 1
            continue
        if aexpo == 0:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        amant = ab & uint64(0xFFFFFFFFFFFFF)
        frac = F64(1.0) + F64(amant) * F64(2.0**-52)
        l = frac + F64(aexpo - 1024)
        t = l / w
        if not (abs(t) < thr):
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        k, kf = _round_bin(t)
        if k >= MAXBIN64 or k <= -MAXBIN64:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        p = kf * w
        biased = p + F64(1023.0)
        if not (biased >= F64(1.0) and biased < F64(2047.0)):
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        if not unsafe:
            expo = int64(biased)
            rfrac = biased - F64(expo - 1)
            recon_mag = rfrac * _POW2_64[expo]
            q = recon_mag / abs(xf)
            if not (q <= op_eps and q * op_eps >= F64(1.0)):
                lossless[i] = True
                codes[i] = xb
                trig[TRIG_DCHECK] += 1
                continue
        sign = uint64(xb >> uint64(63))
        lossless[i] = False
        codes[i] = (uint64(_zigzag(k)) << uint64(1)) | sign
    return trig


# ---------------------------------------------------------------------------
# reconstruct kernels (used by decompression; identical op sequences to the
# double-check inside the quantizers)
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def reconstruct_abs32(codes, lossless, out_bits, out_vals, eb2):
    for i in range(codes.shape[0]):
        if lossless[i]:
            out_bits[i] = codes[i]
        else:
            b = _unzigzag(uint64(codes[i]))
            out_vals[i] = F32(b) * eb2
    return 0


@njit(nogil=True, cache=True)
def reconstruct_abs64(codes, lossless, out_bits, out_vals, eb2):
    for i in range(codes.shape[0]):
        if lossless[i]:
            out_bits[i] = codes[i]
        else:
            b = _unzigzag(codes[i])
            out_vals[i] = F64(b) * eb2
    return 0


@njit(nogil=True, cache=True)
def reconstruct_rel32(codes, lossless, out_bits, out_vals, w):
    for i in range(codes.shape[0]):
        if lossless[i]:
            out_bits[i] = codes[i]
        else:
            c = codes[i]
            sign = c & uint32(1)
            k = _unzigzag(uint64(c >> uint32(1)))
            p = F32(k) * w
            biased = p + F32(127.0)
            # Conforming encoders guarantee biased in [1, 255); clamp keeps
            # the integer conversion defined on corrupt streams.
            if biased < F32(0.0) or not (biased < F32(256.0)):
                biased = F32(0.0)
            expo = int64(biased)
            rfrac = biased - F32(expo - 1)
            mag = F32(F64(rfrac) * _POW2_32[expo])
            out_vals[i] = -mag if sign else mag
    return 0


@njit(nogil=True, cache=True)
def reconstruct_rel64(codes, lossless, out_bits, out_vals, w):
    for i in range(codes.shape[0]):
        if lossless[i]:
            out_bits[i] = codes[i]
        else:
            c = codes[i]
            sign = c & uint64(1)
            k = _unzigzag(c >> uint64(1))
            p = F64(k) * w
            biased = p + F64(1023.0)
            if biased < F64(0.0) or not (biased < F64(2048.0)):
                biased = F64(0.0)
            expo = int64(biased)
            rfrac = biased - F64(expo - 1)
            mag = rfrac * _POW2_64[expo]
            out_vals[i] = -mag if sign else mag
    return 0


# ---------------------------------------------------------------------------
# non-conforming library-log REL variant (benchmark comparisons only): uses
# the platform log2/exp2 in binary64, so it carries no cross-build parity
# guarantee.  The guard chain and double-check are unchanged.
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def quantize_rel32_lib(bits, vals, codes, lossless, op_eps, w, thr, unsafe):
    trig = np.zeros(4, dtype=np.int64)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        if xf != xf:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_NAN] += 1
            continue
        ab = xb & uint32(0x7FFFFFFF)
        aexpo = int64(ab >> uint32(23))
        if aexpo == 0xFF:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_INF] += 1
            continue
        if aexpo == 0:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        l = F32(math.log2(F64(abs(xf))))
        t = l / w
        if not (abs(t) < thr):
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        k, kf = _round_bin(t)
        if k >= MAXBIN32 or k <= -MAXBIN32:
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        p = kf * w
        if not (p > F32(-127.0) and p < F32(128.0)):
            lossless[i] = True
            codes[i] = xb
            trig[TRIG_GUARD] += 1
            continue
        if not unsafe:
            recon_mag = F32(2.0 ** F64(p))
            q = recon_mag / abs(xf)
            if not (q <= op_eps and q * op_eps >= F32(1.0)):
                lossless[i] = True
                codes[i] = xb
                trig[TRIG_DCHECK] += 1
                continue
        sign = uint64(xb >> uint32(31))
        lossless[i] = False
        codes[i] = uint32((uint64(_zigzag(k)) << uint64(1)) | sign)
    return trig


@njit(nogil=True, cache=True)
def reconstruct_rel32_lib(codes, lossless, out_bits, out_vals, w):
    for i in range(codes.shape[0]):
        if lossless[i]:
            out_bits[i] = codes[i]
        else:
            c = codes[i]
            sign = c & uint32(1)
            k = _unzigzag(uint64(c >> uint32(1)))
            p = F32(k) * w
            mag = F32(2.0 ** F64(p))
            out_vals[i] = -mag if sign else mag
    return 0


# ---------------------------------------------------------------------------
# block payload encoding: per-block lossless bitmap (LSB-first u64 words,
# little-endian bytes) followed by one canonical LEB128 varint per value.
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def block_bytes_u32(codes, start, end):
    """Encoded byte size of one block of 32-bit wire codes."""
    n = end - start
    total = int64(((n + 63) // 64) * 8)
    for i in range(start, end):
        c = codes[i]
        if c < uint32(1 << 7):
            total += 1
        elif c < uint32(1 << 14):
            total += 2
        elif c < uint32(1 << 21):
            total += 3
        elif c < uint32(1 << 28):
            total += 4
        else:
            total += 5
    return total


@njit(nogil=True, cache=True)
def block_bytes_u64(codes, start, end):
    n = end - start
    total = int64(((n + 63) // 64) * 8)
    for i in range(start, end):
        c = codes[i]
        nb = 1
        while c >= uint64(0x80):
            c >>= uint64(7)
            nb += 1
        total += nb
    return total


@njit(nogil=True, cache=True)
def emit_block_u32(codes, lossless, start, end, out, pos):
    nwords = (end - start + 63) // 64
    for wi in range(nwords):
        word = uint64(0)
        base = start + wi * 64
        lim = min(64, end - base)
        for bi in range(lim):
            if lossless[base + bi]:
                word |= uint64(1) << uint64(bi)
        for byi in range(8):
            out[pos] = uint8((word >> uint64(8 * byi)) & uint64(0xFF))
            pos += 1
    for i in range(start, end):
        c = codes[i]
        while c >= uint32(0x80):
            out[pos] = uint8((c & uint32(0x7F)) | uint32(0x80))
            pos += 1
            c >>= uint32(7)
        out[pos] = uint8(c)
        pos += 1
    return pos


@njit(nogil=True, cache=True)
def emit_block_u64(codes, lossless, start, end, out, pos):
    nwords = (end - start + 63) // 64
    for wi in range(nwords):
        word = uint64(0)
        base = start + wi * 64
        lim = min(64, end - base)
        for bi in range(lim):
            if lossless[base + bi]:
                word |= uint64(1) << uint64(bi)
        for byi in range(8):
            out[pos] = uint8((word >> uint64(8 * byi)) & uint64(0xFF))
            pos += 1
    for i in range(start, end):
        c = codes[i]
        while c >= uint64(0x80):
            out[pos] = uint8((c & uint64(0x7F)) | uint64(0x80))
            pos += 1
            c >>= uint64(7)
        out[pos] = uint8(c)
        pos += 1
    return pos


@njit(nogil=True, cache=True)
def decode_block_u32(buf, pos, endpos, nvals, codes, lossless, out_off):
    """Parse one block; returns (status, stream_position_or_error_position)."""
    nwords = (nvals + 63) // 64
    if pos + nwords * 8 > endpos:
        return DEC_TRUNCATED, pos
    for wi in range(nwords):
        word = uint64(0)
        for byi in range(8):
            word |= uint64(buf[pos]) << uint64(8 * byi)
            pos += 1
        base = wi * 64
        lim = min(64, nvals - base)
        for bi in range(lim):
            lossless[out_off + base + bi] = (word >> uint64(bi)) & uint64(1)
    for i in range(nvals):
        val = uint64(0)
        shift = 0
        nb = 0
        last = uint8(0)
        while True:
            if pos >= endpos:
                return DEC_TRUNCATED, pos
            byte = buf[pos]
            pos += 1
            nb += 1
            if nb > 5:
                return DEC_NONCANONICAL, pos - 1
            val |= uint64(byte & uint8(0x7F)) << uint64(shift)
            shift += 7
            last = byte
            if (byte & uint8(0x80)) == 0:
                break
        if nb > 1 and (last & uint8(0x7F)) == 0:
            return DEC_NONCANONICAL, pos - 1
        if val > uint64(0xFFFFFFFF):
            return DEC_NONCANONICAL, pos - 1
        codes[out_off + i] = uint32(val)
    if pos != endpos:
        return DEC_COUNT_MISMATCH, pos
    return DEC_OK, pos


@njit(nogil=True, cache=True)
def decode_block_u64(buf, pos, endpos, nvals, codes, lossless, out_off):
    nwords = (nvals + 63) // 64
    if pos + nwords * 8 > endpos:
        return DEC_TRUNCATED, pos
    for wi in range(nwords):
        word = uint64(0)
        for byi in range(8):
            word |= uint64(buf[pos]) << uint64(8 * byi)
            pos += 1
        base = wi * 64
        lim = min(64, nvals - base)
        for bi in range(lim):
            lossless[out_off + base + bi] = (word >> uint64(bi)) & uint64(1)
    for i in range(nvals):
        val = uint64(0)
        shift = 0
        nb = 0
        last = uint8(0)
        while True:
            if pos >= endpos:
                return DEC_TRUNCATED, pos
            byte = buf[pos]
            pos += 1
            nb += 1
            if nb > 10:
                return DEC_NONCANONICAL, pos - 1
            if nb == 10 and (byte & uint8(0x7E)) != 0:
                return DEC_NONCANONICAL, pos - 1
            val |= uint64(byte & uint8(0x7F)) << uint64(shift)
            shift += 7
            last = byte
            if (byte & uint8(0x80)) == 0:
                break
        if nb > 1 and (last & uint8(0x7F)) == 0:
            return DEC_NONCANONICAL, pos - 1
        codes[out_off + i] = val
    if pos != endpos:
        return DEC_COUNT_MISMATCH, pos
    return DEC_OK, pos


@njit(nogil=True, cache=True)
def block_sizes_u32(codes, count, block_size, b0, b1, sizes):
    for b in range(b0, b1):
        s = b * block_size
        e = min(s + block_size, count)
        sizes[b] = block_bytes_u32(codes, s, e)
    return 0


@njit(nogil=True, cache=True)
def block_sizes_u64(codes, count, block_size, b0, b1, sizes):
    for b in range(b0, b1):
        s = b * block_size
        e = min(s + block_size, count)
        sizes[b] = block_bytes_u64(codes, s, e)
    return 0


@njit(nogil=True, cache=True)
def emit_blocks_u32(codes, lossless, count, block_size, b0, b1, offsets, out):
    for b in range(b0, b1):
        s = b * block_size
        e = min(s + block_size, count)
        emit_block_u32(codes, lossless, s, e, out, offsets[b])
    return 0


@njit(nogil=True, cache=True)
def emit_blocks_u64(codes, lossless, count, block_size, b0, b1, offsets, out):
    for b in range(b0, b1):
        s = b * block_size
        e = min(s + block_size, count)
        emit_block_u64(codes, lossless, s, e, out, offsets[b])
    return 0


@njit(nogil=True, cache=True)
def decode_blocks_u32(buf, offsets, region_end, count, block_size, b0, b1, codes, lossless):
    """Decode blocks [b0, b1); returns (status, error_position)."""
    for b in range(b0, b1):
        s = b * block_size
        e = min(s + block_size, count)
        endpos = offsets[b + 1] if b + 1 < offsets.shape[0] else region_end
        status, pos = decode_block_u32(buf, offsets[b], endpos, e - s, codes, lossless, s)
        if status != DEC_OK:
            return status, pos
    return DEC_OK, int64(0)


@njit(nogil=True, cache=True)
def decode_blocks_u64(buf, offsets, region_end, count, block_size, b0, b1, codes, lossless):
    for b in range(b0, b1):
        s = b * block_size
        e = min(s + block_size, count)
        endpos = offsets[b + 1] if b + 1 < offsets.shape[0] else region_end
        status, pos = decode_block_u64(buf, offsets[b], endpos, e - s, codes, lossless, s)
        if status != DEC_OK:
            return status, pos
    return DEC_OK, int64(0)


# ---------------------------------------------------------------------------
# splitmix64
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True, inline="always")
def _splitmix64_at(seed, index):
    z = seed + uint64(0x9E3779B97F4A7C15) * uint64(index)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(nogil=True, cache=True)
def splitmix64_fill(out, seed, start_index):
    """out[i] = splitmix64 output number (start_index + i + 1) for the seed."""
    s = uint64(seed)
    for i in range(out.shape[0]):
        out[i] = _splitmix64_at(s, start_index + i + 1)
    return 0


# ---------------------------------------------------------------------------
# sweep kernels: quantize -> reconstruct -> check a contiguous range of bit
# patterns, tallying outcomes per IEEE value class.  Classes are indexed
# zero=0, denormal=1, normal=2, infinity=3, nan=4; outcomes quantized=0,
# lossless=1, violation=2.
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True, inline="always")
def _class32(xb):
    expo = (xb >> uint32(23)) & uint32(0xFF)
    mant = xb & uint32(0x7FFFFF)
    if expo == uint32(0xFF):
        return 4 if mant != uint32(0) else 3
    if expo == uint32(0):
        return 1 if mant != uint32(0) else 0
    return 2


@njit(nogil=True, cache=True, inline="always")
def _class64(xb):
    expo = (xb >> uint64(52)) & uint64(0x7FF)
    mant = xb & uint64(0xFFFFFFFFFFFFF)
    if expo == uint64(0x7FF):
        return 4 if mant != uint64(0) else 3
    if expo == uint64(0):
        return 1 if mant != uint64(0) else 0
    return 2


@njit(nogil=True, cache=True)
def sweep_abs32_on(bits, vals, eb_eff, eb2, inv_eb2, thr, unsafe):
    tally = np.zeros((5, 3), dtype=np.int64)
    first_viol = int64(-1)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        cls = _class32(xb)
        lossless = False
        b = int64(0)
        if xf != xf:
            lossless = True
        else:
            t = xf * inv_eb2
            if not (abs(t) < thr):
                lossless = True
            else:
                b, bf = _round_bin(t)
                if b >= MAXBIN32 or b <= -MAXBIN32:
                    lossless = True
                elif not unsafe:
                    recon = bf * eb2
                    err = abs(xf - recon)
                    if not (err <= eb_eff):
                        lossless = True
        if lossless:
            # the raw bit pattern round-trips unchanged by construction
            tally[cls, 1] += 1
        else:
            recon = bf * eb2
            err = abs(xf - recon)
            if err <= eb_eff:
                tally[cls, 0] += 1
            else:
                tally[cls, 2] += 1
                if first_viol < 0:
                    first_viol = int64(i)
    return tally, first_viol


@njit(nogil=True, cache=True)
def sweep_abs64_on(bits, vals, eb_eff, eb2, inv_eb2, thr, unsafe):
    tally = np.zeros((5, 3), dtype=np.int64)
    first_viol = int64(-1)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        cls = _class64(xb)
        lossless = False
        b = int64(0)
        if xf != xf:
            lossless = True
        else:
            t = xf * inv_eb2
            if not (abs(t) < thr):
                lossless = True
            else:
                b, bf = _round_bin(t)
                if b >= MAXBIN64 or b <= -MAXBIN64:
                    lossless = True
                elif not unsafe:
                    recon = bf * eb2
                    err = abs(xf - recon)
                    if not (err <= eb_eff):
                        lossless = True
        if lossless:
            tally[cls, 1] += 1
        else:
            recon = bf * eb2
            err = abs(xf - recon)
            if err <= eb_eff:
                tally[cls, 0] += 1
            else:
                tally[cls, 2] += 1
                if first_viol < 0:
                    first_viol = int64(i)
    return tally, first_viol


@njit(nogil=True, cache=True)
def sweep_rel32_on(bits, vals, op_eps, w, thr, unsafe):
    tally = np.zeros((5, 3), dtype=np.int64)
    first_viol = int64(-1)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        cls = _class32(xb)
        lossless = False
        recon_mag = F32(0.0)
        ab = xb & uint32(0x7FFFFFFF)
        aexpo = int64(ab >> uint32(23))
        if xf != xf or aexpo == 0xFF or aexpo == 0:
            lossless = True
        else:
            amant = ab & uint32(0x7FFFFF)
            frac = F32(1.0) + F32(amant) * F32(2.0**-23)
            l = frac + F32(aexpo - 128)
            t = l / w
            if not (abs(t) < thr):
                lossless = True
            else:
                k, kf = _round_bin(t)
                if k >= MAXBIN32 or k <= -MAXBIN32:
                    lossless = True
                else:
                    p = kf * w
                    biased = p + F32(127.0)
                    if not (biased >= F32(1.0) and biased < F32(255.0)):
                        lossless = True
                    else:
                        expo = int64(biased)
                        rfrac = biased - F32(expo - 1)
                        recon_mag = F32(F64(rfrac) * _POW2_32[expo])
                        if not unsafe:
                            q = recon_mag / abs(xf)
                            if not (q <= op_eps and q * op_eps >= F32(1.0)):
                                lossless = True
        if lossless:
            tally[cls, 1] += 1
        else:
            # sign is copied verbatim, so only the magnitude ratio can fail
            q = recon_mag / abs(xf)
            if q <= op_eps and q * op_eps >= F32(1.0):
                tally[cls, 0] += 1
            else:
                tally[cls, 2] += 1
                if first_viol < 0:
                    first_viol = int64(i)
    return tally, first_viol


@njit(nogil=True, cache=True)
def sweep_rel64_on(bits, vals, op_eps, w, thr, unsafe):
    tally = np.zeros((5, 3), dtype=np.int64)
    first_viol = int64(-1)
    for i in range(bits.shape[0]):
        xb = bits[i]
        xf = vals[i]
        cls = _class64(xb)
        lossless = False
        recon_mag = F64(0.0)
        ab = xb & uint64(0x7FFFFFFFFFFFFFFF)
        aexpo = int64(ab >> uint64(52))
        if xf != xf or aexpo == 0x7FF or aexpo == 0:
            lossless = True
        else:
            amant = ab & uint64(0xFFFFFFFFFFFFF)
            frac = F64(1.0) + F64(amant) * F64(2.0**-52)
            l = frac + F64(aexpo - 1024)
            t = l / w
            if not (abs(t) < thr):
                lossless = True
            else:
                k, kf = _round_bin(t)
                if k >= MAXBIN64 or k <= -MAXBIN64:
                    lossless = True
                else:
                    p = kf * w
                    biased = p + F64(1023.0)
                    if not (biased >= F64(1.0) and biased < F64(2047.0)):
                        lossless = True
                    else:
                        expo = int64(biased)
                        rfrac = biased - F64(expo - 1)
                        recon_mag = rfrac * _POW2_64[expo]
                        if not unsafe:
                            q = recon_mag / abs(xf)
                            if not (q <= op_eps and q * op_eps >= F64(1.0)):
                                lossless = True
        if lossless:
            tally[cls, 1] += 1
        else:
            q = recon_mag / abs(xf)
            if q <= op_eps and q * op_eps >= F64(1.0):
                tally[cls, 0] += 1
            else:
                tally[cls, 2] += 1
                if first_viol < 0:
                    first_viol = int64(i)
    return tally, first_viol


# ---------------------------------------------------------------------------
# exhaustive checkers for the log2/pow2 approximations
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def scan_log2_pow2_f32(bits, vals):
    """Scan positive-normal f32 patterns (ascending) for approximation laws.

    Returns (monotone_violations, out_domain_high, out_domain_low,
    min_out_domain_bits, max_roundtrip_dev, first_l, last_l).

    out_domain_high counts patterns whose log2approx value re-biases to the
    infinity exponent (biased >= 255); they form one contiguous band at the
    very top of the normal range, and min_out_domain_bits pins its start.
    out_domain_low counts biased < 1 cases (expected never).
    max_roundtrip_dev is the largest |pow2approx(log2approx(x))/x - 1| over
    in-domain patterns, accumulated in binary64.
    """
    mono_viol = int64(0)
    out_high = int64(0)
    out_low = int64(0)
    min_out_bits = uint32(0xFFFFFFFF)
    max_dev = F64(0.0)
    prev_l = F32(-np.inf)
    first_l = F32(0.0)
    for i in range(bits.shape[0]):
        xb = bits[i]
        expo = int64(xb >> uint32(23))
        mant = xb & uint32(0x7FFFFF)
        frac = F32(1.0) + F32(mant) * F32(2.0**-23)
        l = frac + F32(expo - 128)
        if i == 0:
            first_l = l
        if l < prev_l:
            mono_viol += 1
        prev_l = l
        biased = l + F32(127.0)
        if not (biased >= F32(1.0) and biased < F32(255.0)):
            if biased >= F32(255.0):
                out_high += 1
                if xb < min_out_bits:
                    min_out_bits = xb
            else:
                out_low += 1
            continue
        e2 = int64(biased)
        rfrac = biased - F32(e2 - 1)
        rt = F32(F64(rfrac) * _POW2_32[e2])
        dev = abs(F64(rt) / F64(vals[i]) - F64(1.0))
        if dev > max_dev:
            max_dev = dev
    return mono_viol, out_high, out_low, min_out_bits, max_dev, first_l, prev_l
