"""Bit-exact serialized stream format.

Layout (all integers little-endian):

    header   48 bytes: magic "GEBQ", version u16, dtype u8 (0=f32, 1=f64),
             mode u8 (0=ABS, 1=REL, 2=NOA), flags u8 (bit 0: double-check
             disabled), 3 reserved zero bytes, count u64, eb_bits u64
             (binary64 pattern of the user bound), range_bits u64 (binary64
             of R for NOA, else 0), derived_bits u64 (eb2 for ABS/NOA or w
             for REL, zero-extended for f32), block_size u32
    index    u64 block count, then one u64 byte offset per block, relative
             to the start of the block region (first offset is 0)
    blocks   per block: lossless bitmap (ceil(n/64) u64 words, bit i of the
             word sequence set iff value i is lossless, LSB-first within
             each word), then n LEB128 varints, one per value in order

Varints are canonical: minimal length, and the encoded value fits the
stream's value width.  Quantized wire codes are zigzag(bin) for ABS/NOA and
(zigzag(bin) << 1) | sign for REL; lossless codes are the raw bit pattern.
Decompression consumes derived_bits verbatim, never re-deriving constants,
so both sides of a transfer use the compressor's arithmetic.

See FORMAT.md for a hex-dump walkthrough.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .quantizers import ABS, NOA, REL, CodedArray, CodedValue

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER_SIZE",
    "StreamHeader",
    "ContainerError",
    "BadMagic",
    "BadVersion",
    "CorruptHeader",
    "TruncatedStream",
    "NonCanonicalVarint",
    "CountMismatch",
    "encode_stream",
    "decode_stream",
    "zigzag",
    "unzigzag",
    "coded_array_from_values",
    "values_from_coded_array",
]

MAGIC = b"GEBQ"
VERSION = 1
HEADER_SIZE = 48
_HEADER_FMT = "<4sHBBB3sQQQQI"

_MODE_CODES = {ABS: 0, REL: 1, NOA: 2}
_MODE_NAMES = {v: k for k, v in _MODE_CODES.items()}
FLAG_NO_DOUBLE_CHECK = 0x01


class ContainerError(Exception):
    """Base class for malformed-stream errors."""


class BadMagic(ContainerError):
    pass


class BadVersion(ContainerError):
    pass


class CorruptHeader(ContainerError):
    pass


class TruncatedStream(ContainerError):
    pass


class NonCanonicalVarint(ContainerError):
    pass


class CountMismatch(ContainerError):
    pass


_STATUS_ERRORS = {
    _kernels.DEC_TRUNCATED: (TruncatedStream, "payload ends mid-block"),
    _kernels.DEC_NONCANONICAL: (NonCanonicalVarint, "non-canonical or out-of-range varint"),
    _kernels.DEC_COUNT_MISMATCH: (CountMismatch, "block extent does not match its value count"),
}


@dataclass(frozen=True)
class StreamHeader:
    width: int  # 32 or 64
    mode: str
    count: int
    eb_bits: int  # raw binary64 pattern of the user bound
    derived_bits: int  # raw pattern of eb2 (ABS/NOA) or w (REL)
    range_bits: int = 0  # raw binary64 of R (NOA only)
    block_size: int = 4096
    flags: int = 0

    @property
    def eb(self) -> float:
        return float(np.uint64(self.eb_bits).view(np.float64))

    @property
    def value_range(self) -> float:
        return float(np.uint64(self.range_bits).view(np.float64))

    @property
    def derived_value(self):
        if self.width == 32:
            return np.uint32(self.derived_bits & 0xFFFFFFFF).view(np.float32)
        return np.uint64(self.derived_bits).view(np.float64)

    @property
    def double_check_disabled(self) -> bool:
        return bool(self.flags & FLAG_NO_DOUBLE_CHECK)

    def n_blocks(self) -> int:
        return -(-self.count // self.block_size) if self.count else 0

    def pack(self) -> bytes:
        return struct.pack(
            _HEADER_FMT,
            MAGIC,
            VERSION,
            0 if self.width == 32 else 1,
            _MODE_CODES[self.mode],
            self.flags,
            b"\x00\x00\x00",
            self.count,
            self.eb_bits,
            self.range_bits,
            self.derived_bits,
            self.block_size,
        )

    @classmethod
    def unpack(cls, data: bytes) -> "StreamHeader":
        if len(data) < HEADER_SIZE:
            raise TruncatedStream(f"stream shorter than the {HEADER_SIZE}-byte header")
        magic, version, dtype, mode, flags, _reserved, count, eb_bits, range_bits, derived_bits, block_size = struct.unpack(
            _HEADER_FMT, data[:HEADER_SIZE]
        )
        if magic != MAGIC:
            raise BadMagic(f"bad magic {magic!r}")
        if version != VERSION:
            raise BadVersion(f"unsupported version {version}")
        if dtype not in (0, 1):
            raise CorruptHeader(f"unknown dtype code {dtype}")
        if mode not in _MODE_NAMES:
            raise CorruptHeader(f"unknown mode code {mode}")
        if block_size < 1:
            raise CorruptHeader("block_size must be positive")
        return cls(
            width=32 if dtype == 0 else 64,
            mode=_MODE_NAMES[mode],
            count=count,
            eb_bits=eb_bits,
            range_bits=range_bits,
            derived_bits=derived_bits,
            block_size=block_size,
            flags=flags,
        )


# ---------------------------------------------------------------------------
# wire-code mapping between CodedValue and the payload integers
# ---------------------------------------------------------------------------

def zigzag(v: int, width: int = 32) -> int:
    """Signed-to-unsigned interleaving: 0,-1,1,-2 -> 0,1,2,3."""
    mask = (1 << width) - 1
    return ((v << 1) & mask) ^ ((v >> (width - 1)) & mask)


def unzigzag(z: int) -> int:
    return (z >> 1) ^ -(z & 1)


def _wire_code(cv: CodedValue, mode: str, width: int) -> int:
    if cv.lossless:
        return cv.raw
    # |bin| < 2^(width-2), so the 64-bit zigzag agrees with the width's own
    # and the REL sign bit still fits the code word.
    z = zigzag(cv.bin, 64)
    code = (z << 1) | cv.sign if mode == REL else z
    if code >= 1 << width:
        raise ValueError(f"bin {cv.bin} exceeds the {width}-bit code range")
    return code


def _coded_value(code: int, lossless: bool, mode: str) -> CodedValue:
    if lossless:
        return CodedValue.from_raw(code)
    if mode == REL:
        return CodedValue.quantized(unzigzag(code >> 1), sign=code & 1)
    return CodedValue.quantized(unzigzag(code))


def coded_array_from_values(values: Iterable[CodedValue], mode: str, width: int) -> CodedArray:
    values = list(values)
    dtype = np.uint32 if width == 32 else np.uint64
    codes = np.empty(len(values), dtype=dtype)
    lossless = np.empty(len(values), dtype=np.bool_)
    for i, cv in enumerate(values):
        lossless[i] = cv.lossless
        codes[i] = _wire_code(cv, mode, width)
    return CodedArray(mode=mode, width=width, lossless=lossless, codes=codes)


def values_from_coded_array(ca: CodedArray) -> list[CodedValue]:
    return [
        _coded_value(int(c), bool(l), ca.mode)
        for c, l in zip(ca.codes, ca.lossless)
    ]


# ---------------------------------------------------------------------------
# encode / decode
# ---------------------------------------------------------------------------

def encode_stream(coded: CodedArray, header: StreamHeader, workers: int = 1) -> bytes:
    """Serialize a coded sequence; byte-identical for any worker count."""
    if len(coded) != header.count:
        raise ValueError(f"coded length {len(coded)} != header count {header.count}")
    if coded.width != header.width or coded.mode != header.mode:
        raise ValueError("coded array and header disagree on mode/width")
    nblocks = header.n_blocks()
    sizes = np.zeros(nblocks, dtype=np.int64)
    f_sizes = _kernels.block_sizes_u32 if header.width == 32 else _kernels.block_sizes_u64
    f_emit = _kernels.emit_blocks_u32 if header.width == 32 else _kernels.emit_blocks_u64

    def size_task(b0, b1):
        f_sizes(coded.codes, header.count, header.block_size, b0, b1, sizes)

    _run_block_tasks(size_task, nblocks, workers)
    offsets = np.zeros(nblocks + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    out = np.empty(int(offsets[-1]), dtype=np.uint8)

    def emit_task(b0, b1):
        f_emit(coded.codes, coded.lossless, header.count, header.block_size, b0, b1, offsets, out)

    _run_block_tasks(emit_task, nblocks, workers)
    index = struct.pack("<Q", nblocks) + offsets[:nblocks].astype("<u8").tobytes()
    return header.pack() + index + out.tobytes()


def decode_stream(data: bytes, workers: int = 1) -> tuple[StreamHeader, CodedArray]:
    """Exact inverse of :func:`encode_stream`; raises typed errors on corruption."""
    header = StreamHeader.unpack(data)
    # Each value costs at least one payload byte, so a count beyond the
    # stream length can never be satisfiable; reject before allocating.
    if header.count > len(data):
        raise TruncatedStream("header count exceeds stream size")
    pos = HEADER_SIZE
    if len(data) < pos + 8:
        raise TruncatedStream("stream ends before the block index")
    (nblocks,) = struct.unpack_from("<Q", data, pos)
    pos += 8
    if nblocks != header.n_blocks():
        raise CountMismatch(
            f"index holds {nblocks} blocks, header count implies {header.n_blocks()}"
        )
    if len(data) < pos + 8 * nblocks:
        raise TruncatedStream("stream ends inside the block index")
    rel_offsets = np.frombuffer(data, dtype="<u8", count=nblocks, offset=pos)
    pos += 8 * nblocks
    region = np.frombuffer(data, dtype=np.uint8, offset=pos)
    if nblocks:
        if rel_offsets[0] != 0:
            raise CountMismatch("first block offset must be 0")
        if np.any(np.diff(rel_offsets.astype(np.int64)) < 0):
            raise CountMismatch("block offsets must be non-decreasing")
        if int(rel_offsets[-1]) > len(region):
            raise TruncatedStream("block offset beyond end of stream")
    elif len(region):
        raise CountMismatch("trailing bytes after an empty block region")
    offsets = rel_offsets.astype(np.int64)

    dtype = np.uint32 if header.width == 32 else np.uint64
    codes = np.empty(header.count, dtype=dtype)
    lossless = np.empty(header.count, dtype=np.bool_)
    f_dec = _kernels.decode_blocks_u32 if header.width == 32 else _kernels.decode_blocks_u64
    failures = []

    def decode_task(b0, b1):
        status, errpos = f_dec(
            region, offsets, len(region), header.count, header.block_size, b0, b1, codes, lossless
        )
        if status != _kernels.DEC_OK:
            failures.append((status, errpos))

    _run_block_tasks(decode_task, nblocks, workers)
    if failures:
        status, errpos = min(failures, key=lambda f: f[1])
        exc, msg = _STATUS_ERRORS[status]
        raise exc(f"{msg} (byte {int(errpos)} of block region)")
    return header, CodedArray(mode=header.mode, width=header.width, lossless=lossless, codes=codes)


def _run_block_tasks(fn, nblocks: int, workers: int, blocks_per_task: int = 64) -> None:
    """Apply fn to disjoint block ranges, optionally on a thread pool.

    The ranges partition [0, nblocks) deterministically, every task writes
    only its own slice, and results carry no ordering, so output bytes do
    not depend on the worker count.
    """
    if nblocks == 0:
        return
    spans = [
        (b, min(b + blocks_per_task, nblocks)) for b in range(0, nblocks, blocks_per_task)
    ]
    if workers <= 1 or len(spans) == 1:
        for b0, b1 in spans:
            fn(b0, b1)
        return
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda s: fn(*s), spans))
