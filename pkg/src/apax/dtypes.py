"""Core value types: numeric datatypes, stream configuration, block headers,
the 16-bit attenuation scale code, and per-block signal statistics.

Everything in this module is an immutable value type and safe to share
between threads.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CorruptStream, InvalidConfig, RangeError, TruncatedStream


class Dtype(enum.Enum):
    """Supported element types, with their container wire codes."""

    I8 = ("i8", 0, 1, np.int8)
    I16 = ("i16", 1, 2, np.int16)
    I32 = ("i32", 2, 4, np.int32)
    F32 = ("f32", 3, 4, np.float32)
    F64 = ("f64", 4, 8, np.float64)

    def __init__(self, code: str, wire_code: int, width_bytes: int, np_dtype):
        self.code = code
        self.wire_code = wire_code
        self.width_bytes = width_bytes
        self.np_dtype = np.dtype(np_dtype)

    @property
    def is_float(self) -> bool:
        return self in (Dtype.F32, Dtype.F64)

    @classmethod
    def from_code(cls, code: str) -> "Dtype":
        for d in cls:
            if d.code == code:
                return d
        raise InvalidConfig(f"unknown dtype {code!r}")

    @classmethod
    def from_wire(cls, wire: int) -> "Dtype":
        for d in cls:
            if d.wire_code == wire:
                return d
        raise CorruptStream(f"unknown dtype wire code {wire}")


class Mode(enum.Enum):
    LOSSLESS = 0
    FIXED_RATE = 1
    FIXED_QUALITY = 2

    @classmethod
    def from_name(cls, name: str) -> "Mode":
        table = {"lossless": cls.LOSSLESS, "fixedrate": cls.FIXED_RATE,
                 "fixedquality": cls.FIXED_QUALITY}
        key = name.lower().replace("-", "").replace("_", "")
        if key not in table:
            raise InvalidConfig(f"unknown mode {name!r}")
        return table[key]


MIN_BLOCK_SIZE = 64
MAX_BLOCK_SIZE = 16384


@dataclass(frozen=True)
class StreamConfig:
    """Per-stream encoding parameters.

    ``target`` is bits/sample in FIXED_RATE mode, a signal-to-residual ratio
    in dB in FIXED_QUALITY mode, and ignored for LOSSLESS.
    """

    dtype: Dtype
    block_size: int = 4096
    mode: Mode = Mode.LOSSLESS
    target: float = 0.0

    def validate(self) -> None:
        if not (MIN_BLOCK_SIZE <= self.block_size <= MAX_BLOCK_SIZE):
            raise InvalidConfig(
                f"block_size {self.block_size} outside [{MIN_BLOCK_SIZE}, {MAX_BLOCK_SIZE}]")
        if self.block_size % 4 != 0:
            raise InvalidConfig(f"block_size {self.block_size} not a multiple of 4")
        if self.mode is Mode.LOSSLESS and self.dtype.is_float:
            raise InvalidConfig("lossless unsupported for floats")
        if self.mode is Mode.FIXED_RATE and not self.target > 0:
            raise InvalidConfig("FixedRate target must be > 0 bits/sample")


# ---------------------------------------------------------------------------
# 16-bit attenuation scale code: 6-bit biased exponent, 10-bit fraction.
# value = (1 + f/1024) * 2^(e - 31), covering [2^-31, 2^32).
# ---------------------------------------------------------------------------

SCALE_MIN = 2.0 ** -31
SCALE_SUP = 2.0 ** 33  # top exponent code reaches (1 + 1023/1024) * 2^32
SCALE_CODE_ONE = 31 << 10  # e=31, f=0 -> 1.0


def encode_scale_code(a: float) -> int:
    """Largest 16-bit scale code whose decoded value is <= ``a``."""
    if not (SCALE_MIN <= a < SCALE_SUP) or not math.isfinite(a):
        raise RangeError(f"attenuation {a!r} outside [2^-31, 2^33)")
    mant, exp = math.frexp(a)  # a = mant * 2^exp, mant in [0.5, 1)
    e = exp - 1 + 31
    m = math.ldexp(a, -(e - 31))  # in [1, 2)
    f = int((m - 1.0) * 1024.0)
    if f > 1023:  # guard against FP edge right below a power of two
        f = 1023
    return (e << 10) | f


def decode_scale_code(code: int) -> float:
    """Exact value of a 16-bit scale code."""
    if not 0 <= code <= 0xFFFF:
        raise RangeError(f"scale code {code} not a 16-bit value")
    e = code >> 10
    f = code & 0x3FF
    return math.ldexp(1024 + f, e - 31 - 10)


# ---------------------------------------------------------------------------
# Block header.
#
# Byte 0: selector (2 LSBs) | restart flag (bit 2) | 5 zero bits.
# Bytes 1-2: scale code, little endian.  Byte 3: reserved zero.
# Float dtypes append byte 4 (block exponent, two's complement) and
# byte 5 (reserved zero), for a total of 6 bytes instead of 4.
# ---------------------------------------------------------------------------

SELECTOR_D0 = 0
SELECTOR_D1 = 1
SELECTOR_D2 = 2


@dataclass(frozen=True)
class BlockHeader:
    selector: int
    restart_flag: bool
    scale_code: int
    float_block_exp: Optional[int] = None  # present iff the stream is float

    @staticmethod
    def size_for(dtype: Dtype) -> int:
        return 6 if dtype.is_float else 4

    def serialize(self, dtype: Dtype) -> bytes:
        if self.selector not in (SELECTOR_D0, SELECTOR_D1, SELECTOR_D2):
            raise RangeError(f"selector {self.selector} is reserved")
        b0 = (self.selector & 0x3) | (0x4 if self.restart_flag else 0)
        out = struct.pack("<BHB", b0, self.scale_code, 0)
        if dtype.is_float:
            if self.float_block_exp is None:
                raise RangeError("float stream header requires float_block_exp")
            out += struct.pack("<bB", self.float_block_exp, 0)
        return out

    @classmethod
    def parse(cls, buf: bytes, dtype: Dtype) -> "BlockHeader":
        size = cls.size_for(dtype)
        if len(buf) < size:
            raise TruncatedStream("block header truncated")
        b0, scale_code, _rsv = struct.unpack_from("<BHB", buf, 0)
        selector = b0 & 0x3
        if selector == 3:
            raise CorruptStream("reserved selector value 3")
        restart = bool(b0 & 0x4)
        fbe: Optional[int] = None
        if dtype.is_float:
            fbe, _rsv2 = struct.unpack_from("<bB", buf, 4)
        return cls(selector, restart, scale_code, fbe)


@dataclass(frozen=True)
class AttenuatorState:
    """Attenuation as a positive multiplier plus its dB equivalent.

    ``att_db = 20*log10(a)``; a = 1 (0 dB) means no attenuation.
    """

    att_db: float
    a_min: float = SCALE_MIN
    a_max: float = 1.0
    loop_gain: float = 0.75

    @property
    def a(self) -> float:
        # Clamp after the dB->linear conversion: at the exact bound the
        # round trip can land one ulp outside [a_min, a_max].
        return min(max(10.0 ** (self.att_db / 20.0), self.a_min), self.a_max)

    def clamped(self, att_db: float) -> "AttenuatorState":
        lo = 20.0 * math.log10(self.a_min)
        hi = 20.0 * math.log10(self.a_max)
        return AttenuatorState(min(max(att_db, lo), hi),
                               self.a_min, self.a_max, self.loop_gain)


@dataclass(frozen=True)
class BlockStats:
    """Signal-monitor output for one quantized block."""

    center_freq_norm: float  # cycles/sample, in [0, 0.5]
    peak_abs: float
    mean_abs: float
    par_db: float  # 20*log10(peak/mean), 0 for an all-zero block
