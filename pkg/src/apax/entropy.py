"""Bit packer / unpacker.

Blocks are packed as groups of 4 samples sharing one exponent (the minimal
two's-complement width that holds every sample in the group).  Group
exponents are entropy coded with joint exponent encoding (JEE): exponent
differences are paired into single 4-bit tokens whenever both fall in
{-1, 0, +1}; lone differences in {-2..+2} use one of five 4-bit tokens; any
other exponent is escaped as nibble 15 followed by its 8-bit absolute value.
The first exponent of every block is always escape-coded.  Nibble 14 is
reserved and never emitted.

Payload layout: [JEE nibble stream, zero-padded to a byte boundary]
followed by [mantissa bits, MSB first, zero-padded to a byte boundary].
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from .errors import CorruptStream, InternalError, TruncatedStream

try:  # optional JIT fast path; the pure-Python code is the reference
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

GROUP_SIZE = 4
MAX_EXPONENT = 34  # second differences of 32-bit values, plus margin

_JOINT_BASE = 0     # nibbles 0..8: paired diffs, value (d1+1)*3 + (d2+1)
_SINGLE_BASE = 9    # nibbles 9..13: single diff, value 9 + (d+2)
_RESERVED_NIBBLE = 14
_ESCAPE_NIBBLE = 15


def group_exponents(samples: np.ndarray) -> np.ndarray:
    """Minimal two's-complement width per 4-sample group.

    Returns one exponent in [0, MAX_EXPONENT] per group; 0 iff the whole
    group is zero.
    """
    v = np.asarray(samples, dtype=np.int64)
    if v.size % GROUP_SIZE != 0:
        raise InternalError("sample count not a multiple of 4")
    v = v.reshape(-1, GROUP_SIZE)
    u = np.where(v >= 0, v, -v - 1)
    # frexp exponent == bit_length for positive ints (exact below 2^53)
    bl = np.frexp(u.astype(np.float64))[1]
    width = np.where(v == 0, 0, bl + 1)
    e = width.max(axis=1).astype(np.int64)
    if e.size and int(e.max()) > MAX_EXPONENT:
        raise InternalError("sample outside 34-bit range")
    return e


def group_exponent(group: Sequence[int]) -> int:
    """Scalar convenience wrapper for a single 4-sample group."""
    return int(group_exponents(np.asarray(group, dtype=np.int64))[0])


def _jee_encode_kernel(e: np.ndarray, out: np.ndarray) -> int:
    out[0] = 15
    out[1] = e[0] >> 4
    out[2] = e[0] & 0xF
    k = 3
    i = 1
    n = e.size
    while i < n:
        d1 = e[i] - e[i - 1]
        if i + 1 < n and -1 <= d1 <= 1:
            d2 = e[i + 1] - e[i]
            if -1 <= d2 <= 1:
                out[k] = (d1 + 1) * 3 + (d2 + 1)
                k += 1
                i += 2
                continue
        if -2 <= d1 <= 2:
            out[k] = 9 + (d1 + 2)
            k += 1
        else:
            out[k] = 15
            out[k + 1] = e[i] >> 4
            out[k + 2] = e[i] & 0xF
            k += 3
        i += 1
    return k


if _numba is not None:
    _jee_encode_kernel_fast = _numba.njit("int64(int64[::1], uint8[::1])",
                                          cache=True)(_jee_encode_kernel)
else:  # pragma: no cover
    _jee_encode_kernel_fast = _jee_encode_kernel


def _jee_encode_nibbles(exponents) -> np.ndarray:
    e = np.ascontiguousarray(exponents, dtype=np.int64)
    if e.size == 0:
        raise InternalError("empty exponent stream")
    out = np.empty(3 * e.size, dtype=np.uint8)
    k = _jee_encode_kernel_fast(e, out)
    return out[:k]


def jee_encode(exponents: Sequence[int]) -> List[int]:
    """Encode group exponents into a JEE nibble stream."""
    return _jee_encode_nibbles(exponents).tolist()


def jee_decode(nibbles: Sequence[int], n_groups: int) -> np.ndarray:
    """Decode a JEE nibble stream back into ``n_groups`` exponents."""
    exps, used = _jee_decode_counted(nibbles, n_groups)
    return exps


def _jee_decode_kernel(nibs: np.ndarray, n_groups: int, out: np.ndarray) -> Tuple[int, int]:
    """Returns (nibbles consumed, status): 0 ok, 1 truncated, 2 reserved
    nibble, 3 exponent out of range, 4 too many exponents, 5 stream does
    not start with an absolute exponent."""
    pos = 0
    cnt = 0
    total = nibs.size
    while cnt < n_groups:
        if pos >= total:
            return pos, 1
        nib = nibs[pos]
        pos += 1
        if nib == 14:
            return pos, 2
        if nib == 15:
            if pos + 1 >= total:
                return pos, 1
            v = (nibs[pos] << 4) | nibs[pos + 1]
            pos += 2
            if v > 34:
                return pos, 3
            out[cnt] = v
            cnt += 1
        elif cnt == 0:
            return pos, 5
        elif nib >= 9:
            v = out[cnt - 1] + (nib - 11)
            if v < 0 or v > 34:
                return pos, 3
            out[cnt] = v
            cnt += 1
        else:
            d1 = nib // 3 - 1
            d2 = nib % 3 - 1
            v = out[cnt - 1] + d1
            if v < 0 or v > 34:
                return pos, 3
            out[cnt] = v
            cnt += 1
            if cnt >= n_groups:
                return pos, 4
            v2 = v + d2
            if v2 < 0 or v2 > 34:
                return pos, 3
            out[cnt] = v2
            cnt += 1
    return pos, 0


if _numba is not None:
    _jee_decode_kernel_fast = _numba.njit(
        "UniTuple(int64, 2)(int64[::1], int64, int64[::1])",
        cache=True)(_jee_decode_kernel)
else:  # pragma: no cover
    _jee_decode_kernel_fast = _jee_decode_kernel

_DECODE_ERRORS = {
    1: (TruncatedStream, "JEE nibble stream exhausted"),
    2: (CorruptStream, "reserved JEE nibble 14"),
    3: (CorruptStream, f"decoded exponent outside [0, {MAX_EXPONENT}]"),
    4: (CorruptStream, "JEE token stream yields too many exponents"),
    5: (CorruptStream, "JEE stream must start with an absolute exponent"),
}


def _jee_decode_counted(nibbles, n_groups: int) -> Tuple[np.ndarray, int]:
    """Decode and also report how many nibbles were consumed."""
    nibs = np.ascontiguousarray(nibbles, dtype=np.int64)
    out = np.empty(n_groups, dtype=np.int64)
    pos, status = _jee_decode_kernel_fast(nibs, n_groups, out)
    if status:
        exc, msg = _DECODE_ERRORS[status]
        raise exc(msg)
    return out, pos


def _pack_nibbles(nibs: Sequence[int]) -> bytes:
    arr = np.asarray(nibs, dtype=np.uint8)
    if arr.size % 2:
        arr = np.concatenate([arr, np.zeros(1, np.uint8)])
    return ((arr[0::2] << 4) | arr[1::2]).tobytes()


def _unpack_nibbles(buf: bytes) -> np.ndarray:
    b = np.frombuffer(buf, dtype=np.uint8)
    out = np.empty(b.size * 2, dtype=np.uint8)
    out[0::2] = b >> 4
    out[1::2] = b & 0xF
    return out


def _bit_layout(exponents: np.ndarray):
    """Per-bit sample index and shift for the mantissa section."""
    e_per_sample = np.repeat(exponents, GROUP_SIZE)
    total = int(e_per_sample.sum())
    if total == 0:
        return e_per_sample, total, None, None
    idx = np.repeat(np.arange(e_per_sample.size), e_per_sample)
    starts = np.cumsum(e_per_sample) - e_per_sample
    pos_in = np.arange(total) - np.repeat(starts, e_per_sample)
    shift = e_per_sample[idx] - 1 - pos_in
    return e_per_sample, total, idx, shift


def pack_block(samples: np.ndarray, exponents: np.ndarray) -> bytes:
    """Pack one block's samples with their group exponents into bytes."""
    v = np.asarray(samples, dtype=np.int64)
    e = np.asarray(exponents, dtype=np.int64)
    if v.size != e.size * GROUP_SIZE:
        raise InternalError("sample count does not match exponent count")
    e_per_sample, total, idx, shift = _bit_layout(e)
    # Verify every sample fits its group width (an exponent-computation bug
    # otherwise corrupts the stream silently).
    half = np.int64(1) << np.maximum(e_per_sample - 1, 0)
    bad = np.where(e_per_sample > 0, (v < -half) | (v > half - 1), v != 0)
    if np.any(bad):
        raise InternalError("sample exceeds its group exponent width")
    jee = _pack_nibbles(_jee_encode_nibbles(e))
    if total == 0:
        return jee
    masked = v & ((np.int64(1) << e_per_sample) - 1)
    bits = ((masked[idx] >> shift) & 1).astype(np.uint8)
    return jee + np.packbits(bits).tobytes()


def unpack_block(payload: bytes, n_groups: int) -> np.ndarray:
    """Inverse of :func:`pack_block`; raises TruncatedStream on short input."""
    samples, _ = unpack_block_counted(payload, n_groups)
    return samples


def unpack_block_counted(payload, n_groups: int) -> Tuple[np.ndarray, int]:
    """Unpack a block and return (samples, bytes consumed).

    ``payload`` may extend past the block; extra bytes are ignored, which is
    what lets the stream decoder walk a concatenated container.
    """
    buf = memoryview(payload)
    # The JEE section never exceeds 3 nibbles per exponent (escape + 8-bit
    # absolute), so a bounded prefix suffices even on concatenated streams.
    max_jee_bytes = (3 * n_groups + 2) // 2
    nibbles = _unpack_nibbles(bytes(buf[:max_jee_bytes]))
    exps, used_nibbles = _jee_decode_counted(nibbles, n_groups)
    jee_bytes = (used_nibbles + 1) // 2
    e_per_sample, total, idx, shift = _bit_layout(exps)
    n = n_groups * GROUP_SIZE
    mant_bytes = (total + 7) // 8
    if len(buf) < jee_bytes + mant_bytes:
        raise TruncatedStream("mantissa section truncated")
    if total == 0:
        return np.zeros(n, dtype=np.int64), jee_bytes
    mant = np.frombuffer(buf[jee_bytes:jee_bytes + mant_bytes], dtype=np.uint8)
    bits = np.unpackbits(mant)[:total]
    contrib = (bits.astype(np.int64) << shift).astype(np.float64)
    vals = np.bincount(idx, weights=contrib, minlength=n).astype(np.int64)
    # Sign-extend from each sample's group width.
    width = e_per_sample
    halfv = np.where(width > 0, np.int64(1) << np.maximum(width - 1, 0), 0)
    vals = np.where((width > 0) & (vals >= halfv), vals - (np.int64(1) << width), vals)
    return vals, jee_bytes + mant_bytes


def jee_side_info_bits(exponents: Sequence[int]) -> int:
    """Total JEE bits spent on an exponent stream (4 bits per nibble)."""
    return 4 * len(jee_encode(exponents))
