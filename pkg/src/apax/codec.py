"""Encode/decode pipeline and the bit-exact container format.

Encoder order per block: quantize (attenuator) -> signal monitor ->
derivative streams -> stream selection -> bit packing -> header.  The
attenuator is driven by an adaptive loop: in FIXED_RATE mode it integrates
the bits/sample error, in FIXED_QUALITY mode the measured block SRR error.
Gain updates are slew-limited to 6 dB per block.

Container (little-endian): magic "APAX" | version u8 = 1 | dtype u8 |
mode u8 | reserved u8 = 0 | block_size u32 | element_count u64 |
target f64 | blocks as (BlockHeader, payload).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .dtypes import (
    SCALE_CODE_ONE,
    SELECTOR_D0,
    AttenuatorState,
    BlockHeader,
    Dtype,
    Mode,
    StreamConfig,
    decode_scale_code,
    encode_scale_code,
)
from .entropy import group_exponents, pack_block, unpack_block_counted
from .errors import (
    CorruptStream,
    InvalidConfig,
    NotApaxFile,
    TruncatedStream,
    UnsupportedValue,
    UnsupportedVersion,
)
from .transform import (
    DerivativeHistory,
    StreamCosts,
    cost_from_exponents,
    derive_streams,
    monitor,
    reconstruct,
    select_stream,
)

MAGIC = b"APAX"
VERSION = 1
FILE_HEADER_FMT = "<4sBBBBIQd"
FILE_HEADER_SIZE = struct.calcsize(FILE_HEADER_FMT)

RATE_LOOP_GAIN_DB = 0.75    # dB of gain change per bit/sample of rate error
QUALITY_LOOP_GAIN = 0.5     # dB of gain change per dB of SRR error
MAX_STEP_DB = 6.0           # slew limit per block update
_FLOAT_HEADROOM = 2.0 ** 30  # per-block peak target for quantized floats

_SQRT12 = math.sqrt(12.0)


@dataclass
class RateLoopState:
    target_bps: float
    accumulated_error: float = 0.0
    step_db: float = RATE_LOOP_GAIN_DB


@dataclass
class CodecState:
    """Mutable per-stream encoder state (one instance per stream)."""

    config: StreamConfig
    attenuator: AttenuatorState = field(default_factory=lambda: AttenuatorState(0.0))
    history: DerivativeHistory = field(default_factory=DerivativeHistory)
    prev_costs: Optional[StreamCosts] = None
    blocks_emitted: int = 0
    _initialized: bool = False


def _round_half_even(x: np.ndarray) -> np.ndarray:
    # np.round rounds halves to even, matching the bitstream contract.
    return np.round(x)


def _clamp_step(delta_db: float) -> float:
    return max(-MAX_STEP_DB, min(MAX_STEP_DB, delta_db))


def quantize_block(x: np.ndarray, a: float, dtype: Dtype) -> Tuple[np.ndarray, int, Optional[int]]:
    """Quantize one block; returns (q, scale_code, float_block_exp).

    Integers: q = round_half_even(x * a) with a <= 1 (a = 1 is exact).
    Floats: a single block scale S = decode(scale_code) * 2^float_block_exp
    is chosen so max|x|*S <= 2^30, with ``a`` folded in as a quality knob.
    """
    if not dtype.is_float:
        code = encode_scale_code(a)
        a_q = decode_scale_code(code)
        if a_q == 1.0:
            q = np.asarray(x, dtype=np.int64)
        else:
            q = _round_half_even(np.asarray(x, dtype=np.float64) * a_q).astype(np.int64)
        return q, code, None

    xf = np.asarray(x, dtype=np.float64)
    peak = float(np.max(np.abs(xf))) if xf.size else 0.0
    if peak == 0.0 or not math.isfinite(peak):
        if not math.isfinite(peak):
            raise UnsupportedValue("non-finite float input")
        return np.zeros(xf.size, dtype=np.int64), SCALE_CODE_ONE, 0

    s_des = a * _FLOAT_HEADROOM / peak
    # Split S into the 16-bit scale code (2^-31..2^32) and a signed 8-bit
    # power of two; clamp when the input's magnitude is extreme.
    l2 = math.floor(math.log2(s_des))
    fbe = 0 if -31 <= l2 <= 31 else l2 - 31
    fbe = max(-127, min(127, fbe))
    rem = s_des * 2.0 ** (-fbe)
    rem = max(2.0 ** -31, min(rem, math.nextafter(2.0 ** 33, 0.0)))
    code = encode_scale_code(rem)
    while True:
        s = decode_scale_code(code) * 2.0 ** fbe
        q = _round_half_even(xf * s)
        if float(np.max(np.abs(q))) < 2.0 ** 31 or fbe <= -127:
            break
        fbe -= 1  # overflow guard: halve the scale and retry
    return q.astype(np.int64), code, fbe


def dequantize_block(q: np.ndarray, header: BlockHeader, dtype: Dtype) -> np.ndarray:
    """Decoder dual of quantize_block (double-precision arithmetic)."""
    if dtype.is_float:
        s = decode_scale_code(header.scale_code) * 2.0 ** (header.float_block_exp or 0)
        return (np.asarray(q, dtype=np.float64) / s).astype(dtype.np_dtype)
    a = decode_scale_code(header.scale_code)
    if a == 1.0:
        y = np.asarray(q, dtype=np.int64)
    else:
        y = _round_half_even(np.asarray(q, dtype=np.float64) / a).astype(np.int64)
    info = np.iinfo(dtype.np_dtype)
    return np.clip(y, info.min, info.max).astype(dtype.np_dtype)


def _block_scale(header: BlockHeader, dtype: Dtype) -> float:
    if dtype.is_float:
        return decode_scale_code(header.scale_code) * 2.0 ** (header.float_block_exp or 0)
    return decode_scale_code(header.scale_code)


def _init_attenuation(x: np.ndarray, cfg: StreamConfig) -> float:
    """Analytic uniform-quantization model: SRR ~ 20*log10(rms(q)*sqrt(12)),
    solved for the starting gain so the quality loop begins near target."""
    xf = np.asarray(x, dtype=np.float64)
    rms = float(np.sqrt(np.mean(xf * xf)))
    if rms == 0.0:
        return 0.0
    if cfg.dtype.is_float:
        peak = float(np.max(np.abs(xf)))
        rms_q_per_a = _FLOAT_HEADROOM * rms / peak
    else:
        rms_q_per_a = rms
    a0 = 10.0 ** (cfg.target / 20.0) / (_SQRT12 * rms_q_per_a)
    return 20.0 * math.log10(max(a0, 1e-300))


def rate_loop_update(att: AttenuatorState, loop: RateLoopState,
                     actual_bits: int, block_size: int) -> AttenuatorState:
    """FIXED_RATE integrator: drive bits/sample toward the target."""
    error = actual_bits / block_size - loop.target_bps
    loop.accumulated_error += error
    return att.clamped(att.att_db - _clamp_step(loop.step_db * error))


def quality_loop_update(att: AttenuatorState, measured_srr_db: float,
                        target_srr_db: float) -> AttenuatorState:
    """FIXED_QUALITY integrator: drive measured block SRR toward target.

    Gain moves opposite the SRR error: quality above target means bits are
    being wasted, so the gain drops (coarser quantization), and vice versa.
    """
    if not math.isfinite(measured_srr_db):
        return att
    delta = _clamp_step(QUALITY_LOOP_GAIN * (measured_srr_db - target_srr_db))
    return att.clamped(att.att_db - delta)


def encode_block(x: np.ndarray, state: CodecState,
                 rate_loop: Optional[RateLoopState] = None) -> Tuple[BlockHeader, bytes]:
    """Encode one block, updating history, costs, and the adaptive loop."""
    cfg = state.config
    mode = cfg.mode

    if not state._initialized:
        if mode is Mode.FIXED_QUALITY:
            state.attenuator = state.attenuator.clamped(_init_attenuation(x, cfg))
        state._initialized = True

    if mode is Mode.LOSSLESS:
        a = 1.0
    else:
        a = state.attenuator.a
    q, scale_code, fbe = quantize_block(x, a, cfg.dtype)

    n = q.size
    pad = (-n) % 4
    if pad:
        q = np.concatenate([q, np.zeros(pad, dtype=np.int64)])

    stats = monitor(q)
    streams = derive_streams(q, state.history)
    selector = select_stream(state.prev_costs, stats)
    exps = tuple(group_exponents(s) for s in streams)
    payload = pack_block(streams[selector], exps[selector])

    state.prev_costs = StreamCosts(*(cost_from_exponents(e) for e in exps))
    state.history.advance(q)

    header = BlockHeader(selector=selector,
                         restart_flag=(state.blocks_emitted == 0),
                         scale_code=scale_code,
                         float_block_exp=fbe if cfg.dtype.is_float else None)

    if mode is Mode.FIXED_RATE and rate_loop is not None:
        actual_bits = (BlockHeader.size_for(cfg.dtype) + len(payload)) * 8
        if state.blocks_emitted == 0:
            # One-time initialization: estimate the cheapest-stream rate at
            # unity gain from block 0's costs and jump straight to the gain
            # the linear 6.02 dB/bit model predicts; the slew-limited loop
            # then only trims the residual error.
            pc = state.prev_costs
            est_bits = min(pc.bits_d0, pc.bits_d1, pc.bits_d2) + \
                BlockHeader.size_for(cfg.dtype) * 8
            bps0 = est_bits / cfg.block_size
            state.attenuator = state.attenuator.clamped(
                state.attenuator.att_db - 6.02 * (bps0 - rate_loop.target_bps))
        else:
            state.attenuator = rate_loop_update(state.attenuator, rate_loop,
                                                actual_bits, cfg.block_size)
    elif mode is Mode.FIXED_QUALITY:
        y = dequantize_block(q[:n], header, cfg.dtype)
        xf = np.asarray(x, dtype=np.float64)
        d = xf - np.asarray(y, dtype=np.float64)
        px = float(np.mean(xf * xf))
        pd = float(np.mean(d * d))
        if px > 0.0:
            measured = math.inf if pd == 0.0 else 10.0 * math.log10(px / pd)
            state.attenuator = quality_loop_update(state.attenuator, measured, cfg.target)

    state.blocks_emitted += 1
    return header, payload


def encode_stream(samples, config: StreamConfig) -> bytes:
    """Encode a full sample stream into a standalone container."""
    config.validate()
    x = np.asarray(samples)
    if x.ndim != 1:
        x = x.reshape(-1)
    if x.size < 1:
        raise InvalidConfig("element_count must be >= 1")
    if config.dtype.is_float:
        x = x.astype(np.float64)
        if not np.isfinite(x).all():
            idx = int(np.flatnonzero(~np.isfinite(x))[0])
            raise UnsupportedValue(f"non-finite value at index {idx}")
    else:
        x = x.astype(np.int64)

    state = CodecState(config)
    rate_loop = RateLoopState(config.target) if config.mode is Mode.FIXED_RATE else None

    out: List[bytes] = [struct.pack(
        FILE_HEADER_FMT, MAGIC, VERSION, config.dtype.wire_code,
        config.mode.value, 0, config.block_size, x.size, float(config.target))]
    for start in range(0, x.size, config.block_size):
        block = x[start:start + config.block_size]
        header, payload = encode_block(block, state, rate_loop)
        out.append(header.serialize(config.dtype))
        out.append(payload)
    return b"".join(out)


def parse_file_header(data: bytes) -> Tuple[StreamConfig, int]:
    """Parse the container file header; returns (config, element_count)."""
    if len(data) < FILE_HEADER_SIZE:
        raise TruncatedStream("file header truncated")
    magic, version, dtype_w, mode_w, _rsv, block_size, count, target = \
        struct.unpack_from(FILE_HEADER_FMT, data, 0)
    if magic != MAGIC:
        raise NotApaxFile("bad magic")
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version}")
    dtype = Dtype.from_wire(dtype_w)
    try:
        mode = Mode(mode_w)
    except ValueError:
        raise CorruptStream(f"unknown mode code {mode_w}") from None
    cfg = StreamConfig(dtype=dtype, block_size=block_size, mode=mode, target=target)
    cfg.validate()
    return cfg, count


def decode_stream(data: bytes) -> np.ndarray:
    """Decode a container back into a typed sample array."""
    cfg, count = parse_file_header(data)
    hdr_size = BlockHeader.size_for(cfg.dtype)
    history = DerivativeHistory()
    pos = FILE_HEADER_SIZE
    chunks: List[np.ndarray] = []
    remaining = count
    view = memoryview(data)
    while remaining > 0:
        n = min(cfg.block_size, remaining)
        n_groups = (n + 3) // 4
        header = BlockHeader.parse(bytes(view[pos:pos + hdr_size]), cfg.dtype)
        pos += hdr_size
        block, consumed = unpack_block_counted(view[pos:], n_groups)
        pos += consumed
        if header.restart_flag:
            history.reset()
        q = reconstruct(block, header.selector, history)
        chunks.append(dequantize_block(q, header, cfg.dtype)[:n])
        remaining -= n
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=cfg.dtype.np_dtype)
