"""Raw dataset ingestion and seeded synthetic signal generation.

Raw files are headerless typed arrays (little-endian by default).  The
synthetic generators stand in for real-world corpora: bandlimited noise
with a chosen oversampling ratio and SNR (emulating finite ENOB), sine
plus noise, ramps, constants, full-band noise, and a smooth 2-D field
flattened row-major.  Everything is reproducible byte-for-byte per seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dtypes import Dtype
from .errors import InvalidSpec, NonFiniteValue, SizeMismatch, UnreadableFile

FIR_TAPS = 127  # fixed windowed-sinc lowpass used by every generator


@dataclass(frozen=True)
class RawDatasetSpec:
    path: str
    dtype: Dtype
    byte_order: str = "little"  # "little" | "big"
    element_count: Optional[int] = None


@dataclass(frozen=True)
class SynthSpec:
    kind: str  # BandlimitedNoise | SineplusNoise | Ramp | Constant | WhiteNoise | ImageLike2D
    dtype: Dtype
    length: int
    amplitude: float
    oversampling_ratio: float = 1.0
    snr_db: float = math.inf
    offset: float = 0.0
    seed: int = 0
    name: str = ""

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        d = dict(d)
        d["dtype"] = Dtype.from_code(d["dtype"])
        if "snr_db" in d and d["snr_db"] is None:
            d["snr_db"] = math.inf
        return cls(**d)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "dtype": self.dtype.code,
            "length": self.length,
            "amplitude": self.amplitude,
            "oversampling_ratio": self.oversampling_ratio,
            "snr_db": None if math.isinf(self.snr_db) else self.snr_db,
            "offset": self.offset,
            "seed": self.seed,
            "name": self.name,
        }
        return out


def _np_dtype(spec_dtype: Dtype, byte_order: str) -> np.dtype:
    d = spec_dtype.np_dtype
    if byte_order == "big":
        return d.newbyteorder(">")
    if byte_order != "little":
        raise InvalidSpec(f"unknown byte order {byte_order!r}")
    return d.newbyteorder("<")


def read_raw(spec: RawDatasetSpec) -> np.ndarray:
    """Read a headerless typed array; floats must be finite."""
    nd = _np_dtype(spec.dtype, spec.byte_order)
    try:
        data = np.fromfile(spec.path, dtype=np.uint8)
    except OSError as exc:
        raise UnreadableFile(str(exc)) from exc
    width = spec.dtype.width_bytes
    if spec.element_count is None:
        if data.size % width != 0:
            raise SizeMismatch(
                f"{spec.path}: {data.size} bytes is not a multiple of {width}")
        count = data.size // width
    else:
        count = spec.element_count
        if data.size < count * width:
            raise SizeMismatch(f"{spec.path}: file shorter than {count} elements")
    x = data[:count * width].view(nd).astype(spec.dtype.np_dtype)
    if spec.dtype.is_float and not np.isfinite(x).all():
        idx = int(np.flatnonzero(~np.isfinite(x))[0])
        raise NonFiniteValue(f"{spec.path}: non-finite value at element {idx}")
    return x


def write_raw(samples: np.ndarray, spec: RawDatasetSpec) -> None:
    """Inverse of read_raw."""
    nd = _np_dtype(spec.dtype, spec.byte_order)
    np.asarray(samples, dtype=spec.dtype.np_dtype).astype(nd).tofile(spec.path)


def _lowpass_fir(cutoff: float, taps: int = FIR_TAPS) -> np.ndarray:
    """Windowed-sinc lowpass (Hann window), cutoff in cycles/sample."""
    m = taps - 1
    n = np.arange(taps, dtype=np.float64)
    h = 2.0 * cutoff * np.sinc(2.0 * cutoff * (n - m / 2.0))
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / m)
    h *= w
    return h / h.sum()


def _quantize_to(x: np.ndarray, dtype: Dtype) -> np.ndarray:
    if dtype.is_float:
        return x.astype(dtype.np_dtype)
    info = np.iinfo(dtype.np_dtype)
    return np.clip(np.round(x), info.min, info.max).astype(dtype.np_dtype)


def synth(spec: SynthSpec) -> np.ndarray:
    """Generate a typed synthetic signal, deterministic per seed."""
    if spec.length < 1:
        raise InvalidSpec("length must be >= 1")
    if spec.oversampling_ratio < 1:
        raise InvalidSpec("oversampling_ratio must be >= 1")
    rng = np.random.default_rng(spec.seed)
    n = spec.length
    amp = float(spec.amplitude)

    if spec.kind == "Constant":
        x = np.full(n, amp, dtype=np.float64)
    elif spec.kind == "Ramp":
        x = np.linspace(0.0, amp, n)
    elif spec.kind == "WhiteNoise":
        x = rng.uniform(-amp, amp, size=n)
    elif spec.kind == "BandlimitedNoise":
        cutoff = 0.5 / spec.oversampling_ratio
        raw = rng.standard_normal(n + FIR_TAPS - 1)
        x = np.convolve(raw, _lowpass_fir(cutoff), mode="valid")
        peak = np.max(np.abs(x))
        if peak > 0:
            x *= amp / peak
    elif spec.kind == "SineplusNoise":
        f0 = 0.25 / spec.oversampling_ratio  # mid-band tone for this ratio
        x = amp * np.sin(2.0 * np.pi * f0 * np.arange(n))
    elif spec.kind == "ImageLike2D":
        side = int(math.ceil(math.sqrt(n)))
        cutoff = 0.5 / spec.oversampling_ratio
        fir = _lowpass_fir(cutoff)
        img = rng.standard_normal((side + FIR_TAPS - 1, side + FIR_TAPS - 1))
        img = np.apply_along_axis(lambda r: np.convolve(r, fir, mode="valid"), 1, img)
        img = np.apply_along_axis(lambda c: np.convolve(c, fir, mode="valid"), 0, img)
        x = img.reshape(-1)[:n]
        peak = np.max(np.abs(x))
        if peak > 0:
            x *= amp / peak
    else:
        raise InvalidSpec(f"unknown synth kind {spec.kind!r}")

    if math.isfinite(spec.snr_db) and spec.kind not in ("Constant", "Ramp"):
        rms = float(np.sqrt(np.mean(x * x)))
        if rms > 0:
            noise_rms = rms * 10.0 ** (-spec.snr_db / 20.0)
            x = x + noise_rms * rng.standard_normal(n)

    if spec.offset:
        x = x + spec.offset
    return _quantize_to(x, spec.dtype)


def load_synth_spec(path: str) -> SynthSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return SynthSpec.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# corpus-v1: the repo's reference corpus (12 specs spanning dtypes,
# oversampling 1-8, SNR 30-90 dB).  Frozen; bump the version when changed.
# ---------------------------------------------------------------------------

_N = 65536

CORPUS_V1 = (
    SynthSpec("WhiteNoise", Dtype.I8, _N, 120, 1, 30.0, 0.0, 101, "white_i8_os1"),
    SynthSpec("BandlimitedNoise", Dtype.I16, _N, 28000, 2, 50.0, 0.0, 102, "bandlim_i16_os2"),
    SynthSpec("BandlimitedNoise", Dtype.I32, _N, 2 ** 29, 4, 70.0, 0.0, 103, "bandlim_i32_os4"),
    SynthSpec("BandlimitedNoise", Dtype.I32, _N, 2 ** 29, 8, 80.0, 0.0, 104, "bandlim_i32_os8"),
    SynthSpec("SineplusNoise", Dtype.I16, _N, 24000, 8, 60.0, 0.0, 105, "sine_i16_os8"),
    SynthSpec("BandlimitedNoise", Dtype.F32, _N, 1.0, 4, 60.0, 2.0, 106, "bandlim_f32_os4"),
    SynthSpec("BandlimitedNoise", Dtype.F32, _N, 1.0, 8, 80.0, 0.0, 107, "bandlim_f32_os8"),
    SynthSpec("SineplusNoise", Dtype.F32, _N, 1.0, 8, 70.0, 3.0, 108, "sine_f32_os8"),
    SynthSpec("BandlimitedNoise", Dtype.F64, _N, 100.0, 4, 70.0, 250.0, 109, "bandlim_f64_os4"),
    SynthSpec("BandlimitedNoise", Dtype.F64, _N, 100.0, 8, 90.0, 0.0, 110, "bandlim_f64_os8"),
    SynthSpec("ImageLike2D", Dtype.F32, _N, 1.0, 4, 50.0, 1.5, 111, "image_f32_os4"),
    SynthSpec("BandlimitedNoise", Dtype.F64, _N, 100.0, 6, 60.0, 0.0, 112, "bandlim_f64_os6"),
)
