"""Dataset profiler: rate-correlation sweep, operating-point recommendation,
the 18-metric comparison table, signal/residual spectra, and the per-sample
signal-to-residual distribution with its 2-sigma margin.

All quality numbers compare the input x, the decoded output y, and the
residual d = x - y (elementwise, double precision).
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import signal as sp_signal

from .codec import decode_stream, encode_stream
from .dtypes import Dtype, Mode, StreamConfig
from .errors import NoData, UndefinedCorrelation

FIVE_NINES = 0.99999
DEFAULT_GRID = tuple(float(t) for t in range(20, 121, 5))
DEFAULT_SEGMENT = 4096
_EPS_POWER = 1e-30
TWO_SIGMA_COVERAGE = 0.955

METRIC_KEYS = (
    "mean_x", "std_x", "spectral_peak_x_db", "spectral_floor_x_db",
    "mean_y", "std_y", "spectral_peak_y_db", "spectral_floor_y_db",
    "mean_d", "std_d", "spectral_peak_d_db", "spectral_floor_d_db",
    "rms_resid_pct", "rms_resid_db",
    "srr_db", "pearson_r",
    "fft_s2r_margin_db", "two_sigma_s2r_margin_db",
)


def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    """Uncentered correlation sum(xy) / sqrt(sum(x^2) * sum(y^2))."""
    xf = np.asarray(x, dtype=np.float64)
    yf = np.asarray(y, dtype=np.float64)
    sxx = float(np.dot(xf, xf))
    syy = float(np.dot(yf, yf))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("a vector with zero energy has no correlation")
    return float(np.dot(xf, yf)) / math.sqrt(sxx * syy)


@dataclass(frozen=True)
class SpectrumStats:
    bins_db: np.ndarray
    peak_db: float
    floor_db: float  # median of the per-bin dB values
    mean_db: float
    dynamic_range_db: float
    power: np.ndarray  # linear per-bin power, kept for flatness checks


def welch_spectrum(x: np.ndarray, segment_length: int = DEFAULT_SEGMENT) -> SpectrumStats:
    """Averaged periodogram: Hann window, 50% overlap."""
    xf = np.asarray(x, dtype=np.float64)
    seg = segment_length
    if xf.size < seg:
        seg = 1 << max(int(xf.size).bit_length() - 1, 1)
    _, pxx = sp_signal.welch(xf, window="hann", nperseg=seg, noverlap=seg // 2,
                             detrend=False, scaling="spectrum")
    bins_db = 10.0 * np.log10(pxx + _EPS_POWER)
    peak = float(bins_db.max())
    floor = float(np.median(bins_db))
    return SpectrumStats(bins_db=bins_db, peak_db=peak, floor_db=floor,
                         mean_db=float(bins_db.mean()),
                         dynamic_range_db=peak - floor, power=pxx)


def spectral_flatness(power: np.ndarray) -> float:
    """Geometric mean over arithmetic mean of a power spectrum."""
    p = np.asarray(power, dtype=np.float64) + _EPS_POWER
    return float(np.exp(np.mean(np.log(p))) / np.mean(p))


def fft_s2r_margin(x_spec: SpectrumStats, d_spec: SpectrumStats) -> float:
    """Input spectral floor minus mean residual spectral level, in dB."""
    return x_spec.floor_db - d_spec.mean_db


@dataclass(frozen=True)
class S2RDistribution:
    s2r_db: np.ndarray  # per-sample 20*log10(|x|/|d|); +/-inf per the rules
    two_sigma_margin_db: float

    def cdf_points(self, n_points: int = 201) -> List[Tuple[float, float]]:
        """(s2r_db, fraction of samples <= s2r_db) on a quantile grid,
        finite values only (infinities are handled by count)."""
        finite = np.sort(self.s2r_db[np.isfinite(self.s2r_db)])
        total = self.s2r_db.size
        if finite.size == 0:
            return []
        qs = np.linspace(0, finite.size - 1, min(n_points, finite.size)).astype(int)
        n_below_neginf = int(np.count_nonzero(np.isneginf(self.s2r_db)))
        return [(float(finite[i]), (n_below_neginf + i + 1) / total) for i in qs]


def s2r_distribution(x: np.ndarray, d: np.ndarray) -> S2RDistribution:
    """Per-sample signal-to-residual ratios and their 2-sigma (95.5%) margin.

    d[i] = 0 gives +inf (always above any margin); x[i] = 0 with d[i] != 0
    gives -inf.  The margin is the largest level that at least 95.5% of
    samples meet or exceed.
    """
    ax = np.abs(np.asarray(x, dtype=np.float64))
    ad = np.abs(np.asarray(d, dtype=np.float64))
    s2r = np.empty(ax.size, dtype=np.float64)
    zero_d = ad == 0.0
    zero_x = (ax == 0.0) & ~zero_d
    rest = ~zero_d & ~zero_x
    s2r[zero_d] = math.inf
    s2r[zero_x] = -math.inf
    s2r[rest] = 20.0 * np.log10(ax[rest] / ad[rest])
    k = math.ceil(TWO_SIGMA_COVERAGE * s2r.size)
    ordered = np.sort(s2r)[::-1]  # descending, +inf first
    margin = float(ordered[k - 1])
    return S2RDistribution(s2r_db=s2r, two_sigma_margin_db=margin)


def window2_metrics(x: np.ndarray, y: np.ndarray, d: np.ndarray,
                    x_spec: SpectrumStats, y_spec: SpectrumStats,
                    d_spec: SpectrumStats,
                    two_sigma_margin_db: float) -> Dict[str, float]:
    """The 18-entry comparison table for one operating point."""
    xf = np.asarray(x, dtype=np.float64)
    df = np.asarray(d, dtype=np.float64)
    rms_x = float(np.sqrt(np.mean(xf * xf)))
    rms_d = float(np.sqrt(np.mean(df * df)))
    if rms_x > 0 and rms_d > 0:
        rms_resid_db = 20.0 * math.log10(rms_d / rms_x)
    elif rms_d == 0.0:
        rms_resid_db = -math.inf
    else:
        rms_resid_db = math.inf
    r = pearson_r(x, y)
    m = {
        "mean_x": float(np.mean(xf)), "std_x": float(np.std(xf)),
        "spectral_peak_x_db": x_spec.peak_db, "spectral_floor_x_db": x_spec.floor_db,
        "mean_y": float(np.mean(np.asarray(y, dtype=np.float64))),
        "std_y": float(np.std(np.asarray(y, dtype=np.float64))),
        "spectral_peak_y_db": y_spec.peak_db, "spectral_floor_y_db": y_spec.floor_db,
        "mean_d": float(np.mean(df)), "std_d": float(np.std(df)),
        "spectral_peak_d_db": d_spec.peak_db, "spectral_floor_d_db": d_spec.floor_db,
        "rms_resid_pct": 100.0 * (rms_d / rms_x) if rms_x > 0 else math.inf,
        "rms_resid_db": rms_resid_db,
        "srr_db": -rms_resid_db,
        "pearson_r": r,
        "fft_s2r_margin_db": fft_s2r_margin(x_spec, d_spec),
        "two_sigma_s2r_margin_db": two_sigma_margin_db,
    }
    assert tuple(m.keys()) == METRIC_KEYS
    return m


@dataclass(frozen=True)
class OperatingPoint:
    srr_target: float
    ratio: float
    r: float
    target_unreachable: bool = False


@dataclass(frozen=True)
class RateCorrelationCurve:
    points: Tuple[OperatingPoint, ...]
    recommended: Optional[OperatingPoint] = None


def _encode_at(x: np.ndarray, dtype: Dtype, target: float,
               block_size: int) -> Tuple[bytes, np.ndarray]:
    cfg = StreamConfig(dtype=dtype, block_size=block_size,
                       mode=Mode.FIXED_QUALITY, target=target)
    blob = encode_stream(x, cfg)
    return blob, decode_stream(blob)


def rate_correlation_sweep(x: np.ndarray, dtype: Dtype,
                           grid: Sequence[float] = DEFAULT_GRID,
                           block_size: int = 4096) -> RateCorrelationCurve:
    """Encode at every SRR target on the grid; each point is independent."""
    xarr = np.asarray(x, dtype=dtype.np_dtype)
    input_bytes = xarr.size * dtype.width_bytes
    points: List[OperatingPoint] = []
    for target in sorted(float(t) for t in grid):
        blob, y = _encode_at(xarr, dtype, target, block_size)
        try:
            r = pearson_r(xarr, y)
        except UndefinedCorrelation:
            warnings.warn(f"correlation undefined at SRR target {target}; point dropped")
            continue
        points.append(OperatingPoint(target, input_bytes / len(blob), r))
    return RateCorrelationCurve(points=tuple(points))


def recommend_operating_point(
        curve: RateCorrelationCurve,
        reencode: Optional[Callable[[float], OperatingPoint]] = None,
        threshold: float = FIVE_NINES) -> OperatingPoint:
    """Smallest SRR target whose correlation reaches the threshold.

    Interpolates linearly in (srr_target, r) between the bracketing grid
    points, then (when ``reencode`` is given) verifies by re-encoding,
    bisecting toward the upper bracket until the achieved r clears the
    threshold.  Falls back to the max-r point, flagged unreachable, when no
    grid point reaches the threshold.
    """
    pts = curve.points
    if not pts:
        raise NoData("empty rate-correlation curve")
    if all(p.r >= threshold for p in pts):
        best = max(pts, key=lambda p: p.ratio)
        return best
    if all(p.r < threshold for p in pts):
        best = max(pts, key=lambda p: p.r)
        return OperatingPoint(best.srr_target, best.ratio, best.r, target_unreachable=True)

    lo = hi = None
    for prev, cur in zip(pts, pts[1:]):
        if prev.r < threshold <= cur.r:
            lo, hi = prev, cur
            break
    if lo is None:
        # r not monotone: first point at/above threshold wins
        hi = next(p for p in pts if p.r >= threshold)
        return hi

    frac = (threshold - lo.r) / (hi.r - lo.r)
    target = lo.srr_target + frac * (hi.srr_target - lo.srr_target)
    if reencode is None:
        return hi

    upper = hi.srr_target
    point = reencode(target)
    for _ in range(8):
        if point.r >= threshold:
            return point
        target = 0.5 * (target + upper)
        point = reencode(target)
    return reencode(upper)


class ProfileSession:
    """Input samples plus a per-operating-point cache of decoded output,
    residual, and Window 2-4 results.  Single writer, many readers."""

    def __init__(self, x: np.ndarray, dtype: Dtype,
                 grid: Sequence[float] = DEFAULT_GRID,
                 block_size: int = 4096,
                 segment_length: int = DEFAULT_SEGMENT,
                 name: str = "") -> None:
        self.x = np.asarray(x, dtype=dtype.np_dtype)
        self.dtype = dtype
        self.grid = tuple(sorted(float(t) for t in grid))
        self.block_size = block_size
        self.segment_length = segment_length
        self.name = name
        self._lock = threading.Lock()
        self._cache: Dict[float, dict] = {}
        self.curve = rate_correlation_sweep(self.x, dtype, self.grid, block_size)
        self.recommended = recommend_operating_point(self.curve, self._reencode)
        self.current_point = self.recommended

    def _reencode(self, target: float) -> OperatingPoint:
        blob, y = _encode_at(self.x, self.dtype, target, self.block_size)
        ratio = self.x.size * self.dtype.width_bytes / len(blob)
        return OperatingPoint(target, ratio, pearson_r(self.x, y))

    def windows_at(self, srr_target: float) -> dict:
        """Windows 2-4 for one operating point (cached)."""
        key = float(srr_target)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        blob, y = _encode_at(self.x, self.dtype, key, self.block_size)
        xf = self.x.astype(np.float64)
        yf = np.asarray(y, dtype=np.float64)
        d = xf - yf
        x_spec = welch_spectrum(xf, self.segment_length)
        y_spec = welch_spectrum(yf, self.segment_length)
        d_spec = welch_spectrum(d, self.segment_length)
        dist = s2r_distribution(xf, d)
        metrics = window2_metrics(xf, yf, d, x_spec, y_spec, d_spec,
                                  dist.two_sigma_margin_db)
        result = {
            "srr_target": key,
            "ratio": self.x.size * self.dtype.width_bytes / len(blob),
            "metrics": metrics,
            "spectra": {
                "x": {"bins_db": x_spec.bins_db.tolist(),
                      "peak_db": x_spec.peak_db, "floor_db": x_spec.floor_db,
                      "mean_db": x_spec.mean_db,
                      "dynamic_range_db": x_spec.dynamic_range_db},
                "d": {"bins_db": d_spec.bins_db.tolist(),
                      "peak_db": d_spec.peak_db, "floor_db": d_spec.floor_db,
                      "mean_db": d_spec.mean_db,
                      "dynamic_range_db": d_spec.dynamic_range_db},
            },
            "s2r": {
                "cdf": [[v, p] for v, p in dist.cdf_points()],
                "two_sigma_margin_db": dist.two_sigma_margin_db,
            },
        }
        with self._lock:
            self._cache[key] = result
        return result

    def report(self) -> dict:
        """Profiler report matching the documented JSON schema."""
        rec = self.recommended
        return {
            "dataset": self.name,
            "dtype": self.dtype.code,
            "curve": [{"srr_target": p.srr_target, "ratio": p.ratio, "r": p.r}
                      for p in self.curve.points],
            "recommended": {"srr_target": rec.srr_target, "ratio": rec.ratio,
                            "r": rec.r, "target_unreachable": rec.target_unreachable},
            "windows": self.windows_at(rec.srr_target),
        }


def profile(x: np.ndarray, dtype: Dtype,
            grid: Sequence[float] = DEFAULT_GRID,
            block_size: int = 4096, name: str = "") -> dict:
    """One-shot profiler report for a sample array."""
    return ProfileSession(x, dtype, grid, block_size, name=name).report()
