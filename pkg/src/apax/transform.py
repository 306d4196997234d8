"""Signal monitor and derivative-based redundancy remover.

The encoder keeps three candidate streams per block: the quantized samples
themselves (D0), their first difference (D1), and their second difference
(D2).  Whichever candidate of the *previous* block would have packed with
the fewest bits is used for the current block (one-block adaptation
latency); each block's header records the selector actually applied to its
own payload, so blocks decode on arrival.

Differences are seeded across block boundaries by a two-sample history,
initialized to (0, 0) and reset whenever a header's restart flag is set.
Encoder and decoder thread the identical history, so reconstruction is
exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .dtypes import SELECTOR_D0, SELECTOR_D1, SELECTOR_D2, BlockStats
from .entropy import group_exponents

# Above this center frequency differencing amplifies instead of shrinking.
CENTER_FREQ_GATE = 1.0 / 3.0


@dataclass
class DerivativeHistory:
    """Trailing two quantized samples of the concatenated stream."""

    prev1: int = 0
    prev2: int = 0

    def reset(self) -> None:
        self.prev1 = 0
        self.prev2 = 0

    def advance(self, q: np.ndarray) -> None:
        n = q.size
        if n >= 2:
            self.prev2 = int(q[-2])
        elif n == 1:
            self.prev2 = self.prev1
        if n >= 1:
            self.prev1 = int(q[-1])


@dataclass(frozen=True)
class StreamCosts:
    bits_d0: int
    bits_d1: int
    bits_d2: int

    def argmin(self) -> int:
        costs = (self.bits_d0, self.bits_d1, self.bits_d2)
        best = SELECTOR_D0
        for sel in (SELECTOR_D1, SELECTOR_D2):
            if costs[sel] < costs[best]:
                best = sel
        return best


def monitor(q: np.ndarray) -> BlockStats:
    """Per-block signal statistics from the quantized samples."""
    v = np.asarray(q, dtype=np.int64)
    absv = np.abs(v)
    peak = float(absv.max()) if v.size else 0.0
    mean = float(absv.mean()) if v.size else 0.0
    par_db = 20.0 * math.log10(peak / mean) if mean > 0 else 0.0
    # Zero-crossing rate over the nonzero-sign subsequence; an alternating
    # full-rate signal lands at the Nyquist value 0.5.
    s = np.sign(v)
    s_nz = s[s != 0]
    if v.size > 1 and s_nz.size > 1:
        changes = int(np.count_nonzero(s_nz[1:] != s_nz[:-1]))
        cf = changes / (2.0 * (v.size - 1))
    else:
        cf = 0.0
    return BlockStats(center_freq_norm=cf, peak_abs=peak, mean_abs=mean, par_db=par_db)


def derive_streams(q: np.ndarray, h: DerivativeHistory) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Candidate streams (d0, d1, d2) for one block, seeded from history."""
    d0 = np.asarray(q, dtype=np.int64)
    d1 = np.diff(d0, prepend=np.int64(h.prev1))
    d2 = np.diff(d1, prepend=np.int64(h.prev1 - h.prev2))
    return d0, d1, d2


def cost_from_exponents(e: np.ndarray) -> int:
    """Estimated payload bits for one candidate: mantissa bits plus a flat
    one-nibble-per-group token estimate.  Only the ordering matters."""
    return int(4 * e.sum() + 4 * e.size)


def estimate_stream_costs(d0: np.ndarray, d1: np.ndarray, d2: np.ndarray) -> StreamCosts:
    """Estimated payload bits per candidate stream."""
    return StreamCosts(cost_from_exponents(group_exponents(d0)),
                       cost_from_exponents(group_exponents(d1)),
                       cost_from_exponents(group_exponents(d2)))


def select_stream(prev_costs: Optional[StreamCosts], stats: BlockStats) -> int:
    """Selector for the current block from the previous block's costs."""
    if prev_costs is None:
        return SELECTOR_D0
    if stats.center_freq_norm > CENTER_FREQ_GATE:
        return SELECTOR_D0
    return prev_costs.argmin()


def reconstruct(block: np.ndarray, selector: int, h: DerivativeHistory) -> np.ndarray:
    """Exact inverse of derive_streams for one block; advances history."""
    d = np.asarray(block, dtype=np.int64)
    if selector == SELECTOR_D0:
        q = d
    elif selector == SELECTOR_D1:
        q = np.cumsum(d) + np.int64(h.prev1)
    elif selector == SELECTOR_D2:
        d1 = np.cumsum(d) + np.int64(h.prev1 - h.prev2)
        q = np.cumsum(d1) + np.int64(h.prev1)
    else:
        raise ValueError(f"invalid selector {selector}")
    h.advance(q)
    return q
