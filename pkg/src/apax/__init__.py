"""apax: universal numerical encoder/decoder and dataset profiler.

Block-floating-point packing of 4-sample groups with joint exponent
encoding, a derivative-based redundancy remover, adaptive rate/quality
control, and a profiler that sweeps the rate-correlation curve and
recommends an operating point.
"""

from .codec import decode_stream, encode_stream
from .dtypes import Dtype, Mode, StreamConfig
from .profiler import ProfileSession, profile

__all__ = [
    "Dtype",
    "Mode",
    "StreamConfig",
    "encode_stream",
    "decode_stream",
    "ProfileSession",
    "profile",
]

__version__ = "0.1.0"
