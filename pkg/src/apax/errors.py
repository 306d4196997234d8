"""Exception hierarchy shared by every apax module."""


class ApaxError(Exception):
    """Base class for all apax errors."""


class RangeError(ApaxError, ValueError):
    """A numeric argument is outside its documented domain."""


class InvalidConfig(ApaxError, ValueError):
    """A StreamConfig violates one of its invariants."""


class UnsupportedValue(ApaxError, ValueError):
    """Input contains values the codec cannot represent (NaN/Inf)."""


class NotApaxFile(ApaxError, ValueError):
    """Container magic does not match."""


class UnsupportedVersion(ApaxError, ValueError):
    """Container version is not understood by this decoder."""


class TruncatedStream(ApaxError, ValueError):
    """The encoded stream ends before the declared content does."""


class CorruptStream(ApaxError, ValueError):
    """The encoded stream contains an impossible token or field."""


class InternalError(ApaxError, RuntimeError):
    """An encoder-side consistency check failed (a bug, not bad input)."""


class UndefinedCorrelation(ApaxError, ValueError):
    """Pearson's r is undefined because one vector has zero energy."""


class NoData(ApaxError, ValueError):
    """An operation was asked to work on an empty curve or session."""


class SizeMismatch(ApaxError, ValueError):
    """A raw file's size is inconsistent with its declared element type."""


class UnreadableFile(ApaxError, OSError):
    """A raw dataset file could not be opened or read."""


class NonFiniteValue(ApaxError, ValueError):
    """A raw float dataset contains NaN or Inf (index reported)."""


class InvalidSpec(ApaxError, ValueError):
    """A synthetic-dataset spec has out-of-range parameters."""
