"""Exception hierarchy shared by all keysched modules.

Every error raised by the library derives from KeyschedError, so callers can
catch one base class at pipeline boundaries. Subclasses are grouped roughly
by the stage that raises them.
"""


class KeyschedError(Exception):
    """Base class for all keysched errors."""


# --- ingestion / serialization ---

class EmptyDirectoryError(KeyschedError):
    """Frame directory contains no PGM files."""


class MalformedPgmError(KeyschedError):
    """PGM file has a bad magic number, maxval, header, or truncated payload."""


class DimensionMismatchError(KeyschedError):
    """Frames (or frame pairs) disagree in height/width."""


class UnsupportedEncodingError(KeyschedError):
    """WAV file is not 16-bit PCM."""


class UnsupportedChannelsError(KeyschedError):
    """WAV file is not mono."""


class UnsupportedRateError(KeyschedError):
    """WAV sample rate rejected under strict-rate loading."""


class ParseError(KeyschedError):
    """Malformed CSV/JSON payload."""


class InvariantViolationError(KeyschedError):
    """Deserialized or constructed value breaks a type invariant."""


# --- optical flow / motion curve ---

class TooSmallError(KeyschedError):
    """Frame too small for the requested pyramid depth."""


class TooShortError(KeyschedError):
    """Sequence or clip shorter than the operation requires."""


# --- curve processing ---

class InvalidWindowError(KeyschedError):
    """Smoothing window is even or smaller than 1."""


class NotNormalizedError(KeyschedError):
    """Operation requires a min-max normalized curve."""


# --- keyframe selection ---

class BadIntervalError(KeyschedError):
    """Valley search interval has start >= end."""


class InvalidKError(KeyschedError):
    """Requested keyframe count is out of the valid range."""


class InconsistentExtremaError(KeyschedError):
    """Extrema indices do not fit the curve they claim to describe."""


# --- audio features ---

class WrongSampleRateError(KeyschedError):
    """Audio clip is not at the pipeline sample rate."""


class KernelTooLargeError(KeyschedError):
    """Patch kernel exceeds the available frame count."""


class ShapeMismatchError(KeyschedError):
    """Matrix operands have incompatible shapes."""


class IndexOutOfRangeError(KeyschedError):
    """Gather index exceeds the available rows."""


# --- conditioning layouts ---

class CountMismatchError(KeyschedError):
    """Feature row count disagrees with the keyframe count."""


class BadGeometryError(KeyschedError):
    """Window/stride combination cannot tile the frame range."""


class OddDimError(KeyschedError):
    """Embedding dimension must be even."""


# --- evaluation ---

class NoValidInstancesError(KeyschedError):
    """Average precision needs at least one instance with ground truth."""


class NotDivisibleByThreeError(KeyschedError):
    """Intensity bucketing needs a class count divisible by three."""
