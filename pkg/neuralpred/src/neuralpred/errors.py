"""Exception hierarchy."""


class NeuralpredError(Exception):
    """Base class for package errors."""


class ConfigError(NeuralpredError):
    """Invalid network/training configuration."""


class ShapeMismatch(NeuralpredError):
    """Tensor shapes disagree."""


class MalformedPgm(NeuralpredError):
    """Unreadable or unsupported PGM file."""


class DatasetError(NeuralpredError):
    """Missing or inconsistent training data."""


class ProtocolViolation(NeuralpredError):
    """Malformed frame on the wire."""
