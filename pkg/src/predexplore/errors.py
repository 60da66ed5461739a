"""Exception types shared across the package."""


class PredexploreError(Exception):
    """Base class for all package errors."""


class GridMismatch(PredexploreError):
    """Two grids with incompatible dimensions/resolution/origin."""


class NotOneHot(PredexploreError):
    """A channel stack cell violates the one-hot constraint."""


class InvalidThresholds(PredexploreError):
    """Free/obstacle thresholds out of order."""


class MalformedPgm(PredexploreError):
    """File is not a binary 8-bit P5 PGM."""


class PoseOutOfBounds(PredexploreError):
    """Robot pose outside the world grid."""


class PoseInObstacle(PredexploreError):
    """Robot pose on a non-free ground-truth cell."""


class CellOutOfBounds(PredexploreError):
    """Observation refers to a cell outside the map."""


class EmptyPath(PredexploreError):
    """step_along received an empty path."""


class NoPath(PredexploreError):
    """Goal is unreachable from the start cell."""


class EmptyClusters(PredexploreError):
    """Cost matrix requested for an empty cluster list."""


class NoFreeCells(PredexploreError):
    """Ground truth contains no free cells; coverage undefined."""


class TooSmall(PredexploreError):
    """Image too small for the requested metric window."""


class ConfigError(PredexploreError):
    """Scenario or generator configuration is invalid."""


class ConnectionFailed(PredexploreError):
    """Could not reach the remote predictor endpoint."""


class ProtocolViolation(PredexploreError):
    """Remote predictor sent a malformed frame."""


class RemoteError(PredexploreError):
    """Remote predictor replied with an error frame."""
