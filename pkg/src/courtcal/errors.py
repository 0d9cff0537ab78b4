"""Exception types raised across the pipeline."""


class CourtCalError(Exception):
    """Base class for all courtcal errors."""


class InvalidDimensionsError(CourtCalError, ValueError):
    """Court dimensions violate their invariants."""


class MalformedSidecarError(CourtCalError, ValueError):
    """A sidecar file exists but cannot be parsed."""


class DimensionMismatchError(CourtCalError, ValueError):
    """A sidecar image does not match the frame dimensions."""


class AdapterFailureError(CourtCalError, RuntimeError):
    """A configured neural adapter failed during inference."""


class EmptyCropError(CourtCalError, ValueError):
    """Near-side crop retained fewer rows than the minimum frame height."""


class AllMaskedError(CourtCalError, ValueError):
    """Dominant-color sampling found only masked-black pixels."""


class InsufficientLinesError(CourtCalError, ValueError):
    """Fewer than two horizontal or two vertical lines were detected."""


class DegenerateCorrespondenceError(CourtCalError, ValueError):
    """Correspondence points admit no unique homography (collinear/repeated)."""


class InvalidGroundTruthError(CourtCalError, ValueError):
    """Ground-truth annotation is unusable (e.g. zero score)."""


class MissingGroundTruthError(CourtCalError, ValueError):
    """A frame under evaluation has no ground-truth file."""


class PoseRejectionError(CourtCalError, RuntimeError):
    """Synthetic scene generation exhausted its pose-sampling budget."""


class NoDetectionError(CourtCalError, RuntimeError):
    """No sampled frame produced a plausible detection."""


class ConfigError(CourtCalError, ValueError):
    """Pipeline configuration is malformed or out of range."""
