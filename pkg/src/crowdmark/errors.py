"""Exception hierarchy shared by the library, the service, and the CLI."""

from __future__ import annotations


class CrowdmarkError(Exception):
    """Base class; ``code`` is the stable machine-readable error name."""

    @property
    def code(self) -> str:
        return type(self).__name__


# -- annotation validation ---------------------------------------------------

class InvalidRecord(CrowdmarkError):
    """Structurally broken annotation record (missing/typed-wrong fields)."""


class RegionDegenerate(CrowdmarkError):
    """Region has zero or negative volume."""


# Alias used by the geometry code, where the same condition is a caller bug.
DegenerateRegion = RegionDegenerate


class CoordinateOutOfRange(CrowdmarkError):
    """Spatial coordinate outside [0, 1] or time outside the video."""


class ConfidenceOutOfRange(CrowdmarkError):
    """Confidence outside the 0-100 percent range."""


class EmptyCustomLabel(CrowdmarkError):
    """Custom label empty after trimming."""


class UnknownVideo(CrowdmarkError):
    pass


# -- aggregation -------------------------------------------------------------

class EmptyMemberList(CrowdmarkError):
    """Weighted average requested over zero members."""


class MixedVideoInput(CrowdmarkError):
    """Aggregation input spans more than one video."""


# -- demonstration -----------------------------------------------------------

class UnknownRegion(CrowdmarkError):
    pass


class UnknownLabel(CrowdmarkError):
    pass


# -- rationale clustering ----------------------------------------------------

class EmbeddingDimMismatch(CrowdmarkError):
    pass


class RemoteEmbedderUnavailable(CrowdmarkError):
    """Remote embedding service unreachable after bounded retries."""


class ZeroVector(CrowdmarkError):
    """Embedding with no magnitude; cosine arithmetic undefined."""


# -- evaluation --------------------------------------------------------------

class MissingGroundTruth(CrowdmarkError):
    pass


# -- simulator ---------------------------------------------------------------

class InvalidScenario(CrowdmarkError):
    pass


# -- service / log -----------------------------------------------------------

class UnknownAnnotation(CrowdmarkError):
    pass


class NotAuthor(CrowdmarkError):
    """Caller tried to delete an annotation they did not write."""


class LogCorrupt(CrowdmarkError):
    """Append-only log failed an integrity check during replay."""
