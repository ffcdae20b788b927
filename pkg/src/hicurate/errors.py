"""Exception hierarchy shared across the toolkit."""


class HicurateError(Exception):
    """Base class for all toolkit errors."""


class ManifestError(HicurateError):
    """Malformed manifest, landmark track, or embedding file."""


class GeometryError(HicurateError):
    """Degenerate or inconsistent crop geometry."""


class AudioError(HicurateError):
    """Invalid waveform input or undefined audio score."""


class CurationError(HicurateError):
    """Corpus-level scoring or partitioning failure."""


class ScheduleError(HicurateError):
    """Invalid curriculum schedule request."""


class MetricError(HicurateError):
    """Undefined evaluation metric input."""


class ResamplerError(HicurateError):
    """Invalid resampler configuration or input."""
