"""hicurate: audio-visual corpus curation and evaluation toolkit."""

from . import (  # noqa: F401
    config,
    curation,
    curriculum,
    estimators,
    lip_geometry,
    manifest_io,
    metrics,
    quality_audio,
    quality_video,
    resampler_core,
)

__version__ = "0.1.0"
