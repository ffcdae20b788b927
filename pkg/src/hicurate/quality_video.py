"""Video quality scoring from inter-frame motion of stabilized lip crops."""
from __future__ import annotations

import math

import numpy as np

from .errors import CurationError


def motion_magnitude(frames: list[np.ndarray]) -> float:
    """Mean absolute pixel difference over all consecutive frame pairs.

    Differences are taken in a widened domain so uint8 frames do not wrap.
    """
    if len(frames) < 2:
        raise CurationError("motion requires at least 2 frames")
    shape = np.asarray(frames[0]).shape
    total = 0.0
    count = 0
    prev = np.asarray(frames[0], dtype=np.float64)
    for frame in frames[1:]:
        cur = np.asarray(frame, dtype=np.float64)
        if cur.shape != shape:
            raise CurationError(f"frame dimension mismatch: {cur.shape} vs {shape}")
        total += float(np.abs(cur - prev).sum())
        count += cur.size
        prev = cur
    return total / count


def video_score(motion: float, m_max: float) -> float:
    """min(motion / m_max, 1.0)."""
    if m_max <= 0:
        raise CurationError(f"degenerate corpus: m_max = {m_max}")
    if motion < 0:
        raise CurationError(f"negative motion magnitude: {motion}")
    return min(motion / m_max, 1.0)


def percentile_90(values: list[float]) -> float:
    """Nearest-rank 90th percentile: sorted element at 1-based rank ceil(0.9 n)."""
    if not values:
        raise CurationError("percentile of empty list")
    ordered = sorted(values)
    rank = math.ceil(0.9 * len(ordered))
    return ordered[rank - 1]
