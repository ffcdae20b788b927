"""Lip-region crop planning and stabilized crop application.

Selects lip landmarks from 468-point face-mesh frames, derives one even
uniform crop size per video from mean bounding-box extent, interpolates
centroids through missing frames and rasterizes zero-padded square crops.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import GeometryError
from .manifest_io import N_FACE_LANDMARKS, LandmarkTrack

DEFAULT_GAMMA = 1.2


def default_lip_indices() -> list[int]:
    """Lip-related landmark indices of the common 468-point face-mesh
    convention (outer + inner lip contours). User-overridable config, not a
    fixed fact of the pipeline."""
    data = resources.files("hicurate").joinpath("data/lip_indices.json").read_text()
    return json.loads(data)["indices"]


def load_lip_indices(path: str | Path) -> list[int]:
    indices = json.loads(Path(path).read_text(encoding="utf-8"))["indices"]
    validate_lip_indices(indices)
    return indices


def validate_lip_indices(indices: list[int]) -> None:
    if not indices:
        raise GeometryError("lip index set is empty")
    if any(not (0 <= i < N_FACE_LANDMARKS) for i in indices):
        raise GeometryError(f"lip index out of range [0, {N_FACE_LANDMARKS})")
    if sorted(set(indices)) != list(indices):
        raise GeometryError("lip indices must be strictly increasing and unique")


@dataclass
class CropPlan:
    """Uniform even crop size plus one real-valued center per frame."""

    size: int
    centers: np.ndarray  # (n_frames, 2)

    def to_json_line(self) -> str:
        return json.dumps({"size": self.size, "centers": self.centers.tolist()})

    @classmethod
    def from_json_line(cls, line: str) -> "CropPlan":
        obj = json.loads(line)
        return cls(size=obj["size"], centers=np.asarray(obj["centers"], dtype=np.float64))


def select_lip_points(frame_points: np.ndarray, lips: list[int]) -> np.ndarray:
    """Return the lip-indexed rows of a 468x2 landmark frame, in index order."""
    pts = np.asarray(frame_points, dtype=np.float64)
    if pts.shape != (N_FACE_LANDMARKS, 2):
        raise GeometryError(f"expected ({N_FACE_LANDMARKS}, 2) frame, got {pts.shape}")
    return pts[list(lips)]


def bounding_box(lip_points: np.ndarray) -> tuple[float, float, float, float]:
    """Componentwise (min_x, min_y, max_x, max_y) of the lip points."""
    pts = np.asarray(lip_points, dtype=np.float64)
    return (float(pts[:, 0].min()), float(pts[:, 1].min()),
            float(pts[:, 0].max()), float(pts[:, 1].max()))


def crop_size(mean_width: float, mean_height: float,
              gamma: float = DEFAULT_GAMMA) -> int:
    """Smallest even integer covering gamma * max(mean_width, mean_height)."""
    if mean_width < 0 or mean_height < 0 or gamma <= 0:
        raise GeometryError("mean extents must be >= 0 and gamma > 0")
    if mean_width == 0 and mean_height == 0:
        raise GeometryError("degenerate geometry: both mean extents are zero")
    target = gamma * max(mean_width, mean_height)
    return max(2, 2 * math.ceil(target / 2.0))


def centroid(lip_points: np.ndarray) -> tuple[float, float]:
    pts = np.asarray(lip_points, dtype=np.float64)
    return float(pts[:, 0].mean()), float(pts[:, 1].mean())


def interpolate_centroids(partial: list, n_frames: int) -> np.ndarray:
    """Fill missing per-frame centroids.

    Interior gaps are linearly interpolated between the nearest present
    neighbors; leading/trailing gaps hold the nearest present value.
    """
    if len(partial) != n_frames:
        raise GeometryError(f"expected {n_frames} entries, got {len(partial)}")
    present = [i for i, c in enumerate(partial) if c is not None]
    if not present:
        raise GeometryError("all centroids missing: nothing to interpolate")
    t = np.arange(n_frames, dtype=np.float64)
    tp = np.asarray(present, dtype=np.float64)
    values = np.asarray([partial[i] for i in present], dtype=np.float64)
    # np.interp holds edge values outside [tp[0], tp[-1]]
    x = np.interp(t, tp, values[:, 0])
    y = np.interp(t, tp, values[:, 1])
    return np.stack([x, y], axis=1)


def plan_crops(track: LandmarkTrack, lips: list[int],
               gamma: float = DEFAULT_GAMMA) -> CropPlan:
    """Plan a uniform stabilized crop for one landmark track.

    Mean box extents are taken over present frames only; centers come from
    interpolated centroids.
    """
    validate_lip_indices(lips)
    widths, heights = [], []
    partial_centroids: list = [None] * track.frame_count
    for i, frame in enumerate(track.frames):
        if frame is None:
            continue
        lip_pts = select_lip_points(frame, lips)
        min_x, min_y, max_x, max_y = bounding_box(lip_pts)
        widths.append(max_x - min_x)
        heights.append(max_y - min_y)
        partial_centroids[i] = centroid(lip_pts)
    if not widths:
        raise GeometryError("all frames missing landmarks")
    size = crop_size(float(np.mean(widths)), float(np.mean(heights)), gamma)
    centers = interpolate_centroids(partial_centroids, track.frame_count)
    return CropPlan(size=size, centers=centers)


def apply_crops(frames: list[np.ndarray], plan: CropPlan) -> list[np.ndarray]:
    """Cut an SxS window around each (rounded) center, zero-padding pixels
    that fall outside the source frame."""
    if len(frames) != len(plan.centers):
        raise GeometryError(
            f"plan has {len(plan.centers)} centers but {len(frames)} frames given")
    s = plan.size
    half = s // 2
    out = []
    for frame, (cx, cy) in zip(frames, plan.centers):
        src = np.asarray(frame)
        h, w = src.shape
        x0 = int(round(cx)) - half
        y0 = int(round(cy)) - half
        crop = np.zeros((s, s), dtype=src.dtype)
        sx0, sy0 = max(x0, 0), max(y0, 0)
        sx1, sy1 = min(x0 + s, w), min(y0 + s, h)
        if sx0 < sx1 and sy0 < sy1:
            crop[sy0 - y0:sy1 - y0, sx0 - x0:sx1 - x0] = src[sy0:sy1, sx0:sx1]
        out.append(crop)
    return out
