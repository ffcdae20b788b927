"""Parsing and serialization of corpus-level file artifacts.

Handles sample manifests (JSONL), landmark tracks, plain-text embedding
vectors, partition manifests, WAV waveforms and binary PGM frames. All
formats are line- or header-delimited and UTF-8; unknown manifest fields
are preserved on round-trip.
"""
from __future__ import annotations

import json
import math
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ManifestError

N_FACE_LANDMARKS = 468

_KNOWN_KEYS = (
    "id", "audio", "frames", "landmarks", "ref_text",
    "hyp_text", "clean_audio", "ref_emb", "pred_emb",
)


@dataclass
class SampleRecord:
    """One corpus sample: media paths, transcripts and optional embeddings."""

    id: str
    audio_path: str
    frames_path: str
    landmarks_path: str
    reference_text: str
    hypothesis_text: str | None = None
    clean_audio_path: str | None = None
    ref_embedding_path: str | None = None
    pred_embedding_path: str | None = None
    extras: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        obj = {
            "id": self.id,
            "audio": self.audio_path,
            "frames": self.frames_path,
            "landmarks": self.landmarks_path,
            "ref_text": self.reference_text,
        }
        if self.hypothesis_text is not None:
            obj["hyp_text"] = self.hypothesis_text
        if self.clean_audio_path is not None:
            obj["clean_audio"] = self.clean_audio_path
        if self.ref_embedding_path is not None:
            obj["ref_emb"] = self.ref_embedding_path
        if self.pred_embedding_path is not None:
            obj["pred_emb"] = self.pred_embedding_path
        obj.update(self.extras)
        return obj


@dataclass
class LandmarkTrack:
    """Per-frame optional 468-point face-mesh coordinates for one video.

    Absent frames are explicit ``None`` entries so gap positions are exact.
    """

    frame_count: int
    frames: list  # list of Optional[np.ndarray (468, 2)]

    def present_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.frames) if f is not None]


def parse_sample_manifest(text: str) -> list[SampleRecord]:
    """Parse a JSONL sample manifest into records, preserving order.

    Raises :class:`ManifestError` naming the offending line for unreadable
    lines, missing required fields, or duplicate ids.
    """
    records: list[SampleRecord] = []
    seen: set[str] = set()
    # split on newlines only: other Unicode line breaks are legal raw
    # characters inside JSON strings
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"line {lineno}: unreadable record: {exc}") from exc
        if not isinstance(obj, dict):
            raise ManifestError(f"line {lineno}: record is not an object")
        for key in ("id", "audio", "frames", "landmarks", "ref_text"):
            if key not in obj:
                raise ManifestError(f"line {lineno}: missing required field '{key}'")
        rid = obj["id"]
        if not rid:
            raise ManifestError(f"line {lineno}: empty id")
        if rid in seen:
            raise ManifestError(f"line {lineno}: duplicate id '{rid}'")
        if not obj["ref_text"]:
            raise ManifestError(f"line {lineno}: empty ref_text for id '{rid}'")
        seen.add(rid)
        extras = {k: v for k, v in obj.items() if k not in _KNOWN_KEYS}
        records.append(SampleRecord(
            id=rid,
            audio_path=obj["audio"],
            frames_path=obj["frames"],
            landmarks_path=obj["landmarks"],
            reference_text=obj["ref_text"],
            hypothesis_text=obj.get("hyp_text"),
            clean_audio_path=obj.get("clean_audio"),
            ref_embedding_path=obj.get("ref_emb"),
            pred_embedding_path=obj.get("pred_emb"),
            extras=extras,
        ))
    return records


def write_sample_manifest(records: list[SampleRecord], path: str | Path) -> None:
    lines = [json.dumps(r.to_json_obj(), ensure_ascii=False) for r in records]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def parse_landmark_track(text: str) -> LandmarkTrack:
    """Parse a landmark track document (one JSON object per frame).

    Frame entries must be dense and strictly increasing from 0; a present
    frame must carry exactly 468 points. Invalid frames are ``null``.
    """
    frames: list = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"line {lineno}: unreadable frame record: {exc}") from exc
        idx = obj.get("frame")
        if idx != len(frames):
            raise ManifestError(
                f"line {lineno}: non-dense frame index {idx!r} (expected {len(frames)})")
        points = obj.get("points")
        if points is None:
            frames.append(None)
            continue
        if len(points) != N_FACE_LANDMARKS:
            raise ManifestError(
                f"frame {idx}: expected {N_FACE_LANDMARKS} points, got {len(points)}")
        arr = np.asarray(points, dtype=np.float64)
        if arr.shape != (N_FACE_LANDMARKS, 2) or not np.all(np.isfinite(arr)):
            raise ManifestError(f"frame {idx}: malformed point coordinates")
        frames.append(arr)
    return LandmarkTrack(frame_count=len(frames), frames=frames)


def write_landmark_track(track: LandmarkTrack, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for i, frame in enumerate(track.frames):
            pts = None if frame is None else np.asarray(frame).tolist()
            fh.write(json.dumps({"frame": i, "points": pts}) + "\n")


def parse_embedding(text: str) -> np.ndarray:
    """Parse a whitespace-separated float vector; all values must be finite."""
    tokens = text.split()
    if not tokens:
        raise ManifestError("empty embedding file")
    values = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError as exc:
            raise ManifestError(f"non-numeric embedding token {tok!r}") from exc
        if not math.isfinite(v):
            raise ManifestError(f"non-finite embedding value {tok!r}")
        values.append(v)
    return np.asarray(values, dtype=np.float64)


def load_embedding(path: str | Path) -> np.ndarray:
    return parse_embedding(Path(path).read_text(encoding="utf-8"))


def write_partition_manifests(accept: list[SampleRecord],
                              reject: list[SampleRecord],
                              out_dir: str | Path) -> tuple[Path, Path]:
    """Write ``accept.jsonl`` / ``reject.jsonl``; fails before any write on
    overlapping ids."""
    overlap = {r.id for r in accept} & {r.id for r in reject}
    if overlap:
        raise ManifestError(f"accept/reject ids overlap: {sorted(overlap)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    accept_path = out / "accept.jsonl"
    reject_path = out / "reject.jsonl"
    write_sample_manifest(accept, accept_path)
    write_sample_manifest(reject, reject_path)
    return accept_path, reject_path


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a mono 16-bit PCM WAV file.

    Returns (samples scaled to [-1, 1), sample_rate).
    """
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1:
            raise ManifestError(f"{path}: expected mono audio, got {wf.getnchannels()} channels")
        if wf.getsampwidth() != 2:
            raise ManifestError(f"{path}: expected 16-bit PCM, got {8 * wf.getsampwidth()}-bit")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return samples, rate


def write_wav(samples: np.ndarray, rate: int, path: str | Path) -> None:
    """Write float samples in [-1, 1] as mono 16-bit PCM."""
    pcm = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 32767.0 / 32768.0)
    pcm = np.round(pcm * 32768.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(pcm.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary (P5) 8-bit grayscale PGM file."""
    data = Path(path).read_bytes()
    fields: list[bytes] = []
    pos = 0
    # header: magic, width, height, maxval; '#' starts a comment line
    while len(fields) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ManifestError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ManifestError(f"{path}: expected 8-bit PGM (maxval 255), got {maxval}")
    pos += 1  # single whitespace after maxval
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    return pixels.reshape(height, width)


def write_pgm(image: np.ndarray, path: str | Path) -> None:
    img = np.asarray(image)
    if img.ndim != 2:
        raise ManifestError("PGM image must be 2-D")
    img = img.astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())


def read_frame_dir(path: str | Path, prefix: str = "frame") -> list[np.ndarray]:
    """Read a directory of ``<prefix>_%06d.pgm`` frames, contiguous from 0."""
    directory = Path(path)
    frames = []
    i = 0
    while True:
        fp = directory / f"{prefix}_{i:06d}.pgm"
        if not fp.exists():
            break
        frames.append(read_pgm(fp))
        i += 1
    if not frames:
        raise ManifestError(f"{path}: no '{prefix}_000000.pgm' frame found")
    return frames


def write_frame_dir(frames: list[np.ndarray], path: str | Path,
                    prefix: str = "frame") -> None:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        write_pgm(frame, directory / f"{prefix}_{i:06d}.pgm")
