import json

import numpy as np
import pytest

from hicurate import manifest_io
from hicurate.manifest_io import N_FACE_LANDMARKS, LandmarkTrack


def make_face_frame(lip_indices, lip_points, base=(200.0, 200.0)):
    """A 468-point frame whose lip-indexed rows carry the given points;
    every other landmark sits at ``base``."""
    pts = np.full((N_FACE_LANDMARKS, 2), base, dtype=np.float64)
    for idx, p in zip(lip_indices, lip_points):
        pts[idx] = p
    return pts


def write_track(path, frames):
    track = LandmarkTrack(frame_count=len(frames), frames=frames)
    manifest_io.write_landmark_track(track, path)


def write_alternating_wav(path, clean_amp, noise_amp, n=800, rate=16000):
    """Clean constant signal plus +/- alternating noise, all on the int16
    grid so WAV round-trip is exact. Returns (clean, noisy) float arrays."""
    clean = np.full(n, clean_amp)
    noise = noise_amp * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    manifest_io.write_wav(clean + noise, rate, path)
    return clean, clean + noise


def write_uniform_crops(dirpath, levels, size=8):
    frames = [np.full((size, size), lv, dtype=np.uint8) for lv in levels]
    manifest_io.write_frame_dir(frames, dirpath, prefix="crop")


@pytest.fixture
def curation_corpus(tmp_path):
    """Four-sample synthetic corpus with exactly known quality inputs.

    Reference-mode SNR: clean amplitude 8192/32768, alternating noise of
    known amplitude. Texts with known edit distances, uniform crop frames
    with known motion.
    """
    amp = 8192 / 32768  # 0.25, exact on the int16 grid
    # (id, noise_amp numerator/32768, (hyp, ref), crop levels)
    specs = [
        ("s1", 256, ("abcd", "abcd"), [0, 40, 40]),    # d=0, motion 20
        ("s2", 1024, ("abed", "abcd"), [0, 10, 30]),   # d=1, motion 15
        ("s3", 4096, ("", "ab"), [10, 10, 10]),        # d=2, motion 0
        ("s4", 512, ("axcd", "abcd"), [0, 80, 0]),     # d=1, motion 80
    ]
    records = []
    expected = {}
    for sid, noise_num, (hyp, ref), levels in specs:
        noise_amp = noise_num / 32768
        sample = tmp_path / sid
        sample.mkdir()
        clean_path = sample / "clean.wav"
        noisy_path = sample / "noisy.wav"
        manifest_io.write_wav(np.full(800, amp), 16000, clean_path)
        write_alternating_wav(noisy_path, amp, noise_amp)
        crop_dir = sample / "crops"
        write_uniform_crops(crop_dir, levels)
        records.append({
            "id": sid,
            "audio": str(noisy_path),
            "frames": str(crop_dir),
            "landmarks": str(sample / "landmarks.jsonl"),
            "ref_text": ref,
            "hyp_text": hyp,
            "clean_audio": str(clean_path),
        })
        expected[sid] = {
            "snr_db": 10 * np.log10((amp / noise_amp) ** 2),
            "hyp": hyp, "ref": ref, "levels": levels,
        }
    manifest_path = tmp_path / "manifest.jsonl"
    manifest_path.write_text(
        "\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n",
        encoding="utf-8")
    return {"manifest": manifest_path, "records": records,
            "expected": expected, "root": tmp_path}
