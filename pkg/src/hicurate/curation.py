"""Corpus-level normalization, composite scoring and rejection-sampling
partition.

Two-pass execution: pass 1 computes per-sample raw metrics (ASR
confidence, clamped SNR, motion); a corpus reduction fixes the min-max SNR
bounds and the 90th-percentile motion; pass 2 normalizes, combines and
partitions. Bounds can be frozen from a previous run to score held-out
data.
"""
from __future__ import annotations

import json
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import manifest_io, quality_audio, quality_video
from .config import PipelineConfig
from .errors import CurationError, HicurateError
from .manifest_io import SampleRecord


@dataclass
class CorpusStats:
    snr_min: float
    snr_max: float
    m_max: float
    n_samples: int

    @classmethod
    def load(cls, path: str | Path) -> "CorpusStats":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class SampleScore:
    id: str
    s_asr: float
    snr_db: float
    motion: float
    snr_norm: float
    s_audio: float
    s_video: float
    s_comp: float
    accepted: bool


def min_max_normalize(values: list[float]) -> list[float]:
    """(v - min) / (max - min) per element; a constant list maps to 0.5."""
    if not values:
        raise CurationError("cannot normalize an empty list")
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.5] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def composite_score(s_audio: float, s_video: float,
                    w_audio: float = 0.6, w_video: float = 0.4) -> float:
    for name, v in (("s_audio", s_audio), ("s_video", s_video)):
        if not 0.0 <= v <= 1.0:
            raise CurationError(f"{name} out of [0, 1]: {v}")
    return w_audio * s_audio + w_video * s_video


def partition(scores: list, threshold: float = 0.55) -> tuple[list[str], list[str]]:
    """Split scored samples into accept/reject id lists, boundary inclusive.

    Accepts any objects carrying ``id`` and ``s_comp`` attributes.
    """
    ids = [s.id for s in scores]
    if len(set(ids)) != len(ids):
        raise CurationError("duplicate sample ids in partition input")
    accept = [s.id for s in scores if s.s_comp >= threshold]
    reject = [s.id for s in scores if s.s_comp < threshold]
    return accept, reject


def normalize_text(text: str) -> str:
    """Drop punctuation and whitespace (opt-in comparison normalization)."""
    return "".join(
        ch for ch in text
        if unicodedata.category(ch)[0] not in ("P", "Z", "C"))


def _score_sample_raw(record: SampleRecord, config: PipelineConfig) -> dict:
    """Pass-1 metrics for one sample (no corpus-level context)."""
    if record.hypothesis_text is None:
        raise CurationError("missing hypothesis_text (external ASR transcript)")
    hyp, ref = record.hypothesis_text, record.reference_text
    if config.normalize_text:
        hyp, ref = normalize_text(hyp), normalize_text(ref)
    s_asr = quality_audio.asr_confidence(hyp, ref)

    noisy, rate = manifest_io.read_wav(record.audio_path)
    if config.snr_mode == "reference":
        if record.clean_audio_path is None:
            raise CurationError("reference SNR mode needs clean_audio")
        clean, _ = manifest_io.read_wav(record.clean_audio_path)
        snr_db = quality_audio.snr_reference(clean, noisy, config.snr_clamp_db)
    else:
        snr_db = quality_audio.snr_estimate(
            noisy, sample_rate=rate, clamp=config.snr_clamp_db)

    frames = manifest_io.read_frame_dir(record.frames_path, prefix="crop")
    motion = quality_video.motion_magnitude(frames)
    return {"s_asr": s_asr, "snr_db": snr_db, "motion": motion}


def curate_corpus(records: list[SampleRecord], config: PipelineConfig,
                  out_dir: str | Path) -> tuple[CorpusStats, list[SampleScore], list[dict]]:
    """Score a corpus, partition it and write report + manifests.

    Returns (stats, scores, failures). Per-sample failures are collected
    with their id and excluded from scoring, never silently dropped.
    Raises if every sample fails or the corpus is empty.
    """
    if not records:
        raise CurationError("empty corpus")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def worker(record: SampleRecord):
        try:
            return _score_sample_raw(record, config), None
        except (HicurateError, OSError) as exc:
            return None, {"id": record.id, "error": str(exc)}

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(worker, records))

    failures = [err for _, err in results if err is not None]
    scored = [(rec, raw) for rec, (raw, err) in zip(records, results) if err is None]
    if not scored:
        raise CurationError(f"all {len(records)} samples failed scoring")

    if config.frozen_stats_path:
        stats = CorpusStats.load(config.frozen_stats_path)
        stats = CorpusStats(stats.snr_min, stats.snr_max, stats.m_max, len(scored))
    else:
        snrs = [raw["snr_db"] for _, raw in scored]
        m_max = quality_video.percentile_90([raw["motion"] for _, raw in scored])
        stats = CorpusStats(snr_min=min(snrs), snr_max=max(snrs),
                            m_max=m_max, n_samples=len(scored))

    scores = []
    for rec, raw in scored:
        if stats.snr_max == stats.snr_min:
            snr_norm = 0.5
        else:
            snr_norm = (raw["snr_db"] - stats.snr_min) / (stats.snr_max - stats.snr_min)
            snr_norm = min(max(snr_norm, 0.0), 1.0)  # frozen bounds may be exceeded
        s_audio = quality_audio.audio_score(
            raw["s_asr"], snr_norm, config.w_asr, config.w_snr)
        s_video = quality_video.video_score(raw["motion"], stats.m_max)
        s_comp = composite_score(s_audio, s_video, config.w_audio, config.w_video)
        scores.append(SampleScore(
            id=rec.id, s_asr=raw["s_asr"], snr_db=raw["snr_db"],
            motion=raw["motion"], snr_norm=snr_norm, s_audio=s_audio,
            s_video=s_video, s_comp=s_comp,
            accepted=s_comp >= config.threshold))

    accept_ids, _ = partition(scores, config.threshold)
    accept_set = set(accept_ids)
    by_id = {rec.id: rec for rec, _ in scored}
    accept_recs = [by_id[s.id] for s in scores if s.id in accept_set]
    reject_recs = [by_id[s.id] for s in scores if s.id not in accept_set]
    manifest_io.write_partition_manifests(accept_recs, reject_recs, out)

    report = {
        "stats": asdict(stats),
        "config": {
            "threshold": config.threshold, "snr_mode": config.snr_mode,
            "w_asr": config.w_asr, "w_snr": config.w_snr,
            "w_audio": config.w_audio, "w_video": config.w_video,
        },
        "scores": [asdict(s) for s in scores],
        "failures": failures,
    }
    (out / "report.json").write_text(
        json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return stats, scores, failures
