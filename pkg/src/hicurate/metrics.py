"""Evaluation metrics: character error rate, embedding cosine similarity,
and their convex combination, plus corpus-level aggregation.

Corpus CER is reported both micro (total edit distance over total
reference length) and macro (mean per-sample CER); the combined score is
derived for both conventions.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import MetricError
from .quality_audio import levenshtein

DEFAULT_ALPHA = 0.5


@dataclass
class EvalRecord:
    id: str
    cer: float
    emb_sim: float
    cs: float


@dataclass
class EvalReport:
    alpha: float
    records: list[EvalRecord]
    corpus_cer_micro: float
    corpus_cer_macro: float
    corpus_emb_sim: float
    corpus_cs_micro: float
    corpus_cs_macro: float
    failures: list[dict]

    def to_json(self) -> str:
        obj = asdict(self)
        return json.dumps(obj, indent=2, ensure_ascii=False)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def cer(hyp: str, ref: str) -> float:
    """Edit distance over reference length (Unicode scalar values); may
    exceed 1."""
    if not ref:
        raise MetricError("CER undefined for empty reference")
    return levenshtein(hyp, ref) / len(ref)


def emb_sim(pred: np.ndarray, ref: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    p = np.asarray(pred, dtype=np.float64)
    r = np.asarray(ref, dtype=np.float64)
    if p.shape != r.shape:
        raise MetricError(f"embedding dimension mismatch: {p.shape} vs {r.shape}")
    np_norm, nr_norm = float(np.linalg.norm(p)), float(np.linalg.norm(r))
    if np_norm == 0.0 or nr_norm == 0.0:
        raise MetricError("zero-norm embedding vector")
    return float(np.clip(float(p @ r) / (np_norm * nr_norm), -1.0, 1.0))


def comprehensive_score(cer_value: float, emb_sim_value: float,
                        alpha: float = DEFAULT_ALPHA) -> float:
    """(1 - alpha) * (1 - CER) + alpha * EmbSim; may be negative for CER > 1."""
    if not 0.0 <= alpha <= 1.0:
        raise MetricError(f"alpha out of [0, 1]: {alpha}")
    return (1.0 - alpha) * (1.0 - cer_value) + alpha * emb_sim_value


def evaluate_corpus(pairs: list[tuple], alpha: float = DEFAULT_ALPHA) -> EvalReport:
    """Evaluate (id, hyp, ref, pred_emb, ref_emb) tuples.

    Per-pair errors are collected with their id; an all-failing corpus is
    an error.
    """
    if not pairs:
        raise MetricError("no evaluation pairs")
    records: list[EvalRecord] = []
    failures: list[dict] = []
    total_dist = 0
    total_ref_len = 0
    for pid, hyp, ref, pred_vec, ref_vec in pairs:
        try:
            c = cer(hyp, ref)
            e = emb_sim(pred_vec, ref_vec)
        except MetricError as exc:
            failures.append({"id": pid, "error": str(exc)})
            continue
        records.append(EvalRecord(
            id=pid, cer=c, emb_sim=e, cs=comprehensive_score(c, e, alpha)))
        total_dist += levenshtein(hyp, ref)
        total_ref_len += len(ref)
    if not records:
        raise MetricError(f"all {len(pairs)} pairs failed evaluation")

    cer_micro = total_dist / total_ref_len
    cer_macro = float(np.mean([r.cer for r in records]))
    mean_emb = float(np.mean([r.emb_sim for r in records]))
    return EvalReport(
        alpha=alpha,
        records=records,
        corpus_cer_micro=cer_micro,
        corpus_cer_macro=cer_macro,
        corpus_emb_sim=mean_emb,
        corpus_cs_micro=comprehensive_score(cer_micro, mean_emb, alpha),
        corpus_cs_macro=comprehensive_score(cer_macro, mean_emb, alpha),
        failures=failures,
    )
