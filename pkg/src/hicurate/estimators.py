"""Scikit-learn style facades over the functional pipeline.

``CorpusCurator`` is fit/transform shaped: ``fit`` learns the corpus-level
normalization state (SNR min/max, 90th-percentile motion) from raw
per-sample metrics, ``transform`` scores samples against those frozen
bounds. ``LipStabilizer`` fits a crop plan from a landmark track and
transforms raw frames into stabilized crops. Both expose ``get_params``
so they compose with sklearn pipelines and grid searches.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import lip_geometry, quality_audio, quality_video
from .curation import CorpusStats, SampleScore, composite_score
from .manifest_io import LandmarkTrack


class CorpusCurator(BaseEstimator):
    """Score (s_asr, snr_db, motion) rows and partition by composite score.

    X is an array-like of shape (n_samples, 3) with columns
    [asr_confidence, clamped SNR in dB, motion magnitude].
    """

    def __init__(self, threshold=0.55, w_asr=0.5, w_snr=0.5,
                 w_audio=0.6, w_video=0.4):
        self.threshold = threshold
        self.w_asr = w_asr
        self.w_snr = w_snr
        self.w_audio = w_audio
        self.w_video = w_video

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != 3:
            raise ValueError("expected (n_samples, 3) metric rows")
        snrs = X[:, 1]
        self.stats_ = CorpusStats(
            snr_min=float(snrs.min()), snr_max=float(snrs.max()),
            m_max=quality_video.percentile_90(X[:, 2].tolist()),
            n_samples=X.shape[0])
        return self

    def transform(self, X, ids=None):
        """Score rows against the fitted bounds; returns SampleScore list."""
        if not hasattr(self, "stats_"):
            raise NotFittedError("CorpusCurator must be fitted before transform")
        X = np.asarray(X, dtype=np.float64)
        if ids is None:
            ids = [str(i) for i in range(X.shape[0])]
        stats = self.stats_
        out = []
        for rid, (s_asr, snr_db, motion) in zip(ids, X):
            if stats.snr_max == stats.snr_min:
                snr_norm = 0.5
            else:
                snr_norm = (snr_db - stats.snr_min) / (stats.snr_max - stats.snr_min)
                snr_norm = min(max(snr_norm, 0.0), 1.0)
            s_audio = quality_audio.audio_score(s_asr, snr_norm, self.w_asr, self.w_snr)
            s_video = quality_video.video_score(motion, stats.m_max)
            s_comp = composite_score(s_audio, s_video, self.w_audio, self.w_video)
            out.append(SampleScore(
                id=str(rid), s_asr=float(s_asr), snr_db=float(snr_db),
                motion=float(motion), snr_norm=snr_norm, s_audio=s_audio,
                s_video=s_video, s_comp=s_comp,
                accepted=s_comp >= self.threshold))
        return out

    def fit_transform(self, X, y=None, **kwargs):
        return self.fit(X).transform(X, **kwargs)

    def predict(self, X, ids=None):
        """Boolean accept decisions for metric rows."""
        return np.array([s.accepted for s in self.transform(X, ids=ids)])


class LipStabilizer(BaseEstimator, TransformerMixin):
    """Fit a stabilized crop plan from a landmark track, transform frames."""

    def __init__(self, lip_indices=None, gamma=lip_geometry.DEFAULT_GAMMA):
        self.lip_indices = lip_indices
        self.gamma = gamma

    def fit(self, X: LandmarkTrack, y=None):
        lips = self.lip_indices or lip_geometry.default_lip_indices()
        self.plan_ = lip_geometry.plan_crops(X, lips, self.gamma)
        return self

    def transform(self, X):
        """Crop a frame sequence with the fitted plan."""
        if not hasattr(self, "plan_"):
            raise NotFittedError("LipStabilizer must be fitted before transform")
        return lip_geometry.apply_crops(X, self.plan_)
