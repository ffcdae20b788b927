"""Pipeline configuration: weights, threshold, SNR mode and paths.

Defaults follow the published constants (gamma 1.2, equal audio weights,
0.6/0.4 composite, threshold 0.55); every value is overridable from a JSON
config file or CLI flags.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import CurationError


@dataclass
class PipelineConfig:
    gamma: float = 1.2
    w_asr: float = 0.5
    w_snr: float = 0.5
    w_audio: float = 0.6
    w_video: float = 0.4
    threshold: float = 0.55
    snr_mode: str = "estimate"  # "reference" | "estimate"
    snr_clamp_db: tuple[float, float] = (-10.0, 60.0)
    frozen_stats_path: str | None = None
    lip_indices_path: str | None = None
    epochs_stage1: int = 3
    epochs_stage2: int = 5
    mix_in_accept: bool = False
    normalize_text: bool = False
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.snr_clamp_db = tuple(self.snr_clamp_db)
        self.validate()

    def validate(self) -> None:
        for name in ("w_asr", "w_snr", "w_audio", "w_video"):
            if getattr(self, name) < 0:
                raise CurationError(f"negative weight {name}")
        if abs(self.w_asr + self.w_snr - 1.0) > 1e-9:
            raise CurationError("w_asr + w_snr must equal 1")
        if abs(self.w_audio + self.w_video - 1.0) > 1e-9:
            raise CurationError("w_audio + w_video must equal 1")
        if self.snr_mode not in ("reference", "estimate"):
            raise CurationError(f"unknown snr_mode {self.snr_mode!r}")
        if self.gamma <= 0:
            raise CurationError("gamma must be positive")
        lo, hi = self.snr_clamp_db
        if hi <= lo:
            raise CurationError("snr_clamp_db upper bound must exceed lower bound")
        if self.workers < 1:
            raise CurationError("workers must be >= 1")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise CurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)
