"""Audio quality scoring: ASR confidence, SNR, and their composite.

SNR comes in two modes: reference mode needs a clean signal; estimation
mode derives a noise floor from the quietest decile of frame energies.
Both are clamped to a fixed dB range before corpus-level normalization so
a single zero-noise sample cannot dominate the min-max bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AudioError

SNR_CLAMP_DB = (-10.0, 60.0)

# estimation-mode floors; signal floor sits below the noise floor so pure
# silence resolves to the negative clamp rather than 0 dB
_NOISE_FLOOR = 1e-10
_SIGNAL_FLOOR = 1e-12


@dataclass
class AudioQuality:
    s_asr: float
    snr_db: float
    snr_norm: float
    s_audio: float


def levenshtein(a: str, b: str) -> int:
    """Minimum edit distance over Unicode scalar values (two-row DP)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,            # deletion
                current[j - 1] + 1,         # insertion
                previous[j - 1] + (ca != cb),  # substitution / match
            ))
        previous = current
    return previous[-1]


def asr_confidence(hyp: str, ref: str) -> float:
    """1 - d_Lev(hyp, ref) / max(|ref|, |hyp|); undefined when both empty."""
    if not hyp and not ref:
        raise AudioError("ASR confidence undefined for two empty strings")
    return 1.0 - levenshtein(hyp, ref) / max(len(ref), len(hyp))


def clamp_snr(snr_db: float, clamp: tuple[float, float] = SNR_CLAMP_DB) -> float:
    lo, hi = clamp
    return min(max(snr_db, lo), hi)


def snr_reference(clean: np.ndarray, noisy: np.ndarray,
                  clamp: tuple[float, float] = SNR_CLAMP_DB) -> float:
    """10*log10(sum s^2 / sum (s - s_hat)^2), clamped to the dB range.

    Zero noise energy returns the upper clamp.
    """
    s = np.asarray(clean, dtype=np.float64)
    n = np.asarray(noisy, dtype=np.float64)
    if s.shape != n.shape or s.size == 0:
        raise AudioError("clean/noisy waveforms must share a nonzero length")
    signal_energy = float(np.sum(s * s))
    if signal_energy == 0.0:
        raise AudioError("all-zero clean signal: SNR undefined")
    noise_energy = float(np.sum((s - n) ** 2))
    if noise_energy == 0.0:
        return clamp[1]
    return clamp_snr(10.0 * math.log10(signal_energy / noise_energy), clamp)


def snr_estimate(noisy: np.ndarray, sample_rate: int = 16000,
                 frame_ms: float = 25.0, hop_ms: float = 10.0,
                 clamp: tuple[float, float] = SNR_CLAMP_DB) -> float:
    """Blind SNR from frame energies.

    Noise power is the mean energy of the quietest decile of frames (at
    least one frame); signal power is the mean of the rest minus the noise
    power, floored at a small epsilon.
    """
    x = np.asarray(noisy, dtype=np.float64)
    frame_len = max(1, int(round(sample_rate * frame_ms / 1000.0)))
    hop = max(1, int(round(sample_rate * hop_ms / 1000.0)))
    if x.size < frame_len:
        raise AudioError(f"waveform shorter than one frame ({frame_len} samples)")
    n_frames = 1 + (x.size - frame_len) // hop
    energies = np.empty(n_frames)
    for i in range(n_frames):
        frame = x[i * hop:i * hop + frame_len]
        energies[i] = float(np.mean(frame * frame))
    energies.sort()
    n_noise = max(1, n_frames // 10)
    noise_power = max(float(np.mean(energies[:n_noise])), _NOISE_FLOOR)
    rest = energies[n_noise:]
    mean_rest = float(np.mean(rest)) if rest.size else 0.0
    signal_power = max(mean_rest - noise_power, _SIGNAL_FLOOR)
    return clamp_snr(10.0 * math.log10(signal_power / noise_power), clamp)


def audio_score(s_asr: float, snr_norm: float,
                w_asr: float = 0.5, w_snr: float = 0.5) -> float:
    """Weighted combination of ASR confidence and normalized SNR."""
    for name, v in (("s_asr", s_asr), ("snr_norm", snr_norm)):
        if not 0.0 <= v <= 1.0:
            raise AudioError(f"{name} out of [0, 1]: {v}")
    return w_asr * s_asr + w_snr * snr_norm
