import functools
import typing

import librosa
import numpy as np

from mwe.features.config import MelConfig


def hz_to_mel(frequency: float | np.ndarray) -> np.ndarray:
    return np.asarray(librosa.hz_to_mel(frequency, htk=True), dtype=np.float64)


def mel_to_hz(mel: float | np.ndarray) -> np.ndarray:
    return np.asarray(librosa.mel_to_hz(mel, htk=True), dtype=np.float64)


def fft_frequencies(sample_rate: int, fft_size: int) -> np.ndarray:
    return np.asarray(librosa.fft_frequencies(sr=sample_rate, n_fft=fft_size), dtype=np.float64)


def mel_center_frequencies(sample_rate: int, mel_bins: int) -> np.ndarray:
    """Peak frequency in Hz of each of the mel_bins filters."""
    edges = librosa.mel_frequencies(n_mels=mel_bins + 2, fmin=0.0, fmax=sample_rate / 2.0, htk=True)
    return np.asarray(edges[1:-1], dtype=np.float64)


@functools.lru_cache(maxsize=8)
def mel_filterbank(sample_rate: int, fft_size: int, mel_bins: int) -> np.ndarray:
    """(mel_bins, fft_size // 2 + 1) HTK-scale triangular filters with peak 1 and no area normalization.

    Between two adjacent centers the rising and falling edges of neighbouring triangles sum to 1.
    """
    weights = np.asarray(librosa.filters.mel(
        sr=sample_rate, n_fft=fft_size, n_mels=mel_bins, fmin=0.0, fmax=sample_rate / 2.0,
        htk=True, norm=None, dtype=np.float64,
    ))
    weights.setflags(write=False)
    return weights


def frame_count(num_samples: int, fft_size: int, hop: int) -> int:
    return 1 + (num_samples - fft_size) // hop


def power_spectrogram(pcm: np.ndarray, config: MelConfig) -> np.ndarray:
    """(frames, fft_size // 2 + 1) |STFT|^2 with a periodic window, no padding or centering."""
    spectrum = np.asarray(
        librosa.stft(pcm, n_fft=config.fft_size, hop_length=config.hop, window=config.window, center=False)
    )
    return typing.cast(np.ndarray, np.abs(spectrum.T) ** 2)


def log_mel_spectrogram(pcm: np.ndarray, config: MelConfig) -> np.ndarray:
    """(frames, mel_bins) natural-log mel power spectrogram: ln(mel_power + log_floor)."""
    pcm = np.asarray(pcm, dtype=np.float64)
    if pcm.ndim != 1:
        raise ValueError("expected mono PCM samples")
    if len(pcm) < config.fft_size:
        raise ValueError(f"PCM too short: {len(pcm)} samples, need at least {config.fft_size}")
    if not np.all(np.isfinite(pcm)):
        raise ValueError("PCM contains non-finite samples")

    power = power_spectrogram(np.ascontiguousarray(pcm), config)
    filterbank = mel_filterbank(config.sample_rate, config.fft_size, config.mel_bins)
    return np.log(power @ filterbank.T + config.log_floor)
