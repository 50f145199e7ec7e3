import json
import logging
import os
import typing
from dataclasses import dataclass

import numpy as np
import scipy.io.wavfile

from mwe.features.config import MelConfig
from mwe.features.mel import log_mel_spectrogram
from utils.utils import parse_error, missing_file_error, DataFormatError

logger = logging.getLogger(__name__)


@dataclass
class ClipFeatures:
    clip_id: str
    track_id: str
    vector: np.ndarray

    def __post_init__(self) -> None:
        self.vector = np.asarray(self.vector, dtype=np.float64)
        if self.vector.ndim != 1:
            raise ValueError("clip feature vector must be 1-d")
        if not np.all(np.isfinite(self.vector)):
            raise ValueError(f"clip {self.clip_id} has non-finite features")

    def to_json(self) -> dict[str, typing.Any]:
        return {"clip_id": self.clip_id, "track_id": self.track_id, "vector": [float(v) for v in self.vector]}


def excerpt(pcm: np.ndarray, rng: np.random.Generator, seconds: float = 3.0, sample_rate: int = 22050) -> np.ndarray:
    """A contiguous slice of floor(seconds * sample_rate) samples starting at a uniformly random valid offset."""
    length = int(seconds * sample_rate)
    if length < 1:
        raise ValueError("excerpt must contain at least one sample")
    if len(pcm) < length:
        raise ValueError(f"track shorter than excerpt: {len(pcm)} samples, need {length}")

    offset = int(rng.integers(0, len(pcm) - length + 1))
    return pcm[offset:offset + length]


def summarize(mel: np.ndarray) -> np.ndarray:
    """Per-bin mean followed by per-bin population standard deviation over frames."""
    mel = np.asarray(mel, dtype=np.float64)
    if mel.ndim != 2 or mel.shape[0] < 1:
        raise ValueError("expected a (frames, bins) matrix with at least one frame")
    return np.concatenate([mel.mean(axis=0), mel.std(axis=0)])


def extract_clip_features(pcm: np.ndarray, config: MelConfig, rng: np.random.Generator, track_id: str,
                          num_excerpts: typing.Optional[int] = None) -> list[ClipFeatures]:
    """Random excerpts of one track, each summarized from its log-mel spectrogram."""
    num_excerpts = num_excerpts or config.excerpts_per_track
    clips = []
    for i in range(num_excerpts):
        samples = excerpt(pcm, rng, config.excerpt_seconds, config.sample_rate)
        vector = summarize(log_mel_spectrogram(samples, config))
        clips.append(ClipFeatures(f"{track_id}#{i}", track_id, vector))
    return clips


def load_wav(path: str, config: MelConfig) -> np.ndarray:
    """Mono float samples in [-1, 1]. Stereo is averaged; the file must already be at the configured rate."""
    if not os.path.isfile(path):
        raise missing_file_error(path)

    sample_rate, data = scipy.io.wavfile.read(path)
    if sample_rate != config.sample_rate:
        raise DataFormatError(
            f"{path}: sample rate {sample_rate} Hz is not supported, expected {config.sample_rate} Hz", path
        )

    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise DataFormatError(f"{path}: unsupported sample format {data.dtype}, expected 16-bit or float32 PCM", path)

    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return samples


def load_feature_file(path: str) -> list[ClipFeatures]:
    """Precomputed features, JSON Lines {clip_id, track_id, vector}. All vectors must share one length."""
    if not os.path.isfile(path):
        raise missing_file_error(path)

    clips: list[ClipFeatures] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as file:
        for line_num, line in enumerate(file, start=1):
            if len(line.strip()) == 0:
                continue
            try:
                obj = json.loads(line)
                clip = ClipFeatures(str(obj["clip_id"]), str(obj["track_id"]), np.array(obj["vector"], dtype=np.float64))
            except json.JSONDecodeError as e:
                raise parse_error(path, line_num, f"invalid JSON ({e.msg})")
            except KeyError as e:
                raise parse_error(path, line_num, f"missing key {e}")
            except (ValueError, TypeError) as e:
                raise parse_error(path, line_num, str(e))

            if clip.clip_id in seen:
                raise parse_error(path, line_num, f"duplicate clip_id '{clip.clip_id}'")
            if len(clips) > 0 and len(clip.vector) != len(clips[0].vector):
                raise parse_error(path, line_num, f"expected {len(clips[0].vector)} values, got {len(clip.vector)}")

            seen.add(clip.clip_id)
            clips.append(clip)

    logger.info("loaded %i clip feature vectors from %s", len(clips), path)
    return clips


def save_feature_file(path: str, clips: typing.Iterable[ClipFeatures]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for clip in clips:
            file.write(json.dumps(clip.to_json()) + "\n")
