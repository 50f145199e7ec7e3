import collections
import typing

import numpy as np

from mwe.embedding.word_embedding import rank_by_score
from mwe.features.clips import ClipFeatures
from mwe.joint.encoders import AudioEncoder, SemanticEncoder, track_embedding
from mwe.joint.losses import NORM_EPSILON


def group_clips(clips: typing.Iterable[ClipFeatures]) -> dict[str, list[ClipFeatures]]:
    tracks: dict[str, list[ClipFeatures]] = collections.defaultdict(list)
    for clip in clips:
        tracks[clip.track_id].append(clip)
    return dict(tracks)


def track_embeddings(enc: AudioEncoder, clips: typing.Iterable[ClipFeatures]) -> dict[str, np.ndarray]:
    return {track_id: track_embedding(enc, track_clips) for track_id, track_clips in sorted(group_clips(clips).items())}


def similarity_matrix(rows: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Cosine between every row vector and every column vector."""
    unit_rows = rows / np.maximum(np.linalg.norm(rows, axis=1, keepdims=True), NORM_EPSILON)
    unit_columns = columns / np.maximum(np.linalg.norm(columns, axis=1, keepdims=True), NORM_EPSILON)
    return typing.cast(np.ndarray, np.clip(unit_rows @ unit_columns.T, -1.0, 1.0))


def zero_shot_tagging(audio: AudioEncoder, semantic: SemanticEncoder, clips: typing.Sequence[ClipFeatures],
                      tags: typing.Sequence[str], k: int) -> list[tuple[str, float]]:
    """Top-k tags for one track from an arbitrary tag list, seen in training or not."""
    track = track_embedding(audio, clips)
    prototypes = semantic.encode(tags)
    scores = similarity_matrix(track[np.newaxis, :], prototypes)[0]
    top = rank_by_score(scores, np.arange(len(tags)), k)
    return [(tags[i], float(scores[i])) for i in top]
