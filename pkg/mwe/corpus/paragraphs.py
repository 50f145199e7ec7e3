import typing

import numpy as np

from mwe.corpus.config import CorpusConfig
from mwe.corpus.documents import MusicDocument


def assemble_music_paragraph(doc: MusicDocument, config: CorpusConfig, rng: np.random.Generator) -> list[str]:
    """Combine a track's review text, tags and IDs into one shuffled training paragraph.

    Every review sentence is repeated `review_repeat` times, each copy with its own word shuffle; tags, the artist ID
    and the track ID appear once. The combined paragraph is then shuffled again.
    """
    paragraph: list[str] = []

    if config.uses("review"):
        for sentence in doc.review_sentences:
            for _ in range(config.review_repeat):
                copy = list(sentence)
                rng.shuffle(copy)
                paragraph.extend(copy)

    if config.uses("tag"):
        paragraph.extend(doc.tag_names)
    if config.uses("artist"):
        paragraph.append(doc.artist_id)
    if config.uses("track"):
        paragraph.append(doc.track_id)

    order = rng.permutation(len(paragraph))
    return [paragraph[i] for i in order]


def pair_array(token_ids: typing.Sequence[int] | np.ndarray, config: CorpusConfig, rng: np.random.Generator,
               discard_probabilities: typing.Optional[np.ndarray] = None) -> np.ndarray:
    """(center, context) pairs of one sequence as an (n, 2) int64 array, grouped by center position.

    Subsampling runs first (one uniform draw per token), then one window radius is drawn per surviving position.
    """
    ids = np.asarray(token_ids, dtype=np.int64)

    if discard_probabilities is not None and len(ids) > 0:
        keep = rng.random(len(ids)) >= discard_probabilities[ids]
        ids = ids[keep]

    n = len(ids)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)

    c = config.window_size
    if config.dynamic_window:
        radius = rng.integers(1, c + 1, size=n)
    else:
        radius = np.full(n, c)

    positions = np.arange(n)
    centers: list[np.ndarray] = []
    contexts: list[np.ndarray] = []
    for offset in range(1, min(c, n - 1) + 1):
        within = radius >= offset

        left = positions[within & (positions - offset >= 0)]
        centers.append(left)
        contexts.append(left - offset)

        right = positions[within & (positions + offset < n)]
        centers.append(right)
        contexts.append(right + offset)

    center_pos = np.concatenate(centers)
    context_pos = np.concatenate(contexts)
    order = np.lexsort((context_pos, center_pos))

    return np.stack([ids[center_pos[order]], ids[context_pos[order]]], axis=1)


def generate_training_pairs(token_ids: typing.Sequence[int] | np.ndarray, config: CorpusConfig,
                            rng: np.random.Generator,
                            discard_probabilities: typing.Optional[np.ndarray] = None
                            ) -> typing.Iterator[tuple[int, int]]:
    for center, context in pair_array(token_ids, config, rng, discard_probabilities):
        yield int(center), int(context)
