import json
import os
import typing

import numpy as np

from mwe.corpus.config import CorpusConfig
from mwe.corpus.documents import MusicDocument, Tag, TagCategory
from mwe.corpus.token import TokenKind, VocabEntry
from mwe.corpus.vocabulary import Vocabulary
from mwe.embedding.word_embedding import WordEmbedding


def write_lines(path: str, lines: typing.Iterable[str]) -> str:
    with open(path, "w", encoding="utf-8") as file:
        for line in lines:
            file.write(line + "\n")
    return path


def write_jsonl(path: str, objects: typing.Iterable[dict[str, typing.Any]]) -> str:
    return write_lines(path, (json.dumps(obj) for obj in objects))


def music_document(track_id: str, artist_id: str, tags: typing.Sequence[str] = (),
                   sentences: typing.Sequence[str] = (), context_tags: typing.Sequence[str] = ()) -> MusicDocument:
    return MusicDocument(
        track_id=track_id,
        artist_id=artist_id,
        tags=[Tag(name, TagCategory.CONTENT) for name in tags] + [Tag(name, TagCategory.CONTEXT) for name in context_tags],
        review_sentences=[sentence.split() for sentence in sentences],
    )


def corpus_config(**overrides: typing.Any) -> CorpusConfig:
    """Small-corpus defaults: no frequency cut-off, no subsampling."""
    values: dict[str, typing.Any] = {"min_count": 1, "subsample_threshold": 0.0}
    values.update(overrides)
    return CorpusConfig.from_dict(values)


def vocabulary(tokens: typing.Sequence[str], kinds: typing.Optional[typing.Sequence[TokenKind]] = None,
               counts: typing.Optional[typing.Sequence[int]] = None) -> Vocabulary:
    kinds = kinds or [TokenKind.GENERAL_WORD] * len(tokens)
    counts = counts or [1] * len(tokens)
    return Vocabulary(VocabEntry(token, kind, count) for token, kind, count in zip(tokens, kinds, counts))


def embedding(rows: dict[str, typing.Sequence[float]],
              kinds: typing.Optional[dict[str, TokenKind]] = None) -> WordEmbedding:
    kinds = kinds or {}
    vocab = vocabulary(list(rows), [kinds.get(token, TokenKind.GENERAL_WORD) for token in rows])
    return WordEmbedding(vocab, np.array(list(rows.values()), dtype=np.float64))


def random_embedding(tokens: typing.Sequence[str], dim: int, rng: np.random.Generator,
                     kinds: typing.Optional[typing.Sequence[TokenKind]] = None) -> WordEmbedding:
    return WordEmbedding(vocabulary(tokens, kinds), rng.normal(size=(len(tokens), dim)))


class SyntheticWorld(typing.NamedTuple):
    """Genres own disjoint tag sets, artists and review words; every track is annotated from its genre only."""
    documents: list[MusicDocument]
    genre_tags: list[list[str]]
    annotations: dict[str, set[str]]
    categories: dict[str, TagCategory]


def synthetic_world(rng: np.random.Generator, genres: int = 2, tags_per_genre: int = 10, tracks: int = 200,
                    tags_per_track: int = 4, artists_per_genre: int = 5, review_words: int = 0,
                    shared_vocabulary: int = 0) -> SyntheticWorld:
    """`review_words` genre-specific words per track review; `shared_vocabulary` > 0 draws them from one vocabulary
    shared by every genre instead, so reviews carry no genre signal.
    """
    genre_tags = [[f"g{g}_tag{i}" for i in range(tags_per_genre)] for g in range(genres)]
    categories = {
        tag: TagCategory.CONTENT if i < tags_per_genre // 2 else TagCategory.CONTEXT
        for tags in genre_tags for i, tag in enumerate(tags)
    }

    documents = []
    annotations = {}
    for t in range(tracks):
        g = t % genres
        track_id = f"TRACK{t:04d}"
        chosen = [str(tag) for tag in rng.choice(genre_tags[g], size=tags_per_track, replace=False)]

        sentences = []
        if review_words > 0:
            if shared_vocabulary > 0:
                words = [f"word{int(i)}" for i in rng.integers(0, shared_vocabulary, size=review_words)]
            else:
                words = [f"g{g}_word{int(i)}" for i in rng.integers(0, 10, size=review_words)]
            sentences.append(" ".join(words))

        documents.append(music_document(
            track_id, f"ARTIST{g}_{int(rng.integers(artists_per_genre))}",
            [tag for tag in chosen if categories[tag] == TagCategory.CONTENT], sentences,
            [tag for tag in chosen if categories[tag] == TagCategory.CONTEXT],
        ))
        annotations[track_id] = set(chosen)

    return SyntheticWorld(documents, genre_tags, annotations, categories)


def genre_cosine_gap(emb: WordEmbedding, genre_tags: list[list[str]]) -> float:
    """Mean intra-genre tag cosine minus mean inter-genre tag cosine."""
    intra = []
    inter = []
    for g, tags in enumerate(genre_tags):
        for h, others in enumerate(genre_tags):
            for a in tags:
                for b in others:
                    if a == b:
                        continue
                    (intra if g == h else inter).append(emb.similarity(a, b))
    return float(np.mean(intra) - np.mean(inter))


def central_difference(f: typing.Callable[[], float], array: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Numerical gradient of f() with respect to every entry of `array`, which f reads in place."""
    gradient = np.zeros_like(array, dtype=np.float64)
    for index in np.ndindex(array.shape):
        original = array[index]
        array[index] = original + eps
        plus = f()
        array[index] = original - eps
        minus = f()
        array[index] = original
        gradient[index] = (plus - minus) / (2 * eps)
    return gradient


def relative_error(actual: np.ndarray, expected: np.ndarray) -> float:
    scale = max(np.max(np.abs(actual)), np.max(np.abs(expected)), 1e-8)
    return float(np.max(np.abs(actual - expected)) / scale)


def in_directory(tmp_path: typing.Any, *names: str) -> str:
    return os.path.join(str(tmp_path), *names)
