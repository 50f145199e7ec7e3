import hashlib
import logging
import typing

import numpy as np

from mwe.corpus.token import TokenKind
from mwe.corpus.vocabulary import Vocabulary
from utils.utils import oov_error, zero_norm_error

logger = logging.getLogger(__name__)


def cosine_similarity(u: typing.Sequence[float] | np.ndarray, v: typing.Sequence[float] | np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0 or norm_v == 0:
        raise zero_norm_error()
    return float(np.clip(np.dot(u, v) / (norm_u * norm_v), -1.0, 1.0))


def rank_by_score(scores: np.ndarray, ids: np.ndarray, k: int) -> np.ndarray:
    """Positions of the k best scores, descending; equal scores are ordered by ascending id."""
    order = np.lexsort((ids, -scores))
    return order[:k]


class WordEmbedding:
    """Published word embedding: one row per vocabulary entry. Read-only once built."""

    def __init__(self, vocabulary: Vocabulary, vectors: np.ndarray) -> None:
        if vectors.ndim != 2 or vectors.shape[0] != len(vocabulary):
            raise ValueError(f"expected {len(vocabulary)} rows, got shape {vectors.shape}")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embedding contains non-finite values")

        self.vocabulary = vocabulary
        self.vectors = np.array(vectors, copy=True)
        self.vectors.setflags(write=False)
        self.norms = np.linalg.norm(self.vectors.astype(np.float64), axis=1)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.vocabulary)

    def __contains__(self, token: object) -> bool:
        return token in self.vocabulary

    def __getitem__(self, token: str) -> np.ndarray:
        return self.vectors[self.vocabulary.id(token)]

    def query_vector(self, tokens: typing.Sequence[str]) -> tuple[np.ndarray, list[str]]:
        """Mean vector of the in-vocabulary tokens, and the out-of-vocabulary tokens that were skipped."""
        known = [token for token in tokens if token in self.vocabulary]
        skipped = [token for token in tokens if token not in self.vocabulary]

        if len(known) == 0:
            raise oov_error(skipped)
        if len(skipped) > 0:
            logger.warning("skipped out-of-vocabulary query tokens: %s", ", ".join(skipped))

        ids = [self.vocabulary.id(token) for token in known]
        return self.vectors[ids].astype(np.float64).mean(axis=0), skipped

    def similarities(self, query: np.ndarray, candidate_ids: np.ndarray) -> np.ndarray:
        """Cosine of the query against each candidate row. Zero rows score 0."""
        query = np.asarray(query, dtype=np.float64)
        query_norm = np.linalg.norm(query)
        if query_norm == 0:
            raise zero_norm_error()

        dots = self.vectors[candidate_ids].astype(np.float64) @ query
        norms = self.norms[candidate_ids] * query_norm
        scores = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
        return np.clip(scores, -1.0, 1.0)

    def nearest(self, query: np.ndarray, k: int, kind_filter: typing.Optional[typing.Iterable[TokenKind]] = None,
                exclude: typing.Iterable[int] = ()) -> list[tuple[str, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")

        candidates = self.vocabulary.ids_of_kinds(kind_filter)
        excluded = np.asarray(list(exclude), dtype=np.int64)
        if len(excluded) > 0:
            candidates = candidates[~np.isin(candidates, excluded)]
        if len(candidates) == 0:
            raise ValueError("no candidate tokens match the kind filter")

        scores = self.similarities(query, candidates)
        top = rank_by_score(scores, candidates, k)
        return [(self.vocabulary.lookup(int(candidates[i])), float(scores[i])) for i in top]

    def most_similar(self, token: str, k: int,
                     kind_filter: typing.Optional[typing.Iterable[TokenKind]] = None) -> list[tuple[str, float]]:
        token_id = self.vocabulary.id(token)
        return self.nearest(self.vectors[token_id], k, kind_filter, exclude=[token_id])

    def similarity(self, a: str, b: str) -> float:
        return cosine_similarity(self[a], self[b])

    def pair_similarity(
            self, pairs: typing.Iterable[tuple[str, str]]
    ) -> tuple[dict[tuple[str, str], float], list[tuple[str, str]]]:
        """Cosine for each word pair; pairs with an out-of-vocabulary token are returned separately."""
        scores: dict[tuple[str, str], float] = {}
        skipped = []
        for a, b in pairs:
            if a in self.vocabulary and b in self.vocabulary:
                scores[(a, b)] = self.similarity(a, b)
            else:
                skipped.append((a, b))
        return scores, skipped

    def checksum(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.vectors).tobytes()).hexdigest()


def query_vector(tokens: typing.Sequence[str], emb: WordEmbedding) -> tuple[np.ndarray, list[str]]:
    return emb.query_vector(tokens)


def nearest(query: np.ndarray, k: int, kind_filter: typing.Optional[typing.Iterable[TokenKind]],
            emb: WordEmbedding) -> list[tuple[str, float]]:
    return emb.nearest(query, k, kind_filter)
