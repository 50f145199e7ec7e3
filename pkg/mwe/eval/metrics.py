import itertools
import typing

import numpy as np
import scipy.stats

from utils.utils import MetricUndefinedError


def tag_cooccurrence(annotations: typing.Mapping[str, typing.Iterable[str]]) -> tuple[list[str], np.ndarray]:
    """Tags (sorted) and the symmetric matrix of how many tracks carry both tags; the diagonal is zero."""
    tag_sets = [set(tags) for tags in annotations.values()]
    tags = sorted(set().union(*tag_sets)) if len(tag_sets) > 0 else []
    index = {tag: i for i, tag in enumerate(tags)}

    counts = np.zeros((len(tags), len(tags)), dtype=np.int64)
    for track_tags in tag_sets:
        ids = [index[tag] for tag in track_tags]
        for i, j in itertools.permutations(ids, 2):
            counts[i, j] += 1
    return tags, counts


def dcg(gains: typing.Sequence[float] | np.ndarray) -> float:
    gains = np.asarray(gains, dtype=np.float64)
    discounts = np.log2(np.arange(2, len(gains) + 2))
    return float(np.sum(gains / discounts))


def ndcg_at_k(predicted_order: typing.Sequence[str], relevance: typing.Mapping[str, float], k: int = 30) -> float:
    """nDCG@k with linear gain rel / log2(rank + 1). The ideal ranking sorts all relevance values descending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not any(value > 0 for value in relevance.values()):
        raise MetricUndefinedError("undefined nDCG: no item has positive relevance")

    gains = [relevance.get(item, 0.0) for item in predicted_order[:k]]
    ideal = sorted(relevance.values(), reverse=True)[:k]
    return dcg(gains) / dcg(ideal)


def roc_auc(scores: typing.Sequence[float] | np.ndarray, labels: typing.Sequence[int] | np.ndarray) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) + P(tie) / 2, computed from midranks."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape:
        raise ValueError(f"scores and labels differ in length: {len(scores)} vs {len(labels)}")

    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricUndefinedError("AUC undefined: labels contain a single class")

    ranks = scipy.stats.rankdata(scores, method="average")
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def recall_at_k(query_track: str, retrieved: typing.Sequence[str],
                annotations: typing.Mapping[str, typing.Iterable[str]], k: int) -> int:
    """1 if any of the top k retrieved tracks shares at least one tag with the query track, else 0."""
    if k < 1:
        raise ValueError("k must be >= 1")

    query_tags = set(annotations.get(query_track, ()))
    if len(query_tags) == 0:
        raise MetricUndefinedError(f"recall undefined: query track {query_track} has no tags")

    candidates = [track for track in retrieved if track != query_track][:k]
    return int(any(query_tags.intersection(annotations.get(track, ())) for track in candidates))
