import numpy as np
import pytest

from ..testing_utils import embedding, random_embedding
from mwe.corpus.documents import TagCategory
from mwe.eval.dataset import EvalDataset, TagSplit, TrackSplit
from mwe.eval.metrics import ndcg_at_k
from mwe.eval.tasks import (DIRECTIONS, MatrixScorer, word_embedding_scorer, tag_rank_prediction, query_by_tag_eval,
                            tagging_eval, query_by_track_eval, zero_shot_protocol, zero_shot_eval)
from utils.utils import MetricUndefinedError, DataFormatError

CATEGORIES = {
    "a_ctn1": TagCategory.CONTENT, "a_ctn2": TagCategory.CONTENT, "a_ctx1": TagCategory.CONTEXT,
    "a_ctx2": TagCategory.CONTEXT, "b_ctn1": TagCategory.CONTENT, "b_ctn2": TagCategory.CONTENT,
    "b_ctx1": TagCategory.CONTEXT, "b_ctx2": TagCategory.CONTEXT,
}


def genre_annotations():
    """Every track of a genre carries all four of its tags."""
    return {
        f"{genre}{t}": {tag for tag in CATEGORIES if tag.startswith(genre)}
        for genre in ("a", "b") for t in range(3)
    }


def test_tag_rank_prediction_perfect_alignment():
    rng = np.random.default_rng(0)
    axes = {"a": np.eye(4)[0], "b": np.eye(4)[1]}
    emb = embedding({tag: axes[tag[0]] + 0.01 * rng.normal(size=4) for tag in CATEGORIES})

    report = tag_rank_prediction(emb, genre_annotations(), CATEGORIES)

    assert report.aggregate == pytest.approx(1.0)
    assert list(report.breakdown) == [name for name, _, _ in DIRECTIONS]
    assert all(direction.query_count == 4 for direction in report.breakdown.values())


def test_tag_rank_prediction_matches_ndcg_per_query():
    rng = np.random.default_rng(1)
    emb = random_embedding(list(CATEGORIES), 6, rng)
    annotations = {f"t{i}": {str(tag) for tag in rng.choice(list(CATEGORIES), size=3, replace=False)} for i in range(20)}
    report = tag_rank_prediction(emb, annotations, CATEGORIES, k=3)

    tags = sorted(CATEGORIES)
    for name, source, destination in DIRECTIONS:
        direction = report.breakdown[name]
        for query, score in direction.scores.items():
            targets = [tag for tag in tags if CATEGORIES[tag] == destination and tag != query]
            relevance = {tag: float(sum(1 for t in annotations.values() if query in t and tag in t))
                         for tag in targets}
            predicted = sorted(targets, key=lambda tag: -emb.similarity(query, tag))
            assert score == pytest.approx(ndcg_at_k(predicted, relevance, 3))
            assert CATEGORIES[query] == source


def test_tag_rank_prediction_excludes_isolated_queries():
    categories = dict(CATEGORIES, lonely=TagCategory.CONTENT)
    annotations = dict(genre_annotations(), solo={"lonely"})
    emb = random_embedding(list(categories), 4, np.random.default_rng(2))

    report = tag_rank_prediction(emb, annotations, categories)
    assert report.breakdown["Ctn->Ctn"].excluded == {"lonely": "no co-occurring destination tags"}


def test_tag_rank_prediction_needs_two_tags_per_category():
    categories = {"rock": TagCategory.CONTENT, "pop": TagCategory.CONTENT, "party": TagCategory.CONTEXT}
    emb = random_embedding(list(categories), 4, np.random.default_rng(3))

    with pytest.raises(MetricUndefinedError) as e:
        tag_rank_prediction(emb, {"t": set(categories)}, categories)
    assert str(e.value) == "tag rank prediction needs at least 2 context tags, found 1"


def test_query_by_tag_and_tagging_with_indicator_scores():
    annotations = genre_annotations()
    tags = sorted(CATEGORIES)

    def indicator(tag, track):
        return float(tag in annotations[track])

    assert query_by_tag_eval(indicator, annotations, tags).aggregate == 1.0
    assert tagging_eval(indicator, annotations, tags).aggregate == 1.0

    constant = query_by_tag_eval(lambda tag, track: 0.3, annotations, tags)
    assert constant.aggregate == 0.5
    assert constant.query_count == len(tags)


def test_single_class_queries_are_excluded():
    annotations = {"t1": {"rock"}, "t2": {"rock"}}
    report = query_by_tag_eval(lambda tag, track: 0.0, annotations, ["rock"])

    assert report.aggregate is None
    assert report.excluded == {"rock": "AUC undefined: labels contain a single class"}


def test_word_embedding_scorer():
    emb = embedding({"rock": [1.0, 0.0], "TR1": [1.0, 0.0], "TR2": [0.0, 1.0]})
    score = word_embedding_scorer(emb, ["rock"], ["TR1", "TR2"])

    assert score("rock", "TR1") == pytest.approx(1.0)
    assert score("rock", "TR2") == pytest.approx(0.0)
    with pytest.raises(ValueError):
        MatrixScorer({}, {"TR1": np.ones(2)})


def test_query_by_track():
    rng = np.random.default_rng(4)
    annotations = dict(genre_annotations(), untagged=set())
    axes = {"a": 0, "b": 1, "u": 2}
    vectors = {track: np.eye(3)[axes[track[0]]] + 0.01 * rng.normal(size=3) for track in annotations}

    report = query_by_track_eval(vectors, annotations, ks=(5, 1))

    assert report.aggregate is None
    assert list(report.breakdown) == ["R@1", "R@5"]
    assert report.breakdown["R@1"].aggregate == 1.0
    assert report.breakdown["R@1"].excluded == {"untagged": "query track has no tags"}


def test_query_by_track_recall_is_monotone_in_k():
    rng = np.random.default_rng(5)
    annotations = {f"t{i}": {f"tag{int(j)}" for j in rng.integers(0, 6, size=2)} for i in range(30)}
    vectors = {track: rng.normal(size=4) for track in annotations}
    report = query_by_track_eval(vectors, annotations, ks=(1, 5, 10))

    for track in annotations:
        recalls = [report.breakdown[f"R@{k}"].scores[track] for k in (1, 5, 10)]
        assert recalls == sorted(recalls)


def test_query_by_track_needs_two_tracks():
    with pytest.raises(MetricUndefinedError):
        query_by_track_eval({"t1": np.ones(2)}, {"t1": {"rock"}})


def zero_shot_dataset(unseen=226):
    tags = [f"tag{i:04d}" for i in range(1126)]
    tag_split = {tag: TagSplit.UNSEEN if i < unseen else TagSplit.SEEN for i, tag in enumerate(tags)}
    annotations = {f"TR{t}": {tags[t], tags[t + 500]} for t in range(10)}
    track_split = {track: TrackSplit.TEST if i % 2 else TrackSplit.TRAIN for i, track in enumerate(sorted(annotations))}
    return EvalDataset(annotations, tag_split=tag_split, track_split=track_split)


def test_zero_shot_protocol():
    retrieval, tagging = zero_shot_protocol(zero_shot_dataset())

    assert len(retrieval.tags) == 226
    assert len(retrieval.tracks) == 10
    assert len(tagging.tags) == 1126
    assert len(tagging.tracks) == 5


def test_zero_shot_protocol_without_unseen_tags():
    with pytest.raises(DataFormatError) as e:
        zero_shot_protocol(zero_shot_dataset(unseen=0))
    assert str(e.value) == "zero-shot split has no unseen tags"

    with pytest.raises(DataFormatError):
        zero_shot_protocol(EvalDataset({"TR1": {"rock"}}))


def test_zero_shot_eval():
    dataset = zero_shot_dataset()

    def indicator(tag, track):
        return float(tag in dataset.annotations[track])

    report = zero_shot_eval(indicator, dataset)

    # Only unseen tags carried by some track have both label classes.
    assert report.breakdown["retrieval"].query_count == 10
    assert report.breakdown["retrieval"].aggregate == 1.0
    assert report.breakdown["tagging"].query_count == 5
    assert report.breakdown["tagging"].aggregate == 1.0

    partial = zero_shot_eval(indicator, dataset, available=lambda name: name != "tag0000")
    assert partial.breakdown["retrieval"].query_count == 9
