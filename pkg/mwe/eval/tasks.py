import logging
import typing

import numpy as np

from mwe.corpus.documents import TagCategory
from mwe.embedding.word_embedding import WordEmbedding, rank_by_score
from mwe.eval.dataset import EvalDataset, TagSplit, TrackSplit
from mwe.eval.metrics import tag_cooccurrence, ndcg_at_k, roc_auc, recall_at_k
from mwe.eval.report import RankingReport
from mwe.features.clips import ClipFeatures
from mwe.joint.encoders import AudioEncoder, SemanticEncoder
from mwe.joint.inference import similarity_matrix, track_embeddings
from utils.utils import MetricUndefinedError, DataFormatError

logger = logging.getLogger(__name__)

ScoreFn = typing.Callable[[str, str], float]
Annotations = typing.Mapping[str, typing.AbstractSet[str]]

DIRECTIONS = (
    ("Ctn->Ctn", TagCategory.CONTENT, TagCategory.CONTENT),
    ("Ctn->Ctx", TagCategory.CONTENT, TagCategory.CONTEXT),
    ("Ctx->Ctn", TagCategory.CONTEXT, TagCategory.CONTENT),
    ("Ctx->Ctx", TagCategory.CONTEXT, TagCategory.CONTEXT),
)


class MatrixScorer:
    """Score function backed by a precomputed tag x track cosine matrix."""

    def __init__(self, tag_vectors: typing.Mapping[str, np.ndarray],
                 track_vectors: typing.Mapping[str, np.ndarray]) -> None:
        self.tag_index = {tag: i for i, tag in enumerate(tag_vectors)}
        self.track_index = {track: i for i, track in enumerate(track_vectors)}
        if len(self.tag_index) == 0 or len(self.track_index) == 0:
            raise ValueError("scorer needs at least one tag and one track vector")
        self.matrix = similarity_matrix(
            np.stack([np.asarray(vector, dtype=np.float64) for vector in tag_vectors.values()]),
            np.stack([np.asarray(vector, dtype=np.float64) for vector in track_vectors.values()]),
        )

    def __call__(self, tag: str, track: str) -> float:
        return float(self.matrix[self.tag_index[tag], self.track_index[track]])


def word_embedding_scorer(emb: WordEmbedding, tags: typing.Iterable[str],
                          tracks: typing.Iterable[str]) -> MatrixScorer:
    """Tag word vector against track-ID word vector."""
    return MatrixScorer({tag: emb[tag] for tag in tags}, {track: emb[track] for track in tracks})


def joint_scorer(audio: AudioEncoder, semantic: SemanticEncoder, clips: typing.Iterable[ClipFeatures],
                 tags: typing.Sequence[str]) -> MatrixScorer:
    """Tag prototype against the track-level audio embedding (mean over the track's clips)."""
    prototypes = semantic.encode(tags)
    return MatrixScorer(dict(zip(tags, prototypes)), track_embeddings(audio, clips))


def tag_rank_prediction(emb: WordEmbedding, annotations: Annotations, categories: typing.Mapping[str, TagCategory],
                        k: int = 30) -> RankingReport:
    """nDCG@k of embedding-ranked destination tags against co-occurrence counts, for all four category directions.

    The aggregate is the mean of the directional scores.
    """
    tags, counts = tag_cooccurrence(annotations)
    index = {tag: i for i, tag in enumerate(tags)}
    available = [tag for tag in tags if tag in emb and tag in categories]

    by_category = {category: [tag for tag in available if categories[tag] == category] for category in TagCategory}
    for category, category_tags in by_category.items():
        if len(category_tags) < 2:
            raise MetricUndefinedError(
                f"tag rank prediction needs at least 2 {category.value} tags, found {len(category_tags)}"
            )

    directions = {}
    for name, source, destination in DIRECTIONS:
        scores = {}
        excluded = {}
        for query in by_category[source]:
            targets = [tag for tag in by_category[destination] if tag != query]
            relevance = {tag: float(counts[index[query], index[tag]]) for tag in targets}
            if not any(value > 0 for value in relevance.values()):
                excluded[query] = "no co-occurring destination tags"
                continue

            ids = np.array([emb.vocabulary.id(tag) for tag in targets], dtype=np.int64)
            similarities = emb.similarities(emb[query].astype(np.float64), ids)
            predicted = [targets[i] for i in rank_by_score(similarities, ids, len(targets))]
            scores[query] = ndcg_at_k(predicted, relevance, k)

        if len(excluded) > 0:
            logger.info("%s: skipped %i of %i query tags without co-occurrences",
                        name, len(excluded), len(by_category[source]))
        directions[name] = RankingReport(f"ndcg@{k}", scores, excluded)

    defined = [report.aggregate for report in directions.values() if report.aggregate is not None]
    if len(defined) == 0:
        raise MetricUndefinedError("undefined nDCG: no query tag has co-occurring tags")
    if len(defined) < len(directions):
        logger.warning("averaging over %i of %i directions", len(defined), len(directions))

    return RankingReport(f"ndcg@{k}", breakdown=directions, aggregate=float(np.mean(defined)))


def _roc_auc_report(metric: str, queries: typing.Sequence[str], items: typing.Sequence[str],
                    labels_of: typing.Callable[[str, str], bool], score_of: typing.Callable[[str, str], float],
                    kind: str) -> RankingReport:
    scores = {}
    excluded = {}
    for query in queries:
        labels = np.array([labels_of(query, item) for item in items], dtype=bool)
        predictions = np.array([score_of(query, item) for item in items], dtype=np.float64)
        try:
            scores[query] = roc_auc(predictions, labels)
        except MetricUndefinedError as e:
            excluded[query] = str(e)

    if len(excluded) > 0:
        logger.info("%s: excluded %i of %i %s with single-class labels", metric, len(excluded), len(queries), kind)
    return RankingReport(metric, scores, excluded)


def query_by_tag_eval(score_fn: ScoreFn, annotations: Annotations, tags: typing.Iterable[str],
                      tracks: typing.Optional[typing.Iterable[str]] = None) -> RankingReport:
    """Per-tag ROC-AUC of ranking all tracks by score_fn(tag, track); tags with one label class are excluded."""
    track_list = sorted(annotations) if tracks is None else list(tracks)
    return _roc_auc_report(
        "roc_auc_tag", list(tags), track_list,
        lambda tag, track: tag in annotations.get(track, ()),
        score_fn, "tags",
    )


def tagging_eval(score_fn: ScoreFn, annotations: Annotations, tags: typing.Iterable[str],
                 tracks: typing.Optional[typing.Iterable[str]] = None) -> RankingReport:
    """Per-track ROC-AUC of ranking the tag set by score_fn(tag, track)."""
    track_list = sorted(annotations) if tracks is None else list(tracks)
    return _roc_auc_report(
        "roc_auc_clip", track_list, list(tags),
        lambda track, tag: tag in annotations.get(track, ()),
        lambda track, tag: score_fn(tag, track), "tracks",
    )


def query_by_track_eval(track_vectors: typing.Mapping[str, np.ndarray], annotations: Annotations,
                        ks: typing.Sequence[int] = (1, 5, 10)) -> RankingReport:
    """recall@K of cosine retrieval among tracks, the query excluded; one sub-report per K."""
    tracks = sorted(track for track in track_vectors if track in annotations)
    if len(tracks) < 2:
        raise MetricUndefinedError("query by track needs at least 2 annotated tracks")
    ks = sorted(set(ks))

    matrix = np.stack([np.asarray(track_vectors[track], dtype=np.float64) for track in tracks])
    similarities = similarity_matrix(matrix, matrix)
    positions = np.arange(len(tracks))

    scores: dict[int, dict[str, float]] = {k: {} for k in ks}
    excluded = {}
    for i, query in enumerate(tracks):
        if len(annotations[query]) == 0:
            excluded[query] = "query track has no tags"
            continue

        others = np.delete(positions, i)
        top = rank_by_score(similarities[i, others], others, max(ks))
        retrieved = [tracks[j] for j in others[top]]
        for k in ks:
            scores[k][query] = float(recall_at_k(query, retrieved, annotations, k))

    if len(excluded) > 0:
        logger.info("query by track: excluded %i of %i untagged query tracks", len(excluded), len(tracks))

    return RankingReport("recall", breakdown={
        f"R@{k}": RankingReport(f"recall@{k}", scores[k], dict(excluded)) for k in ks
    })


class TaskSpec(typing.NamedTuple):
    tracks: list[str]
    tags: list[str]


def zero_shot_protocol(dataset: EvalDataset) -> tuple[TaskSpec, TaskSpec]:
    """Retrieval over all tracks with unseen tags only; tagging over test tracks with seen and unseen tags."""
    if len(dataset.tag_split) == 0:
        raise DataFormatError("zero-shot protocol needs a seen/unseen tag split")

    unseen = dataset.tags_of_split(TagSplit.UNSEEN)
    if len(unseen) == 0:
        raise DataFormatError("zero-shot split has no unseen tags")

    retrieval = TaskSpec(dataset.tracks, unseen)
    tagging = TaskSpec(dataset.tracks_of_split(TrackSplit.TEST), sorted(dataset.tag_split))
    return retrieval, tagging


def zero_shot_eval(score_fn: ScoreFn, dataset: EvalDataset,
                   available: typing.Optional[typing.Callable[[str], bool]] = None) -> RankingReport:
    """Both halves of the zero-shot protocol. `available` drops tags and tracks the scorer cannot score."""
    retrieval, tagging = zero_shot_protocol(dataset)
    keep = available or (lambda name: True)
    return RankingReport("zero_shot", breakdown={
        "retrieval": query_by_tag_eval(score_fn, dataset.annotations, [t for t in retrieval.tags if keep(t)],
                                       [t for t in retrieval.tracks if keep(t)]),
        "tagging": tagging_eval(score_fn, dataset.annotations, [t for t in tagging.tags if keep(t)],
                                [t for t in tagging.tracks if keep(t)]),
    })
