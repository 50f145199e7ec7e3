import json
import logging
import os
import typing
from dataclasses import dataclass, field

import numpy as np
import yaml

from mwe.config.defaults import as_dict, get_default
from mwe.corpus.config import CorpusConfig
from mwe.corpus.corpus import Corpus, build_corpus
from mwe.corpus.token import TokenKind, parse_kinds
from mwe.embedding import io
from mwe.embedding.word_embedding import WordEmbedding, rank_by_score
from mwe.eval.config import EvalConfig
from mwe.eval.dataset import EvalDataset, load_eval_dataset
from mwe.eval.report import RankingReport
from mwe.eval.tasks import (ScoreFn, joint_scorer, query_by_tag_eval, query_by_track_eval, tag_rank_prediction,
                            tagging_eval, word_embedding_scorer, zero_shot_eval)
from mwe.features.clips import ClipFeatures, extract_clip_features, load_feature_file, load_wav, save_feature_file
from mwe.features.config import MelConfig
from mwe.joint.checkpoint import load_checkpoint, load_supervision, save_checkpoint
from mwe.joint.config import JointConfig
from mwe.joint.inference import similarity_matrix, track_embeddings
from mwe.joint.trainer import JointModel, JointTrainer
from mwe.sgns.config import SgnsConfig
from mwe.sgns.sampler import NegativeSampler
from mwe.sgns.trainer import SgnsTrainer
from utils.utils import config_error, missing_file_error, path_checksum, unknown_keys_error

logger = logging.getLogger(__name__)

# Child order of the global seed sequence; appending a stage never changes the seeds of the earlier ones.
STAGES = ("corpus", "sgns", "joint", "eval", "features")

PATH_KEYS = ("general_corpus", "music_corpus", "corpus_dir", "embedding", "vocabulary", "features", "supervision",
             "checkpoint", "annotations", "tag_metadata", "audio_dir")

RUN_KEYS = ("seed", "workers", "out")

EMBEDDING_FILE = "embedding.txt"
FEATURES_FILE = "features.jsonl"
CHECKPOINT_FILE = "joint.checkpoint.json"

EVAL_TASKS = ("tag-rank", "query-by-tag", "query-by-track", "tagging", "zero-shot")


@dataclass
class RunConfig:
    corpus: CorpusConfig
    sgns: SgnsConfig
    mel: MelConfig
    joint: JointConfig
    eval: EvalConfig
    paths: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    workers: int = 1
    out: str = "output"
    # Stage sections given explicitly in the config file, as opposed to pure defaults.
    explicit: frozenset[str] = frozenset()

    @property
    def stage_seeds(self) -> dict[str, int]:
        return stage_seeds(self.seed)

    def path(self, key: str) -> str:
        if key not in self.paths:
            raise config_error(f"missing required path '{key}' (set paths.{key} or pass its flag)")
        return self.paths[key]

    def optional_path(self, key: str) -> typing.Optional[str]:
        return self.paths.get(key)

    def to_dict(self) -> dict[str, typing.Any]:
        return {
            "corpus": as_dict(self.corpus),
            "sgns": as_dict(self.sgns),
            "mel": as_dict(self.mel),
            "joint": as_dict(self.joint),
            "eval": as_dict(self.eval),
            "paths": dict(sorted(self.paths.items())),
            "run": {"seed": self.seed, "workers": self.workers, "out": self.out},
        }


def stage_seeds(seed: int) -> dict[str, int]:
    children = np.random.SeedSequence(seed).spawn(len(STAGES))
    return {stage: int(child.generate_state(1)[0]) for stage, child in zip(STAGES, children)}


def read_config_file(path: str) -> dict[str, typing.Any]:
    """Run config file: JSON (read through the YAML loader, so YAML works too)."""
    if not os.path.isfile(path):
        raise missing_file_error(path)

    with open(path, "r", encoding="utf-8") as file:
        try:
            content = yaml.safe_load(file)
        except yaml.YAMLError as e:
            raise config_error(f"{path}: {e}")

    if content is None:
        return {}
    if not isinstance(content, dict):
        raise config_error(f"{path}: expected a mapping at the top level")
    return content


def load_run_config(path: typing.Optional[str] = None, seed: typing.Optional[int] = None,
                    workers: typing.Optional[int] = None, out: typing.Optional[str] = None,
                    paths: typing.Optional[dict[str, typing.Optional[str]]] = None) -> RunConfig:
    """Layer command-line flags over the config file over defaults.yaml, then validate every section and path."""
    content = read_config_file(path) if path is not None else {}

    unknown = set(content) - {"corpus", "sgns", "mel", "joint", "eval", "run", "paths"}
    if len(unknown) > 0:
        raise unknown_keys_error("run config", unknown)

    run = dict(content.get("run") or {})
    unknown = set(run) - set(RUN_KEYS)
    if len(unknown) > 0:
        raise unknown_keys_error("run", unknown)

    run_seed = int(seed if seed is not None else run.get("seed", get_default("run.seed")))
    run_workers = int(workers if workers is not None else run.get("workers", get_default("run.workers")))
    run_out = str(out if out is not None else run.get("out", get_default("run.out")))
    seeds = stage_seeds(run_seed)

    sgns = dict(content.get("sgns") or {})
    joint = dict(content.get("joint") or {})
    if seed is not None or "seed" not in sgns:
        sgns["seed"] = seeds["sgns"]
    if seed is not None or "seed" not in joint:
        joint["seed"] = seeds["joint"]
    if workers is not None or "workers" not in sgns:
        sgns["workers"] = run_workers

    config_paths = {str(key): str(value) for key, value in (content.get("paths") or {}).items()}
    config_paths.update({key: value for key, value in (paths or {}).items() if value is not None})
    unknown = set(config_paths) - set(PATH_KEYS)
    if len(unknown) > 0:
        raise unknown_keys_error("paths", unknown)
    for value in config_paths.values():
        if not os.path.exists(value):
            raise missing_file_error(value)

    return RunConfig(
        corpus=CorpusConfig.from_dict(content.get("corpus")),
        sgns=SgnsConfig.from_dict(sgns),
        mel=MelConfig.from_dict(content.get("mel")),
        joint=JointConfig.from_dict(joint),
        eval=EvalConfig.from_dict(content.get("eval")),
        paths=config_paths,
        seed=run_seed,
        workers=run_workers,
        out=run_out,
        explicit=frozenset(section for section in ("corpus", "sgns", "mel", "joint", "eval") if section in content),
    )


def write_manifest(config: RunConfig, command: str, outputs: dict[str, str],
                   extra: typing.Optional[dict[str, typing.Any]] = None) -> str:
    """Run manifest: config echo, seeds, input checksums and output paths. No timestamps, so reruns compare equal."""
    manifest = {
        "command": command,
        "config": config.to_dict(),
        "seed": config.seed,
        "stage_seeds": config.stage_seeds,
        "inputs": {key: path_checksum(path) for key, path in sorted(config.paths.items())},
        "outputs": outputs,
        **(extra or {}),
    }

    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, f"{command}.manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(manifest, file, indent=2, sort_keys=True)
        file.write("\n")
    return path


def cmd_build_corpus(config: RunConfig) -> dict[str, typing.Any]:
    general_path = config.optional_path("general_corpus")
    music_path = config.optional_path("music_corpus")
    if general_path is None and music_path is None:
        raise config_error("build-corpus needs paths.general_corpus or paths.music_corpus")

    corpus = build_corpus(general_path, music_path, config.corpus, config.stage_seeds["corpus"])
    corpus_manifest = corpus.write(config.out)

    print(f"vocabulary: {corpus_manifest['vocabulary_size']} tokens")
    for kind, total in corpus_manifest["token_totals"].items():
        print(f"  {kind}: {total}")

    write_manifest(config, "build-corpus", {"corpus_dir": config.out}, {"corpus": corpus_manifest})
    return corpus_manifest


def cmd_train_word(config: RunConfig) -> WordEmbedding:
    corpus_config = config.corpus if "corpus" in config.explicit else None
    corpus = Corpus.from_directory(config.path("corpus_dir"), corpus_config)

    sampler = NegativeSampler.from_vocabulary(corpus.vocabulary, config.sgns.ns_exponent)
    trainer = SgnsTrainer(sampler, config.sgns)
    model = trainer.train(corpus.pair_array)
    for epoch, loss in enumerate(trainer.epoch_losses):
        print(f"epoch {epoch}: loss {loss:.6f}")

    emb = WordEmbedding(corpus.vocabulary, model.input_vectors)
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, EMBEDDING_FILE)
    io.save(emb, path)

    write_manifest(config, "train-word", {"embedding": path, "vocabulary": io.sidecar_path(path)}, {
        "epoch_losses": trainer.epoch_losses,
        "planned_pairs": trainer.planned_pairs,
        "embedding_checksum": emb.checksum(),
    })
    return emb


def cmd_extract_features(config: RunConfig) -> list[ClipFeatures]:
    """Every <track_id>.wav in paths.audio_dir becomes excerpts_per_track clip feature vectors."""
    directory = config.path("audio_dir")
    names = sorted(name for name in os.listdir(directory) if name.lower().endswith(".wav"))
    if len(names) == 0:
        raise config_error(f"no .wav files in {directory}")

    clips = []
    for i, name in enumerate(names):
        track_id = os.path.splitext(name)[0]
        pcm = load_wav(os.path.join(directory, name), config.mel)
        rng = np.random.default_rng([config.stage_seeds["features"], i])
        clips.extend(extract_clip_features(pcm, config.mel, rng, track_id))

    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, FEATURES_FILE)
    save_feature_file(path, clips)
    print(f"{len(clips)} clips from {len(names)} tracks")

    write_manifest(config, "extract-features", {"features": path}, {"clips": len(clips), "tracks": len(names)})
    return clips


def load_embedding(config: RunConfig) -> WordEmbedding:
    return io.load(config.path("embedding"), config.optional_path("vocabulary"))


def cmd_train_joint(config: RunConfig) -> JointModel:
    emb = load_embedding(config)
    clips = load_feature_file(config.path("features"))
    records = load_supervision(config.path("supervision"), clips)

    trainer = JointTrainer(emb, config.joint)
    model = trainer.train(records)
    for epoch, loss in enumerate(trainer.epoch_losses):
        print(f"epoch {epoch}: loss {loss:.6f}")

    supervision = [s.label for s in config.joint.active_supervisions]
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, CHECKPOINT_FILE)
    save_checkpoint(path, model, {"supervision": supervision})

    write_manifest(config, "train-joint", {"checkpoint": path}, {
        "supervision": supervision,
        "epoch_losses": trainer.epoch_losses,
        "final_loss": trainer.epoch_losses[-1],
    })
    return model


def joint_score_source(config: RunConfig, emb: WordEmbedding,
                       tags: typing.Sequence[str]) -> tuple[ScoreFn, set[str]]:
    """Scorer over the tags and tracks the chosen model can score, and the names it covers."""
    tags = [tag for tag in tags if tag in emb]
    if config.optional_path("checkpoint") is None:
        tracks = list(emb.vocabulary.tokens_of_kind(TokenKind.TRACK_ID))
        return word_embedding_scorer(emb, tags, tracks), {*tags, *tracks}

    model = load_checkpoint(config.path("checkpoint"), emb)
    clips = load_feature_file(config.path("features"))
    tracks = sorted({clip.track_id for clip in clips})
    return joint_scorer(model.audio, model.semantic, clips, tags), {*tags, *tracks}


def eval_track_vectors(config: RunConfig, emb: WordEmbedding) -> dict[str, np.ndarray]:
    if config.optional_path("checkpoint") is None:
        return {track: emb[track] for track in emb.vocabulary.tokens_of_kind(TokenKind.TRACK_ID)}

    model = load_checkpoint(config.path("checkpoint"), emb)
    return track_embeddings(model.audio, load_feature_file(config.path("features")))


def run_eval_task(task: str, config: RunConfig, emb: WordEmbedding, dataset: EvalDataset) -> RankingReport:
    if task == "tag-rank":
        return tag_rank_prediction(emb, dataset.annotations, dataset.tag_categories, config.eval.ndcg_k)

    if task == "query-by-track":
        return query_by_track_eval(eval_track_vectors(config, emb), dataset.annotations, config.eval.recall_ks)

    score_fn, covered = joint_score_source(config, emb, sorted({*dataset.tags, *dataset.tag_split}))
    tags = [tag for tag in dataset.tags if tag in covered]
    tracks = [track for track in dataset.tracks if track in covered]
    dropped = len(dataset.tracks) - len(tracks)
    if dropped > 0:
        logger.warning("%i annotated tracks cannot be scored and are left out", dropped)

    if task == "query-by-tag":
        return query_by_tag_eval(score_fn, dataset.annotations, tags, tracks)
    if task == "tagging":
        return tagging_eval(score_fn, dataset.annotations, tags, tracks)
    return zero_shot_eval(score_fn, dataset, lambda name: name in covered)


def cmd_eval(config: RunConfig, task: str) -> RankingReport:
    if task not in EVAL_TASKS:
        raise config_error(f"unknown eval task '{task}'")

    dataset = load_eval_dataset(config.path("annotations"), config.optional_path("tag_metadata"))
    emb = load_embedding(config)
    report = run_eval_task(task, config, emb, dataset)
    print(report)

    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, f"eval-{task}.json")
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(report.to_json(config.to_dict()))

    write_manifest(config, f"eval-{task}", {"report": path}, {"aggregate": report.aggregate})
    return report


def query_tokens(words: typing.Sequence[str], emb: WordEmbedding) -> list[str]:
    """Exact token when in vocabulary (track and artist IDs keep their case), lowercased otherwise."""
    return [word if word in emb else word.lower() for word in words]


def cmd_query(config: RunConfig, words: typing.Sequence[str], k: int,
              kinds: typing.Optional[typing.Sequence[str]] = None) -> list[tuple[str, str, float]]:
    """Rank tokens (or, with a checkpoint, tracks by audio embedding) against the mean vector of the query words."""
    if k < 1:
        raise config_error("k must be >= 1")
    try:
        kind_filter = parse_kinds(kinds) if kinds else None
    except ValueError as e:
        raise config_error(str(e))

    emb = load_embedding(config)
    query, _ = emb.query_vector(query_tokens(words, emb))

    results: list[tuple[str, str, float]]
    if config.optional_path("checkpoint") is None:
        results = [(token, emb.vocabulary.kind(token).label, score)
                   for token, score in emb.nearest(query, k, kind_filter)]
    else:
        model = load_checkpoint(config.path("checkpoint"), emb)
        tracks = track_embeddings(model.audio, load_feature_file(config.path("features")))
        names = list(tracks)
        projected = model.semantic.forward(query[np.newaxis, :].astype(model.semantic.a.dtype))
        scores = similarity_matrix(projected, np.stack(list(tracks.values())))[0]
        top = rank_by_score(scores, np.arange(len(names)), k)
        results = [(names[i], TokenKind.TRACK_ID.label, float(scores[i])) for i in top]

    for token, kind, score in results:
        print(f"{token}\t{kind}\t{score:.6f}")

    write_manifest(config, "query", {}, {
        "query": list(words), "k": k, "results": [list(result) for result in results],
    })
    return results
