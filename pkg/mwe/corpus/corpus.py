import json
import logging
import os
import typing

import numpy as np

from mwe.config.defaults import as_dict
from mwe.corpus.config import CorpusConfig, ShuffleMode
from mwe.corpus.documents import MusicDocument, load_music_corpus
from mwe.corpus.paragraphs import assemble_music_paragraph, pair_array
from mwe.corpus.token import TokenKind
from mwe.corpus.tokenizer import LineTokenizer
from mwe.corpus.vocabulary import Vocabulary, build_vocabulary
from utils.utils import missing_file_error

logger = logging.getLogger(__name__)

VOCABULARY_FILE = "vocab.tsv"
GENERAL_SHARD_FILE = "general.shard.txt"
MUSIC_SHARD_FILE = "music.shard.txt"
MUSIC_DOCUMENTS_FILE = "music.jsonl"
MANIFEST_FILE = "manifest.json"


class Corpus:
    """Encoded training corpus: general sentences plus per-track music paragraphs over a frozen vocabulary.

    In static shuffle mode the paragraphs are assembled once, here; in per-epoch mode they are re-assembled from the
    documents at the start of every epoch.
    """

    def __init__(self, vocabulary: Vocabulary, general: list[np.ndarray], documents: list[MusicDocument],
                 config: CorpusConfig, seed: int,
                 static_paragraphs: typing.Optional[list[np.ndarray]] = None) -> None:
        self.vocabulary = vocabulary
        self.general = general
        self.documents = documents
        self.config = config
        self.seed = seed
        self.discard_probabilities = vocabulary.discard_probabilities(config.subsample_threshold)

        if static_paragraphs is None and config.shuffle_mode == ShuffleMode.STATIC:
            static_paragraphs = self.assemble_paragraphs(np.random.default_rng([seed]))
        self.static_paragraphs = static_paragraphs

    def assemble_paragraphs(self, rng: np.random.Generator) -> list[np.ndarray]:
        return [
            np.array(self.vocabulary.ids(assemble_music_paragraph(doc, self.config, rng)), dtype=np.int64)
            for doc in self.documents
        ]

    def paragraphs(self, epoch: int) -> list[np.ndarray]:
        if self.static_paragraphs is not None and self.config.shuffle_mode == ShuffleMode.STATIC:
            return self.static_paragraphs
        return self.assemble_paragraphs(np.random.default_rng([self.seed, epoch]))

    def iter_sequences(self, epoch: int) -> typing.Iterator[np.ndarray]:
        yield from self.general
        yield from self.paragraphs(epoch)

    def pair_array(self, epoch: int, worker: int = 0, workers: int = 1) -> np.ndarray:
        """Training pairs of one epoch for one worker; workers own disjoint, round-robin shards of the sequences."""
        rng = np.random.default_rng([self.seed, epoch, worker, workers])
        chunks = [
            pair_array(sequence, self.config, rng, self.discard_probabilities)
            for i, sequence in enumerate(self.iter_sequences(epoch))
            if i % workers == worker
        ]
        if len(chunks) == 0:
            return np.empty((0, 2), dtype=np.int64)
        return np.concatenate(chunks)

    def token_totals(self, epoch: int = 0) -> dict[str, int]:
        totals = np.zeros(len(TokenKind), dtype=np.int64)
        for sequence in self.iter_sequences(epoch):
            totals += np.bincount(self.vocabulary.kinds[sequence], minlength=len(TokenKind))
        return {kind.label: int(totals[kind]) for kind in TokenKind}

    def manifest(self) -> dict[str, typing.Any]:
        totals = self.token_totals()
        return {
            "config": as_dict(self.config),
            "seed": self.seed,
            "general_documents": len(self.general),
            "music_documents": len(self.documents),
            "vocabulary_size": len(self.vocabulary),
            "vocabulary_per_kind": self.vocabulary.kind_sizes(),
            "token_totals": totals,
            "total_tokens": sum(totals.values()),
        }

    def write(self, directory: str) -> dict[str, typing.Any]:
        os.makedirs(directory, exist_ok=True)
        self.vocabulary.save_tsv(os.path.join(directory, VOCABULARY_FILE))

        write_shard(os.path.join(directory, GENERAL_SHARD_FILE), self.general, self.vocabulary)
        write_shard(os.path.join(directory, MUSIC_SHARD_FILE), self.paragraphs(0), self.vocabulary)

        with open(os.path.join(directory, MUSIC_DOCUMENTS_FILE), "w", encoding="utf-8", newline="\n") as file:
            for doc in self.documents:
                file.write(json.dumps(doc.to_json(), ensure_ascii=False, sort_keys=True) + "\n")

        manifest = self.manifest()
        with open(os.path.join(directory, MANIFEST_FILE), "w", encoding="utf-8", newline="\n") as file:
            json.dump(manifest, file, indent=2, sort_keys=True)
            file.write("\n")

        logger.info("wrote corpus with %i tokens to %s", manifest["total_tokens"], directory)
        return manifest

    @classmethod
    def from_directory(cls, directory: str, config: typing.Optional[CorpusConfig] = None) -> "Corpus":
        """Reload a corpus written by `write`. Without an explicit config, the one recorded in the manifest is used."""
        manifest_path = os.path.join(directory, MANIFEST_FILE)
        if not os.path.isfile(manifest_path):
            raise missing_file_error(manifest_path)

        with open(manifest_path, "r", encoding="utf-8") as file:
            manifest = json.load(file)

        if config is None:
            config = CorpusConfig.from_dict(manifest["config"])

        vocabulary = Vocabulary.load_tsv(os.path.join(directory, VOCABULARY_FILE))
        general = read_shard(os.path.join(directory, GENERAL_SHARD_FILE), vocabulary)

        documents_path = os.path.join(directory, MUSIC_DOCUMENTS_FILE)
        documents = list(load_music_corpus(documents_path))

        static_paragraphs = None
        if config.shuffle_mode == ShuffleMode.STATIC and config == CorpusConfig.from_dict(manifest["config"]):
            static_paragraphs = read_shard(os.path.join(directory, MUSIC_SHARD_FILE), vocabulary)

        return cls(vocabulary, general, documents, config, int(manifest["seed"]), static_paragraphs)


def write_shard(path: str, sequences: typing.Iterable[np.ndarray], vocabulary: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for sequence in sequences:
            file.write(" ".join(vocabulary.lookup(int(token_id)) for token_id in sequence) + "\n")


def read_shard(path: str, vocabulary: Vocabulary) -> list[np.ndarray]:
    # Shard lines are already tokenized; IDs keep their case, so no lowercasing here.
    with open(path, "r", encoding="utf-8") as file:
        return [np.array(vocabulary.ids(line.split()), dtype=np.int64) for line in file if len(line.strip()) > 0]


def build_corpus(general_path: typing.Optional[str], music_path: typing.Optional[str], config: CorpusConfig,
                 seed: int) -> Corpus:
    """Read both corpora, build the vocabulary and encode every document."""
    for path in (general_path, music_path):
        if path is not None and not os.path.isfile(path):
            raise missing_file_error(path)

    general_tokens = list(LineTokenizer(general_path)) if general_path is not None else []
    documents = list(load_music_corpus(music_path)) if music_path is not None else []

    vocabulary = build_vocabulary(general_tokens, documents, config)
    encoded = (np.array(vocabulary.ids(tokens), dtype=np.int64) for tokens in general_tokens)
    general = [sequence for sequence in encoded if len(sequence) > 0]

    return Corpus(vocabulary, general, documents, config, seed)

