import collections
import logging
import typing

import numpy as np

from mwe.corpus.config import CorpusConfig
from mwe.corpus.documents import MusicDocument
from mwe.corpus.token import TokenKind, VocabEntry, PROTECTED_KINDS
from utils.utils import VocabularyError, duplicate_token_error, oov_error, parse_error

logger = logging.getLogger(__name__)

TSV_HEADER = "token\tkind\tcount"


class Vocabulary:
    """Token <-> id map with the kind and corpus count of every retained token.

    Ids are dense in [0, len(vocabulary)). The vocabulary is not modified after construction.
    """

    def __init__(self, entries: typing.Iterable[VocabEntry]) -> None:
        self.entries: list[VocabEntry] = []
        self.index: dict[str, int] = {}

        for entry in entries:
            if entry.token in self.index:
                raise duplicate_token_error(entry.token)
            if entry.count < 0:
                raise VocabularyError(f"negative count for token '{entry.token}'")
            self.index[entry.token] = len(self.entries)
            self.entries.append(VocabEntry(entry.token, TokenKind(entry.kind), int(entry.count)))

        self.counts = np.array([entry.count for entry in self.entries], dtype=np.int64)
        self.kinds = np.array([int(entry.kind) for entry in self.entries], dtype=np.int8)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: object) -> bool:
        return token in self.index

    def __iter__(self) -> typing.Iterator[VocabEntry]:
        return iter(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return False
        return self.entries == other.entries

    def id(self, token: str) -> int:
        token_id = self.index.get(token, None)
        if token_id is None:
            raise oov_error([token])
        return token_id

    def ids(self, tokens: typing.Iterable[str]) -> list[int]:
        """Ids of in-vocabulary tokens; out-of-vocabulary tokens are dropped."""
        return [self.index[token] for token in tokens if token in self.index]

    def lookup(self, token_id: int) -> str:
        return self.entries[token_id].token

    def kind(self, token: str | int) -> TokenKind:
        token_id = self.id(token) if isinstance(token, str) else token
        return self.entries[token_id].kind

    def ids_of_kinds(self, kinds: typing.Optional[typing.Iterable[TokenKind]]) -> np.ndarray:
        if kinds is None:
            return np.arange(len(self), dtype=np.int64)
        return np.flatnonzero(np.isin(self.kinds, [int(kind) for kind in kinds])).astype(np.int64)

    def tokens_of_kind(self, kind: TokenKind) -> list[str]:
        return [entry.token for entry in self.entries if entry.kind == kind]

    def kind_sizes(self) -> dict[str, int]:
        return {kind.label: int(np.sum(self.kinds == int(kind))) for kind in TokenKind}

    def discard_probabilities(self, threshold: float) -> np.ndarray:
        """Per-token probability of being dropped by frequent-word subsampling.

        A word-kind token with corpus frequency f > threshold is discarded with probability 1 - sqrt(threshold / f).
        Tags and IDs are never discarded. A threshold of 0 disables subsampling.
        """
        probabilities = np.zeros(len(self), dtype=np.float64)
        total = self.counts.sum()
        if threshold <= 0 or total == 0:
            return probabilities

        frequencies = self.counts / total
        is_word = self.kinds <= int(TokenKind.REVIEW_WORD)
        subsampled = is_word & (frequencies > threshold)
        probabilities[subsampled] = 1.0 - np.sqrt(threshold / frequencies[subsampled])
        return probabilities

    def save_tsv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write(TSV_HEADER + "\n")
            for entry in self.entries:
                file.write(f"{entry.token}\t{entry.kind.label}\t{entry.count}\n")

    @classmethod
    def load_tsv(cls, path: str) -> "Vocabulary":
        entries = []
        seen: set[str] = set()
        with open(path, "r", encoding="utf-8") as file:
            for line_num, line in enumerate(file, start=1):
                line = line.rstrip("\n")
                if line_num == 1 and line == TSV_HEADER:
                    continue
                if len(line) == 0:
                    continue

                columns = line.split("\t")
                if len(columns) != 3:
                    raise parse_error(path, line_num, f"expected 3 columns, got {len(columns)}")

                token, kind, count = columns
                if token in seen:
                    raise duplicate_token_error(token, path, line_num)
                seen.add(token)

                try:
                    entries.append(VocabEntry(token, TokenKind.from_label(kind), int(count)))
                except ValueError as e:
                    raise parse_error(path, line_num, str(e))

        return cls(entries)


def build_vocabulary(general_docs: typing.Iterable[list[str]], music_docs: typing.Iterable[MusicDocument],
                     config: CorpusConfig) -> Vocabulary:
    """Count tokens over both corpora and keep the ones that survive the frequency cut-off.

    Tags, artist IDs and track IDs are kept whatever their count. When one string occurs as several kinds, the most
    musically specific kind wins (e.g. a word seen in both general and review text is a review word).
    """
    counts: collections.Counter[str] = collections.Counter()
    kinds: dict[str, TokenKind] = {}
    track_ids: set[str] = set()

    def add(token: str, kind: TokenKind) -> None:
        counts[token] += 1
        if kinds.get(token, TokenKind.GENERAL_WORD) <= kind:
            kinds[token] = kind

    num_general = 0
    for tokens in general_docs:
        num_general += 1
        for token in tokens:
            add(token, TokenKind.GENERAL_WORD)

    num_music = 0
    for doc in music_docs:
        num_music += 1
        if doc.track_id in track_ids:
            raise VocabularyError(f"duplicate track_id in music corpus: {doc.track_id}")
        track_ids.add(doc.track_id)

        if config.uses("review"):
            for sentence in doc.review_sentences:
                for token in sentence:
                    add(token, TokenKind.REVIEW_WORD)
        if config.uses("tag"):
            for name in doc.tag_names:
                add(name, TokenKind.TAG)
        if config.uses("artist"):
            add(doc.artist_id, TokenKind.ARTIST_ID)
        if config.uses("track"):
            add(doc.track_id, TokenKind.TRACK_ID)

    retained = [
        VocabEntry(token, kinds[token], count)
        for token, count in counts.items()
        if kinds[token] in PROTECTED_KINDS or count >= config.min_count
    ]
    # Group by specificity, most frequent first within a kind; the token string makes the order total.
    retained.sort(key=lambda entry: (entry.kind, -entry.count, entry.token))

    vocabulary = Vocabulary(retained)
    logger.info(
        "built vocabulary of %i tokens from %i general and %i music documents (%i candidates below min_count=%i dropped)",
        len(vocabulary), num_general, num_music, len(counts) - len(vocabulary), config.min_count
    )
    logger.info("vocabulary sizes per kind: %s", vocabulary.kind_sizes())
    return vocabulary
