import logging
import os
import typing

import numpy as np

from mwe.corpus.vocabulary import Vocabulary
from mwe.embedding.word_embedding import WordEmbedding
from utils.utils import parse_error, duplicate_token_error, missing_file_error, VocabularyError

logger = logging.getLogger(__name__)

VOCABULARY_SUFFIX = ".vocab.tsv"
FLOAT_FORMAT = "%.8g"


def sidecar_path(path: str) -> str:
    return path + VOCABULARY_SUFFIX


def save(emb: WordEmbedding, path: str, vocabulary_path: typing.Optional[str] = None) -> None:
    """Write the word2vec text format ("<vocab size> <dim>" header, then "token v1 ... vd" per row) plus the
    vocabulary TSV sidecar. Rows are written in id order.
    """
    rows, dim = emb.vectors.shape
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(f"{rows} {dim}\n")
        for entry, vector in zip(emb.vocabulary, emb.vectors):
            file.write(entry.token + " " + " ".join(FLOAT_FORMAT % value for value in vector) + "\n")

    emb.vocabulary.save_tsv(vocabulary_path or sidecar_path(path))
    logger.info("saved %i x %i embedding to %s", rows, dim, path)


def load(path: str, vocabulary_path: typing.Optional[str] = None) -> WordEmbedding:
    if not os.path.isfile(path):
        raise missing_file_error(path)

    vocabulary_path = vocabulary_path or sidecar_path(path)

    with open(path, "r", encoding="utf-8") as file:
        header = file.readline().split()
        if len(header) != 2:
            raise parse_error(path, 1, "expected header '<vocab size> <dim>'")
        try:
            rows, dim = int(header[0]), int(header[1])
        except ValueError:
            raise parse_error(path, 1, f"invalid header {' '.join(header)!r}")

        tokens: list[str] = []
        seen: set[str] = set()
        vectors = np.zeros((rows, dim), dtype=np.float64)

        for line_num, line in enumerate(file, start=2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) == 1 and len(parts[0]) == 0:
                continue
            if len(tokens) == rows:
                raise parse_error(path, line_num, f"more rows than the {rows} declared in the header")

            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise parse_error(path, line_num, f"expected {dim} values, got {len(values)}")
            if token in seen:
                raise duplicate_token_error(token, path, line_num)

            try:
                vectors[len(tokens)] = [float(value) for value in values]
            except ValueError as e:
                raise parse_error(path, line_num, str(e))

            seen.add(token)
            tokens.append(token)

    if len(tokens) != rows:
        raise parse_error(path, rows + 1, f"expected {rows} rows, got {len(tokens)}")

    vocabulary = Vocabulary.load_tsv(vocabulary_path)
    if [entry.token for entry in vocabulary] != tokens:
        raise VocabularyError(f"vocabulary sidecar {vocabulary_path} does not match the rows of {path}")

    return WordEmbedding(vocabulary, vectors)
