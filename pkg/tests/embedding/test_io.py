import numpy as np
import pytest

from ..testing_utils import random_embedding, write_lines
from mwe.corpus.token import TokenKind
from mwe.embedding import io
from utils.utils import DataFormatError, VocabularyError


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    kinds = [TokenKind.GENERAL_WORD, TokenKind.REVIEW_WORD, TokenKind.TAG, TokenKind.ARTIST_ID, TokenKind.TRACK_ID]
    emb = random_embedding(["the", "warm", "rock", "AR1", "TR1"], 4, rng, kinds)
    path = str(tmp_path / "embedding.txt")
    io.save(emb, path)

    loaded = io.load(path)
    assert loaded.vocabulary == emb.vocabulary
    assert np.max(np.abs(loaded.vectors - emb.vectors)) < 1e-6

    for token in ["the", "rock", "TR1"]:
        expected = emb.most_similar(token, 4)
        actual = loaded.most_similar(token, 4)
        assert [t for t, _ in actual] == [t for t, _ in expected]
        assert [s for _, s in actual] == pytest.approx([s for _, s in expected], abs=1e-6)


def test_file_layout(tmp_path):
    emb = random_embedding(["a", "b"], 3, np.random.default_rng(0))
    path = str(tmp_path / "embedding.txt")
    io.save(emb, path)

    with open(path, encoding="utf-8") as file:
        lines = file.read().splitlines()
    assert lines[0] == "2 3"
    assert [line.split()[0] for line in lines[1:]] == ["a", "b"]
    assert all(len(line.split()) == 4 for line in lines[1:])
    assert io.sidecar_path(path) == path + ".vocab.tsv"


def write_embedding(tmp_path, lines, vocabulary):
    path = write_lines(str(tmp_path / "embedding.txt"), lines)
    write_lines(io.sidecar_path(path), ["token\tkind\tcount"] + [f"{token}\tgeneral_word\t1" for token in vocabulary])
    return path


def test_dimension_mismatch(tmp_path):
    path = write_embedding(tmp_path, ["2 3", "a 1 2 3", "b 1 2 3 4"], ["a", "b"])
    with pytest.raises(DataFormatError) as e:
        io.load(path)
    assert str(e.value) == f"Error in {path} at line 3: expected 3 values, got 4"


def test_duplicate_token(tmp_path):
    path = write_embedding(tmp_path, ["2 2", "a 1 2", "a 3 4"], ["a", "b"])
    with pytest.raises(VocabularyError) as e:
        io.load(path)
    assert "duplicate token 'a'" in str(e.value)


@pytest.mark.parametrize("lines, error", [
    (["2"], "at line 1: expected header '<vocab size> <dim>'"),
    (["x 2", "a 1 2"], "at line 1: invalid header 'x 2'"),
    (["2 2", "a 1 2"], "at line 3: expected 2 rows, got 1"),
    (["1 2", "a 1 2", "b 1 2"], "at line 3: more rows than the 1 declared in the header"),
    (["1 2", "a 1 x"], "at line 2: could not convert string to float: 'x'"),
])
def test_malformed(tmp_path, lines, error):
    path = write_embedding(tmp_path, lines, ["a"])
    with pytest.raises(DataFormatError) as e:
        io.load(path)
    assert error in str(e.value)


def test_sidecar_mismatch(tmp_path):
    path = write_embedding(tmp_path, ["1 2", "a 1 2"], ["b"])
    with pytest.raises(VocabularyError):
        io.load(path)
