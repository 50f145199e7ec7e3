import pytest

from ..testing_utils import write_lines, write_jsonl
from mwe.corpus.documents import (TagCategory, MusicDocument, Tag, parse_music_document, load_music_corpus,
                                  load_general_corpus)
from mwe.corpus.tokenizer import tokenize, normalize_tag, LineTokenizer
from utils.utils import DataFormatError


@pytest.mark.parametrize("text, expected", [
    ("Deep House IN Miami", ["deep", "house", "in", "miami"]),
    ("", []),
    ("  rock\t metal ", ["rock", "metal"]),
    ("Hip-Hop, R&B!", ["hip-hop,", "r&b!"]),
    ("\n\n", []),
])
def test_tokenize(text, expected):
    assert tokenize(text) == expected


@pytest.mark.parametrize("name, expected", [
    ("Deep House", "deep_house"),
    ("rock", "rock"),
    ("  Drum   and Bass ", "drum_and_bass"),
])
def test_normalize_tag(name, expected):
    assert normalize_tag(name) == expected


def test_line_tokenizer_skips_blank_lines(tmp_path):
    path = write_lines(str(tmp_path / "general.txt"), ["The Quick fox", "", "   ", "JUMPS"])
    tokenizer = LineTokenizer(path)

    assert list(tokenizer) == [["the", "quick", "fox"], ["jumps"]]
    # Iterating again starts over.
    assert list(tokenizer) == [["the", "quick", "fox"], ["jumps"]]


def test_load_general_corpus(tmp_path):
    path = write_lines(str(tmp_path / "general.txt"), ["a b", "c"])
    assert list(load_general_corpus(path)) == [["a", "b"], ["c"]]


def test_parse_music_document():
    doc = parse_music_document({
        "track_id": "TR1",
        "artist_id": "AR1",
        "tags": [{"name": "Deep House", "category": "content"}, {"name": "party", "category": "context"}, "Chill"],
        "review_sentences": ["Warm ANALOG synth", "   "],
    })

    assert doc.track_id == "TR1"
    assert doc.artist_id == "AR1"
    assert doc.tags == [
        Tag("deep_house", TagCategory.CONTENT), Tag("party", TagCategory.CONTEXT), Tag("chill", TagCategory.CONTENT)
    ]
    assert doc.review_sentences == [["warm", "analog", "synth"]]


@pytest.mark.parametrize("track_id, artist_id, tag", [
    ("", "AR1", "rock"),
    ("TR1", "", "rock"),
    ("TR1", "AR1", "Rock"),
    ("TR1", "AR1", "deep house"),
])
def test_music_document_invariants(track_id, artist_id, tag):
    with pytest.raises(ValueError):
        MusicDocument(track_id, artist_id, [Tag(tag, TagCategory.CONTENT)])


def test_music_document_json_round_trip():
    doc = parse_music_document({"track_id": "TR1", "artist_id": "AR1", "tags": ["rock"],
                                "review_sentences": ["loud guitars"]})
    assert parse_music_document(doc.to_json()) == doc


@pytest.mark.parametrize("line, error", [
    ("{not json", "invalid JSON"),
    ('{"artist_id": "AR1"}', "missing key 'track_id'"),
    ('{"track_id": "TR1", "artist_id": "AR1", "tags": [{"name": "x", "category": "mood"}]}', "'mood' is not a valid"),
    ('{"track_id": "TR1", "artist_id": "The Beatles"}', "artist_id must not contain whitespace: 'The Beatles'"),
    ('{"track_id": "TR 1", "artist_id": "AR1"}', "track_id must not contain whitespace: 'TR 1'"),
    ('{"track_id": "", "artist_id": "AR1"}', "track_id must be non-empty"),
])
def test_load_music_corpus_errors(tmp_path, line, error):
    path = str(tmp_path / "music.jsonl")
    write_lines(path, ['{"track_id": "TR0", "artist_id": "AR0"}', line])

    with pytest.raises(DataFormatError) as e:
        list(load_music_corpus(path))

    assert str(e.value).startswith(f"Error in {path} at line 2: ")
    assert error in str(e.value)
    assert e.value.line_num == 2


def test_load_music_corpus(tmp_path):
    path = write_jsonl(str(tmp_path / "music.jsonl"), [
        {"track_id": "TR0", "artist_id": "AR0", "tags": ["rock"]},
        {"track_id": "TR1", "artist_id": "AR0", "review_sentences": ["so good"]},
    ])
    docs = list(load_music_corpus(path))

    assert [doc.track_id for doc in docs] == ["TR0", "TR1"]
    assert docs[1].review_sentences == [["so", "good"]]
