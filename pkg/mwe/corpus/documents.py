import enum
import json
import logging
import typing
from dataclasses import dataclass, field

from mwe.corpus.tokenizer import tokenize, normalize_tag, check_identifier, LineTokenizer
from utils.utils import parse_error

logger = logging.getLogger(__name__)


class TagCategory(enum.Enum):
    CONTENT = "content"
    CONTEXT = "context"


@dataclass(frozen=True)
class Tag:
    name: str
    category: TagCategory


@dataclass
class MusicDocument:
    """One track's review sentences, tags and IDs; the unit a training paragraph is assembled from."""

    track_id: str
    artist_id: str
    tags: list[Tag] = field(default_factory=list)
    review_sentences: list[list[str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        check_identifier("track_id", self.track_id)
        check_identifier("artist_id", self.artist_id)

        for tag in self.tags:
            if tag.name != tag.name.lower() or any(c.isspace() for c in tag.name) or len(tag.name) == 0:
                raise ValueError(f"malformed tag name: {tag.name!r}")

    @property
    def tag_names(self) -> list[str]:
        return [tag.name for tag in self.tags]

    def to_json(self) -> dict[str, typing.Any]:
        return {
            "track_id": self.track_id,
            "artist_id": self.artist_id,
            "tags": [{"name": tag.name, "category": tag.category.value} for tag in self.tags],
            "review_sentences": [" ".join(sentence) for sentence in self.review_sentences],
        }


def parse_music_document(obj: typing.Any) -> MusicDocument:
    """Build a MusicDocument from one decoded JSON Lines object. Raises KeyError/ValueError/TypeError on bad input."""
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")

    tags = []
    for tag in obj.get("tags", []):
        if isinstance(tag, str):
            # Bare tag names have no category; they count as content tags.
            tags.append(Tag(normalize_tag(tag), TagCategory.CONTENT))
        else:
            tags.append(Tag(normalize_tag(tag["name"]), TagCategory(tag.get("category", "content"))))

    sentences = [tokenize(sentence) for sentence in obj.get("review_sentences", [])]

    return MusicDocument(
        track_id=str(obj["track_id"]).strip(),
        artist_id=str(obj["artist_id"]).strip(),
        tags=tags,
        review_sentences=[sentence for sentence in sentences if len(sentence) > 0],
    )


def load_music_corpus(path: str) -> typing.Iterator[MusicDocument]:
    with open(path, "r", encoding="utf-8") as file:
        for line_num, line in enumerate(file, start=1):
            if len(line.strip()) == 0:
                continue
            try:
                yield parse_music_document(json.loads(line))
            except json.JSONDecodeError as e:
                raise parse_error(path, line_num, f"invalid JSON ({e.msg})")
            except KeyError as e:
                raise parse_error(path, line_num, f"missing key {e}")
            except (ValueError, TypeError) as e:
                raise parse_error(path, line_num, str(e))


def load_general_corpus(path: str) -> typing.Iterator[list[str]]:
    """One document per line of plain UTF-8 text."""
    return iter(LineTokenizer(path))
