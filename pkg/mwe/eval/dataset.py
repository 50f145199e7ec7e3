import enum
import json
import os
import typing
from dataclasses import dataclass, field

from mwe.corpus.documents import TagCategory
from mwe.corpus.tokenizer import normalize_tag
from utils.utils import parse_error, missing_file_error, DataFormatError


class TagSplit(enum.Enum):
    SEEN = "seen"
    UNSEEN = "unseen"


class TrackSplit(enum.Enum):
    TRAIN = "train"
    VALID = "valid"
    TEST = "test"


@dataclass
class EvalDataset:
    annotations: dict[str, set[str]] = field(default_factory=dict)
    tag_categories: dict[str, TagCategory] = field(default_factory=dict)
    tag_split: dict[str, TagSplit] = field(default_factory=dict)
    track_split: dict[str, TrackSplit] = field(default_factory=dict)

    @property
    def tracks(self) -> list[str]:
        return sorted(self.annotations)

    @property
    def tags(self) -> list[str]:
        return sorted(set().union(*self.annotations.values())) if len(self.annotations) > 0 else []

    def tags_of_category(self, category: TagCategory) -> list[str]:
        return sorted(tag for tag, tag_category in self.tag_categories.items() if tag_category == category)

    def tags_of_split(self, split: TagSplit) -> list[str]:
        return sorted(tag for tag, tag_split in self.tag_split.items() if tag_split == split)

    def tracks_of_split(self, split: TrackSplit) -> list[str]:
        return sorted(track for track, track_split in self.track_split.items() if track_split == split)

    def validate(self) -> None:
        """Every annotated tag needs a category once tag metadata is present."""
        if len(self.tag_categories) == 0:
            return
        missing = sorted(set(self.tags) - set(self.tag_categories))
        if len(missing) > 0:
            raise DataFormatError(f"annotated tags without metadata: {', '.join(missing)}")


def load_annotations(path: str) -> EvalDataset:
    """Annotation JSON Lines: {track_id, artist_id, tags, split}."""
    if not os.path.isfile(path):
        raise missing_file_error(path)

    dataset = EvalDataset()
    with open(path, "r", encoding="utf-8") as file:
        for line_num, line in enumerate(file, start=1):
            if len(line.strip()) == 0:
                continue
            try:
                obj = json.loads(line)
                track_id = str(obj["track_id"])
                tags = {normalize_tag(str(tag)) for tag in obj.get("tags", [])}
                split = TrackSplit(obj.get("split", TrackSplit.TRAIN.value))
            except json.JSONDecodeError as e:
                raise parse_error(path, line_num, f"invalid JSON ({e.msg})")
            except KeyError as e:
                raise parse_error(path, line_num, f"missing key {e}")
            except ValueError as e:
                raise parse_error(path, line_num, str(e))

            if track_id in dataset.annotations:
                raise parse_error(path, line_num, f"duplicate track_id '{track_id}'")

            dataset.annotations[track_id] = tags
            dataset.track_split[track_id] = split
    return dataset


def load_tag_metadata(path: str, dataset: typing.Optional[EvalDataset] = None) -> EvalDataset:
    """Tag metadata TSV: tag, category (content|context), zs_split (seen|unseen). A header row is optional."""
    if not os.path.isfile(path):
        raise missing_file_error(path)

    dataset = dataset or EvalDataset()
    with open(path, "r", encoding="utf-8") as file:
        for line_num, line in enumerate(file, start=1):
            fields = line.rstrip("\n").split("\t")
            if len(line.strip()) == 0 or (line_num == 1 and fields[0] == "tag"):
                continue
            if len(fields) != 3:
                raise parse_error(path, line_num, f"expected 3 tab-separated fields, got {len(fields)}")

            tag = normalize_tag(fields[0])
            try:
                category = TagCategory(fields[1])
                split = TagSplit(fields[2])
            except ValueError as e:
                raise parse_error(path, line_num, str(e))

            if tag in dataset.tag_categories:
                raise parse_error(path, line_num, f"duplicate tag '{tag}'")
            dataset.tag_categories[tag] = category
            dataset.tag_split[tag] = split

    dataset.validate()
    return dataset


def load_eval_dataset(annotations_path: str, metadata_path: typing.Optional[str] = None) -> EvalDataset:
    dataset = load_annotations(annotations_path)
    if metadata_path is not None:
        load_tag_metadata(metadata_path, dataset)
    return dataset
