import enum
import typing
from dataclasses import dataclass

from mwe.config.defaults import load_section
from utils.utils import config_error


class ShuffleMode(enum.Enum):
    # Paragraphs are shuffled once when the corpus is built.
    STATIC = "static"
    # Paragraphs are re-assembled with a fresh shuffle every epoch (shuffling augmentation).
    PER_EPOCH = "per_epoch"


MUSIC_SOURCES = ("review", "tag", "artist", "track")


@dataclass(frozen=True)
class CorpusConfig:
    window_size: int = 15
    review_repeat: int = 4
    min_count: int = 5
    subsample_threshold: float = 1e-5
    shuffle_mode: ShuffleMode = ShuffleMode.STATIC
    dynamic_window: bool = True
    sources: tuple[str, ...] = MUSIC_SOURCES

    def __post_init__(self) -> None:
        if isinstance(self.shuffle_mode, str):
            try:
                object.__setattr__(self, "shuffle_mode", ShuffleMode(self.shuffle_mode.lower().replace("-", "_")))
            except ValueError:
                raise config_error(f"unknown shuffle_mode: {self.shuffle_mode}")
        object.__setattr__(self, "sources", tuple(self.sources))
        self.validate()

    def validate(self) -> None:
        if self.window_size < 1:
            raise config_error("window_size must be >= 1")
        if self.review_repeat < 1:
            raise config_error("review_repeat must be >= 1")
        if self.min_count < 0:
            raise config_error("min_count must be >= 0")
        if self.subsample_threshold < 0:
            raise config_error("subsample_threshold must be >= 0")

        unknown = set(self.sources) - set(MUSIC_SOURCES)
        if len(unknown) > 0:
            raise config_error(f"unknown corpus sources: {', '.join(sorted(unknown))}")

    def uses(self, source: str) -> bool:
        return source in self.sources

    @classmethod
    def from_dict(cls, overrides: typing.Optional[dict[str, typing.Any]] = None) -> "CorpusConfig":
        return load_section(cls, "corpus", overrides)
