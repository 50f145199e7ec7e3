import enum
import typing
from dataclasses import dataclass

import numpy as np

from mwe.config.defaults import load_section
from utils.utils import config_error


class Supervision(enum.Enum):
    TAG = "tag"
    ARTIST = "artist"
    TRACK = "track"

    @property
    def label(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class JointConfig:
    joint_dim: int = 256
    hidden: int = 512
    margin: float = 0.2
    lambda_tag: float = 1.0
    lambda_artist: float = 1.0
    lambda_track: float = 1.0
    batch_size: int = 128
    epochs: int = 200
    lr: float = 1e-3
    momentum: float = 0.9
    # Per-step decay: lr_t = lr / (1 + lr_decay * t)
    lr_decay: float = 1e-6
    seed: int = 0
    dtype: str = "float64"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.joint_dim < 1 or self.hidden < 1:
            raise config_error("joint_dim and hidden must be >= 1")
        if self.margin <= 0:
            raise config_error("margin must be > 0")
        if min(self.lambda_tag, self.lambda_artist, self.lambda_track) < 0:
            raise config_error("supervision weights must be >= 0")
        if max(self.lambda_tag, self.lambda_artist, self.lambda_track) <= 0:
            raise config_error("at least one supervision weight must be > 0")
        if self.batch_size < 1 or self.epochs < 1:
            raise config_error("batch_size and epochs must be >= 1")
        if self.lr <= 0 or self.lr_decay < 0 or not 0 <= self.momentum < 1:
            raise config_error("lr must be > 0, lr_decay >= 0 and momentum in [0, 1)")
        if self.dtype not in ("float32", "float64"):
            raise config_error(f"unsupported dtype: {self.dtype}")

    def weight(self, supervision: Supervision) -> float:
        return {
            Supervision.TAG: self.lambda_tag,
            Supervision.ARTIST: self.lambda_artist,
            Supervision.TRACK: self.lambda_track,
        }[supervision]

    @property
    def active_supervisions(self) -> list[Supervision]:
        return [supervision for supervision in Supervision if self.weight(supervision) > 0]

    @property
    def np_dtype(self) -> type[np.floating[typing.Any]]:
        return np.float64 if self.dtype == "float64" else np.float32

    @classmethod
    def from_dict(cls, overrides: typing.Optional[dict[str, typing.Any]] = None) -> "JointConfig":
        return load_section(cls, "joint", overrides)
