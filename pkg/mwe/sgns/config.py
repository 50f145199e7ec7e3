import typing
from dataclasses import dataclass

import numpy as np

from mwe.config.defaults import load_section
from utils.utils import config_error


@dataclass(frozen=True)
class SgnsConfig:
    dim: int = 300
    epochs: int = 15
    negatives: int = 20
    initial_lr: float = 0.025
    final_lr_fraction: float = 1e-4 / 0.025
    ns_exponent: float = 0.75
    seed: int = 0
    workers: int = 1
    # Training runs in float32; float64 is for gradient checks and exact comparisons.
    dtype: str = "float32"
    # Assert finiteness after every step.
    debug: bool = False

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.dim < 1:
            raise config_error("dim must be >= 1")
        if self.epochs < 1:
            raise config_error("epochs must be >= 1")
        if self.negatives < 1:
            raise config_error("negatives must be >= 1")
        if self.initial_lr <= 0:
            raise config_error("initial_lr must be > 0")
        if not 0 < self.final_lr_fraction <= 1:
            raise config_error("final_lr_fraction must be in (0, 1]")
        if self.workers < 1:
            raise config_error("workers must be >= 1")
        if self.dtype not in ("float32", "float64"):
            raise config_error(f"unsupported dtype: {self.dtype}")

    @property
    def np_dtype(self) -> type[np.floating[typing.Any]]:
        return np.float64 if self.dtype == "float64" else np.float32

    @classmethod
    def from_dict(cls, overrides: typing.Optional[dict[str, typing.Any]] = None) -> "SgnsConfig":
        return load_section(cls, "sgns", overrides)
