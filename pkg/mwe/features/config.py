import typing
from dataclasses import dataclass

from mwe.config.defaults import load_section
from utils.utils import config_error


@dataclass(frozen=True)
class MelConfig:
    sample_rate: int = 22050
    fft_size: int = 1024
    hop: int = 512
    mel_bins: int = 128
    window: str = "hann"
    log_floor: float = 1e-10
    excerpt_seconds: float = 3.0
    excerpts_per_track: int = 1

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.fft_size < 1 or self.fft_size & (self.fft_size - 1) != 0:
            raise config_error("fft_size must be a power of two")
        if not 1 <= self.hop <= self.fft_size:
            raise config_error("hop must be in [1, fft_size]")
        if self.mel_bins < 1:
            raise config_error("mel_bins must be >= 1")
        if self.sample_rate < 1:
            raise config_error("sample_rate must be >= 1")
        if self.log_floor <= 0:
            raise config_error("log_floor must be > 0")
        if self.excerpt_seconds <= 0:
            raise config_error("excerpt_seconds must be > 0")
        if self.excerpts_per_track < 1:
            raise config_error("excerpts_per_track must be >= 1")

    @property
    def excerpt_samples(self) -> int:
        return int(self.excerpt_seconds * self.sample_rate)

    @classmethod
    def from_dict(cls, overrides: typing.Optional[dict[str, typing.Any]] = None) -> "MelConfig":
        return load_section(cls, "mel", overrides)
