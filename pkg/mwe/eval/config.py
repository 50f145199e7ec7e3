import typing
from dataclasses import dataclass

from mwe.config.defaults import load_section
from utils.utils import config_error


@dataclass(frozen=True)
class EvalConfig:
    ndcg_k: int = 30
    recall_ks: tuple[int, ...] = (1, 5, 10)

    def __post_init__(self) -> None:
        object.__setattr__(self, "recall_ks", tuple(sorted(set(int(k) for k in self.recall_ks))))
        self.validate()

    def validate(self) -> None:
        if self.ndcg_k < 1:
            raise config_error("ndcg_k must be >= 1")
        if len(self.recall_ks) == 0 or min(self.recall_ks) < 1:
            raise config_error("recall_ks must be a nonempty list of integers >= 1")

    @classmethod
    def from_dict(cls, overrides: typing.Optional[dict[str, typing.Any]] = None) -> "EvalConfig":
        return load_section(cls, "eval", overrides)
