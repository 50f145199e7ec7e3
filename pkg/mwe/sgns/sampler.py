import typing

import numpy as np

from mwe.corpus.token import TokenKind
from mwe.corpus.vocabulary import Vocabulary


class NegativeSampler:
    """Noise distribution over token ids with mass proportional to count ** exponent.

    Draws are inverse-CDF lookups into a cumulative table, so one sampler is safe to share between threads as long
    as each thread brings its own random generator.
    """

    def __init__(self, counts: typing.Sequence[int] | np.ndarray, exponent: float = 0.75,
                 allowed: typing.Optional[np.ndarray] = None) -> None:
        self.counts = np.asarray(counts, dtype=np.float64)
        if self.counts.ndim != 1 or len(self.counts) == 0:
            raise ValueError("negative sampler needs a non-empty vocabulary")

        mass = np.where(self.counts > 0, self.counts ** exponent, 0.0)
        if allowed is not None:
            restricted = np.zeros_like(mass)
            restricted[allowed] = mass[allowed]
            mass = restricted

        total = mass.sum()
        if total <= 0:
            raise ValueError("negative sampler has no token with non-zero count")

        self.probabilities = mass / total
        self.cumulative = np.cumsum(self.probabilities)
        self.cumulative[-1] = 1.0

    def __len__(self) -> int:
        return len(self.counts)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # side="right" skips zero-mass ids, whose cumulative value equals their predecessor's.
        draws = np.searchsorted(self.cumulative, rng.random(size), side="right")
        return np.minimum(draws, len(self.cumulative) - 1).astype(np.int64)

    @classmethod
    def from_vocabulary(cls, vocabulary: Vocabulary, exponent: float = 0.75,
                        kinds: typing.Optional[typing.Iterable[TokenKind]] = None) -> "NegativeSampler":
        allowed = vocabulary.ids_of_kinds(kinds) if kinds is not None else None
        return cls(vocabulary.counts, exponent, allowed)


def sample_negative(sampler: NegativeSampler, rng: np.random.Generator) -> int:
    return int(sampler.sample(rng, 1)[0])
