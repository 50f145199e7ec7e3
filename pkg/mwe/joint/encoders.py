import typing

import numpy as np

from mwe.embedding.word_embedding import WordEmbedding
from utils.utils import dimension_error


def glorot_uniform(rng: np.random.Generator, fan_out: int, fan_in: int, dtype: typing.Any) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in)).astype(dtype)


class AudioEncoder:
    """f(x) = W2 tanh(W1 x + b1) + b2, mapping a clip feature vector into the joint space."""

    PARAMETERS = ("w1", "b1", "w2", "b2")

    def __init__(self, w1: np.ndarray, b1: np.ndarray, w2: np.ndarray, b2: np.ndarray) -> None:
        if w1.shape[0] != b1.shape[0] or w2.shape[1] != w1.shape[0] or w2.shape[0] != b2.shape[0]:
            raise ValueError(f"inconsistent audio encoder shapes {w1.shape}, {b1.shape}, {w2.shape}, {b2.shape}")
        self.w1 = w1
        self.b1 = b1
        self.w2 = w2
        self.b2 = b2

    @property
    def in_dim(self) -> int:
        return int(self.w1.shape[1])

    @property
    def joint_dim(self) -> int:
        return int(self.w2.shape[0])

    def parameters(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.PARAMETERS}

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Batched forward pass over rows of x; returns (outputs, hidden activations)."""
        x = np.atleast_2d(x)
        if x.shape[1] != self.in_dim:
            raise dimension_error(self.in_dim, x.shape[1])
        hidden = np.tanh(x @ self.w1.T + self.b1)
        return hidden @ self.w2.T + self.b2, hidden

    def backward(self, x: np.ndarray, hidden: np.ndarray, grad_out: np.ndarray) -> dict[str, np.ndarray]:
        grad_hidden = (grad_out @ self.w2) * (1.0 - hidden ** 2)
        return {
            "w1": grad_hidden.T @ x,
            "b1": grad_hidden.sum(axis=0),
            "w2": grad_out.T @ hidden,
            "b2": grad_out.sum(axis=0),
        }

    def encode(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        outputs, _ = self.forward(x)
        return outputs[0] if x.ndim == 1 else outputs

    @classmethod
    def initialize(cls, in_dim: int, hidden: int, joint_dim: int, rng: np.random.Generator,
                   dtype: typing.Any = np.float64) -> "AudioEncoder":
        return cls(
            glorot_uniform(rng, hidden, in_dim, dtype),
            np.zeros(hidden, dtype=dtype),
            glorot_uniform(rng, joint_dim, hidden, dtype),
            np.zeros(joint_dim, dtype=dtype),
        )


class SemanticEncoder:
    """g(token) = A v_token + c over a frozen word embedding."""

    PARAMETERS = ("a", "c")

    def __init__(self, embedding: WordEmbedding, a: np.ndarray, c: np.ndarray) -> None:
        if a.shape != (c.shape[0], embedding.dim):
            raise ValueError(f"semantic encoder weight shape {a.shape} does not fit word dim {embedding.dim}")
        self.embedding = embedding
        self.a = a
        self.c = c

    @property
    def joint_dim(self) -> int:
        return int(self.a.shape[0])

    def parameters(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.PARAMETERS}

    def word_vectors(self, tokens: typing.Sequence[str]) -> np.ndarray:
        ids = [self.embedding.vocabulary.id(token) for token in tokens]
        return self.embedding.vectors[ids].astype(self.a.dtype)

    def forward(self, word_vectors: np.ndarray) -> np.ndarray:
        return word_vectors @ self.a.T + self.c

    def backward(self, word_vectors: np.ndarray, grad_out: np.ndarray) -> dict[str, np.ndarray]:
        return {"a": grad_out.T @ word_vectors, "c": grad_out.sum(axis=0)}

    def encode(self, tokens: typing.Sequence[str]) -> np.ndarray:
        return self.forward(self.word_vectors(tokens))

    @classmethod
    def initialize(cls, embedding: WordEmbedding, joint_dim: int, rng: np.random.Generator,
                   dtype: typing.Any = np.float64) -> "SemanticEncoder":
        return cls(embedding, glorot_uniform(rng, joint_dim, embedding.dim, dtype), np.zeros(joint_dim, dtype=dtype))


def encode_audio(enc: AudioEncoder, x: np.ndarray) -> np.ndarray:
    return enc.encode(np.asarray(x, dtype=enc.w1.dtype))


def encode_prototype(enc: SemanticEncoder, token: str) -> np.ndarray:
    return enc.encode([token])[0]


def track_embedding(enc: AudioEncoder, clips: typing.Sequence[typing.Any]) -> np.ndarray:
    """Mean audio embedding over a track's clips (ClipFeatures or raw vectors)."""
    if len(clips) == 0:
        raise ValueError("track has no clips")
    vectors = np.stack([getattr(clip, "vector", clip) for clip in clips]).astype(enc.w1.dtype)
    outputs, _ = enc.forward(vectors)
    return typing.cast(np.ndarray, outputs.mean(axis=0))
