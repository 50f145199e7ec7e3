import typing

import numpy as np

SIGMOID_CLAMP = 700.0


def sigmoid(x: float | np.ndarray) -> typing.Any:
    """Logistic function, clamped at |x| = 700 so exp never overflows."""
    clamped = np.clip(x, -SIGMOID_CLAMP, SIGMOID_CLAMP)
    result = 1.0 / (1.0 + np.exp(-clamped))
    return float(result) if np.ndim(result) == 0 else result


def log_sigmoid(x: float | np.ndarray) -> typing.Any:
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


class EmbeddingMatrix:
    """Input (center) and output (context) vector tables. The input table is the published word embedding."""

    def __init__(self, input_vectors: np.ndarray, output_vectors: np.ndarray) -> None:
        if input_vectors.shape != output_vectors.shape or input_vectors.ndim != 2:
            raise ValueError(
                f"input and output tables must share a 2-d shape, got {input_vectors.shape} and {output_vectors.shape}"
            )
        self.input_vectors = input_vectors
        self.output_vectors = output_vectors

    @property
    def shape(self) -> tuple[int, int]:
        rows, dim = self.input_vectors.shape
        return rows, dim

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.input_vectors)) and np.all(np.isfinite(self.output_vectors)))

    def copy(self) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.input_vectors.copy(), self.output_vectors.copy())

    @classmethod
    def initialize(cls, vocab_size: int, dim: int, rng: np.random.Generator,
                   dtype: typing.Any = np.float32) -> "EmbeddingMatrix":
        """word2vec initialization: centers uniform in [-0.5/d, 0.5/d], contexts zero."""
        input_vectors = ((rng.random((vocab_size, dim)) - 0.5) / dim).astype(dtype)
        output_vectors = np.zeros((vocab_size, dim), dtype=dtype)
        return cls(input_vectors, output_vectors)


def sgns_loss(center: int, context: int, negatives: typing.Sequence[int] | np.ndarray,
              model: EmbeddingMatrix) -> float:
    """-log sigma(w_center . c_context) - sum over negatives of log sigma(-w_center . c_negative)."""
    w = model.input_vectors[center].astype(np.float64)
    loss = -log_sigmoid(np.dot(w, model.output_vectors[context]))
    if len(negatives) > 0:
        scores = model.output_vectors[np.asarray(negatives, dtype=np.int64)] @ w
        loss -= np.sum(log_sigmoid(-scores))
    return float(loss)


def sgns_step(center: int, context: int, negatives: typing.Sequence[int] | np.ndarray, lr: float,
              model: EmbeddingMatrix, debug: bool = False) -> float:
    """One SGD step on the negative-sampling loss for a single (center, context) pair. Returns the pre-update loss.

    All gradients are taken at the pre-update parameters. A negative that repeats (or equals the context) contributes
    once per occurrence.
    """
    targets = np.concatenate(([context], np.asarray(negatives, dtype=np.int64))).astype(np.int64)
    labels = np.zeros(len(targets))
    labels[0] = 1.0

    w = model.input_vectors[center].copy()
    target_vectors = model.output_vectors[targets]
    scores = (target_vectors @ w).astype(np.float64)

    loss = -log_sigmoid(scores[0]) - np.sum(log_sigmoid(-scores[1:]))

    # d loss / d score: sigma(s) - 1 for the context, sigma(s) for each negative.
    gradients = (sigmoid(scores) - labels).astype(model.input_vectors.dtype)

    np.subtract.at(model.output_vectors, targets, lr * gradients[:, np.newaxis] * w[np.newaxis, :])
    model.input_vectors[center] -= lr * (gradients @ target_vectors)

    if debug:
        assert np.all(np.isfinite(model.input_vectors[center])), f"non-finite center vector {center}"
        assert np.all(np.isfinite(model.output_vectors[targets])), f"non-finite output vectors {targets}"

    return float(loss)
