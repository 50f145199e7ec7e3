import logging
import typing
from timeit import default_timer

import numpy as np

from mwe.embedding.word_embedding import WordEmbedding
from mwe.joint.config import JointConfig, Supervision
from mwe.joint.encoders import AudioEncoder, SemanticEncoder
from mwe.joint.losses import hinge_with_gradients
from mwe.joint.triplets import SupervisionRecord, PrototypePools, Triplet, sample_triplets
from utils.utils import oov_error

logger = logging.getLogger(__name__)


class JointModel:
    """Audio encoder f and semantic encoder g trained together against the weighted triplet objective."""

    def __init__(self, audio: AudioEncoder, semantic: SemanticEncoder, config: JointConfig) -> None:
        if audio.joint_dim != semantic.joint_dim:
            raise ValueError(f"encoder output sizes differ: {audio.joint_dim} vs {semantic.joint_dim}")
        self.audio = audio
        self.semantic = semantic
        self.config = config

    def parameters(self) -> dict[str, np.ndarray]:
        return {**self.audio.parameters(), **self.semantic.parameters()}

    def term_weights(self, triplets: typing.Sequence[Triplet]) -> np.ndarray:
        """lambda_s / n_s for each triplet, so that every supervision term is a mean over its own triplets."""
        counts = {supervision: 0 for supervision in Supervision}
        for triplet in triplets:
            counts[triplet.supervision] += 1
        return np.array([
            self.config.weight(triplet.supervision) / counts[triplet.supervision] for triplet in triplets
        ])

    def loss_and_gradients(self, triplets: typing.Sequence[Triplet]) -> tuple[float, dict[str, np.ndarray]]:
        params = self.parameters()
        if len(triplets) == 0:
            return 0.0, {name: np.zeros_like(value) for name, value in params.items()}

        dtype = self.audio.w1.dtype
        x = np.stack([triplet.record.clip.vector for triplet in triplets]).astype(dtype)
        positive_words = self.semantic.word_vectors([triplet.positive for triplet in triplets])
        negative_words = self.semantic.word_vectors([triplet.negative for triplet in triplets])

        anchors, hidden = self.audio.forward(x)
        positives = self.semantic.forward(positive_words)
        negatives = self.semantic.forward(negative_words)

        loss, grad_anchors, grad_positives, grad_negatives = hinge_with_gradients(
            anchors, positives, negatives, self.config.margin, self.term_weights(triplets)
        )

        gradients = self.audio.backward(x, hidden, grad_anchors)
        gradients.update(self.semantic.backward(
            np.concatenate([positive_words, negative_words]),
            np.concatenate([grad_positives, grad_negatives]),
        ))
        return loss, gradients

    def loss(self, triplets: typing.Sequence[Triplet]) -> float:
        loss, _ = self.loss_and_gradients(triplets)
        return loss


class NesterovSGD:
    """SGD with Nesterov momentum and time-based decay lr_t = lr / (1 + decay * t)."""

    def __init__(self, parameters: dict[str, np.ndarray], lr: float, momentum: float, decay: float) -> None:
        self.parameters = parameters
        self.lr = lr
        self.momentum = momentum
        self.decay = decay
        self.iterations = 0
        self.velocities = {name: np.zeros_like(value) for name, value in parameters.items()}

    @property
    def current_lr(self) -> float:
        return self.lr / (1.0 + self.decay * self.iterations)

    def step(self, gradients: dict[str, np.ndarray]) -> None:
        lr = self.current_lr
        for name, parameter in self.parameters.items():
            velocity = self.velocities[name]
            velocity *= self.momentum
            velocity -= lr * gradients[name]
            parameter += self.momentum * velocity - lr * gradients[name]
        self.iterations += 1


def find_oov_tokens(records: typing.Iterable[SupervisionRecord], emb: WordEmbedding,
                    supervisions: typing.Iterable[Supervision] = tuple(Supervision)) -> list[str]:
    supervisions = list(supervisions)
    return sorted({token for record in records for token in record.tokens(supervisions) if token not in emb})


class JointTrainer:
    def __init__(self, emb: WordEmbedding, config: JointConfig) -> None:
        self.emb = emb
        self.config = config
        self.epoch_losses: list[float] = []
        self.optimizer: typing.Optional[NesterovSGD] = None

    def sample_batch(self, batch: typing.Sequence[SupervisionRecord], pools: PrototypePools,
                     rng: np.random.Generator) -> list[Triplet]:
        triplets: list[Triplet] = []
        for supervision in self.config.active_supervisions:
            triplets.extend(sample_triplets(batch, supervision, rng, pools))
        return triplets

    def train(self, records: typing.Sequence[SupervisionRecord],
              model: typing.Optional[JointModel] = None) -> JointModel:
        c = self.config
        if len(records) == 0:
            raise ValueError("empty supervision dataset")

        missing = find_oov_tokens(records, self.emb, c.active_supervisions)
        if len(missing) > 0:
            raise oov_error(missing)

        rng = np.random.default_rng(c.seed)
        if model is None:
            in_dim = len(records[0].clip.vector)
            model = JointModel(
                AudioEncoder.initialize(in_dim, c.hidden, c.joint_dim, rng, c.np_dtype),
                SemanticEncoder.initialize(self.emb, c.joint_dim, rng, c.np_dtype),
                c,
            )

        pools = PrototypePools(records)
        optimizer = NesterovSGD(model.parameters(), c.lr, c.momentum, c.lr_decay)
        self.optimizer = optimizer
        self.epoch_losses = []

        for epoch in range(c.epochs):
            start = default_timer()
            order = rng.permutation(len(records))
            batch_losses = []

            for batch_start in range(0, len(records), c.batch_size):
                batch = [records[i] for i in order[batch_start:batch_start + c.batch_size]]
                triplets = self.sample_batch(batch, pools, rng)
                if len(triplets) == 0:
                    continue
                loss, gradients = model.loss_and_gradients(triplets)
                optimizer.step(gradients)
                batch_losses.append(loss)

            epoch_loss = float(np.mean(batch_losses)) if len(batch_losses) > 0 else 0.0
            self.epoch_losses.append(epoch_loss)
            logger.info("epoch %i: mean batch loss %.6f, lr %.2e, %.1fs",
                        epoch, epoch_loss, optimizer.current_lr, default_timer() - start)

        for name, value in model.parameters().items():
            if not np.all(np.isfinite(value)):
                raise FloatingPointError(f"joint training produced non-finite values in {name}")
        return model


def train_joint(dataset: typing.Sequence[SupervisionRecord], emb: WordEmbedding,
                config: JointConfig) -> tuple[AudioEncoder, SemanticEncoder]:
    model = JointTrainer(emb, config).train(dataset)
    return model.audio, model.semantic
