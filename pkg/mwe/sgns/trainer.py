import logging
import threading
import typing
from timeit import default_timer

import numpy as np

from mwe.sgns.config import SgnsConfig
from mwe.sgns.model import EmbeddingMatrix, sgns_step
from mwe.sgns.sampler import NegativeSampler
from utils.utils import DataFormatError

logger = logging.getLogger(__name__)

# (epoch, worker, workers) -> that worker's training pairs for the epoch
PairFactory = typing.Callable[[int, int, int], typing.Union[np.ndarray, typing.Iterable[tuple[int, int]]]]


class ProgressCounter:
    """Processed-pair counter shared by all workers; drives the linear learning-rate decay."""

    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.value = 0

    def add(self, amount: int) -> int:
        with self.lock:
            self.value += amount
            return self.value


class SgnsTrainer:
    """Skip-gram with negative sampling over a re-instantiable pair stream.

    With several workers, threads update the shared tables without locks (hogwild); only the progress counter is
    synchronized. A single worker with a fixed seed is bit-reproducible.
    """

    def __init__(self, sampler: NegativeSampler, config: SgnsConfig) -> None:
        self.sampler = sampler
        self.config = config
        self.epoch_losses: list[float] = []
        self.progress = ProgressCounter()
        self.planned_pairs = 0

    def learning_rate(self, processed: int) -> float:
        c = self.config
        fraction = min(1.0, processed / self.planned_pairs) if self.planned_pairs > 0 else 1.0
        return c.initial_lr * (1.0 - (1.0 - c.final_lr_fraction) * fraction)

    def train(self, pair_factory: PairFactory) -> EmbeddingMatrix:
        c = self.config
        rng = np.random.default_rng(c.seed)
        model = EmbeddingMatrix.initialize(len(self.sampler), c.dim, rng, c.np_dtype)

        self.epoch_losses = []
        self.progress = ProgressCounter()

        for epoch in range(c.epochs):
            shards = [as_pair_array(pair_factory(epoch, worker, c.workers)) for worker in range(c.workers)]
            total = sum(len(shard) for shard in shards)

            if epoch == 0:
                if total == 0:
                    raise DataFormatError("empty corpus")
                self.planned_pairs = total * c.epochs
                logger.info("training on ~%i pairs (%i epochs, %i workers)", self.planned_pairs, c.epochs, c.workers)

            start = default_timer()
            losses = [0.0] * c.workers

            def work(worker: int) -> None:
                worker_rng = np.random.default_rng([c.seed, epoch, worker])
                losses[worker] = self.train_shard(model, shards[worker], worker_rng)

            if c.workers == 1:
                work(0)
            else:
                threads = [threading.Thread(target=work, args=(worker,)) for worker in range(c.workers)]
                for thread in threads:
                    thread.start()
                for thread in threads:
                    thread.join()

            epoch_loss = sum(losses) / max(total, 1)
            self.epoch_losses.append(epoch_loss)
            logger.info(
                "epoch %i: mean loss %.6f over %i pairs, lr %.6f, %.1fs",
                epoch, epoch_loss, total, self.learning_rate(self.progress.value), default_timer() - start
            )

        if not model.is_finite():
            raise FloatingPointError("training produced non-finite embedding values")
        return model

    def train_shard(self, model: EmbeddingMatrix, pairs: np.ndarray, rng: np.random.Generator) -> float:
        k = self.config.negatives
        negatives = self.sampler.sample(rng, len(pairs) * k).reshape(len(pairs), k)

        loss = 0.0
        for i, (center, context) in enumerate(pairs):
            lr = self.learning_rate(self.progress.add(1))
            loss += sgns_step(int(center), int(context), negatives[i], lr, model, self.config.debug)
        return loss


def as_pair_array(pairs: typing.Union[np.ndarray, typing.Iterable[tuple[int, int]]]) -> np.ndarray:
    if isinstance(pairs, np.ndarray):
        array = pairs.astype(np.int64, copy=False)
    else:
        array = np.array(list(pairs), dtype=np.int64)
    return array.reshape(-1, 2)


def train(pair_factory: PairFactory, sampler: NegativeSampler, config: SgnsConfig) -> EmbeddingMatrix:
    return SgnsTrainer(sampler, config).train(pair_factory)
