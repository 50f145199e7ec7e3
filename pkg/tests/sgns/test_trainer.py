import numpy as np
import pytest

from ..testing_utils import corpus_config
from mwe.corpus.paragraphs import pair_array
from mwe.sgns.config import SgnsConfig
from mwe.sgns.model import sigmoid
from mwe.sgns.sampler import NegativeSampler
from mwe.sgns.trainer import SgnsTrainer, train
from utils.utils import DataFormatError, ConfigError

# Tokens 0 and 1 alternate; tokens 2 and 3 never occur in the text and only serve as noise.
ALTERNATING = np.array([0, 1] * 100)
NOISE_COUNTS = [100, 100, 10000, 10000]


def alternating_pairs(epoch, worker, workers):
    rng = np.random.default_rng([epoch, worker])
    return pair_array(ALTERNATING, corpus_config(window_size=1), rng)[worker::workers]


def small_config(**overrides):
    values = {"dim": 8, "epochs": 20, "negatives": 1, "initial_lr": 0.05, "seed": 0, "dtype": "float64"}
    values.update(overrides)
    return SgnsConfig(**values)


def test_two_token_convergence():
    model = train(alternating_pairs, NegativeSampler(NOISE_COUNTS), small_config())

    assert sigmoid(np.dot(model.input_vectors[0], model.output_vectors[1])) > 0.9
    assert sigmoid(np.dot(model.input_vectors[1], model.output_vectors[0])) > 0.9


def test_loss_decreases():
    # Noise drawn only from the two tokens that never occur, so no negative collides with a true context.
    noise_only = NegativeSampler([0, 0, 1, 1])
    runs = []
    for seed in range(5):
        trainer = SgnsTrainer(noise_only, small_config(epochs=8, seed=seed))
        trainer.train(alternating_pairs)
        assert len(trainer.epoch_losses) == 8
        runs.append(trainer.epoch_losses)

    losses = np.mean(runs, axis=0)
    assert all(losses[i + 1] <= losses[i] + 1e-6 for i in range(len(losses) - 1))
    assert losses[-1] < 0.5 * losses[0]


def test_empty_corpus():
    with pytest.raises(DataFormatError) as e:
        train(lambda epoch, worker, workers: [], NegativeSampler([1, 1]), small_config())
    assert str(e.value) == "empty corpus"


def test_single_worker_is_deterministic():
    first = train(alternating_pairs, NegativeSampler(NOISE_COUNTS), small_config(dtype="float32", epochs=3))
    second = train(alternating_pairs, NegativeSampler(NOISE_COUNTS), small_config(dtype="float32", epochs=3))

    assert np.array_equal(first.input_vectors, second.input_vectors)
    assert np.array_equal(first.output_vectors, second.output_vectors)


def test_hogwild_workers_stay_finite():
    trainer = SgnsTrainer(NegativeSampler(NOISE_COUNTS), small_config(workers=3, epochs=5))
    model = trainer.train(alternating_pairs)

    assert model.is_finite()
    assert trainer.progress.value == trainer.planned_pairs
    assert sigmoid(np.dot(model.input_vectors[0], model.output_vectors[1])) > 0.5


def test_learning_rate_schedule():
    trainer = SgnsTrainer(NegativeSampler([1, 1]), small_config(initial_lr=0.025, final_lr_fraction=0.004))
    trainer.planned_pairs = 1000

    assert trainer.learning_rate(0) == pytest.approx(0.025)
    assert trainer.learning_rate(500) == pytest.approx(0.025 * (1 - 0.996 / 2))
    assert trainer.learning_rate(1000) == pytest.approx(0.0001)
    # Clamped once the planned total is passed.
    assert trainer.learning_rate(5000) == pytest.approx(0.0001)


def test_defaults():
    config = SgnsConfig.from_dict()

    assert (config.dim, config.epochs, config.negatives) == (300, 15, 20)
    assert config.initial_lr == 0.025
    assert config.final_lr_fraction == pytest.approx(1e-4 / 0.025)


@pytest.mark.parametrize("overrides, message", [
    ({"dim": 0}, "invalid configuration: dim must be >= 1"),
    ({"negatives": 0}, "invalid configuration: negatives must be >= 1"),
    ({"final_lr_fraction": 0.0}, "invalid configuration: final_lr_fraction must be in (0, 1]"),
    ({"window": 5}, "invalid configuration: unknown keys in 'sgns': window"),
])
def test_invalid_config(overrides, message):
    with pytest.raises(ConfigError) as e:
        SgnsConfig.from_dict(overrides)
    assert str(e.value) == message
