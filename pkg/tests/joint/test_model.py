import numpy as np
import pytest

from ..testing_utils import random_embedding, central_difference, relative_error
from mwe.features.clips import ClipFeatures
from mwe.joint.config import JointConfig, Supervision
from mwe.joint.encoders import AudioEncoder, SemanticEncoder, track_embedding
from mwe.joint.losses import triplet_loss
from mwe.joint.trainer import JointModel, NesterovSGD
from mwe.joint.triplets import SupervisionRecord, PrototypePools, sample_triplets

TAGS = ["t0", "t1", "t2", "t3"]
ARTISTS = ["a0", "a1", "a2"]
TRACKS = ["r0", "r1", "r2"]


def random_model(rng, margin=3.0):
    """A margin of 3 keeps every hinge active, away from the kink."""
    emb = random_embedding(TAGS + ARTISTS + TRACKS, 4, rng)
    weights = rng.uniform(0.2, 2.0, size=3)
    config = JointConfig.from_dict({
        "joint_dim": 3, "hidden": 5, "margin": margin,
        "lambda_tag": float(weights[0]), "lambda_artist": float(weights[1]), "lambda_track": float(weights[2]),
    })
    audio = AudioEncoder.initialize(6, 5, 3, rng)
    audio.b1 += rng.normal(size=5)
    audio.b2 += rng.normal(size=3)
    semantic = SemanticEncoder.initialize(emb, 3, rng)
    semantic.c += rng.normal(size=3)

    records = [
        SupervisionRecord(ClipFeatures(f"{track}#0", track, rng.normal(size=6)),
                          [str(tag) for tag in rng.choice(TAGS, size=2, replace=False)], artist, track)
        for artist, track in zip(ARTISTS, TRACKS)
    ]
    pools = PrototypePools(records)
    triplets = [triplet for supervision in Supervision for triplet in sample_triplets(records, supervision, rng, pools)]
    return JointModel(audio, semantic, config), triplets


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(100):
        model, triplets = random_model(rng)
        _, gradients = model.loss_and_gradients(triplets)

        for name, parameter in model.parameters().items():
            numerical = central_difference(lambda: model.loss(triplets), parameter)
            assert relative_error(gradients[name], numerical) < 1e-5, name


def test_loss_is_weighted_mean_per_supervision():
    model, triplets = random_model(np.random.default_rng(1), margin=0.2)

    expected = 0.0
    for supervision in Supervision:
        terms = [
            triplet_loss(
                model.audio.encode(triplet.record.clip.vector),
                model.semantic.encode([triplet.positive])[0],
                model.semantic.encode([triplet.negative])[0],
                0.2,
            )
            for triplet in triplets if triplet.supervision == supervision
        ]
        expected += model.config.weight(supervision) * np.mean(terms)

    assert model.loss(triplets) == pytest.approx(expected)


def test_empty_triplets():
    model, _ = random_model(np.random.default_rng(2))
    loss, gradients = model.loss_and_gradients([])

    assert loss == 0.0
    assert all(not np.any(gradient) for gradient in gradients.values())


def test_triplet_negatives_exclude_positives():
    rng = np.random.default_rng(3)
    records = [
        SupervisionRecord(ClipFeatures(f"c{i}", f"r{i}", np.zeros(2)), ["rock", "pop"] if i % 2 else ["jazz"],
                          f"a{i % 3}", f"r{i}")
        for i in range(20)
    ]
    pools = PrototypePools(records)
    for _ in range(50):
        for supervision in Supervision:
            for triplet in sample_triplets(records, supervision, rng, pools):
                positives = triplet.record.positives(supervision)
                assert triplet.positive in positives
                assert triplet.negative not in positives
                assert triplet.negative in pools[supervision]


def test_untagged_records_contribute_no_tag_triplets():
    records = [
        SupervisionRecord(ClipFeatures("c0", "r0", np.zeros(2)), [], "a0", "r0"),
        SupervisionRecord(ClipFeatures("c1", "r1", np.zeros(2)), ["rock"], "a1", "r1"),
        SupervisionRecord(ClipFeatures("c2", "r2", np.zeros(2)), ["jazz"], "a1", "r2"),
    ]
    triplets = sample_triplets(records, Supervision.TAG, np.random.default_rng(0))
    assert [triplet.record.clip.clip_id for triplet in triplets] == ["c1", "c2"]


def test_pool_too_small():
    records = [SupervisionRecord(ClipFeatures("c0", "r0", np.zeros(2)), ["rock"], "a0", "r0")]
    with pytest.raises(ValueError) as e:
        sample_triplets(records, Supervision.ARTIST, np.random.default_rng(0))
    assert str(e.value) == "Artist prototype pool needs at least 2 elements, has 1"


def test_nesterov_step():
    parameter = np.zeros(1)
    optimizer = NesterovSGD({"p": parameter}, lr=0.1, momentum=0.9, decay=0.0)
    gradient = {"p": np.ones(1)}

    optimizer.step(gradient)
    assert parameter[0] == pytest.approx(-0.1 * 1.9)
    optimizer.step(gradient)
    assert parameter[0] == pytest.approx(-0.1 * 1.9 - 0.1 * (0.9 * 1.9 + 1))


def test_nesterov_decay():
    optimizer = NesterovSGD({"p": np.zeros(1)}, lr=0.1, momentum=0.0, decay=0.5)
    for _ in range(4):
        optimizer.step({"p": np.ones(1)})
    assert optimizer.current_lr == pytest.approx(0.1 / 3)


def test_track_embedding_is_mean_over_clips():
    rng = np.random.default_rng(4)
    audio = AudioEncoder.initialize(3, 4, 2, rng)
    vectors = rng.normal(size=(3, 3))
    clips = [ClipFeatures(f"r#{i}", "r", vector) for i, vector in enumerate(vectors)]

    assert np.allclose(track_embedding(audio, clips), np.mean([audio.encode(v) for v in vectors], axis=0))
    with pytest.raises(ValueError):
        track_embedding(audio, [])
