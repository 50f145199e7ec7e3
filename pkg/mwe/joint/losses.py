import typing

import numpy as np

from mwe.embedding.word_embedding import cosine_similarity
from mwe.joint.config import JointConfig, Supervision

# Norm floor for batched cosines; keeps a collapsed vector from producing NaN gradients.
NORM_EPSILON = 1e-12


def similarity(a: np.ndarray, p: np.ndarray) -> float:
    return cosine_similarity(a, p)


def triplet_loss(anchor: np.ndarray, pos: np.ndarray, neg: np.ndarray, margin: float) -> float:
    """max(0, margin - sim(anchor, pos) + sim(anchor, neg))"""
    return max(0.0, margin - similarity(anchor, pos) + similarity(anchor, neg))


def total_loss(losses: typing.Mapping[Supervision, float], config: JointConfig) -> float:
    """Weighted sum of the per-supervision losses; a zero weight drops its term."""
    return sum(config.weight(supervision) * loss for supervision, loss in losses.items()
               if config.weight(supervision) > 0)


def batched_cosine(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise cosine of u and v, plus d cos / d u and d cos / d v."""
    norm_u = np.maximum(np.linalg.norm(u, axis=1, keepdims=True), NORM_EPSILON)
    norm_v = np.maximum(np.linalg.norm(v, axis=1, keepdims=True), NORM_EPSILON)
    unit_u = u / norm_u
    unit_v = v / norm_v
    cos = np.sum(unit_u * unit_v, axis=1, keepdims=True)

    grad_u = (unit_v - cos * unit_u) / norm_u
    grad_v = (unit_u - cos * unit_v) / norm_v
    return cos[:, 0], grad_u, grad_v


def hinge_with_gradients(anchors: np.ndarray, positives: np.ndarray, negatives: np.ndarray, margin: float,
                         weights: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Weighted sum of triplet hinge losses, with gradients for anchors, positives and negatives.

    The subgradient at the hinge kink (margin - sim+ + sim- == 0) is taken as zero.
    """
    cos_pos, grad_anchor_pos, grad_pos = batched_cosine(anchors, positives)
    cos_neg, grad_anchor_neg, grad_neg = batched_cosine(anchors, negatives)

    violation = margin - cos_pos + cos_neg
    active = violation > 0
    loss = float(np.sum(weights * np.where(active, violation, 0.0)))

    scale = (weights * active)[:, np.newaxis]
    grad_anchors = scale * (grad_anchor_neg - grad_anchor_pos)
    return loss, grad_anchors, -scale * grad_pos, scale * grad_neg
