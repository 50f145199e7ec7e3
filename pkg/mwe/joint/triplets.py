import logging
import typing
from dataclasses import dataclass, field

import numpy as np

from mwe.features.clips import ClipFeatures
from mwe.joint.config import Supervision

logger = logging.getLogger(__name__)


@dataclass
class SupervisionRecord:
    clip: ClipFeatures
    tags: list[str] = field(default_factory=list)
    artist_id: str = ""
    track_id: str = ""

    def positives(self, supervision: Supervision) -> list[str]:
        if supervision == Supervision.TAG:
            return self.tags
        if supervision == Supervision.ARTIST:
            return [self.artist_id]
        return [self.track_id]

    def tokens(self, supervisions: typing.Iterable[Supervision]) -> list[str]:
        return [token for supervision in supervisions for token in self.positives(supervision)]


class Triplet(typing.NamedTuple):
    record: SupervisionRecord
    positive: str
    negative: str
    supervision: Supervision


class PrototypePools:
    """Distinct prototype tokens per supervision type, collected over the whole dataset."""

    def __init__(self, records: typing.Iterable[SupervisionRecord]) -> None:
        pools: dict[Supervision, set[str]] = {supervision: set() for supervision in Supervision}
        for record in records:
            for supervision in Supervision:
                pools[supervision].update(record.positives(supervision))
        # Sorted so that draws depend only on the seed.
        self.pools = {supervision: sorted(tokens) for supervision, tokens in pools.items()}

    def __getitem__(self, supervision: Supervision) -> list[str]:
        return self.pools[supervision]


def sample_triplets(records: typing.Sequence[SupervisionRecord], supervision: Supervision,
                    rng: np.random.Generator, pools: typing.Optional[PrototypePools] = None) -> list[Triplet]:
    """One triplet per record: a positive prototype of the record, and a negative drawn uniformly from the pool
    minus every positive of that record. Records without a positive (untagged tracks) contribute nothing.
    """
    pools = pools or PrototypePools(records)
    pool = pools[supervision]
    if len(pool) < 2:
        raise ValueError(f"{supervision.label} prototype pool needs at least 2 elements, has {len(pool)}")

    triplets = []
    for record in records:
        positives = record.positives(supervision)
        if len(positives) == 0:
            continue

        positive = positives[int(rng.integers(len(positives)))]

        excluded = set(positives)
        if len(excluded.intersection(pool)) >= len(pool):
            logger.debug("no negative available for record %s under %s", record.clip.clip_id, supervision.label)
            continue

        # Rejection sampling keeps the draw uniform over the allowed prototypes.
        negative = pool[int(rng.integers(len(pool)))]
        while negative in excluded:
            negative = pool[int(rng.integers(len(pool)))]

        triplets.append(Triplet(record, positive, negative, supervision))
    return triplets
