import json
import typing
from dataclasses import dataclass, field

import numpy as np

METRIC_CONVENTIONS = {"dcg_gain": "linear", "auc_ties": "midrank"}


@dataclass
class RankingReport:
    """Per-query scores of one metric and their mean.

    A report may instead group sub-reports in `breakdown` (one per direction or per K); its aggregate is then set
    explicitly by the task that built it, or left as None.
    """
    metric: str
    scores: dict[str, float] = field(default_factory=dict)
    excluded: dict[str, str] = field(default_factory=dict)
    breakdown: dict[str, "RankingReport"] = field(default_factory=dict)
    aggregate: typing.Optional[float] = None
    metadata: dict[str, typing.Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.aggregate is None and len(self.scores) > 0:
            # Sorted so the summation order never depends on insertion order.
            self.aggregate = float(np.mean([self.scores[query] for query in sorted(self.scores)]))

    @property
    def query_count(self) -> int:
        return len(self.scores)

    @property
    def excluded_count(self) -> int:
        return len(self.excluded)

    def to_dict(self) -> dict[str, typing.Any]:
        result: dict[str, typing.Any] = {
            "metric": self.metric,
            "aggregate": self.aggregate,
            "query_count": self.query_count,
            "scores": dict(self.scores),
            "excluded_count": self.excluded_count,
            "excluded": dict(self.excluded),
        }
        if len(self.breakdown) > 0:
            result["breakdown"] = {name: report.to_dict() for name, report in self.breakdown.items()}
        if len(self.metadata) > 0:
            result["metadata"] = dict(self.metadata)
        return result

    def to_json(self, config: typing.Optional[dict[str, typing.Any]] = None) -> str:
        content = self.to_dict()
        content["metadata"] = {**METRIC_CONVENTIONS, **self.metadata}
        if config is not None:
            content["config"] = config
        return json.dumps(content, sort_keys=True, indent=2) + "\n"

    def __str__(self) -> str:
        aggregate = "n/a" if self.aggregate is None else f"{self.aggregate:.4f}"
        lines = [f"{self.metric}: {aggregate} ({self.query_count} queries, {self.excluded_count} excluded)"]
        for name, report in self.breakdown.items():
            lines.append(f"  {name}: " + str(report).split(": ", 1)[1])
        return "\n".join(lines)
