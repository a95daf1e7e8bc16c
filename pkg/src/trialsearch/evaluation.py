"""Ranking-quality measures over graded judgments.

Grades: 2 = eligible, 1 = excluded, 0 = not relevant.  nDCG uses the
grade itself as gain; every other measure binarizes first, counting only
grade 2 as relevant.  Unjudged retrieved documents count as non-relevant
for the standard measures; the condensed variants drop them from the
ranking before measuring, which can only help a run, never hurt it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Qrels, RunEntry

logger = logging.getLogger(__name__)


class EvaluationError(Exception):
    pass


def binarize(grade: int | None) -> int:
    """Eligible (2) -> 1; excluded (1), not relevant (0), unjudged -> 0."""
    if grade is not None and grade not in (0, 1, 2):
        raise ValueError(f"grade out of range: {grade!r}")
    return 1 if grade == 2 else 0


@dataclass(frozen=True)
class JudgedRanking:
    """A ranked docno list annotated with grades (None = unjudged)."""

    topic_id: str
    entries: tuple[tuple[str, int | None], ...]

    def condensed(self) -> "JudgedRanking":
        """Drop unjudged entries, closing the gaps."""
        return JudgedRanking(
            self.topic_id, tuple(e for e in self.entries if e[1] is not None)
        )


def judge(topic_id: str, docnos: Sequence[str], qrels: Qrels) -> JudgedRanking:
    return JudgedRanking(
        topic_id, tuple((d, qrels.grade(topic_id, d)) for d in docnos)
    )


GAIN_FUNCTIONS = {
    "linear": lambda g: float(g),
    "exponential": lambda g: float(2**g - 1),
}


def _dcg(grades: Sequence[int], k: int, gain) -> float:
    return sum(gain(g) / math.log2(i + 1) for i, g in enumerate(grades[:k], start=1))


def ndcg_at_k(
    ranking: JudgedRanking, qrels: Qrels, k: int = 10, gain: str = "linear"
) -> float:
    """Graded nDCG with log2(rank + 1) discount.

    Default gain is the grade itself; "exponential" uses 2^grade - 1.
    The ideal ordering comes from the topic's full qrels, so a run is
    measured against everything judged relevant, not just what it found.
    Topics with an all-zero ideal score 0.
    """
    gain_fn = GAIN_FUNCTIONS[gain]
    gains = [g if g is not None else 0 for _, g in ranking.entries]
    ideal = sorted(qrels.for_topic(ranking.topic_id).values(), reverse=True)
    idcg = _dcg(ideal, k, gain_fn)
    if idcg == 0.0:
        return 0.0
    return _dcg(gains, k, gain_fn) / idcg


def precision_at_k(ranking: JudgedRanking, k: int = 10) -> float:
    rel = sum(binarize(g) for _, g in ranking.entries[:k])
    return rel / k


def recall_at_k(ranking: JudgedRanking, qrels: Qrels, k: int = 25) -> float:
    """Fraction of the topic's eligible documents found in the top k."""
    total = sum(
        1 for g in qrels.for_topic(ranking.topic_id).values() if binarize(g)
    )
    if total == 0:
        return 0.0
    found = sum(binarize(g) for _, g in ranking.entries[:k])
    return found / total


def reciprocal_rank(ranking: JudgedRanking) -> float:
    for i, (_, g) in enumerate(ranking.entries, start=1):
        if binarize(g):
            return 1.0 / i
    return 0.0


def bpref(ranking: JudgedRanking, qrels: Qrels) -> float:
    """Judged-only preference measure.

    R = judged relevant, Nnr = judged non-relevant for the topic.  Each
    retrieved relevant document contributes 1 - min(n_above, R) /
    min(R, Nnr), where n_above counts judged non-relevant documents
    ranked above it.  Topics with R = 0 score 0; with Nnr = 0 every
    retrieved relevant document contributes 1.
    """
    judgments = qrels.for_topic(ranking.topic_id)
    r_total = sum(1 for g in judgments.values() if binarize(g))
    n_total = sum(1 for g in judgments.values() if not binarize(g))
    if r_total == 0:
        return 0.0
    denom = min(r_total, n_total)
    acc = 0.0
    nonrel_above = 0
    for _, g in ranking.entries:
        if g is None:
            continue
        if binarize(g):
            if denom == 0:
                acc += 1.0
            else:
                acc += 1.0 - min(nonrel_above, r_total) / denom
        else:
            nonrel_above += 1
    return acc / r_total


MEASURES = (
    "nDCG@10",
    "P@10",
    "R@25",
    "MRR",
    "Bpref",
    "nDCG@10_condensed",
    "P@10_condensed",
)

DEFAULT_MEASURES = MEASURES
RAW_MEASURES = tuple(m for m in MEASURES if not m.endswith("_condensed"))


def measure_value(
    name: str, ranking: JudgedRanking, qrels: Qrels, gain: str = "linear"
) -> float:
    """One measure for one topic; Bpref is judged-only by construction
    so it has no condensed variant."""
    if name == "nDCG@10":
        return ndcg_at_k(ranking, qrels, 10, gain)
    if name == "P@10":
        return precision_at_k(ranking, 10)
    if name == "R@25":
        return recall_at_k(ranking, qrels, 25)
    if name == "MRR":
        return reciprocal_rank(ranking)
    if name == "Bpref":
        return bpref(ranking, qrels)
    if name == "nDCG@10_condensed":
        return ndcg_at_k(ranking.condensed(), qrels, 10, gain)
    if name == "P@10_condensed":
        return precision_at_k(ranking.condensed(), 10)
    raise EvaluationError(f"unknown measure: {name}")


@dataclass(frozen=True)
class MetricReport:
    """Per-topic and mean scores; topics are the qrels topic set."""

    measures: tuple[str, ...]
    per_topic: dict[str, dict[str, float]]
    aggregate: dict[str, float] = field(default_factory=dict)
    gain: str = "linear"

    def to_dict(self) -> dict:
        return {
            "measures": list(self.measures),
            "gain": self.gain,
            "per_topic": {t: dict(v) for t, v in sorted(self.per_topic.items())},
            "aggregate": dict(self.aggregate),
        }


def evaluate_run(
    run: Sequence[RunEntry],
    qrels: Qrels,
    measures: Sequence[str] = DEFAULT_MEASURES,
    gain: str = "linear",
) -> MetricReport:
    """Score a run against qrels.

    The topic set is the qrels'.  Qrels topics missing from the run score
    0 on every measure; run topics absent from the qrels are excluded
    with a warning.  The aggregate is the arithmetic mean over the qrels
    topic set.
    """
    for m in measures:
        if m not in MEASURES:
            raise EvaluationError(f"unknown measure: {m}")
    if gain not in GAIN_FUNCTIONS:
        raise EvaluationError(f"unknown gain function: {gain}")
    if not run:
        logger.warning("empty run: every topic scores 0")

    by_topic: dict[str, list[str]] = {}
    for e in run:
        by_topic.setdefault(e.topic_id, []).append(e.docno)

    qrels_topics = qrels.topic_ids()
    extra = sorted(set(by_topic) - set(qrels_topics))
    if extra:
        logger.warning(
            "run has %d topic(s) without judgments, excluded: %s",
            len(extra),
            ", ".join(extra),
        )

    per_topic: dict[str, dict[str, float]] = {}
    for topic_id in qrels_topics:
        ranking = judge(topic_id, by_topic.get(topic_id, []), qrels)
        per_topic[topic_id] = {
            m: measure_value(m, ranking, qrels, gain) for m in measures
        }

    n = len(qrels_topics)
    aggregate = {
        m: sum(per_topic[t][m] for t in qrels_topics) / n for m in measures
    }
    return MetricReport(tuple(measures), per_topic, aggregate, gain)
