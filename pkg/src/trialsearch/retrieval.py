"""BM25 ranking and RM3 pseudo-relevance feedback.

Scoring is term-at-a-time over the postings lists, accumulating into a
dense float64 array, so a document's score is always the same sum in the
same order regardless of how many documents the corpus holds.  Ranking
ties break by docno ascending, which together with the index's canonical
document order makes every ranking insertion-order independent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import PatientTopic, RunEntry
from .index import InvertedIndex
from .text import ProcessedQuery, process_query

logger = logging.getLogger(__name__)

DEFAULT_DEPTH = 1000


class RetrievalError(Exception):
    pass


class PipelineMismatchError(RetrievalError):
    """Query was processed with a different tokenizer/stoplist than the index."""


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class RM3Params:
    """fb_terms == 0 makes expansion the identity, useful as a null check."""

    fb_docs: int = 10
    fb_terms: int = 20
    mu: float = 2500.0  # accepted for config compatibility; the pinned
    # feedback weighting is unsmoothed and does not read it

    def __post_init__(self):
        if self.fb_docs < 1:
            raise ValueError(f"fb_docs must be >= 1, got {self.fb_docs}")
        if self.fb_terms < 0:
            raise ValueError(f"fb_terms must be >= 0, got {self.fb_terms}")


@dataclass(frozen=True)
class Ranking:
    """Descending-score (docno, score) pairs for one query."""

    entries: tuple[tuple[str, float], ...]
    topic_id: str | None = None

    def docnos(self) -> list[str]:
        return [d for d, _ in self.entries]


def _check_pipeline(index: InvertedIndex, query: ProcessedQuery) -> None:
    if query.pipeline is not None and query.pipeline != index.pipeline:
        raise PipelineMismatchError(
            "query pipeline hash does not match the index; "
            "reprocess the query with the index's stoplist"
        )


def idf(index: InvertedIndex, term: str) -> float:
    """ln(1 + (N - df + 0.5) / (df + 0.5)); positive for every df <= N."""
    entry = index.postings.get(term)
    df = len(entry[0]) if entry is not None else 0
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def score_all(
    index: InvertedIndex, query: ProcessedQuery, params: BM25Params = BM25Params()
) -> np.ndarray:
    """BM25 scores for every document, as a dense float64 array.

    Query terms contribute with multiplicity: a term appearing twice in
    the query adds its document contribution twice.
    """
    _check_pipeline(index, query)
    scores = np.zeros(index.doc_count, dtype=np.float64)
    if not query.terms:
        return scores
    norm = params.k1 * (
        1.0 - params.b + params.b * index.doc_lengths / index.avgdl
    )  # float64 array, one entry per document
    for term in query.terms:
        entry = index.postings.get(term)
        if entry is None:
            continue
        ords, tfs = entry
        w = idf(index, term)
        tf = tfs.astype(np.float64)
        scores[ords] += w * tf * (params.k1 + 1.0) / (tf + norm[ords])
    return scores


def bm25_score(
    index: InvertedIndex,
    query: ProcessedQuery,
    docno: str,
    params: BM25Params = BM25Params(),
) -> float:
    """Score of one document, bitwise identical to its score_all entry."""
    ordinal = index.ordinal(docno)
    if ordinal is None:
        raise RetrievalError(f"unknown docno: {docno}")
    return float(score_all(index, query, params)[ordinal])


def search(
    index: InvertedIndex,
    query: ProcessedQuery,
    k: int = DEFAULT_DEPTH,
    params: BM25Params = BM25Params(),
) -> Ranking:
    """Top-k by (score desc, docno asc); zero-score documents are excluded."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = score_all(index, query, params)
    (cand,) = np.nonzero(scores > 0.0)
    if cand.size == 0:
        return Ranking(())
    # lexsort sorts by the last key first: score descending, then docno
    docno_arr = index._docno_arr()
    order = np.lexsort((docno_arr[cand], -scores[cand]))
    top = cand[order[:k]]
    return Ranking(tuple((index.docnos[i], float(scores[i])) for i in top))


def rm3_expand(
    index: InvertedIndex,
    query: ProcessedQuery,
    params: RM3Params,
    stoplist: frozenset[str],
) -> ProcessedQuery:
    """Expand a query with relevance-model terms from pseudo-feedback.

    Feedback documents are the BM25 top fb_docs.  Their weights are a
    softmax over their BM25 scores.  Candidate terms score
    sum over feedback docs of weight * tf(t, d) / dl(d); stopwords and
    terms already in the query are excluded; the top fb_terms (ties by
    term ascending) are concatenated onto the original query.
    """
    _check_pipeline(index, query)
    if params.fb_terms == 0 or not query.terms:
        return query
    scores = score_all(index, query)
    (cand,) = np.nonzero(scores > 0.0)
    if cand.size == 0:
        return query
    docno_arr = index._docno_arr()
    order = np.lexsort((docno_arr[cand], -scores[cand]))
    fb_ordinals = cand[order[: params.fb_docs]]

    fb_scores = scores[fb_ordinals]
    shifted = np.exp(fb_scores - fb_scores.max())
    weights = shifted / shifted.sum()
    weight_of = {int(o): float(w) for o, w in zip(fb_ordinals, weights)}
    dl = index.doc_lengths

    query_terms = set(query.terms)
    fb_set = np.sort(fb_ordinals)
    candidates: dict[str, float] = {}
    for term, (ords, tfs) in index.postings.items():
        if term in stoplist or term in query_terms:
            continue
        mask = np.isin(ords, fb_set)
        if not mask.any():
            continue
        total = 0.0
        for o, tf in zip(ords[mask], tfs[mask]):
            total += weight_of[int(o)] * float(tf) / float(dl[int(o)])
        candidates[term] = total

    ranked = sorted(candidates.items(), key=lambda kv: (-kv[1], kv[0]))
    expansion = tuple(term for term, _ in ranked[: params.fb_terms])
    return ProcessedQuery(query.terms + expansion, query.pipeline)


VALID_STRATEGIES = ("original", "generated", "concat", "original+rm3")


def run_topics(
    index: InvertedIndex,
    topics: Sequence[PatientTopic],
    strategy: str,
    stoplist: frozenset[str],
    generated: Mapping[str, ProcessedQuery] | None = None,
    bm25: BM25Params = BM25Params(),
    rm3: RM3Params | None = None,
    k: int = DEFAULT_DEPTH,
    tag: str = "run",
) -> list[RunEntry]:
    """Produce a full run over topics under one query strategy.

    "original" searches the processed note; "generated" searches the
    supplied generation for each topic; "concat" searches note terms
    followed by generated terms; "original+rm3" expands the processed
    note before searching.  Topics whose final query is empty contribute
    no entries (logged as a warning).  Output is grouped by topic in
    ascending topic-id order.
    """
    if strategy not in VALID_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {VALID_STRATEGIES}")
    if strategy in ("generated", "concat") and generated is None:
        raise RetrievalError(f"strategy {strategy!r} requires generated queries")
    if strategy == "original+rm3" and rm3 is None:
        rm3 = RM3Params()

    entries: list[RunEntry] = []
    for topic in sorted(topics, key=lambda t: t.topic_id):
        if strategy in ("generated", "concat"):
            assert generated is not None
            if topic.topic_id not in generated:
                raise RetrievalError(
                    f"no generated query for topic {topic.topic_id}"
                )
        if strategy == "original":
            query = process_query(topic.note_text, stoplist)
        elif strategy == "generated":
            query = generated[topic.topic_id]
        elif strategy == "concat":
            note = process_query(topic.note_text, stoplist)
            gen = generated[topic.topic_id]
            _check_pipeline(index, gen)
            query = ProcessedQuery(note.terms + gen.terms, note.pipeline)
        else:
            note = process_query(topic.note_text, stoplist)
            query = rm3_expand(index, note, rm3, stoplist)
        if not query.terms:
            logger.warning("topic %s: empty query, no results", topic.topic_id)
            continue
        ranking = search(index, query, k, bm25)
        for rank, (docno, score) in enumerate(ranking.entries, start=1):
            entries.append(RunEntry(topic.topic_id, docno, rank, score, tag))
    return entries
