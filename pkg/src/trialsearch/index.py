"""In-memory inverted index with a checksummed snapshot format.

Documents are assigned ordinals in sorted-docno order at build time, so
two corpora with the same records produce identical indexes regardless of
insertion order.  Postings are parallel numpy arrays (ordinals, term
frequencies) sorted by ordinal; terms are stored in sorted order.

Snapshot layout: 8-byte magic, 2-byte big-endian version, 32-byte SHA-256
of the payload, then a zlib-compressed canonical-JSON payload.  The
checksum makes truncation and bit rot detectable before deserialization.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import ClinicalTrialDoc
from .text import pipeline_hash, process_text

MAGIC = b"TRIALIDX"
VERSION = 1


class IndexStoreError(Exception):
    """Base class for index build and persistence failures."""


class IndexBuildError(IndexStoreError):
    pass


class IndexFormatError(IndexStoreError):
    pass


class IndexCorruptionError(IndexStoreError):
    pass


@dataclass
class InvertedIndex:
    """postings: term -> (ordinals int32 asc, tfs int32), parallel arrays."""

    postings: dict[str, tuple[np.ndarray, np.ndarray]]
    docnos: list[str]
    doc_lengths: np.ndarray
    pipeline: str

    @property
    def doc_count(self) -> int:
        return len(self.docnos)

    @property
    def avgdl(self) -> float:
        return float(self.doc_lengths.mean())

    @property
    def vocabulary_size(self) -> int:
        return len(self.postings)

    def ordinal(self, docno: str) -> int | None:
        # docnos are sorted, so membership is a binary search
        i = int(np.searchsorted(self._docno_arr(), docno))
        if i < len(self.docnos) and self.docnos[i] == docno:
            return i
        return None

    def _docno_arr(self) -> np.ndarray:
        arr = getattr(self, "_docnos_np", None)
        if arr is None:
            arr = np.array(self.docnos)
            object.__setattr__(self, "_docnos_np", arr)
        return arr


def build_index(
    docs: Iterable[ClinicalTrialDoc], stoplist: frozenset[str]
) -> InvertedIndex:
    """Index the searchable text of each document.

    Duplicate docnos and empty corpora are build errors.  Documents whose
    searchable text is empty still occupy an ordinal (length 0).
    """
    counts: dict[str, Counter] = {}
    for doc in docs:
        if doc.docno in counts:
            raise IndexBuildError(f"duplicate docno: {doc.docno}")
        counts[doc.docno] = Counter(process_text(doc.indexed_text(), stoplist))
    if not counts:
        raise IndexBuildError("cannot build an index over an empty corpus")

    docnos = sorted(counts)
    doc_lengths = np.array(
        [sum(counts[d].values()) for d in docnos], dtype=np.int64
    )

    term_postings: dict[str, list[tuple[int, int]]] = {}
    for ordinal, docno in enumerate(docnos):
        for term, tf in counts[docno].items():
            term_postings.setdefault(term, []).append((ordinal, tf))

    postings: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for term in sorted(term_postings):
        pairs = term_postings[term]  # already in ascending ordinal order
        ords = np.array([p[0] for p in pairs], dtype=np.int32)
        tfs = np.array([p[1] for p in pairs], dtype=np.int32)
        postings[term] = (ords, tfs)

    return InvertedIndex(postings, docnos, doc_lengths, pipeline_hash(stoplist))


def term_stats(index: InvertedIndex, term: str) -> tuple[int, int]:
    """(document frequency, collection frequency); (0, 0) for unseen terms."""
    entry = index.postings.get(term)
    if entry is None:
        return (0, 0)
    ords, tfs = entry
    return (len(ords), int(tfs.sum()))


def persist_index(index: InvertedIndex, path: str | Path) -> None:
    payload_obj = {
        "pipeline": index.pipeline,
        "docnos": index.docnos,
        "doc_lengths": index.doc_lengths.tolist(),
        "postings": {
            term: [ords.tolist(), tfs.tolist()]
            for term, (ords, tfs) in index.postings.items()
        },
    }
    payload = zlib.compress(
        json.dumps(payload_obj, sort_keys=True, separators=(",", ":")).encode("utf-8"),
        level=9,
    )
    digest = hashlib.sha256(payload).digest()
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(VERSION.to_bytes(2, "big"))
        fh.write(digest)
        fh.write(payload)


def open_index(path: str | Path) -> InvertedIndex:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 2 + 32 or not raw.startswith(MAGIC):
        raise IndexFormatError(f"{path}: not an index snapshot")
    version = int.from_bytes(raw[len(MAGIC) : len(MAGIC) + 2], "big")
    if version != VERSION:
        raise IndexFormatError(
            f"{path}: snapshot version {version} unsupported (expected {VERSION}); rebuild the index"
        )
    digest = raw[len(MAGIC) + 2 : len(MAGIC) + 34]
    payload = raw[len(MAGIC) + 34 :]
    if hashlib.sha256(payload).digest() != digest:
        raise IndexCorruptionError(f"{path}: checksum mismatch (truncated or corrupted)")
    obj = json.loads(zlib.decompress(payload).decode("utf-8"))
    postings = {
        term: (np.array(pair[0], dtype=np.int32), np.array(pair[1], dtype=np.int32))
        for term, pair in sorted(obj["postings"].items())
    }
    return InvertedIndex(
        postings=postings,
        docnos=list(obj["docnos"]),
        doc_lengths=np.array(obj["doc_lengths"], dtype=np.int64),
        pipeline=obj["pipeline"],
    )
