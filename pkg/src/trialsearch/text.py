"""Deterministic text pipeline shared by indexing and query processing.

Tokenization splits on every non-alphanumeric character, lowercases, and
keeps digit runs as tokens.  Queries and documents must pass through the
same tokenize -> stopword -> stem pipeline; `pipeline_hash` pins the
stoplist content and tokenizer version so an index can detect being
queried with a different pipeline.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .porter import porter_stem

TOKENIZER_VERSION = "ascii-alnum-split/1"

# Tokens longer than this are degenerate (run-on LLM output, base64 blobs)
# and are dropped outright.
MAX_TOKEN_LENGTH = 64

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Line-initial list markers: "1. ", "2) ", and "-"/"*" bullets.
_NUMBERED_MARKER_RE = re.compile(r"^[ \t]*\d+[.)][ \t]", re.MULTILINE)
_BULLET_MARKER_RE = re.compile(r"^[ \t]*[-*][ \t]*", re.MULTILINE)


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric tokens, in order; total over any input."""
    tokens = _TOKEN_RE.findall(text.lower())
    return [t for t in tokens if len(t) <= MAX_TOKEN_LENGTH]


def remove_stopwords(tokens: Iterable[str], stoplist: frozenset[str]) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a stoplist file: one lowercase word per line, '#' comments."""
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)


def default_stoplist() -> frozenset[str]:
    """The stoplist bundled with the package."""
    text = resources.files("trialsearch.data").joinpath("stopwords.txt").read_text("utf-8")
    words = set()
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def pipeline_hash(stoplist: frozenset[str]) -> str:
    """SHA-256 over the tokenizer version and the sorted stoplist."""
    h = hashlib.sha256()
    h.update(TOKENIZER_VERSION.encode("utf-8"))
    for word in sorted(stoplist):
        h.update(b"\n")
        h.update(word.encode("utf-8"))
    return h.hexdigest()


@dataclass(frozen=True)
class ProcessedQuery:
    """A search-ready query: stemmed, stopword-free terms in order."""

    terms: tuple[str, ...]
    pipeline: str | None = field(default=None, compare=False)

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)


def process_text(text: str, stoplist: frozenset[str]) -> list[str]:
    """tokenize -> remove stopwords -> Porter stem, preserving order."""
    return [porter_stem(t) for t in remove_stopwords(tokenize(text), stoplist)]


def process_query(text: str, stoplist: frozenset[str]) -> ProcessedQuery:
    """Process free text (e.g. an original clinical note) into a query."""
    return ProcessedQuery(tuple(process_text(text, stoplist)), pipeline_hash(stoplist))


def strip_list_markers(raw: str) -> str:
    """Delete line-initial numbered-list and bullet markers.

    Numerals that are not list markers (ages, dosages, lab values) are
    left for the tokenizer to keep.
    """
    text = _NUMBERED_MARKER_RE.sub("", raw)
    return _BULLET_MARKER_RE.sub("", text)


def postprocess_generated_query(raw: str, stoplist: frozenset[str]) -> ProcessedQuery:
    """Turn a verbatim LLM generation into a search-ready query.

    Marker removal runs before tokenization so the digits of "1." and "2)"
    never become terms, while in-text numerals survive the full pipeline.
    """
    cleaned = strip_list_markers(raw)
    return ProcessedQuery(tuple(process_text(cleaned, stoplist)), pipeline_hash(stoplist))


def build_query(
    strategy: str,
    original_note: str,
    generated: ProcessedQuery,
    stoplist: frozenset[str],
) -> ProcessedQuery:
    """Combine the original note and a generated query under a strategy.

    "generated_only" passes the generation through; "concat_original"
    prepends the processed note, keeping duplicate terms (concatenation,
    not set union).
    """
    if strategy == "generated_only":
        return generated
    if strategy == "concat_original":
        note_terms = tuple(process_text(original_note, stoplist))
        return ProcessedQuery(note_terms + generated.terms, pipeline_hash(stoplist))
    raise ValueError(f"unknown query strategy: {strategy!r}")
