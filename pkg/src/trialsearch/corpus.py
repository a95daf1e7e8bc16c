"""Canonical data model and file formats.

Covers registry trial records (legacy ClinicalTrials.gov XML and a flat
JSONL fallback), patient topics (TREC XML / JSONL / TSV), qrels, and the
six-column TREC run format.  All parsers either return validated objects
or raise a typed error; they never return partial data.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple


class CorpusError(Exception):
    """Base class for corpus parsing and validation failures."""


class XmlParseError(CorpusError):
    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class SchemaError(CorpusError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{message}: {path}")
        self.path = path


class TopicError(CorpusError):
    pass


class QrelsError(CorpusError):
    pass


class RunFormatError(CorpusError):
    pass


@dataclass(frozen=True)
class ClinicalTrialDoc:
    """One registry entry; absent sections are empty strings, never None."""

    docno: str
    title: str = ""
    conditions: tuple[str, ...] = ()
    brief_summary: str = ""
    detailed_description: str = ""
    eligibility_text: str = ""
    gender: str | None = None
    min_age: str | None = None
    max_age: str | None = None

    def __post_init__(self):
        if not self.docno:
            raise SchemaError("document has empty docno", "docno")

    def indexed_text(self) -> str:
        """The searchable text: title, conditions, summaries, eligibility."""
        parts = [self.title, *self.conditions, self.brief_summary,
                 self.detailed_description, self.eligibility_text]
        return " ".join(p for p in parts if p)


@dataclass(frozen=True)
class PatientTopic:
    topic_id: str
    note_text: str

    def __post_init__(self):
        if not self.topic_id:
            raise TopicError("topic with empty id")
        if not self.note_text.strip():
            raise TopicError(f"topic {self.topic_id!r} has an empty note")


class RunEntry(NamedTuple):
    topic_id: str
    docno: str
    rank: int
    score: float
    tag: str


@dataclass(frozen=True)
class Qrels:
    """Graded judgments: (topic, docno) -> grade in {0, 1, 2}."""

    entries: dict[tuple[str, str], int] = field(default_factory=dict)

    def grade(self, topic_id: str, docno: str) -> int | None:
        return self.entries.get((topic_id, docno))

    def topic_ids(self) -> list[str]:
        return sorted({t for t, _ in self.entries})

    def for_topic(self, topic_id: str) -> dict[str, int]:
        return {d: g for (t, d), g in self.entries.items() if t == topic_id}


_WS_RE = re.compile(r"\s+")


def _normalize_ws(text: str | None) -> str:
    if not text:
        return ""
    return _WS_RE.sub(" ", text).strip()


def _textblock(parent: ET.Element | None) -> str:
    if parent is None:
        return ""
    block = parent.find("textblock")
    source = block if block is not None else parent
    return _normalize_ws("".join(source.itertext()))


def parse_trial_document(xml_bytes: bytes) -> ClinicalTrialDoc:
    """Parse one ClinicalTrials.gov-style XML record."""
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        line, column = exc.position
        text = xml_bytes.decode("utf-8", errors="replace")
        lines = text.splitlines(keepends=True)
        offset = sum(len(l.encode("utf-8")) for l in lines[: line - 1]) + column
        raise XmlParseError(f"malformed trial XML: {exc.msg}", offset) from exc

    nct = root.findtext("id_info/nct_id")
    if nct is None or not nct.strip():
        raise SchemaError("trial record is missing its registry id", "id_info/nct_id")

    title = _normalize_ws(root.findtext("brief_title"))
    if not title:
        title = _normalize_ws(root.findtext("official_title"))
    conditions = tuple(
        _normalize_ws("".join(c.itertext())) for c in root.findall("condition")
    )
    eligibility = root.find("eligibility")
    criteria = eligibility.find("criteria") if eligibility is not None else None

    def _opt(elem: ET.Element | None, tag: str) -> str | None:
        value = _normalize_ws(elem.findtext(tag)) if elem is not None else ""
        return value or None

    return ClinicalTrialDoc(
        docno=nct.strip(),
        title=title,
        conditions=tuple(c for c in conditions if c),
        brief_summary=_textblock(root.find("brief_summary")),
        detailed_description=_textblock(root.find("detailed_description")),
        eligibility_text=_textblock(criteria),
        gender=_opt(eligibility, "gender"),
        min_age=_opt(eligibility, "minimum_age"),
        max_age=_opt(eligibility, "maximum_age"),
    )


def _doc_from_json(obj: dict, where: str) -> ClinicalTrialDoc:
    if "docno" not in obj or not str(obj["docno"]).strip():
        raise SchemaError(f"{where}: record is missing its registry id", "docno")
    conditions = obj.get("conditions", ())
    if isinstance(conditions, str):
        conditions = (conditions,)
    return ClinicalTrialDoc(
        docno=str(obj["docno"]).strip(),
        title=str(obj.get("title", "") or ""),
        conditions=tuple(str(c) for c in conditions),
        brief_summary=str(obj.get("summary", "") or ""),
        detailed_description=str(obj.get("description", "") or ""),
        eligibility_text=str(obj.get("eligibility", "") or ""),
        gender=obj.get("gender"),
        min_age=obj.get("min_age"),
        max_age=obj.get("max_age"),
    )


def iter_corpus(path: str | Path) -> Iterator[ClinicalTrialDoc]:
    """Stream trial documents from a JSONL file or an XML directory tree.

    XML files are visited in sorted path order so iteration order is
    stable across filesystems.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(path.rglob("*.xml"))
        if not files:
            raise CorpusError(f"no .xml trial records under {path}")
        for f in files:
            yield parse_trial_document(f.read_bytes())
    else:
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
                yield _doc_from_json(obj, f"{path}:{line_no}")


def load_corpus(path: str | Path) -> list[ClinicalTrialDoc]:
    """Load a corpus eagerly, rejecting duplicate docnos."""
    docs: list[ClinicalTrialDoc] = []
    seen: set[str] = set()
    for doc in iter_corpus(path):
        if doc.docno in seen:
            raise CorpusError(f"duplicate docno in corpus: {doc.docno}")
        seen.add(doc.docno)
        docs.append(doc)
    return docs


def load_topics(path: str | Path, format: str = "trec_xml") -> list[PatientTopic]:
    """Load patient topics, preserving file order.

    Formats: "trec_xml" (<topic number="..">note</topic>), "jsonl"
    ({"id": .., "text": ..} per line), "tsv" (id<TAB>note per line).
    """
    path = Path(path)
    topics: list[PatientTopic] = []
    if format == "trec_xml":
        try:
            root = ET.fromstring(path.read_bytes())
        except ET.ParseError as exc:
            raise TopicError(f"{path}: malformed topics XML: {exc}") from exc
        for elem in root.iter("topic"):
            tid = elem.get("number") or elem.get("id") or ""
            note = _normalize_ws("".join(elem.itertext()))
            if not note:
                raise TopicError(f"{path}: topic {tid!r} has an empty note")
            topics.append(PatientTopic(tid, note))
    elif format == "jsonl":
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                obj = json.loads(line)
                if "id" not in obj or "text" not in obj:
                    raise TopicError(f"{path}:{line_no}: expected 'id' and 'text' fields")
                topics.append(PatientTopic(str(obj["id"]), str(obj["text"])))
    elif format == "tsv":
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                if "\t" not in line:
                    raise TopicError(f"{path}:{line_no}: expected 'id<TAB>note'")
                tid, note = line.split("\t", 1)
                topics.append(PatientTopic(tid.strip(), note))
    else:
        raise ValueError(f"unknown topics format: {format!r}")

    seen: dict[str, int] = {}
    for t in topics:
        seen[t.topic_id] = seen.get(t.topic_id, 0) + 1
    duplicates = sorted(tid for tid, n in seen.items() if n > 1)
    if duplicates:
        raise TopicError(f"{path}: duplicate topic ids: {', '.join(duplicates)}")
    return topics


def load_qrels(path: str | Path) -> Qrels:
    """Parse whitespace-separated qrels lines: `topic 0 docno grade`."""
    path = Path(path)
    entries: dict[tuple[str, str], int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise QrelsError(
                    f"{path}:{line_no}: expected 4 columns 'topic 0 docno grade', got {len(parts)}"
                )
            topic_id, _, docno, grade_str = parts
            try:
                grade = int(grade_str)
            except ValueError as exc:
                raise QrelsError(f"{path}:{line_no}: invalid grade {grade_str!r}") from exc
            if grade not in (0, 1, 2):
                raise QrelsError(
                    f"{path}:{line_no}: grade {grade} outside {{0, 1, 2}}"
                )
            key = (topic_id, docno)
            if key in entries:
                raise QrelsError(
                    f"{path}:{line_no}: duplicate judgment for topic {topic_id}, doc {docno}"
                )
            entries[key] = grade
    return Qrels(entries)


def validate_run(entries: Iterable[RunEntry]) -> None:
    """Check per-topic rank/score/docno invariants; raise on violation."""
    by_topic: dict[str, list[RunEntry]] = {}
    for e in entries:
        by_topic.setdefault(e.topic_id, []).append(e)
    for topic_id, group in by_topic.items():
        seen_docs: set[str] = set()
        prev_score = None
        for i, e in enumerate(group, start=1):
            if e.rank != i:
                raise RunFormatError(
                    f"topic {topic_id}: rank {e.rank} at position {i} (ranks must be 1..n)"
                )
            if e.docno in seen_docs:
                raise RunFormatError(f"topic {topic_id}: duplicate docno {e.docno}")
            seen_docs.add(e.docno)
            if prev_score is not None and e.score > prev_score:
                raise RunFormatError(
                    f"topic {topic_id}: score increases at rank {e.rank}"
                )
            prev_score = e.score


def write_run(entries: list[RunEntry], path: str | Path) -> None:
    """Write the six-column TREC run format; validates before writing."""
    validate_run(entries)
    lines = [
        f"{e.topic_id} Q0 {e.docno} {e.rank} {e.score:.6f} {e.tag}\n" for e in entries
    ]
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_run(path: str | Path) -> list[RunEntry]:
    path = Path(path)
    entries: list[RunEntry] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise RunFormatError(
                    f"{path}:{line_no}: expected 6 columns, got {len(parts)}"
                )
            topic_id, _, docno, rank_str, score_str, tag = parts
            try:
                entries.append(RunEntry(topic_id, docno, int(rank_str), float(score_str), tag))
            except ValueError as exc:
                raise RunFormatError(f"{path}:{line_no}: {exc}") from exc
    validate_run(entries)
    return entries
