"""Query generation through an OpenAI-compatible chat-completions API.

The HTTP transport is injectable so tests run against mocks and recorded
responses; nothing in this module ever contacts a host other than the
configured base_url.  Generations are cached on disk keyed by (model,
template, note content), so re-running a batch is free and offline
re-runs are possible.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import httpx

from .corpus import PatientTopic
from .text import ProcessedQuery, postprocess_generated_query, tokenize

logger = logging.getLogger(__name__)

NOTE_PLACEHOLDER = "{NOTE}"


class QuerygenError(Exception):
    pass


class TemplateError(QuerygenError):
    pass


class GenerationTransportError(QuerygenError):
    def __init__(self, message: str, topic_id: str | None = None):
        super().__init__(message)
        self.topic_id = topic_id


class DegenerateOutputError(QuerygenError):
    pass


class CacheMissError(QuerygenError):
    pass


@dataclass(frozen=True)
class LLMConfig:
    """Connection settings; the API key is named by environment variable,
    read at request time, and never serialized or logged."""

    base_url: str
    model_name: str
    api_key_env: str = ""
    temperature: float = 0.0
    max_tokens: int = 512
    timeout_s: float = 60.0
    max_retries: int = 2

    def __post_init__(self):
        if not self.base_url:
            raise ValueError("base_url must be set")
        if not self.model_name:
            raise ValueError("model_name must be set")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")


@dataclass(frozen=True)
class PromptTemplate:
    """Template text with exactly one {NOTE} placeholder."""

    text: str

    def __post_init__(self):
        n = self.text.count(NOTE_PLACEHOLDER)
        if n == 0:
            raise TemplateError(f"template has no {NOTE_PLACEHOLDER} placeholder")
        if n > 1:
            raise TemplateError(
                f"template has {n} {NOTE_PLACEHOLDER} placeholders, expected exactly one"
            )

    @property
    def template_id(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()[:16]


def default_template() -> PromptTemplate:
    from importlib import resources

    text = resources.files("trialsearch.data").joinpath("prompt.txt").read_text("utf-8")
    return PromptTemplate(text)


def render_prompt(template: PromptTemplate, note: str) -> str:
    return template.text.replace(NOTE_PLACEHOLDER, note)


@dataclass(frozen=True)
class QueryBundle:
    """Everything produced for one topic: the verbatim generation, its
    processed form, and provenance for reproducibility."""

    topic_id: str
    original_note: str
    raw_generation: str
    processed: ProcessedQuery
    latency_s: float
    model_name: str
    template_id: str

    @property
    def raw_token_count(self) -> int:
        return len(tokenize(self.raw_generation))

    @property
    def term_count(self) -> int:
        return self.processed.term_count

    def to_dict(self) -> dict:
        return {
            "topic_id": self.topic_id,
            "original_note": self.original_note,
            "raw_generation": self.raw_generation,
            "processed_terms": list(self.processed.terms),
            "pipeline": self.processed.pipeline,
            "latency_s": self.latency_s,
            "model_name": self.model_name,
            "template_id": self.template_id,
        }

    @staticmethod
    def from_dict(obj: dict) -> "QueryBundle":
        return QueryBundle(
            topic_id=str(obj["topic_id"]),
            original_note=obj["original_note"],
            raw_generation=obj["raw_generation"],
            processed=ProcessedQuery(
                tuple(obj["processed_terms"]), obj.get("pipeline")
            ),
            latency_s=float(obj["latency_s"]),
            model_name=obj["model_name"],
            template_id=obj["template_id"],
        )


def write_bundles(bundles: Sequence[QueryBundle], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for b in bundles:
            fh.write(json.dumps(b.to_dict(), sort_keys=True) + "\n")


def read_bundles(path: str | Path) -> list[QueryBundle]:
    bundles = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                bundles.append(QueryBundle.from_dict(json.loads(line)))
    return bundles


class GenerationCache:
    """One file per generation under a directory, keyed by content hash.

    Writes go through a temp file and rename, so a crashed run never
    leaves a partial entry behind.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(model_name: str, template_id: str, note: str) -> str:
        note_hash = hashlib.sha256(note.encode("utf-8")).hexdigest()
        h = hashlib.sha256()
        h.update(model_name.encode("utf-8"))
        h.update(b"\n")
        h.update(template_id.encode("utf-8"))
        h.update(b"\n")
        h.update(note_hash.encode("utf-8"))
        return h.hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> dict | None:
        p = self._path(key)
        if not p.exists():
            return None
        return json.loads(p.read_text(encoding="utf-8"))

    def put(self, key: str, record: dict) -> None:
        p = self._path(key)
        tmp = p.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record, sort_keys=True), encoding="utf-8")
        tmp.replace(p)


def _read_api_key(cfg: LLMConfig) -> str | None:
    import os

    if not cfg.api_key_env:
        return None
    return os.environ.get(cfg.api_key_env) or None


class LLMClient:
    """Thin chat-completions client with retries and an injectable transport."""

    def __init__(self, cfg: LLMConfig, transport: httpx.BaseTransport | None = None):
        self.cfg = cfg
        self._client = httpx.Client(
            base_url=cfg.base_url.rstrip("/"),
            timeout=cfg.timeout_s,
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "LLMClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post_once(self, prompt: str) -> tuple[str, float]:
        headers = {}
        key = _read_api_key(self.cfg)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": self.cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_tokens,
        }
        start = time.perf_counter()
        response = self._client.post("/chat/completions", json=body, headers=headers)
        latency = time.perf_counter() - start
        response.raise_for_status()
        payload = response.json()
        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise DegenerateOutputError(
                f"response has no message content: {exc}"
            ) from exc
        if text is None or not text.strip():
            raise DegenerateOutputError("model returned an empty generation")
        return text, latency

    def complete(self, prompt: str) -> tuple[str, float]:
        """POST with retries; total attempts = 1 + max_retries.

        Retries cover transport failures and 5xx responses.  The reported
        latency is wall-clock around HTTP only, from the successful attempt.
        """
        attempts = 1 + self.cfg.max_retries
        last_error: Exception | None = None
        for attempt in range(attempts):
            try:
                return self._post_once(prompt)
            except httpx.TransportError as exc:
                last_error = exc
            except httpx.HTTPStatusError as exc:
                last_error = exc
                if exc.response.status_code < 500:
                    break
            if attempt + 1 < attempts:
                logger.debug("retrying after %s", last_error)
        raise GenerationTransportError(f"request failed after {attempts} attempt(s): {last_error}")


def generate_query(
    client: LLMClient,
    template: PromptTemplate,
    topic: PatientTopic,
    stoplist: frozenset[str],
    cache: GenerationCache | None = None,
    offline: bool = False,
) -> QueryBundle:
    """Generate and post-process one query.

    With a cache, hits are served without any network activity.  In
    offline mode a miss raises instead of contacting the endpoint.
    """
    cfg = client.cfg
    key = GenerationCache.key(cfg.model_name, template.template_id, topic.note_text)
    record = cache.get(key) if cache is not None else None
    if record is not None:
        raw, latency = record["raw_generation"], float(record["latency_s"])
    elif offline:
        raise CacheMissError(
            f"topic {topic.topic_id}: no cached generation and offline mode is on"
        )
    else:
        try:
            raw, latency = client.complete(render_prompt(template, topic.note_text))
        except GenerationTransportError as exc:
            raise GenerationTransportError(str(exc), topic.topic_id) from exc
        if cache is not None:
            cache.put(key, {"raw_generation": raw, "latency_s": latency})
    processed = postprocess_generated_query(raw, stoplist)
    return QueryBundle(
        topic_id=topic.topic_id,
        original_note=topic.note_text,
        raw_generation=raw,
        processed=processed,
        latency_s=latency,
        model_name=cfg.model_name,
        template_id=template.template_id,
    )


@dataclass(frozen=True)
class BatchStats:
    requested: int
    succeeded: int
    failed: tuple[tuple[str, str], ...]  # (topic_id, error message)
    mean_latency_s: float
    mean_term_count: float
    mean_raw_token_count: float

    def to_dict(self) -> dict:
        return {
            "requested": self.requested,
            "succeeded": self.succeeded,
            "failed": [list(f) for f in self.failed],
            "mean_latency_s": self.mean_latency_s,
            "mean_term_count": self.mean_term_count,
            "mean_raw_token_count": self.mean_raw_token_count,
        }


def batch_generate(
    cfg: LLMConfig,
    template: PromptTemplate,
    topics: Sequence[PatientTopic],
    stoplist: frozenset[str],
    parallelism: int = 4,
    cache: GenerationCache | None = None,
    offline: bool = False,
    transport: httpx.BaseTransport | None = None,
) -> tuple[list[QueryBundle], BatchStats]:
    """Generate queries for many topics concurrently.

    Per-topic failures are collected, not raised; the batch succeeds if
    at least one topic does.  Bundles come back sorted by topic id so
    batch output is order-independent of completion timing.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")
    bundles: list[QueryBundle] = []
    failures: list[tuple[str, str]] = []
    with LLMClient(cfg, transport=transport) as client:
        def one(topic: PatientTopic) -> QueryBundle:
            return generate_query(client, template, topic, stoplist, cache, offline)

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = pool.map(lambda t: _capture(one, t), topics)
            for topic, outcome in zip(topics, results):
                if isinstance(outcome, Exception):
                    failures.append((topic.topic_id, str(outcome)))
                else:
                    bundles.append(outcome)

    bundles.sort(key=lambda b: b.topic_id)
    failures.sort(key=lambda f: f[0])
    n = len(bundles)
    stats = BatchStats(
        requested=len(topics),
        succeeded=n,
        failed=tuple(failures),
        mean_latency_s=sum(b.latency_s for b in bundles) / n if n else 0.0,
        mean_term_count=sum(b.term_count for b in bundles) / n if n else 0.0,
        mean_raw_token_count=sum(b.raw_token_count for b in bundles) / n if n else 0.0,
    )
    return bundles, stats


def _capture(fn, arg):
    try:
        return fn(arg)
    except Exception as exc:
        return exc
