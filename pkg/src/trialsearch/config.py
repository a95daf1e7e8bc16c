"""Application configuration with lossless JSON round-tripping."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .querygen import LLMConfig
from .retrieval import BM25Params, RM3Params


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class AppConfig:
    """Paths and parameters shared by the CLI and the HTTP service.

    corpus_path points at the raw corpus because the index stores no
    document text; detail lookups and snippets read from it.
    """

    index_path: str = "index.bin"
    corpus_path: str | None = None
    stoplist_path: str | None = None  # None = bundled stoplist
    bm25: BM25Params = field(default_factory=BM25Params)
    rm3: RM3Params = field(default_factory=RM3Params)
    llm: LLMConfig | None = None
    prompt_template_path: str | None = None  # None = bundled template
    serve_addr: str = "127.0.0.1:8000"
    ui_dir: str | None = None
    audit_log_path: str | None = None  # optional extension: reviewed-query log

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bm25"] = asdict(self.bm25)
        d["rm3"] = asdict(self.rm3)
        d["llm"] = asdict(self.llm) if self.llm else None
        return d

    @staticmethod
    def from_dict(obj: dict) -> "AppConfig":
        known = {
            "index_path", "corpus_path", "stoplist_path", "bm25", "rm3",
            "llm", "prompt_template_path", "serve_addr", "ui_dir",
            "audit_log_path",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kwargs = dict(obj)
        try:
            if "bm25" in kwargs and kwargs["bm25"] is not None:
                kwargs["bm25"] = BM25Params(**kwargs["bm25"])
            if "rm3" in kwargs and kwargs["rm3"] is not None:
                kwargs["rm3"] = RM3Params(**kwargs["rm3"])
            if kwargs.get("llm") is not None:
                kwargs["llm"] = LLMConfig(**kwargs["llm"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        return AppConfig(**kwargs)


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: config root must be a JSON object")
    return AppConfig.from_dict(obj)


def save_config(config: AppConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
