"""HTTP JSON API over an index, a corpus, and (optionally) a generator.

Search contract: `terms` are treated as pipeline output and searched
as-is (this is what a UI gets back from /api/generate); a bare `note` is
run through the full text pipeline; note plus terms concatenates the
processed note with the terms.  Either way the ranking comes from the
same scorer the CLI uses, so for one processed query the two surfaces
return identical top-k lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .config import AppConfig, ConfigError
from .corpus import ClinicalTrialDoc, PatientTopic, load_corpus
from .index import InvertedIndex, open_index
from .querygen import (
    GenerationTransportError,
    LLMClient,
    PromptTemplate,
    QuerygenError,
    default_template,
    generate_query,
)
from .retrieval import BM25Params, search
from .text import (
    ProcessedQuery,
    build_query,
    default_stoplist,
    load_stoplist,
    pipeline_hash,
    process_query,
)

SNIPPET_LENGTH = 200


@dataclass
class ServiceState:
    index: InvertedIndex
    stoplist: frozenset[str]
    docs: dict[str, ClinicalTrialDoc]
    bm25: BM25Params
    llm_client: LLMClient | None = None
    template: PromptTemplate | None = None
    ui_dir: str | None = None
    audit_log_path: str | None = None


def _audit(state: ServiceState, req: "SearchRequest", query) -> None:
    """Optional extension: append the reviewed query to an audit log.

    Only a hash of the note is stored, never the note itself.
    """
    if state.audit_log_path is None:
        return
    import datetime
    import hashlib
    import json

    record = {
        "ts": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "note_sha256": (
            hashlib.sha256(req.note.encode("utf-8")).hexdigest() if req.note else None
        ),
        "terms": list(query.terms),
        "k": req.k,
    }
    with open(state.audit_log_path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def build_state(config: AppConfig, transport=None) -> ServiceState:
    """Load everything the service needs; fails fast on missing paths."""
    index_path = Path(config.index_path)
    if not index_path.exists():
        raise ConfigError(f"index not found: {index_path}")
    index = open_index(index_path)
    stoplist = (
        load_stoplist(config.stoplist_path)
        if config.stoplist_path
        else default_stoplist()
    )
    if index.pipeline != pipeline_hash(stoplist):
        raise ConfigError(
            "stoplist does not match the one the index was built with; "
            "rebuild the index or point stoplist_path at the original"
        )
    docs: dict[str, ClinicalTrialDoc] = {}
    if config.corpus_path:
        docs = {d.docno: d for d in load_corpus(config.corpus_path)}
    llm_client = None
    template = None
    if config.llm is not None:
        llm_client = LLMClient(config.llm, transport=transport)
        template = (
            PromptTemplate(Path(config.prompt_template_path).read_text("utf-8"))
            if config.prompt_template_path
            else default_template()
        )
    return ServiceState(
        index=index,
        stoplist=stoplist,
        docs=docs,
        bm25=config.bm25,
        llm_client=llm_client,
        template=template,
        ui_dir=config.ui_dir,
        audit_log_path=config.audit_log_path,
    )


class SearchRequest(BaseModel):
    """strategy: "generated_only" searches terms alone, "concat_original"
    searches processed note followed by terms; omitted means terms if
    present, otherwise the note."""

    note: str | None = None
    terms: list[str] | None = None
    strategy: str | None = None
    k: int = Field(default=10, ge=1, le=1000)


class GenerateRequest(BaseModel):
    note: str = Field(min_length=1)


def make_snippet(doc: ClinicalTrialDoc) -> str:
    text = doc.brief_summary or doc.detailed_description or doc.eligibility_text
    if len(text) <= SNIPPET_LENGTH:
        return text
    cut = text.rfind(" ", 0, SNIPPET_LENGTH)
    if cut <= 0:
        cut = SNIPPET_LENGTH
    return text[:cut] + "..."


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="trialsearch", docs_url=None, redoc_url=None)

    @app.get("/api/health")
    def health() -> dict:
        return {
            "status": "ok",
            "documents": state.index.doc_count,
            "vocabulary": state.index.vocabulary_size,
            "avgdl": state.index.avgdl,
            "pipeline": state.index.pipeline,
        }

    @app.post("/api/search")
    def api_search(req: SearchRequest) -> list[dict]:
        if not req.note and not req.terms:
            raise HTTPException(
                status_code=422, detail={"error": "provide note, terms, or both"}
            )
        strategy = req.strategy
        if strategy is None:
            strategy = "generated_only" if req.terms else "note"
        terms_query = ProcessedQuery(tuple(req.terms or ()), None)
        if strategy == "generated_only":
            query = terms_query
        elif strategy == "note":
            if not req.note:
                raise HTTPException(
                    status_code=422, detail={"error": "strategy 'note' requires a note"}
                )
            query = process_query(req.note, state.stoplist)
        elif strategy == "concat_original":
            if not req.note:
                raise HTTPException(
                    status_code=422,
                    detail={"error": "strategy 'concat_original' requires a note"},
                )
            query = build_query(
                "concat_original", req.note, terms_query, state.stoplist
            )
        else:
            raise HTTPException(
                status_code=422, detail={"error": f"unknown strategy: {strategy}"}
            )
        # terms arrive as pipeline output, so the hash check is waived for
        # any query that embeds them
        if req.terms:
            query = ProcessedQuery(query.terms, None)
        ranking = search(state.index, query, req.k, state.bm25)
        _audit(state, req, query)
        results = []
        for docno, score in ranking.entries:
            doc = state.docs.get(docno)
            results.append(
                {
                    "docno": docno,
                    "score": score,
                    "title": doc.title if doc else "",
                    "snippet": make_snippet(doc) if doc else "",
                }
            )
        return results

    @app.get("/api/trials/{docno}")
    def api_trial(docno: str) -> dict:
        doc = state.docs.get(docno)
        if doc is None:
            raise HTTPException(
                status_code=404, detail={"error": "unknown docno", "docno": docno}
            )
        return {
            "docno": doc.docno,
            "title": doc.title,
            "conditions": list(doc.conditions),
            "brief_summary": doc.brief_summary,
            "detailed_description": doc.detailed_description,
            "eligibility_text": doc.eligibility_text,
            "gender": doc.gender,
            "min_age": doc.min_age,
            "max_age": doc.max_age,
        }

    @app.post("/api/generate")
    def api_generate(req: GenerateRequest) -> dict:
        if state.llm_client is None or state.template is None:
            raise HTTPException(
                status_code=503,
                detail={
                    "error": "no generation endpoint is configured",
                    "hint": "search with the note text directly, or configure llm in the service config",
                },
            )
        topic = PatientTopic("adhoc", req.note)
        try:
            bundle = generate_query(
                state.llm_client, state.template, topic, state.stoplist
            )
        except GenerationTransportError as exc:
            raise HTTPException(
                status_code=502, detail={"error": str(exc)}
            ) from exc
        except QuerygenError as exc:
            raise HTTPException(
                status_code=502, detail={"error": str(exc)}
            ) from exc
        return {
            "raw_generation": bundle.raw_generation,
            "processed_terms": list(bundle.processed.terms),
            "term_count": bundle.term_count,
            "latency_s": bundle.latency_s,
            "model_name": bundle.model_name,
            "template_id": bundle.template_id,
        }

    if state.ui_dir and Path(state.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=state.ui_dir, html=True), name="ui")

    return app
