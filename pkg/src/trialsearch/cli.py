"""Command-line surface: index, generate, run, evaluate, serve.

All outputs that land on disk (runs, bundles, reports, sidecar metadata)
are deterministic for fixed inputs: no timestamps, stable ordering,
fixed float formatting.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import AppConfig, ConfigError, load_config
from .corpus import (
    CorpusError,
    load_corpus,
    load_qrels,
    load_topics,
    read_run,
    write_run,
)
from .evaluation import DEFAULT_MEASURES, MEASURES, RAW_MEASURES, evaluate_run
from .index import IndexStoreError, build_index, open_index, persist_index
from .querygen import (
    GenerationCache,
    LLMConfig,
    PromptTemplate,
    QuerygenError,
    batch_generate,
    default_template,
    read_bundles,
    write_bundles,
)
from .retrieval import (
    BM25Params,
    PipelineMismatchError,
    RM3Params,
    RetrievalError,
    run_topics,
)
from .significance import DegenerateVarianceError, paired_ttest_bonferroni
from .text import default_stoplist, load_stoplist, pipeline_hash

# table columns, in reporting order
TABLE_MEASURES = ("nDCG@10", "Bpref", "P@10", "R@25", "MRR")


def _fail(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return click.exceptions.Exit(1)


def _stoplist(path: str | None) -> frozenset[str]:
    return load_stoplist(path) if path else default_stoplist()


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file supplying defaults for all commands.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Clinical trials search: index, generate queries, run, evaluate, serve."""
    try:
        ctx.obj = load_config(config_path) if config_path else AppConfig()
    except ConfigError as exc:
        raise _fail(str(exc))


@main.command("index")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True,
              help="JSONL corpus file or directory of trial XML records.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Snapshot path (default: config index_path).")
@click.option("--stoplist", "stoplist_path", type=click.Path(exists=True), default=None)
@click.pass_obj
def cmd_index(cfg: AppConfig, corpus_path: str, out_path: str | None,
              stoplist_path: str | None) -> None:
    """Build an index snapshot from a corpus."""
    out = out_path or cfg.index_path
    stoplist = _stoplist(stoplist_path or cfg.stoplist_path)
    try:
        docs = load_corpus(corpus_path)
        index = build_index(docs, stoplist)
        persist_index(index, out)
    except (CorpusError, IndexStoreError) as exc:
        raise _fail(str(exc))
    click.echo(f"indexed {index.doc_count} documents")
    click.echo(f"vocabulary {index.vocabulary_size} terms")
    click.echo(f"avgdl {index.avgdl:.4f}")
    click.echo(f"pipeline {index.pipeline}")
    click.echo(f"wrote {out}")


@main.command("generate")
@click.option("--topics", "topics_path", type=click.Path(exists=True), required=True)
@click.option("--format", "topics_format", default="trec_xml",
              type=click.Choice(["trec_xml", "jsonl", "tsv"]))
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Bundles JSONL output path.")
@click.option("--cache", "cache_dir", type=click.Path(), default=None)
@click.option("--from-cache", is_flag=True, default=False,
              help="Offline mode: serve every topic from the cache, no network.")
@click.option("--parallelism", type=int, default=4)
@click.option("--base-url", default=None, help="Override config LLM base URL.")
@click.option("--model", default=None, help="Override config LLM model name.")
@click.option("--template", "template_path", type=click.Path(exists=True), default=None)
@click.pass_obj
def cmd_generate(cfg: AppConfig, topics_path: str, topics_format: str, out_path: str,
                 cache_dir: str | None, from_cache: bool, parallelism: int,
                 base_url: str | None, model: str | None,
                 template_path: str | None) -> None:
    """Generate search queries from patient notes via the configured LLM."""
    llm = cfg.llm
    if base_url or model:
        base = base_url or (llm.base_url if llm else None)
        name = model or (llm.model_name if llm else None)
        if not base or not name:
            raise _fail("both an LLM base URL and model name are required")
        llm = LLMConfig(base_url=base, model_name=name) if llm is None else (
            LLMConfig(base_url=base, model_name=name, api_key_env=llm.api_key_env,
                      temperature=llm.temperature, max_tokens=llm.max_tokens,
                      timeout_s=llm.timeout_s, max_retries=llm.max_retries))
    if llm is None:
        raise _fail("no LLM configured; set llm in the config or pass --base-url/--model")

    tmpl_path = template_path or cfg.prompt_template_path
    try:
        template = (PromptTemplate(Path(tmpl_path).read_text(encoding="utf-8"))
                    if tmpl_path else default_template())
        topics = load_topics(topics_path, topics_format)
    except (QuerygenError, CorpusError, OSError) as exc:
        raise _fail(str(exc))

    stoplist = _stoplist(cfg.stoplist_path)
    cache = GenerationCache(cache_dir) if cache_dir else None
    if from_cache and cache is None:
        raise _fail("--from-cache requires --cache")

    bundles, stats = batch_generate(
        llm, template, topics, stoplist,
        parallelism=parallelism, cache=cache, offline=from_cache,
    )
    if not bundles:
        for topic_id, message in stats.failed:
            click.echo(f"failed {topic_id}: {message}", err=True)
        raise _fail("all topics failed")

    write_bundles(bundles, out_path)
    if stats.failed:
        manifest = Path(out_path).with_suffix(".failures.json")
        manifest.write_text(
            json.dumps([{"topic_id": t, "error": e} for t, e in stats.failed],
                       indent=2) + "\n", encoding="utf-8")
        click.echo(f"{len(stats.failed)} topic(s) failed; see {manifest}", err=True)
    click.echo(f"generated {stats.succeeded}/{stats.requested} queries")
    click.echo(f"mean latency {stats.mean_latency_s:.3f}s")
    click.echo(f"mean terms {stats.mean_term_count:.2f} "
               f"(raw tokens {stats.mean_raw_token_count:.2f})")
    click.echo(f"wrote {out_path}")


@main.command("run")
@click.option("--index", "index_path", type=click.Path(exists=True), default=None)
@click.option("--topics", "topics_path", type=click.Path(exists=True), required=True)
@click.option("--format", "topics_format", default="trec_xml",
              type=click.Choice(["trec_xml", "jsonl", "tsv"]))
@click.option("--strategy", required=True,
              type=click.Choice(["original", "generated", "concat", "original+rm3"]))
@click.option("--bundles", "bundles_path", type=click.Path(exists=True), default=None,
              help="Bundles JSONL from `generate` (for generated/concat).")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--k", type=int, default=1000, help="Run depth per topic.")
@click.option("--tag", default="trialsearch")
@click.option("--k1", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--fb-docs", type=int, default=None)
@click.option("--fb-terms", type=int, default=None)
@click.option("--stoplist", "stoplist_path", type=click.Path(exists=True), default=None)
@click.pass_obj
def cmd_run(cfg: AppConfig, index_path: str | None, topics_path: str,
            topics_format: str, strategy: str, bundles_path: str | None,
            out_path: str, k: int, tag: str, k1: float | None, b: float | None,
            fb_docs: int | None, fb_terms: int | None,
            stoplist_path: str | None) -> None:
    """Retrieve a ranked run for every topic under one query strategy."""
    idx_path = index_path or cfg.index_path
    stoplist = _stoplist(stoplist_path or cfg.stoplist_path)
    try:
        index = open_index(idx_path)
    except (IndexStoreError, OSError) as exc:
        raise _fail(str(exc))
    if index.pipeline != pipeline_hash(stoplist):
        raise _fail(
            "stoplist does not match the one the index was built with; "
            "rebuild the index or pass the original stoplist")

    bm25 = BM25Params(
        k1=k1 if k1 is not None else cfg.bm25.k1,
        b=b if b is not None else cfg.bm25.b,
    )
    rm3 = RM3Params(
        fb_docs=fb_docs if fb_docs is not None else cfg.rm3.fb_docs,
        fb_terms=fb_terms if fb_terms is not None else cfg.rm3.fb_terms,
        mu=cfg.rm3.mu,
    )

    generated = None
    template_ids: list[str] = []
    if bundles_path:
        bundles = read_bundles(bundles_path)
        generated = {bd.topic_id: bd.processed for bd in bundles}
        template_ids = sorted({bd.template_id for bd in bundles})

    try:
        topics = load_topics(topics_path, topics_format)
        entries = run_topics(index, topics, strategy, stoplist,
                             generated=generated, bm25=bm25, rm3=rm3, k=k, tag=tag)
        write_run(entries, out_path)
    except (CorpusError, RetrievalError, PipelineMismatchError) as exc:
        raise _fail(str(exc))

    meta = {
        "strategy": strategy,
        "k": k,
        "tag": tag,
        "bm25": {"k1": bm25.k1, "b": bm25.b},
        "rm3": ({"fb_docs": rm3.fb_docs, "fb_terms": rm3.fb_terms, "mu": rm3.mu}
                if strategy == "original+rm3" else None),
        "index": str(idx_path),
        "topics": str(topics_path),
        "bundles": str(bundles_path) if bundles_path else None,
        "template_ids": template_ids,
        "pipeline": index.pipeline,
        "topic_count": len({e.topic_id for e in entries}),
        "entry_count": len(entries),
    }
    Path(f"{out_path}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(entries)} entries for "
               f"{meta['topic_count']}/{len(topics)} topics to {out_path}")


@main.command("evaluate")
@click.option("--run", "run_paths", type=click.Path(exists=True), multiple=True,
              required=True, help="Run file(s); the first is the baseline.")
@click.option("--qrels", "qrels_path", type=click.Path(exists=True), required=True)
@click.option("--measures", default=None,
              help="Comma-separated measure names (default: all).")
@click.option("--condensed/--no-condensed", default=True,
              help="Include the condensed measure variants (default on).")
@click.option("--gain", default="linear", type=click.Choice(["linear", "exponential"]),
              help="nDCG gain function.")
@click.option("--family-size", type=int, default=None,
              help="Bonferroni family size; required with two or more runs.")
@click.option("--json", "json_path", type=click.Path(), default=None,
              help="Write the full report (per-topic, aggregate, significance) as JSON.")
def cmd_evaluate(run_paths: tuple[str, ...], qrels_path: str, measures: str | None,
                 condensed: bool, gain: str, family_size: int | None,
                 json_path: str | None) -> None:
    """Score one or more runs against qrels; mark significant differences."""
    if measures is None:
        names = DEFAULT_MEASURES if condensed else RAW_MEASURES
    else:
        names = tuple(m.strip() for m in measures.split(",") if m.strip())
    for m in names:
        if m not in MEASURES:
            raise _fail(f"unknown measure: {m} (known: {', '.join(MEASURES)})")
    if len(run_paths) > 1 and family_size is None:
        raise _fail("--family-size is required when comparing two or more runs")

    try:
        qrels = load_qrels(qrels_path)
        reports = {p: evaluate_run(read_run(p), qrels, names, gain) for p in run_paths}
    except CorpusError as exc:
        raise _fail(str(exc))

    topics = qrels.topic_ids()
    baseline = run_paths[0]
    significance: dict[str, dict[str, dict]] = {}
    markers: dict[tuple[str, str], str] = {}
    for path in run_paths[1:]:
        significance[path] = {}
        for m in names:
            a = [reports[path].per_topic[t][m] for t in topics]
            b = [reports[baseline].per_topic[t][m] for t in topics]
            try:
                result = paired_ttest_bonferroni(a, b, family_size)
            except DegenerateVarianceError:
                significance[path][m] = {"t": None, "p": None,
                                         "significant": None,
                                         "note": "degenerate variance"}
                markers[(path, m)] = "!"
                continue
            significance[path][m] = {
                "t": result.t, "p": result.p, "df": result.df,
                "alpha_adjusted": result.alpha_adjusted,
                "significant": result.significant,
            }
            if result.significant:
                markers[(path, m)] = "*"

    table_measures = [m for m in TABLE_MEASURES if m in names]
    table_measures += [m for m in names if m not in table_measures]
    name_width = max(len(Path(p).name) for p in run_paths)
    header = "run".ljust(name_width) + "".join(f"  {m:>18}" for m in table_measures)
    click.echo(header)
    for path in run_paths:
        cells = []
        for m in table_measures:
            value = f"{reports[path].aggregate[m]:.4f}"
            mark = markers.get((path, m), "")
            cells.append(f"  {value + mark:>18}")
        click.echo(Path(path).name.ljust(name_width) + "".join(cells))
    if len(run_paths) > 1:
        click.echo(f"* significant vs {Path(baseline).name} "
                   f"(paired t-test, alpha {0.05}/{family_size})")

    if json_path:
        payload = {
            "qrels": str(qrels_path),
            "measures": list(names),
            "runs": {p: reports[p].to_dict() for p in run_paths},
            "baseline": baseline,
            "family_size": family_size,
            "significance": significance,
        }
        Path(json_path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        click.echo(f"wrote {json_path}")


@main.command("serve")
@click.option("--addr", default=None, help="host:port (default from config).")
@click.pass_obj
def cmd_serve(cfg: AppConfig, addr: str | None) -> None:
    """Serve the HTTP JSON API (and the UI, when configured)."""
    import uvicorn

    from .service import build_state, create_app

    try:
        state = build_state(cfg)
    except (ConfigError, IndexStoreError, CorpusError) as exc:
        raise _fail(str(exc))
    bind = addr or cfg.serve_addr
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise _fail(f"invalid serve address: {bind!r} (expected host:port)")
    uvicorn.run(create_app(state), host=host, port=int(port))


if __name__ == "__main__":
    main()
