"""
The whole pipeline in one script
================================

corpus -> index -> generated queries (mock) -> four retrieval strategies
-> evaluation with significance against the note-only baseline.
"""

import json
from pathlib import Path

import httpx

from trialsearch import (
    LLMConfig,
    PromptTemplate,
    RM3Params,
    batch_generate,
    build_index,
    default_stoplist,
    evaluate_run,
    load_corpus,
    load_qrels,
    load_topics,
    paired_ttest_bonferroni,
    run_topics,
)

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "tests" / "data"

stoplist = default_stoplist()
index = build_index(load_corpus(DATA / "fixture_corpus.jsonl"), stoplist)
topics = load_topics(DATA / "fixture_topics.xml")
qrels = load_qrels(DATA / "fixture_qrels.txt")


def echo_model(request: httpx.Request) -> httpx.Response:
    # stands in for a real endpoint: returns the note's own words
    prompt = json.loads(request.content)["messages"][0]["content"]
    note = prompt.split("note:\n", 1)[-1]
    return httpx.Response(200, json={"choices": [{"message": {"content": note}}]})


cfg = LLMConfig(base_url="http://localhost:9999/v1", model_name="echo")
template = PromptTemplate("Extract key terms.\nClinical note:\n{NOTE}")
bundles, stats = batch_generate(cfg, template, topics, stoplist,
                                transport=httpx.MockTransport(echo_model))
print(f"generated {stats.succeeded}/{stats.requested} queries, "
      f"mean {stats.mean_term_count:.1f} terms")

generated = {b.topic_id: b.processed for b in bundles}
runs = {
    "original": run_topics(index, topics, "original", stoplist, k=50),
    "generated": run_topics(index, topics, "generated", stoplist,
                            generated=generated, k=50),
    "concat": run_topics(index, topics, "concat", stoplist,
                         generated=generated, k=50),
    "original+rm3": run_topics(index, topics, "original+rm3", stoplist,
                               rm3=RM3Params(fb_docs=5, fb_terms=10), k=50),
}

measures = ("nDCG@10", "P@10", "MRR")
reports = {name: evaluate_run(entries, qrels, measures)
           for name, entries in runs.items()}

topic_ids = qrels.topic_ids()
baseline = reports["original"]
print(f"\n{'strategy':<14}" + "".join(f"{m:>10}" for m in measures))
for name, report in reports.items():
    row = f"{name:<14}"
    for m in measures:
        value = f"{report.aggregate[m]:.4f}"
        if name != "original":
            a = [report.per_topic[t][m] for t in topic_ids]
            b = [baseline.per_topic[t][m] for t in topic_ids]
            try:
                res = paired_ttest_bonferroni(a, b, family_size=len(measures))
                if res.significant:
                    value += "*"
            except Exception:
                value += "!"
        row += f"{value:>10}"
    print(row)
print("\n* significant vs original, ! degenerate differences")
