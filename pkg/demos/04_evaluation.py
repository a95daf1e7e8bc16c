"""
Scoring runs against judgments
==============================

Builds two runs over the fixture topics (plain BM25 and BM25+RM3),
scores both, and tests whether the difference is significant.
"""

from pathlib import Path

from trialsearch import (
    RM3Params,
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

plain = run_topics(index, topics, "original", stoplist, k=50)
fb = run_topics(index, topics, "original+rm3", stoplist,
                rm3=RM3Params(fb_docs=5, fb_terms=10), k=50)

measures = ("nDCG@10", "P@10", "R@25", "MRR", "Bpref")
report_a = evaluate_run(plain, qrels, measures)
report_b = evaluate_run(fb, qrels, measures)

print(f"{'measure':<10} {'bm25':>8} {'bm25+rm3':>9}   p-value")
topic_ids = qrels.topic_ids()
for m in measures:
    a = [report_a.per_topic[t][m] for t in topic_ids]
    b = [report_b.per_topic[t][m] for t in topic_ids]
    try:
        res = paired_ttest_bonferroni(b, a, family_size=len(measures))
        p = f"{res.p:.4f}" + (" *" if res.significant else "")
    except Exception:
        p = "n/a (constant differences)"
    print(f"{m:<10} {report_a.aggregate[m]:8.4f} {report_b.aggregate[m]:9.4f}   {p}")

print("\nper-topic nDCG@10 (bm25):")
for t in topic_ids:
    print(f"  topic {t:>2}: {report_a.per_topic[t]['nDCG@10']:.4f}")
