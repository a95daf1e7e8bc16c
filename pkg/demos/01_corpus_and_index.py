"""
Loading a trial corpus and building an index
============================================

Walks the bundled 100-trial fixture: parse, inspect one record, build
the inverted index, persist it, and reopen the snapshot.
"""

from pathlib import Path

from trialsearch import (
    build_index,
    default_stoplist,
    load_corpus,
    open_index,
    persist_index,
    term_stats,
)

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "data" / "fixture_corpus.jsonl"

# A corpus is a JSONL file (one trial per line) or a directory tree of
# ClinicalTrials.gov-style XML records.
docs = load_corpus(CORPUS)
print(f"loaded {len(docs)} trials")

doc = docs[0]
print("\nfirst record:")
print("  docno      ", doc.docno)
print("  title      ", doc.title)
print("  conditions ", "; ".join(doc.conditions))
print("  gender     ", doc.gender, "| ages", doc.min_age, "-", doc.max_age)
print("  eligibility", doc.eligibility_text[:90] + "...")

# indexed_text() is what actually gets tokenized: title, conditions,
# summaries, and eligibility, joined.
print("\nindexed text starts:", doc.indexed_text()[:80], "...")

stoplist = default_stoplist()
index = build_index(docs, stoplist)
print(f"\nindex: {index.doc_count} docs, {index.vocabulary_size} terms, "
      f"avgdl {index.avgdl:.2f}")

# term_stats returns (document frequency, collection frequency)
for term in ("metformin", "asthma", "renal"):
    df, cf = term_stats(index, term)
    print(f"  {term:<10} df={df:<3} cf={cf}")

# The snapshot is fully deterministic: same corpus -> same bytes,
# regardless of insertion order.
out = Path("/tmp/demo_index.bin")
persist_index(index, out)
reopened = open_index(out)
print(f"\nsnapshot {out} round-trips: "
      f"{reopened.doc_count} docs, pipeline {reopened.pipeline[:16]}...")
