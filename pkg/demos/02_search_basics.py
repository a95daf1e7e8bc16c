"""
Searching with a patient note
=============================

The note goes through the full text pipeline (lowercase, tokenize, stop,
stem) and the processed terms are scored with BM25.
"""

from pathlib import Path

from trialsearch import (
    BM25Params,
    build_index,
    default_stoplist,
    load_corpus,
    process_query,
    search,
)

ROOT = Path(__file__).resolve().parents[1]
docs = load_corpus(ROOT / "tests" / "data" / "fixture_corpus.jsonl")
by_docno = {d.docno: d for d in docs}
stoplist = default_stoplist()
index = build_index(docs, stoplist)

note = ("58-year-old male with poorly controlled type 2 diabetes mellitus "
        "on metformin 1000 mg twice daily. HbA1c 9.2 percent.")

query = process_query(note, stoplist)
print("note terms after the pipeline:")
print(" ", " ".join(query.terms))

ranking = search(index, query, k=5, params=BM25Params())
print("\ntop 5:")
for rank, (docno, score) in enumerate(ranking.entries, start=1):
    print(f"  {rank}. {score:7.3f}  {docno}  {by_docno[docno].title}")

# k1 controls term-frequency saturation, b the length normalization.
# Crank b to 1.0 and short documents win more.
flat = search(index, query, k=5, params=BM25Params(k1=1.2, b=1.0))
print("\nsame query with b=1.0:")
for rank, (docno, score) in enumerate(flat.entries, start=1):
    print(f"  {rank}. {score:7.3f}  {docno}  {by_docno[docno].title}")
