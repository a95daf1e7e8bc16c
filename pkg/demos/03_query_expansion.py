"""
Pseudo-relevance feedback with RM3
==================================

RM3 assumes the top-ranked documents are relevant, weighs their terms,
and appends the strongest ones to the query.
"""

from pathlib import Path

from trialsearch import (
    RM3Params,
    build_index,
    default_stoplist,
    load_corpus,
    process_query,
    rm3_expand,
    search,
)

ROOT = Path(__file__).resolve().parents[1]
docs = load_corpus(ROOT / "tests" / "data" / "fixture_corpus.jsonl")
by_docno = {d.docno: d for d in docs}
stoplist = default_stoplist()
index = build_index(docs, stoplist)

note = "67-year-old male with severe COPD on tiotropium. Former smoker."
query = process_query(note, stoplist)
print("original terms:", " ".join(query.terms))

expanded = rm3_expand(index, query, RM3Params(fb_docs=5, fb_terms=8), stoplist)
new_terms = expanded.terms[len(query.terms):]
print("expansion terms:", " ".join(new_terms))

before = search(index, query, k=5)
after = search(index, expanded, k=5)
print("\nbefore vs after expansion:")
for (d1, s1), (d2, s2) in zip(before.entries, after.entries):
    marker = " " if d1 == d2 else "*"
    print(f" {marker} {s1:7.3f} {by_docno[d1].title[:42]:<44}"
          f"{s2:8.3f} {by_docno[d2].title[:40]}")

# fb_terms=0 is the null case: the query comes back untouched and the
# ranking is exactly the plain BM25 one.
null = rm3_expand(index, query, RM3Params(fb_docs=5, fb_terms=0), stoplist)
print("\nfb_terms=0 returns the original query:", null is query)
