"""Tokenizer, stoplist, marker stripping, and query assembly."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trialsearch.text import (
    MAX_TOKEN_LENGTH,
    ProcessedQuery,
    build_query,
    default_stoplist,
    load_stoplist,
    pipeline_hash,
    postprocess_generated_query,
    process_query,
    process_text,
    remove_stopwords,
    strip_list_markers,
    tokenize,
)


@pytest.fixture(scope="module")
def stoplist():
    return default_stoplist()


class TestTokenize:
    def test_splits_on_punctuation_and_lowercases(self):
        assert tokenize("Type-2 Diabetes, HbA1c 8.5%") == [
            "type", "2", "diabetes", "hba1c", "8", "5",
        ]

    def test_digit_runs_are_tokens(self):
        assert tokenize("45-year-old") == ["45", "year", "old"]

    def test_empty_and_punctuation_only(self):
        assert tokenize("") == []
        assert tokenize(" .,;:!? -- ") == []

    def test_unicode_punctuation_splits(self):
        assert tokenize("naïve") == ["na", "ve"]

    def test_overlong_tokens_dropped(self):
        blob = "x" * (MAX_TOKEN_LENGTH + 1)
        assert tokenize(f"asthma {blob} copd") == ["asthma", "copd"]

    @given(st.text(max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_total_and_bounded(self, text):
        tokens = tokenize(text)
        assert all(t == t.lower() for t in tokens)
        assert all(t.isalnum() for t in tokens)
        assert all(len(t) <= MAX_TOKEN_LENGTH for t in tokens)

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_idempotent_on_own_output(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens


class TestStoplist:
    def test_function_words_removed_content_kept(self, stoplist):
        tokens = tokenize("45-year-old male with type 2 diabetes on metformin")
        kept = remove_stopwords(tokens, stoplist)
        assert kept == ["45", "year", "old", "male", "type", "2", "diabetes", "metformin"]

    def test_clinical_terms_never_stopwords(self, stoplist):
        for word in ("male", "female", "patient", "metformin", "diabetes", "history"):
            assert word not in stoplist

    def test_common_function_words_present(self, stoplist):
        for word in ("the", "is", "a", "an", "of", "and", "was", "with", "on"):
            assert word in stoplist

    def test_load_stoplist_skips_comments_and_blanks(self, tmp_path):
        p = tmp_path / "stop.txt"
        p.write_text("# header\nthe\n\nAnd\n  of  \n")
        assert load_stoplist(p) == frozenset({"the", "and", "of"})

    def test_pipeline_hash_depends_on_stoplist(self, stoplist):
        other = frozenset(stoplist | {"zebra"})
        assert pipeline_hash(stoplist) != pipeline_hash(other)
        assert pipeline_hash(stoplist) == pipeline_hash(frozenset(stoplist))


class TestMarkers:
    def test_numbered_markers_stripped(self):
        raw = "1. diabetes mellitus\n2. insulin therapy\n3) metformin"
        assert strip_list_markers(raw) == "diabetes mellitus\ninsulin therapy\nmetformin"

    def test_bullets_stripped(self):
        raw = "- asthma\n* copd\n  - wheezing"
        assert strip_list_markers(raw) == "asthma\ncopd\nwheezing"

    def test_inline_numbers_survive(self):
        raw = "1. type 2 diabetes\n2. dose 500 mg"
        assert strip_list_markers(raw) == "type 2 diabetes\ndose 500 mg"

    def test_marker_digits_do_not_become_terms(self, stoplist):
        q = postprocess_generated_query("1. asthma\n2. wheezing", stoplist)
        assert "1" not in q.terms and "2" not in q.terms
        assert q.terms == ("asthma", "wheez")

    def test_in_text_numerals_become_terms(self, stoplist):
        q = postprocess_generated_query("1. type 2 diabetes\n2. hba1c 8", stoplist)
        assert "2" in q.terms and "8" in q.terms

    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=1, max_value=99),
                st.sampled_from([".", ")"]),
                st.sampled_from(["asthma", "type 2 diabetes", "dose 500 mg", "copd"]),
            ),
            min_size=1,
            max_size=8,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_only_marker_digits_disappear(self, items):
        stoplist = default_stoplist()
        raw = "\n".join(f"{n}{p} {body}" for n, p, body in items)
        q = postprocess_generated_query(raw, stoplist)
        # every numeral inside a body must survive the pipeline
        for _, _, body in items:
            for tok in tokenize(body):
                if tok.isdigit():
                    assert tok in q.terms


class TestProcess:
    def test_full_pipeline(self, stoplist):
        terms = process_text(
            "A 45-year-old male with type 2 diabetes on metformin.", stoplist
        )
        assert terms == ["45", "year", "old", "male", "type", "2", "diabet", "metformin"]

    def test_process_query_carries_pipeline_hash(self, stoplist):
        q = process_query("asthma treatment", stoplist)
        assert q.pipeline == pipeline_hash(stoplist)
        assert q.terms == ("asthma", "treatment")

    def test_order_preserved_with_duplicates(self, stoplist):
        q = process_query("asthma copd asthma", stoplist)
        assert q.terms == ("asthma", "copd", "asthma")

    def test_empty_query_is_falsy(self, stoplist):
        assert not process_query("the of and", stoplist)
        assert process_query("asthma", stoplist)

    @given(st.text(max_size=300))
    @settings(max_examples=200, deadline=None)
    def test_deterministic(self, text):
        stoplist = default_stoplist()
        assert process_text(text, stoplist) == process_text(text, stoplist)


class TestBuildQuery:
    def test_generated_only_passthrough(self, stoplist):
        gen = process_query("asthma inhaler", stoplist)
        assert build_query("generated_only", "note text", gen, stoplist) is gen

    def test_concat_keeps_duplicates(self, stoplist):
        gen = process_query("asthma inhaler", stoplist)
        combined = build_query("concat_original", "asthma attack", gen, stoplist)
        assert combined.terms == ("asthma", "attack", "asthma", "inhal")

    def test_unknown_strategy_rejected(self, stoplist):
        gen = process_query("asthma", stoplist)
        with pytest.raises(ValueError, match="strategy"):
            build_query("set_union", "note", gen, stoplist)


class TestProcessedQuery:
    def test_equality_ignores_pipeline_field(self):
        assert ProcessedQuery(("a", "b"), "x") == ProcessedQuery(("a", "b"), "y")
        assert ProcessedQuery(("a",)).term_count == 1
