"""Tokenizer offsets, sentence splitting, glossary indexing, and sampling."""

from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relann.corpus import (
    CorpusError,
    EmptyDocumentError,
    GlossaryIndex,
    InsufficientTokensError,
    NoGlossaryEntriesError,
    SourceKind,
    build_glossary_index,
    corpus_stats,
    default_headword_rule,
    eligible_positions,
    glossary_entries,
    ingest,
    load_corpus_dir,
    normalize,
    sample_first_terms,
    split_sentences,
    tokenize,
)

# Independent token oracle: word-character runs joined by internal ' ’ -.
TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*")


class TestNormalize:
    def test_strips_punctuation_and_lowercases(self):
        assert normalize("Loans,") == "loans"
        assert normalize("(MONEY)") == "money"

    def test_keeps_internal_joiners(self):
        assert normalize("short-term") == "short-term"

    def test_all_punctuation_becomes_empty(self):
        assert normalize("...") == ""


class TestTokenize:
    def test_offsets_are_true_spans(self):
        text = "The bank's short-term loan, at 3.5 percent."
        for token in tokenize(text):
            assert text[token.start : token.end] == token.surface

    def test_matches_regex_oracle(self):
        text = "Mr. O'Neil re-priced 2,500 shares; the co-op's yield rose."
        assert [t.surface for t in tokenize(text)] == TOKEN_RE.findall(text)

    def test_punctuation_is_not_a_token(self):
        assert [t.surface for t in tokenize("one, two. three!")] == ["one", "two", "three"]

    def test_trailing_joiner_excluded(self):
        assert [t.surface for t in tokenize("loans- and credit")] == ["loans", "and", "credit"]

    def test_empty_text(self):
        assert tokenize("") == ()

    @settings(max_examples=100, deadline=None)
    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
    def test_regex_oracle_property(self, text):
        assert [t.surface for t in tokenize(text)] == TOKEN_RE.findall(text)


class TestSplitSentences:
    def _texts(self, raw):
        return [raw[s:e] for s, e in split_sentences(raw)]

    def test_simple_split(self):
        got = self._texts("One here. Two there. Three!")
        assert got == ["One here.", "Two there.", "Three!"]

    def test_abbreviation_suppresses_split(self):
        got = self._texts("Mr. Alvarez paid. The teller nodded.")
        assert got == ["Mr. Alvarez paid.", "The teller nodded."]

    def test_listed_latin_abbreviation(self):
        got = self._texts("Fees apply, e.g. Monthly charges. Ask first.")
        assert got == ["Fees apply, e.g. Monthly charges.", "Ask first."]

    def test_decimal_number_not_a_boundary(self):
        got = self._texts("Rates fell to 3.5 percent. Then they rose.")
        assert got == ["Rates fell to 3.5 percent.", "Then they rose."]

    def test_lowercase_continuation_not_a_boundary(self):
        got = self._texts("The loan matured. it was renewed, said the clerk.")
        assert got == ["The loan matured. it was renewed, said the clerk."]

    def test_paragraph_break_closes_unterminated_sentence(self):
        got = self._texts("A heading without a stop\n\nThe body starts here.")
        assert got == ["A heading without a stop", "The body starts here."]

    def test_terminator_at_end_of_text(self):
        assert self._texts("Only one sentence.") == ["Only one sentence."]

    def test_unterminated_tail_kept(self):
        assert self._texts("First one. then a fragment")[-1].endswith("then a fragment")

    def test_spans_cover_only_real_text(self):
        raw = "  \nOne.  Two here.\n\n\nThree.\n"
        for s, e in split_sentences(raw):
            assert raw[s:e].strip() == raw[s:e]

    def test_custom_abbreviations(self):
        raw = "See sec. Four for details. Done."
        assert len(split_sentences(raw)) == 3
        got = split_sentences(raw, abbreviations=frozenset({"sec."}))
        assert [raw[s:e] for s, e in got] == ["See sec. Four for details.", "Done."]


class TestIngest:
    def test_ids_and_sources(self):
        source, sentences = ingest("One. Two.", SourceKind.ARTICLE, "My Notes 2024")
        assert source.id == "my-notes-2024"
        assert [s.id for s in sentences] == ["my-notes-2024#0000", "my-notes-2024#0001"]
        assert all(s.source == source.id for s in sentences)

    def test_token_count_totals_sentences(self):
        source, sentences = ingest("One two three. Four five.", SourceKind.ARTICLE, "n")
        assert source.token_count == 5
        assert source.token_count == sum(len(s.tokens) for s in sentences)

    def test_empty_document_raises(self):
        with pytest.raises(EmptyDocumentError):
            ingest("   \n\n  ", SourceKind.ARTICLE, "blank")

    def test_sentence_tokens_match_sentence_text(self):
        _, sentences = ingest("Dr. Wu's fee rose 3.5 percent. That was all.", SourceKind.ARTICLE, "n")
        for s in sentences:
            for t in s.tokens:
                assert s.text[t.start : t.end] == t.surface


class TestGlossary:
    RAW = "loan: money lent at interest\n\nmortgage\tsecured loan\ncontinued line\n\n\n\nShares: equity units\n"

    def test_blocks_split_on_blank_lines(self):
        assert len(glossary_entries(self.RAW)) == 3

    def test_headword_rule_colon_tab_and_case(self):
        blocks = glossary_entries(self.RAW)
        assert [default_headword_rule(b) for b in blocks] == ["loan", "mortgage", "shares"]

    def test_headword_rule_no_separator(self):
        assert default_headword_rule("escrow\nheld by a third party") == "escrow"

    def test_headword_rule_empty_block(self):
        assert default_headword_rule("::") is None

    def test_index_contains_normalizes(self):
        index = build_glossary_index([self.RAW])
        assert "Loan," in index
        assert "mortgage" in index
        assert "teapot" not in index
        assert len(index) == 3

    def test_no_sources_raises(self):
        with pytest.raises(NoGlossaryEntriesError):
            build_glossary_index([])

    def test_no_entries_raises(self):
        with pytest.raises(NoGlossaryEntriesError):
            build_glossary_index(["::\n"])


class TestSampling:
    @pytest.fixture()
    def prepared(self):
        _, sentences = ingest(
            "The loan funds a mortgage. Shares rose. A loan beats a gift.",
            SourceKind.ARTICLE,
            "doc",
        )
        index = GlossaryIndex(frozenset({"loan", "mortgage", "shares", "gift"}))
        return sentences, index

    def test_eligible_positions_sorted_and_complete(self, prepared):
        sentences, index = prepared
        got = eligible_positions(sentences, index)
        assert got == sorted(got)
        assert len(got) == 5
        by_id = {s.id: s for s in sentences}
        for sid, idx in got:
            assert normalize(by_id[sid].tokens[idx].surface) in index.headwords

    def test_eligible_positions_ignore_input_order(self, prepared):
        sentences, index = prepared
        assert eligible_positions(reversed(sentences), index) == eligible_positions(sentences, index)

    def test_sampling_is_deterministic(self, prepared):
        sentences, index = prepared
        a = sample_first_terms(sentences, index, seed=7, n=4)
        b = sample_first_terms(sentences, index, seed=7, n=4)
        assert a == b
        assert all(c.sampled_with_seed == 7 for c in a)

    def test_different_seeds_differ(self, prepared):
        sentences, index = prepared
        draws = {tuple(sample_first_terms(sentences, index, seed=s, n=4)) for s in range(8)}
        assert len(draws) > 1

    def test_no_duplicate_positions(self, prepared):
        sentences, index = prepared
        got = sample_first_terms(sentences, index, seed=3, n=5)
        assert len({(c.sentence, c.first_term) for c in got}) == 5

    def test_overdraw_raises(self, prepared):
        sentences, index = prepared
        with pytest.raises(InsufficientTokensError):
            sample_first_terms(sentences, index, seed=0, n=6)

    def test_negative_n_raises(self, prepared):
        sentences, index = prepared
        with pytest.raises(ValueError):
            sample_first_terms(sentences, index, seed=0, n=-1)

    def test_zero_draws(self, prepared):
        sentences, index = prepared
        assert sample_first_terms(sentences, index, seed=0, n=0) == []


class TestShippedCorpus:
    def test_loads_with_glossary(self, corpus_and_glossary):
        corpus, index = corpus_and_glossary
        assert len(corpus.sentences) > 50
        assert len(index) >= 40

    def test_stats_match_regex_recount(self, corpus_and_glossary):
        corpus, _ = corpus_and_glossary
        stats = corpus_stats(corpus.sources.values())
        recount = {
            source_id: sum(
                len(TOKEN_RE.findall(s.text)) for s in corpus.sentences_of(source_id)
            )
            for source_id in corpus.sources
        }
        assert stats.per_source == recount
        assert stats.total == sum(recount.values())

    def test_every_source_kind_present(self, corpus_and_glossary):
        corpus, _ = corpus_and_glossary
        kinds = {s.kind for s in corpus.sources.values()}
        assert kinds == {SourceKind.GLOSSARY, SourceKind.ARTICLE}

    def test_sentence_ids_unique_and_well_formed(self, corpus_and_glossary):
        corpus, _ = corpus_and_glossary
        for sid, sentence in corpus.sentences.items():
            assert sid == sentence.id
            source_id, _, n = sid.partition("#")
            assert source_id in corpus.sources
            assert len(n) == 4 and n.isdigit()

    def test_missing_directory_raises(self, tmp_path):
        with pytest.raises(CorpusError):
            load_corpus_dir(tmp_path / "nope")

    def test_directory_without_glossaries_raises(self, tmp_path):
        (tmp_path / "articles").mkdir()
        (tmp_path / "glossaries").mkdir()
        (tmp_path / "articles" / "a.txt").write_text("Prose here.", "utf-8")
        with pytest.raises(NoGlossaryEntriesError):
            load_corpus_dir(tmp_path)

    def test_directory_load_matches_packaged_load(self, tmp_path, corpus_and_glossary):
        packaged_corpus, packaged_index = corpus_and_glossary
        from importlib.resources import files

        root = files("relann").joinpath("data", "corpus")
        for sub in ("glossaries", "articles"):
            (tmp_path / sub).mkdir()
            for entry in root.joinpath(sub).iterdir():
                if entry.name.endswith(".txt"):
                    (tmp_path / sub / entry.name).write_text(entry.read_text("utf-8"), "utf-8")
        corpus, index = load_corpus_dir(tmp_path)
        assert corpus.sentences == packaged_corpus.sentences
        assert index == packaged_index
