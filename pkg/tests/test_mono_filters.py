import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyclean.core import Sentence, normalize_lang_code, split_sentences
from polyclean.datafiles import load_cursed_patterns
from polyclean.mono_filters import (
    CRITERIA,
    FilterReport,
    QuestionableFlags,
    clean_gate,
    dedup_lines,
    flag_sentence,
    pct_questionable,
    prelim_page_filter,
)

from conftest import clean_doc, make_doc
from oracles import dedup_lines_oracle

EN = normalize_lang_code("en")


def _sent(text, predicted="en"):
    return Sentence(text, predicted_lang=normalize_lang_code(predicted))


class TestDedupLines:
    def test_first_occurrence_wins(self):
        a = make_doc("a", "en", ["x", "y"])
        b = make_doc("b", "en", ["y", "z"])
        out = list(dedup_lines([a, b]))
        assert out[0].lines == ["x", "y"]
        assert out[1].lines == ["z"]

    def test_single_doc_unchanged(self):
        a = make_doc("a", "en", ["x", "y"])
        assert list(dedup_lines([a]))[0].lines == ["x", "y"]

    def test_trailing_whitespace_keyed(self):
        a = make_doc("a", "en", ["x  "])
        b = make_doc("b", "en", ["x"])
        out = list(dedup_lines([a, b]))
        assert out[0].lines == ["x  "]
        assert out[1].lines == []

    def test_thousand_docs_match_oracle(self, rng):
        pool = [f"line {i}" for i in range(120)]
        lines_per_doc = [
            [rng.choice(pool) for _ in range(rng.randint(1, 8))] for _ in range(1000)
        ]
        expected = dedup_lines_oracle([list(l) for l in lines_per_doc])
        docs = [make_doc(f"d{i}", "en", l) for i, l in enumerate(lines_per_doc)]
        got = [d.lines for d in dedup_lines(docs)]
        assert got == expected

    def test_no_duplicates_remain(self, rng):
        docs = [
            make_doc(f"d{i}", "en", [f"l{rng.randint(0, 30)}" for _ in range(5)])
            for i in range(50)
        ]
        seen = set()
        for doc in dedup_lines(docs):
            for line in doc.lines:
                assert line.rstrip() not in seen
                seen.add(line.rstrip())


class TestPrelimPageFilter:
    def test_three_long_lines_kept(self):
        doc = make_doc("a", "en", ["a" * 250, "b" * 250, "c" * 250])
        keep, _ = prelim_page_filter(doc)
        assert keep

    def test_lorem_ipsum_dropped(self):
        doc = make_doc("a", "en", ["a" * 250, "b" * 250, "Lorem Ipsum dolor " + "c" * 240])
        keep, reason = prelim_page_filter(doc)
        assert not keep and reason == "lorem_ipsum"

    def test_curly_brace_dropped(self):
        doc = make_doc("a", "en", ["a" * 250, "b" * 250, "c{d" + "e" * 250])
        keep, reason = prelim_page_filter(doc)
        assert not keep and reason == "curly_brace"

    def test_199_char_line_boundary(self):
        doc = make_doc("a", "en", ["a" * 250, "b" * 250, "c" * 199])
        keep, reason = prelim_page_filter(doc)
        assert not keep and reason == "too_few_long_lines"

    def test_200_char_line_boundary(self):
        doc = make_doc("a", "en", ["a" * 250, "b" * 250, "c" * 200])
        keep, _ = prelim_page_filter(doc)
        assert keep

    def test_javascript_lines_removed_case_sensitive(self):
        doc = make_doc(
            "a", "en",
            ["Javascript required " + "x" * 230, "a" * 250, "b" * 250, "c" * 250],
        )
        keep, _ = prelim_page_filter(doc)
        assert keep
        assert len(doc.lines) == 3
        # lowercase "javascript" is not the cited heuristic's trigger
        doc2 = make_doc("b", "en", ["javascript " + "x" * 240, "a" * 250, "b" * 250])
        keep2, _ = prelim_page_filter(doc2)
        assert keep2
        assert len(doc2.lines) == 3

    def test_javascript_removal_can_cause_drop(self):
        doc = make_doc("a", "en", ["Javascript " + "x" * 240, "a" * 250, "b" * 250])
        keep, reason = prelim_page_filter(doc)
        assert not keep and reason == "too_few_long_lines"


class TestFlagSentence:
    def test_doc_mismatch(self):
        flags = flag_sentence(_sent("hello there friend", "fr"), EN)
        assert flags.doc_mismatch

    def test_list_case_15_tokens_10_capitalized(self):
        words = ["Word"] * 10 + ["other"] * 5
        flags = flag_sentence(_sent(" ".join(words) + " and more padding here"), EN)
        # 18 tokens, 10 capitalized -> over 50%? 10/18 = 0.55... yes
        sent = _sent(" ".join(["Word"] * 10 + ["other"] * 5))
        flags = flag_sentence(sent, EN)
        assert flags.list_case

    def test_list_case_under_12_tokens_exempt(self):
        sent = _sent(" ".join(["Word"] * 11))
        assert not flag_sentence(sent, EN).list_case

    def test_list_case_exactly_half_not_flagged(self):
        sent = _sent(" ".join(["Word"] * 6 + ["word"] * 6))
        assert not flag_sentence(sent, EN).list_case

    def test_cursed_sex_substring(self):
        sent = _sent("this sentence mentions sex somewhere in the middle")
        assert flag_sentence(sent, EN).cursed

    def test_cursed_requires_pattern_spaces(self):
        sent = _sent("sextant navigation is an honest craft practice")
        assert not flag_sentence(sent, EN).cursed

    def test_abnormal_length_19_chars(self):
        sent = _sent("exactly nineteen ch")
        assert len(sent.text) == 19
        assert flag_sentence(sent, EN).abnormal_length

    def test_abnormal_length_20_chars_ok(self):
        sent = _sent("exactly twenty chars")
        assert len(sent.text) == 20
        assert not flag_sentence(sent, EN).abnormal_length

    def test_abnormal_length_501_chars(self):
        sent = _sent("a" * 501)
        assert flag_sentence(sent, EN).abnormal_length

    def test_technical_chars(self):
        sent = _sent("value = f(1) + {2} / 3 > 4 and some words here")
        tech = sum(1 for c in sent.text if c in "0123456789{}+/()>")
        assert tech / len(sent.text) > 0.2
        assert flag_sentence(sent, EN).technical_chars

    def test_technical_exactly_20_percent_not_flagged(self):
        # 2 technical chars in exactly 10 -> boundary stays unflagged
        sent = _sent("12abcdefgh")
        assert len(sent.text) == 10
        assert not flag_sentence(sent, EN).technical_chars

    def test_pure_function(self):
        sent_text = "The Quick Brown Fox Jumps Over The Lazy Dog Again And Again Today"
        a = flag_sentence(_sent(sent_text), EN)
        b = flag_sentence(_sent(sent_text), EN)
        assert a == b

    def test_cursed_regex_ant_speak(self):
        sent = _sent("H e l l o t h e r e friend this is spaced text")
        assert flag_sentence(sent, EN).cursed

    def test_cursed_pipe_at_end(self):
        assert flag_sentence(_sent("menu item number four |"), EN).cursed
        assert not flag_sentence(_sent("a | b | c in the middle only"), EN).cursed

    def test_flags_stored_on_sentence(self):
        sent = _sent("tiny")
        flag_sentence(sent, EN)
        assert "abnormal_length" in sent.flags


class TestPctQuestionableAndGate:
    def _doc_with_flags(self, n_total, n_flagged):
        doc = make_doc("d", "en", [])
        doc.sentences = [Sentence(f"s{i}") for i in range(n_total)]
        for s in doc.sentences[:n_flagged]:
            s.flags = {"cursed"}
        return doc

    def test_zero_flagged(self):
        assert pct_questionable(self._doc_with_flags(10, 0)) == 0

    def test_three_of_ten(self):
        assert pct_questionable(self._doc_with_flags(10, 3)) == Fraction(3, 10)

    def test_no_sentences_raises(self):
        with pytest.raises(ValueError):
            pct_questionable(self._doc_with_flags(0, 0))

    def test_exact_rational(self):
        for n in range(1, 40):
            for k in range(n + 1):
                assert pct_questionable(self._doc_with_flags(n, k)) * n == k

    def test_gate_keeps_exactly_20_percent(self):
        keep, _ = clean_gate(self._doc_with_flags(10, 2))
        assert keep

    def test_gate_drops_21_percent(self):
        keep, reason = clean_gate(self._doc_with_flags(100, 21))
        assert not keep and reason == "questionable_score"

    def test_gate_drops_under_5_sentences(self):
        keep, reason = clean_gate(self._doc_with_flags(4, 0))
        assert not keep and reason == "too_few_sentences"

    def test_gate_keeps_5_clean_sentences(self):
        keep, _ = clean_gate(self._doc_with_flags(5, 1))
        assert keep

    @given(st.integers(5, 60), st.data())
    def test_gate_monotone_in_flags(self, n, data):
        k = data.draw(st.integers(0, n))
        doc = self._doc_with_flags(n, k)
        kept_before, _ = clean_gate(doc)
        extra = data.draw(st.integers(0, n - k))
        for s in doc.sentences[k : k + extra]:
            s.flags = {"cursed"}
        kept_after, _ = clean_gate(doc)
        if not kept_before:
            assert not kept_after


class TestHandLabeledFixture:
    def test_full_document_agreement(self):
        # hand-labeled: each sentence annotated with the criteria it violates
        doc = make_doc("fixture", "en", [])
        labeled = [
            ("This is a perfectly ordinary sentence about gardens.", set()),
            ("tiny one", {"abnormal_length"}),
            ("Buy Cheap Watches Best Price Great Deal Super Offer Now Here Today Sale", {"list_case"}),
            ("x(1)/{2}+3>4(5)//6*8", {"technical_chars"}),  # 20 chars exactly
            ("download this free mp3 collection today friends", {"cursed"}),
            ("Ce texte est dans une autre langue que le document.", {"doc_mismatch"}),
            ("The weather stayed mild for the whole of October.", set()),
        ]
        preds = ["en", "en", "en", "en", "en", "fr", "en"]
        doc.sentences = [
            Sentence(t, predicted_lang=normalize_lang_code(p))
            for (t, _), p in zip(labeled, preds)
        ]
        for sent, (_, expected) in zip(doc.sentences, labeled):
            got = flag_sentence(sent, EN).as_set()
            assert got == expected, sent.text
        assert pct_questionable(doc) == Fraction(5, 7)


class TestFilterReport:
    def test_counts_conserve(self):
        report = FilterReport(stage="s")
        for i in range(10):
            report.record(i % 3 != 0, "r")
        assert report.kept + report.dropped == 10
        assert report.drop_reasons == {"r": 4}

    def test_json(self):
        report = FilterReport(stage="s", kept=1, dropped=2, drop_reasons={"x": 2})
        assert '"stage": "s"' in report.to_json()
