import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from polyclean.core import (
    Document,
    InvalidLangCode,
    LangCode,
    LangPrediction,
    Sentence,
    UndefinedLanguage,
    compute_stats,
    doc_from_json,
    doc_to_json,
    normalize_lang_code,
    predict_document_lang,
    split_line,
    split_sentences,
)

from conftest import make_doc


class TestNormalizeLangCode:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("tl", "fil"),
            ("en", "en"),
            ("dty", "zxx-xx-dtynoise"),
            ("ss-SZ", "ss"),
            ("ss_SZ", "ss"),
            ("tw", "ak"),
            ("nb", "no"),
            ("pbt", "ps"),
            ("zlm", "ms"),
            ("fan", "bum"),
            ("cjk", "gil"),
            ("bjj", "awa"),
            ("ks_Deva", "ks-Deva"),
            ("ZH_hant", "zh-Hant"),
        ],
    )
    def test_mappings(self, raw, expected):
        assert normalize_lang_code(raw).code == expected

    def test_empty_raises(self):
        with pytest.raises(InvalidLangCode):
            normalize_lang_code("")
        with pytest.raises(InvalidLangCode):
            normalize_lang_code("   ")

    def test_unknown_passthrough_marked(self):
        lc = normalize_lang_code("QQZZ")
        assert lc.code == "qqzz"
        assert lc.unmapped

    def test_script_suffix_extracted(self):
        assert normalize_lang_code("ks_Deva").script_suffix == "Deva"
        assert normalize_lang_code("en").script_suffix is None

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_-", min_size=1, max_size=12))
    def test_idempotent(self, raw):
        try:
            once = normalize_lang_code(raw)
        except InvalidLangCode:
            return
        assert normalize_lang_code(once.code).code == once.code


class TestSplitSentences:
    def test_basic(self):
        doc = make_doc("d1", "en", ["Hello. World."])
        assert [s.text for s in split_sentences(doc).sentences] == ["Hello.", "World."]

    def test_empty(self):
        doc = make_doc("d2", "en", [""])
        assert split_sentences(doc).sentences == []

    def test_ideographic(self):
        doc = make_doc("d3", "zh", ["一行。二行。"])
        assert [s.text for s in split_sentences(doc).sentences] == [
            "一行。",
            "二行。",
        ]

    def test_no_terminal_punct(self):
        assert split_line("just one line") == ["just one line"]

    def test_abbrev_requires_space(self):
        # "3.14" must not split: the period is not followed by whitespace
        assert split_line("pi is 3.14 exactly") == ["pi is 3.14 exactly"]

    def test_sentences_have_no_newlines(self):
        doc = make_doc("d4", "en", ["One. Two.", "Three."])
        split_sentences(doc)
        assert all("\n" not in s.text for s in doc.sentences)

    @given(st.lists(st.text(alphabet="ab .!?。", max_size=40), max_size=5))
    def test_only_whitespace_dropped(self, lines):
        doc = make_doc("p", "en", lines)
        split_sentences(doc)
        joined = "".join(s.text for s in doc.sentences)
        original = "".join(lines)
        removed = Counter(original) - Counter(joined)
        assert set(removed) <= set(" \t")
        assert not (Counter(joined) - Counter(original))


class _FixedPredictor:
    def __init__(self, preds):
        self.preds = dict(preds)

    def predict(self, text):
        lang, conf = self.preds[text]
        return LangPrediction(normalize_lang_code(lang), conf)


class TestPredictDocumentLang:
    def _doc(self, texts):
        doc = make_doc("d", "en", [])
        doc.sentences = [Sentence(t) for t in texts]
        return doc

    def test_unanimous(self):
        doc = self._doc([f"s{i}" for i in range(5)])
        pred = _FixedPredictor({f"s{i}": ("en", 0.9) for i in range(5)})
        assert predict_document_lang(doc, pred).code == "en"

    def test_strict_majority(self):
        doc = self._doc(["a", "b", "c", "d", "e"])
        pred = _FixedPredictor(
            {"a": ("en", 0.5), "b": ("en", 0.5), "c": ("en", 0.5),
             "d": ("fr", 0.99), "e": ("fr", 0.99)}
        )
        assert predict_document_lang(doc, pred).code == "en"

    def test_tie_break_summed_confidence(self):
        doc = self._doc(["a", "b", "c", "d"])
        pred = _FixedPredictor(
            {"a": ("en", 0.9), "b": ("en", 0.8), "c": ("fr", 0.7), "d": ("fr", 0.7)}
        )
        assert predict_document_lang(doc, pred).code == "en"

    def test_tie_break_lexicographic(self):
        doc = self._doc(["a", "b"])
        pred = _FixedPredictor({"a": ("fr", 0.5), "b": ("de", 0.5)})
        assert predict_document_lang(doc, pred).code == "de"

    def test_empty_raises(self):
        doc = self._doc([])
        with pytest.raises(UndefinedLanguage):
            predict_document_lang(doc, _FixedPredictor({}))

    def test_permutation_invariant(self):
        texts = [f"s{i}" for i in range(7)]
        table = {t: ("en" if i % 2 else "fr", 0.5 + i / 100) for i, t in enumerate(texts)}
        pred = _FixedPredictor(table)
        rng = random.Random(7)
        results = set()
        for _ in range(10):
            shuffled = texts[:]
            rng.shuffle(shuffled)
            results.add(predict_document_lang(self._doc(shuffled), pred).code)
        assert len(results) == 1

    def test_sets_sentence_predictions(self):
        doc = self._doc(["a"])
        predict_document_lang(doc, _FixedPredictor({"a": ("en", 1.0)}))
        assert doc.sentences[0].predicted_lang.code == "en"


class TestComputeStats:
    def test_token_additivity(self):
        docs = [
            make_doc("a", "en", ["one two three"]),
            make_doc("b", "en", ["one two three four five"]),
        ]
        assert compute_stats(docs).n_tokens == 8

    def test_median_documents(self):
        docs = (
            [make_doc(f"a{i}", "aa", ["x"]) for i in range(1)]
            + [make_doc(f"b{i}", "bb", ["x"]) for i in range(3)]
            + [make_doc(f"c{i}", "cc", ["x"]) for i in range(5)]
        )
        assert compute_stats(docs).median_documents == 3

    def test_against_wordcount_oracle(self, rng):
        words = "alpha beta gamma delta epsilon zeta".split()
        docs = []
        expect_tokens = 0
        for i in range(40):
            lines = []
            for _ in range(rng.randint(1, 5)):
                k = rng.randint(1, 12)
                lines.append(" ".join(rng.choice(words) for _ in range(k)))
            doc = make_doc(f"d{i}", rng.choice(["en", "fr", "de"]), lines)
            expect_tokens += sum(len(l.split()) for l in lines)
            docs.append(doc)
        stats = compute_stats(docs)
        assert stats.n_tokens == expect_tokens
        assert stats.n_documents == 40

    def test_reorder_invariant(self, rng):
        docs = [make_doc(f"d{i}", rng.choice("abc"), ["w " * i]) for i in range(1, 20)]
        s1 = compute_stats(docs)
        shuffled = docs[:]
        rng.shuffle(shuffled)
        s2 = compute_stats(shuffled)
        assert s1.to_json() == s2.to_json()

    def test_empty(self):
        stats = compute_stats([])
        assert stats.n_documents == 0
        assert stats.to_json()


class TestDocJson:
    def test_round_trip(self):
        doc = make_doc("id1", "fr", ["ligne une", "ligne deux"], url="http://x")
        again = doc_from_json(doc_to_json(doc))
        assert again.id == "id1"
        assert again.lang.code == "fr"
        assert again.lines == ["ligne une", "ligne deux"]
        assert again.source_url == "http://x"
