import random

import pytest

from polyclean.datafiles import load_virama_chars, load_virama_langs, load_zh_blocklist
from polyclean.scriptfix import (
    ZawgyiResult,
    ZhBlocklist,
    default_virama_config,
    default_zh_blocklist,
    detect_zawgyi,
    fix_virama,
    heuristic_zawgyi_probability,
    maybe_convert_zawgyi,
    zh_blocklist_filter,
)

from conftest import make_doc
from oracles import virama_fix_oracle

# realistic Devanagari/Myanmar/Khmer material plus the space chars and a
# sprinkling of virama-class marks for randomized strings
_BRAHMIC_POOL = (
    "कखगमराि्"  # Devanagari + virama
    "করা্"  # Bengali + virama
    "ကမာ္်"  # Myanmar
    "ករា្"  # Khmer
    "   abc."
)


class TestViramaConfig:
    def test_char_list_loaded(self):
        chars = load_virama_chars()
        assert "्" in chars  # Devanagari virama
        assert "្" in chars  # Khmer coeng
        assert "◌" in chars  # dotted circle: kept deliberately
        assert "
" in chars  # newline: kept deliberately
        assert "\U00011046" in chars  # Brahmi virama (supplementary plane)
        assert len(chars) == 117

    def test_lang_list_loaded(self):
        langs = load_virama_langs()
        assert len(langs) == 40
        assert {"hi", "my", "km", "th", "ks_Deva"} <= set(langs)

    def test_applies_through_normalization(self):
        cfg = default_virama_config()
        assert cfg.applies_to("hi")
        assert cfg.applies_to("fil")  # listed as tl; fil is its canonical form
        assert cfg.applies_to("ks-Deva")
        assert not cfg.applies_to("en")


class TestFixVirama:
    def test_paper_example(self):
        # detached Devanagari virama: space removed, conjunct restored
        assert fix_virama("क ्क", "hi") == "क्क"

    def test_no_virama_unchanged(self):
        assert fix_virama("hello world", "hi") == "hello world"

    def test_non_applicable_lang_identity(self):
        text = "क ्क"
        assert fix_virama(text, "en") == text

    def test_nbsp_and_runs(self):
        assert fix_virama("क   ्", "hi") == "क्"

    def test_space_not_before_virama_kept(self):
        assert fix_virama("क ख", "hi") == "क ख"

    def test_matches_oracle_on_1000_random_strings(self):
        cfg = default_virama_config()
        chars = load_virama_chars()
        rng = random.Random(424242)
        for _ in range(1000):
            text = "".join(
                rng.choice(_BRAHMIC_POOL) for _ in range(rng.randint(0, 60))
            )
            fixed = fix_virama(text, "hi", cfg)
            assert fixed == virama_fix_oracle(text, chars)
            # idempotent and length-non-increasing
            assert fix_virama(fixed, "hi", cfg) == fixed
            assert len(fixed) <= len(text)

    def test_only_spaces_removed(self, rng):
        for _ in range(200):
            text = "".join(rng.choice(_BRAHMIC_POOL) for _ in range(40))
            fixed = fix_virama(text, "hi")
            diff = {}
            for ch in text:
                diff[ch] = diff.get(ch, 0) + 1
            for ch in fixed:
                diff[ch] -= 1
            removed = {ch for ch, n in diff.items() if n}
            assert removed <= {" ", " "}


# Myanmar-script fixtures. The Unicode string spells "myanmar" with the
# standard mark order (medial/asat after consonants); the Zawgyi string is
# the visual-order byte sequence those fonts use for the same word.
UNICODE_MYANMAR = "မြန်မာ မြန်မာစာ"
ZAWGYI_MYANMAR = "ျမန္မာ ေရးထား"


class TestZawgyi:
    def test_empty_string(self):
        assert detect_zawgyi("") == 0.0

    def test_unicode_fixture_below_half(self):
        assert detect_zawgyi(UNICODE_MYANMAR) < 0.5

    def test_zawgyi_fixture_above_half(self):
        assert detect_zawgyi(ZAWGYI_MYANMAR) > 0.5

    def test_non_myanmar_text_scores_zero(self):
        assert heuristic_zawgyi_probability("plain latin text") == 0.0

    def test_threshold_one_is_identity(self):
        doc = make_doc("d", "my", [ZAWGYI_MYANMAR])
        res = maybe_convert_zawgyi(doc, threshold=1.0, converter=lambda s: "CONVERTED")
        assert not res.converted
        assert doc.lines == [ZAWGYI_MYANMAR]

    def test_below_threshold_unchanged(self):
        doc = make_doc("d", "my", [UNICODE_MYANMAR])
        res = maybe_convert_zawgyi(doc, converter=lambda s: "CONVERTED")
        assert not res.converted

    def test_identity_converter_marks_converted(self):
        doc = make_doc("d", "my", [ZAWGYI_MYANMAR])
        res = maybe_convert_zawgyi(doc)
        assert res.converted
        assert doc.lines == [ZAWGYI_MYANMAR]

    def test_converter_applied(self):
        doc = make_doc("d", "my", [ZAWGYI_MYANMAR])
        res = maybe_convert_zawgyi(doc, converter=lambda s: s.replace("္", "်"))
        assert res.converted
        assert "္" not in doc.text

    def test_converter_failure_reported(self):
        def boom(s):
            raise RuntimeError("table missing")

        doc = make_doc("d", "my", [ZAWGYI_MYANMAR])
        res = maybe_convert_zawgyi(doc, converter=boom)
        assert not res.converted
        assert "table missing" in res.error
        assert doc.lines == [ZAWGYI_MYANMAR]

    def test_non_myanmar_language_skipped(self):
        doc = make_doc("d", "en", [ZAWGYI_MYANMAR])
        res = maybe_convert_zawgyi(doc)
        assert not res.converted and res.probability == 0.0

    def test_result_type(self):
        assert isinstance(maybe_convert_zawgyi(make_doc("d", "my", ["x"])), ZawgyiResult)


class TestZhBlocklist:
    def test_blocklist_loaded(self):
        entries = load_zh_blocklist()
        assert "caoporn" in entries
        assert "91porn" in entries
        assert "一本道" in entries
        assert len(entries) == 90

    def test_known_signal_dropped(self):
        doc = make_doc("d", "zh", ["这是 caoporn 网站"])
        keep, reason = zh_blocklist_filter(doc)
        assert not keep and reason == "zh_blocklist"

    def test_clean_doc_kept(self):
        doc = make_doc("d", "zh", ["今天天气很好。"])
        keep, _ = zh_blocklist_filter(doc)
        assert keep

    def test_substring_semantics_mid_token(self):
        doc = make_doc("d", "zh", ["xx91pornyy"])
        keep, _ = zh_blocklist_filter(doc)
        assert not keep

    def test_never_drops_without_signal(self, rng):
        bl = default_zh_blocklist()
        safe = ["学校", "工作", "天气", "news", "report"]
        for _ in range(100):
            text = " ".join(rng.choice(safe) for _ in range(10))
            doc = make_doc("d", "zh", [text])
            assert zh_blocklist_filter(doc, bl)[0]

    def test_empty_entries_rejected(self):
        with pytest.raises(ValueError):
            ZhBlocklist(("ok", ""))
        with pytest.raises(ValueError):
            ZhBlocklist(())
