"""Text metrics shared by the filtering, mining and memorization stages.

chrF is implemented from scratch (character n-gram F-beta with the
``nc:6|nw:0|space:no`` configuration, effective-order averaging, 0-100
scale). Levenshtein similarity, token overlap and script composition are
likewise self-contained so every threshold in the pipeline is auditable.
"""

from __future__ import annotations

import bisect
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .datafiles import load_lang_scripts


@dataclass(frozen=True)
class ChrfParams:
    max_char_order: int = 6
    word_order: int = 0
    beta: float = 2.0
    effective_order: bool = True
    strip_whitespace: bool = True

    def __post_init__(self):
        if self.max_char_order < 1:
            raise ValueError("max_char_order must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.word_order != 0:
            raise ValueError("word-order components are not supported")


DEFAULT_CHRF = ChrfParams()


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def chrf(hypothesis: str, reference: str, params: ChrfParams = DEFAULT_CHRF) -> float:
    """Character n-gram F-beta averaged over orders 1..max_char_order.

    Whitespace is removed before n-gram extraction when strip_whitespace is
    set. With effective_order, orders where neither side has any n-gram are
    skipped instead of counting as zero. Returns a score in [0, 100]; both
    strings empty scores 100, exactly one empty scores 0.
    """
    if params.strip_whitespace:
        hypothesis = "".join(hypothesis.split())
        reference = "".join(reference.split())
    if not hypothesis and not reference:
        return 100.0
    if not hypothesis or not reference:
        return 0.0

    beta_sq = params.beta * params.beta
    f_sum = 0.0
    effective = 0
    for n in range(1, params.max_char_order + 1):
        hyp = _char_ngrams(hypothesis, n)
        ref = _char_ngrams(reference, n)
        hyp_total = sum(hyp.values())
        ref_total = sum(ref.values())
        if hyp_total == 0 and ref_total == 0:
            if not params.effective_order:
                effective += 1
            continue
        overlap = sum(min(c, ref[g]) for g, c in hyp.items())
        prec = overlap / hyp_total if hyp_total else 0.0
        rec = overlap / ref_total if ref_total else 0.0
        denom = beta_sq * prec + rec
        f_sum += (1 + beta_sq) * prec * rec / denom if denom > 0 else 0.0
        effective += 1
    if effective == 0:
        return 0.0
    return 100.0 * f_sum / effective


def levenshtein_distance(a: Sequence, b: Sequence) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def levenshtein_similarity(a: Sequence, b: Sequence) -> float:
    """1 - edit_distance / max(len); two empty sequences score 1.0."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest


def ngrams(tokens: Sequence, n: int) -> Counter:
    """Multiset of all contiguous length-n windows; empty if input is shorter."""
    if n <= 0:
        raise ValueError("n must be >= 1")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def token_overlap(src_tokens: Sequence[str], tgt_tokens: Sequence[str]) -> float:
    """Multiset token overlap normalized by the longer side; both empty -> 0."""
    longest = max(len(src_tokens), len(tgt_tokens))
    if longest == 0:
        return 0.0
    src, tgt = Counter(src_tokens), Counter(tgt_tokens)
    inter = sum(min(c, tgt[t]) for t, c in src.items())
    return inter / longest


# Unicode block ranges -> script name, for the scripts that appear in the
# language table. Letters outside every range count as "Other". Ranges are
# (start, end inclusive, script).
_SCRIPT_RANGES = [
    (0x0041, 0x005A, "Latin"), (0x0061, 0x007A, "Latin"),
    (0x00C0, 0x00FF, "Latin"), (0x0100, 0x024F, "Latin"),
    (0x0250, 0x02AF, "Latin"),
    (0x0370, 0x03FF, "Greek"),
    (0x0400, 0x052F, "Cyrillic"),
    (0x0530, 0x058F, "Armenian"),
    (0x0590, 0x05FF, "Hebrew"),
    (0x0600, 0x06FF, "Arabic"),
    (0x0700, 0x074F, "Syriac"),
    (0x0750, 0x077F, "Arabic"),
    (0x0780, 0x07BF, "Thaana"),
    (0x08A0, 0x08FF, "Arabic"),
    (0x0900, 0x097F, "Devanagari"),
    (0x0980, 0x09FF, "Bengali"),
    (0x0A00, 0x0A7F, "Gurmukhi"),
    (0x0A80, 0x0AFF, "Gujarati"),
    (0x0B00, 0x0B7F, "Oriya"),
    (0x0B80, 0x0BFF, "Tamil"),
    (0x0C00, 0x0C7F, "Telugu"),
    (0x0C80, 0x0CFF, "Kannada"),
    (0x0D00, 0x0D7F, "Malayalam"),
    (0x0D80, 0x0DFF, "Sinhala"),
    (0x0E00, 0x0E7F, "Thai"),
    (0x0E80, 0x0EFF, "Lao"),
    (0x0F00, 0x0FFF, "Tibetan"),
    (0x1000, 0x109F, "Myanmar"),
    (0x10A0, 0x10FF, "Georgian"),
    (0x1100, 0x11FF, "Hangul"),
    (0x1200, 0x139F, "Ethiopic"),
    (0x13A0, 0x13FF, "Cherokee"),
    (0x1400, 0x167F, "Canadian_Aboriginal"),
    (0x1780, 0x17FF, "Khmer"),
    (0x1800, 0x18AF, "Mongolian"),
    (0x18B0, 0x18FF, "Canadian_Aboriginal"),
    (0x19E0, 0x19FF, "Khmer"),
    (0x1C80, 0x1C8F, "Cyrillic"),
    (0x1C90, 0x1CBF, "Georgian"),
    (0x1D00, 0x1DBF, "Latin"),
    (0x1E00, 0x1EFF, "Latin"),
    (0x1F00, 0x1FFF, "Greek"),
    (0x2C60, 0x2C7F, "Latin"),
    (0x2D00, 0x2D2F, "Georgian"),
    (0x2D30, 0x2D7F, "Tifinagh"),
    (0x2D80, 0x2DDF, "Ethiopic"),
    (0x2DE0, 0x2DFF, "Cyrillic"),
    (0x2E80, 0x2FDF, "Han"),
    (0x3040, 0x309F, "Hiragana"),
    (0x30A0, 0x30FF, "Katakana"),
    (0x3130, 0x318F, "Hangul"),
    (0x31F0, 0x31FF, "Katakana"),
    (0x3400, 0x4DBF, "Han"),
    (0x4E00, 0x9FFF, "Han"),
    (0xA640, 0xA69F, "Cyrillic"),
    (0xA720, 0xA7FF, "Latin"),
    (0xA8E0, 0xA8FF, "Devanagari"),
    (0xA960, 0xA97F, "Hangul"),
    (0xA9E0, 0xA9FF, "Myanmar"),
    (0xAA60, 0xAA7F, "Myanmar"),
    (0xAB00, 0xAB2F, "Ethiopic"),
    (0xAB30, 0xAB6F, "Latin"),
    (0xAB70, 0xABBF, "Cherokee"),
    (0xAC00, 0xD7FF, "Hangul"),
    (0xF900, 0xFAFF, "Han"),
    (0xFB00, 0xFB06, "Latin"),
    (0xFB13, 0xFB17, "Armenian"),
    (0xFB1D, 0xFB4F, "Hebrew"),
    (0xFB50, 0xFDFF, "Arabic"),
    (0xFE70, 0xFEFF, "Arabic"),
    (0xFF21, 0xFF3A, "Latin"), (0xFF41, 0xFF5A, "Latin"),
    (0xFF66, 0xFF9D, "Katakana"),
    (0xFFA0, 0xFFDC, "Hangul"),
    (0x20000, 0x2EBEF, "Han"),
]
_SCRIPT_RANGES.sort()
_RANGE_STARTS = [r[0] for r in _SCRIPT_RANGES]


def char_script(ch: str) -> str:
    """Script name of a character per the block-range table, else "Other"."""
    cp = ord(ch)
    i = bisect.bisect_right(_RANGE_STARTS, cp) - 1
    if i >= 0:
        start, end, script = _SCRIPT_RANGES[i]
        if cp <= end:
            return script
    return "Other"


@dataclass
class ScriptProfile:
    fractions: dict[str, float] = field(default_factory=dict)
    dominant_script: str | None = None
    n_letters: int = 0

    def in_script(self, lang) -> float | None:
        """Fraction of letters in the script(s) expected for lang; 0 when
        the text has no letters. None when the language is unmapped."""
        expected = expected_scripts(lang)
        if expected is None:
            return None
        return sum(self.fractions.get(s, 0.0) for s in expected)


_CANON_SCRIPTS: dict[str, tuple[str, ...]] | None = None


def expected_scripts(lang) -> tuple[str, ...] | None:
    """Expected script names for a language tag, or None when unmapped."""
    global _CANON_SCRIPTS
    if _CANON_SCRIPTS is None:
        from .core import canon

        _CANON_SCRIPTS = {canon(k): v for k, v in load_lang_scripts().items()}
    from .core import canon

    return _CANON_SCRIPTS.get(canon(lang))


def script_profile(text: str) -> ScriptProfile:
    """Per-script fractions over letter characters (category L*)."""
    counts: Counter = Counter()
    for ch in text:
        if unicodedata.category(ch).startswith("L"):
            counts[char_script(ch)] += 1
    total = sum(counts.values())
    if total == 0:
        return ScriptProfile()
    fractions = {s: c / total for s, c in counts.items()}
    dominant = max(counts.items(), key=lambda kv: (kv[1], kv[0]))[0]
    return ScriptProfile(fractions, dominant, total)
