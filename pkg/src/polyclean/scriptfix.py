"""Script-level repairs: virama spacing, Zawgyi handling, zh blocklist.

Mis-rendered Brahmic text carries a spurious space before the virama that
detaches it from its consonant; the repair deletes space runs immediately
before any configured virama-class code point, for the configured
languages only. Myanmar-script text additionally goes through a Zawgyi
detector/converter pair (pluggable; a bigram-evidence heuristic detector
and identity converter ship as defaults).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

from .core import Document, canon
from .datafiles import (
    load_virama_chars,
    load_virama_langs,
    load_zh_blocklist,
)

SPACE_CHARS = "  "


@dataclass(frozen=True)
class ViramaConfig:
    virama_chars: frozenset[str]
    applicable_langs: frozenset[str]
    _pattern: re.Pattern = field(init=False, repr=False, compare=False)
    _canon_langs: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cls = "".join(re.escape(c) for c in sorted(self.virama_chars))
        object.__setattr__(
            self, "_pattern", re.compile(f"[{re.escape(SPACE_CHARS)}]+(?=[{cls}])")
        )
        object.__setattr__(
            self, "_canon_langs", frozenset(canon(l) for l in self.applicable_langs)
        )

    def applies_to(self, lang) -> bool:
        return canon(lang) in self._canon_langs


def default_virama_config() -> ViramaConfig:
    return ViramaConfig(load_virama_chars(), load_virama_langs())


def fix_virama(text: str, lang, cfg: ViramaConfig | None = None) -> str:
    """Delete space runs (U+0020, U+00A0) directly before a virama-class
    character; identity for languages outside the configured set."""
    if cfg is None:
        cfg = default_virama_config()
    if not cfg.applies_to(lang):
        return text
    return cfg._pattern.sub("", text)


# --- Zawgyi ------------------------------------------------------------------

_MY_CONSONANTS = frozenset(chr(c) for c in range(0x1000, 0x1021))
_MY_MEDIALS = frozenset("ျြွှ")
# Code points Burmese Unicode text essentially never uses but Zawgyi maps
# glyph variants onto (Mon/Shan/Karen ranges, Zawgyi-specific vowels).
_ZAWGYI_ONLY = frozenset(
    chr(c)
    for c in (
        0x1033, 0x1034, 0x105A, 0x1060, 0x1061, 0x1064, 0x1065, 0x1066,
        0x1067, 0x1068, 0x1069, 0x106A, 0x106B, 0x106C, 0x106D, 0x1070,
        0x1076, 0x1077, 0x1078, 0x1079, 0x107A, 0x107B, 0x107C, 0x107D,
        0x107E, 0x107F, 0x1080, 0x1081, 0x1086, 0x1087, 0x1088, 0x108A,
        0x108F, 0x1090, 0x1091, 0x1092, 0x1094, 0x1095, 0x1096, 0x1097,
    )
)
_MYANMAR_BLOCK = range(0x1000, 0x10A0)

ZawgyiDetector = Callable[[str], float]
ZawgyiConverter = Callable[[str], str]


def heuristic_zawgyi_probability(text: str) -> float:
    """Character-bigram evidence score squashed to a probability.

    Unicode Burmese orders marks after their consonant (vowel-e U+1031 and
    medials follow the cluster; U+1039 stacks a following consonant;
    U+103A is the asat). Zawgyi stores visual order (U+1031 and medial-ra
    before the consonant, U+1039 as a visible asat) and reuses rare code
    points for glyph variants. Each occurrence moves the log-odds.
    """
    if not text:
        return 0.0
    score = 0.0
    saw_myanmar = False
    prev = ""
    for i, ch in enumerate(text):
        in_block = ord(ch) in _MYANMAR_BLOCK
        if in_block:
            saw_myanmar = True
        if ch in _ZAWGYI_ONLY:
            score += 2.5
        elif ch == "ေ":
            if prev in _MY_CONSONANTS or prev in _MY_MEDIALS:
                score -= 1.5
            else:
                score += 3.5
        elif ch == "ျ" and prev not in _MY_CONSONANTS:
            score += 3.0
        elif ch == "္":
            nxt = text[i + 1] if i + 1 < len(text) else ""
            score += 2.0 if nxt not in _MY_CONSONANTS else -1.0
        elif ch == "်":
            score -= 2.0
        elif ch in _MY_MEDIALS and prev in _MY_CONSONANTS:
            score -= 1.0
        prev = ch
    if not saw_myanmar:
        return 0.0
    return 1.0 / (1.0 + math.exp(-score))


def detect_zawgyi(text: str, detector: ZawgyiDetector | None = None) -> float:
    detector = detector or heuristic_zawgyi_probability
    if not text:
        return 0.0
    return detector(text)


MYANMAR_SCRIPT_LANGS = frozenset({"my", "mnw", "shn"})


@dataclass
class ZawgyiResult:
    converted: bool
    probability: float
    error: str | None = None


def maybe_convert_zawgyi(
    doc: Document,
    threshold: float = 0.5,
    detector: ZawgyiDetector | None = None,
    converter: ZawgyiConverter | None = None,
) -> ZawgyiResult:
    """Convert documents detected as Zawgyi (probability strictly above the
    threshold) through the configured converter; converter failures leave
    the document unchanged and surface in the result."""
    if canon(doc.lang) not in MYANMAR_SCRIPT_LANGS:
        return ZawgyiResult(False, 0.0)
    prob = detect_zawgyi(doc.text, detector)
    if prob <= threshold:
        return ZawgyiResult(False, prob)
    convert = converter or (lambda s: s)
    try:
        doc.lines = [convert(line) for line in doc.lines]
    except Exception as exc:  # noqa: BLE001 - plug-in boundary
        return ZawgyiResult(False, prob, error=f"{type(exc).__name__}: {exc}")
    return ZawgyiResult(True, prob)


# --- Chinese blocklist ---------------------------------------------------------


@dataclass(frozen=True)
class ZhBlocklist:
    signals: tuple[str, ...]

    def __post_init__(self):
        if not self.signals or any(not s for s in self.signals):
            raise ValueError("blocklist entries must be non-empty")


def default_zh_blocklist() -> ZhBlocklist:
    return ZhBlocklist(load_zh_blocklist())


def zh_blocklist_filter(doc: Document, bl: ZhBlocklist | None = None) -> tuple[bool, str | None]:
    """Drop a Mandarin document when any blocklist string occurs as a
    substring of its text."""
    if bl is None:
        bl = default_zh_blocklist()
    text = doc.text
    for s in bl.signals:
        if s in text:
            return False, "zh_blocklist"
    return True, None
