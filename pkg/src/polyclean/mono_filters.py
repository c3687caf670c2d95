"""Preliminary page filters and the questionable-sentence scorer.

The document gate drops pages whose questionable-sentence fraction
exceeds 20% (strict) or that have fewer than 5 sentences. A sentence is
questionable when any of five criteria fires: language mismatch with the
document, list-style capitalization, abnormal length, technical-character
density, or a cursed-pattern match.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .core import Document, LangCode, Sentence, lang_eq
from .datafiles import CursedPattern, load_cursed_patterns

MIN_LONG_LINES = 3
LONG_LINE_CHARS = 200
QUESTIONABLE_MAX = Fraction(20, 100)
MIN_SENTENCES = 5
LIST_CASE_MIN_TOKENS = 12
LEN_MIN_CHARS = 20
LEN_MAX_CHARS = 500
TECHNICAL_CHARS = frozenset("0123456789{}+/()>")
TECHNICAL_MAX = Fraction(20, 100)

# Report precedence when several criteria fire on one document.
CRITERIA = ("doc_mismatch", "list_case", "abnormal_length", "technical_chars", "cursed")


@dataclass
class FilterReport:
    stage: str
    kept: int = 0
    dropped: int = 0
    drop_reasons: dict[str, int] = field(default_factory=dict)
    extras: dict[str, int] = field(default_factory=dict)

    def record(self, kept: bool, reason: str | None = None):
        if kept:
            self.kept += 1
        else:
            self.dropped += 1
            if reason:
                self.drop_reasons[reason] = self.drop_reasons.get(reason, 0) + 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "stage": self.stage,
                "kept": self.kept,
                "dropped": self.dropped,
                "drop_reasons": self.drop_reasons,
                "extras": self.extras,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class QuestionableFlags:
    doc_mismatch: bool = False
    list_case: bool = False
    abnormal_length: bool = False
    technical_chars: bool = False
    cursed: bool = False

    def __bool__(self) -> bool:
        return any(
            (self.doc_mismatch, self.list_case, self.abnormal_length,
             self.technical_chars, self.cursed)
        )

    def as_set(self) -> set[str]:
        return {name for name in CRITERIA if getattr(self, name)}


def dedup_lines(docs: Iterable[Document], registry: dict | None = None) -> Iterator[Document]:
    """Keep each distinct line (trailing whitespace ignored) only in the
    document where it first appears, in stream order."""
    seen = registry if registry is not None else {}
    for doc in docs:
        kept_lines = []
        for line in doc.lines:
            key = line.rstrip()
            if key not in seen:
                seen[key] = True
                kept_lines.append(line)
        doc.lines = kept_lines
        yield doc


def prelim_page_filter(doc: Document) -> tuple[bool, str | None]:
    """Remove "Javascript" lines in place, then decide keep/drop.

    Drop when the remaining page contains "lorem ipsum" (any case) or "{",
    or has fewer than 3 lines of 200+ characters.
    """
    doc.lines = [l for l in doc.lines if "Javascript" not in l]
    text = doc.text
    if "lorem ipsum" in text.lower():
        return False, "lorem_ipsum"
    if "{" in text:
        return False, "curly_brace"
    long_lines = sum(1 for l in doc.lines if len(l) >= LONG_LINE_CHARS)
    if long_lines < MIN_LONG_LINES:
        return False, "too_few_long_lines"
    return True, None


def flag_sentence(
    sent: Sentence,
    doc_lang: LangCode,
    patterns: tuple[CursedPattern, ...] | None = None,
) -> QuestionableFlags:
    """Evaluate all five questionable criteria for one sentence."""
    if patterns is None:
        patterns = load_cursed_patterns()
    text = sent.text

    mismatch = sent.predicted_lang is not None and not lang_eq(
        sent.predicted_lang, doc_lang
    )

    tokens = text.split()
    list_case = False
    if len(tokens) >= LIST_CASE_MIN_TOKENS:
        caps = sum(1 for t in tokens if t[0].isupper())
        list_case = Fraction(caps, len(tokens)) > Fraction(1, 2)

    n_chars = len(text)
    abnormal = n_chars < LEN_MIN_CHARS or n_chars > LEN_MAX_CHARS

    technical = False
    if n_chars:
        tech = sum(1 for c in text if c in TECHNICAL_CHARS)
        technical = Fraction(tech, n_chars) > TECHNICAL_MAX

    cursed = any(p.matches(text) for p in patterns)

    flags = QuestionableFlags(mismatch, list_case, abnormal, technical, cursed)
    sent.flags = flags.as_set()
    return flags


def pct_questionable(doc: Document) -> Fraction:
    """Fraction of sentences carrying at least one flag (exact rational)."""
    if not doc.sentences:
        raise ValueError(f"document {doc.id} has no sentences to score")
    flagged = sum(1 for s in doc.sentences if s.flags)
    return Fraction(flagged, len(doc.sentences))


def clean_gate(doc: Document) -> tuple[bool, str | None]:
    """Keep unless score > 20% (strict) or the document has < 5 sentences."""
    if len(doc.sentences) < MIN_SENTENCES:
        return False, "too_few_sentences"
    if pct_questionable(doc) > QUESTIONABLE_MAX:
        return False, "questionable_score"
    return True, None


def first_failing_criterion(doc: Document) -> str | None:
    """Reporting helper: the first criterion (in documented order) that
    fires anywhere in the document."""
    for name in CRITERIA:
        if any(name in s.flags for s in doc.sentences):
            return name
    return None
