"""Canonical data model: documents, language codes, sentences, stats.

Language codes follow BCP-47 with the dataset-specific conventions:
2-letter codes where they exist, script subtags only when the script is
not the language's default, and a fixed rename table for codes that
earlier corpora used inconsistently.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Protocol, Sequence


class InvalidLangCode(ValueError):
    pass


class UndefinedLanguage(ValueError):
    pass


# Preferred codes where sources disagree on which ISO code to use.
_CONVENTIONS = {
    "tl": "fil",
    "tw": "ak",
    "nb": "no",
    "pbt": "ps",
    "zlm": "ms",
}

# Post-audit renames and merges (merge targets behave like renames here).
_RENAMES = {
    "dty": "zxx-xx-dtynoise",
    "fan": "bum",
    "cjk": "gil",
    "bjj": "awa",
    "ss-sz": "ss",
}

_RENAME_TARGETS = {v.lower(): v for v in (*_CONVENTIONS.values(), *_RENAMES.values())}


@dataclass(frozen=True)
class LangCode:
    """A normalized language tag.

    ``unmapped`` marks tags that passed through without a table entry; it
    is excluded from equality so an unmapped "xyz" still compares equal to
    a mapped "xyz" once one is added.
    """

    code: str
    script_suffix: str | None = field(default=None, compare=False)
    unmapped: bool = field(default=False, compare=False)

    def __str__(self) -> str:
        return self.code

    @property
    def base(self) -> str:
        return self.code.split("-", 1)[0]


def normalize_lang_code(raw: str | LangCode) -> LangCode:
    """Normalize a raw language tag to its canonical form.

    Separators become "-", the base subtag is lowercased, 4-letter script
    subtags are title-cased, and the convention/rename tables are applied.
    Unknown tags pass through (lowercased base) with the unmapped marker.
    Idempotent: feeding the output back returns it unchanged.
    """
    if isinstance(raw, LangCode):
        return raw
    if not raw or not raw.strip():
        raise InvalidLangCode("empty language code")
    subtags = raw.strip().replace("_", "-").split("-")
    subtags[0] = subtags[0].lower()
    rest = [t.title() if len(t) == 4 and t.isalpha() else t for t in subtags[1:]]
    tag = "-".join([subtags[0], *rest])

    key = tag.lower()
    mapped = True
    if key in _RENAME_TARGETS:
        tag = _RENAME_TARGETS[key]
    elif key in _RENAMES:
        tag = _RENAMES[key]
    elif subtags[0] in _CONVENTIONS:
        tag = "-".join([_CONVENTIONS[subtags[0]], *rest])
    else:
        mapped = _in_known_inventory(tag)

    script = next((t for t in tag.split("-")[1:] if len(t) == 4 and t.isalpha()), None)
    return LangCode(tag, script, unmapped=not mapped)


_KNOWN_INVENTORY: frozenset[str] | None = None


def _in_known_inventory(tag: str) -> bool:
    # Tags outside every mapping table are "known" when one of the shipped
    # language tables lists them; anything else passes through as unmapped.
    global _KNOWN_INVENTORY
    if _KNOWN_INVENTORY is None:
        from .datafiles import load_lang_names, load_lang_scripts

        _KNOWN_INVENTORY = frozenset(
            k.replace("_", "-").lower()
            for table in (load_lang_scripts(), load_lang_names())
            for k in table
        )
    return (
        tag.lower() in _KNOWN_INVENTORY
        or tag.split("-", 1)[0].lower() in _KNOWN_INVENTORY
    )


def canon(tag: str | LangCode) -> str:
    """Case-folded canonical form, the key used for every table lookup."""
    return normalize_lang_code(tag).code.lower()


def lang_eq(a: str | LangCode, b: str | LangCode) -> bool:
    return canon(a) == canon(b)


@dataclass
class Sentence:
    text: str
    predicted_lang: LangCode | None = None
    flags: set[str] = field(default_factory=set)

    @property
    def questionable(self) -> bool:
        return bool(self.flags)


@dataclass
class Document:
    id: str
    lang: LangCode
    lines: list[str]
    sentences: list[Sentence] = field(default_factory=list)
    source_url: str | None = None

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


@dataclass(frozen=True)
class LangPrediction:
    lang: LangCode
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")


class SentenceLangID(Protocol):
    """Sentence-level LangID contract: one prediction per sentence."""

    def predict(self, text: str) -> LangPrediction: ...


# Sentence splitting: terminal punctuation that ends a sentence when
# followed by whitespace or end of line, and CJK/Brahmic terminators that
# end one unconditionally (those scripts do not space between sentences).
_SPACED_TERMINATORS = ".!?…"
_UNSPACED_TERMINATORS = "。！？।॥"


def split_line(line: str) -> list[str]:
    sentences = []
    start = 0
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in _UNSPACED_TERMINATORS:
            sentences.append(line[start : i + 1])
            start = i + 1
        elif ch in _SPACED_TERMINATORS and (i + 1 == n or line[i + 1].isspace()):
            # run of terminators ("?!", "...") stays with one sentence
            sentences.append(line[start : i + 1])
            start = i + 1
        i += 1
    if start < n:
        sentences.append(line[start:])
    return [s.strip() for s in sentences if s.strip()]


def split_sentences(doc: Document) -> Document:
    """Populate doc.sentences from doc.lines; deterministic, drops only
    whitespace separators."""
    doc.sentences = [Sentence(text) for line in doc.lines for text in split_line(line)]
    return doc


def predict_document_lang(doc: Document, predictor: SentenceLangID) -> LangCode:
    """Majority sentence-level prediction; ties broken by summed
    confidence, then by lexicographic code."""
    if not doc.sentences:
        raise UndefinedLanguage(f"document {doc.id} has no sentences")
    votes: dict[str, int] = {}
    confidence: dict[str, float] = {}
    by_code: dict[str, LangCode] = {}
    for sent in doc.sentences:
        pred = predictor.predict(sent.text)
        sent.predicted_lang = pred.lang
        code = pred.lang.code
        votes[code] = votes.get(code, 0) + 1
        confidence[code] = confidence.get(code, 0.0) + pred.confidence
        by_code.setdefault(code, pred.lang)
    best = min(votes, key=lambda c: (-votes[c], -confidence[c], c))
    return by_code[best]


def whitespace_tokens(text: str) -> list[str]:
    return text.split()


@dataclass
class CorpusStats:
    n_documents: int = 0
    n_sentences: int = 0
    n_tokens: int = 0
    median_documents: float = 0
    median_sentences: float = 0
    median_tokens: float = 0
    per_language: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_documents": self.n_documents,
                "n_sentences": self.n_sentences,
                "n_tokens": self.n_tokens,
                "median_documents": self.median_documents,
                "median_sentences": self.median_sentences,
                "median_tokens": self.median_tokens,
                "per_language": self.per_language,
            },
            ensure_ascii=False,
            sort_keys=True,
        )


def compute_stats(
    docs: Iterable[Document],
    tokenizer: Callable[[str], Sequence[str]] = whitespace_tokens,
) -> CorpusStats:
    """Totals plus per-language medians (languages with >= 1 document)."""
    per: dict[str, dict[str, int]] = {}
    for doc in docs:
        entry = per.setdefault(
            doc.lang.code, {"documents": 0, "sentences": 0, "tokens": 0}
        )
        entry["documents"] += 1
        entry["sentences"] += (
            len(doc.sentences) if doc.sentences else len(split_sentences(doc).sentences)
        )
        entry["tokens"] += sum(len(tokenizer(line)) for line in doc.lines)
    stats = CorpusStats(per_language=per)
    if per:
        stats.n_documents = sum(e["documents"] for e in per.values())
        stats.n_sentences = sum(e["sentences"] for e in per.values())
        stats.n_tokens = sum(e["tokens"] for e in per.values())
        stats.median_documents = statistics.median(e["documents"] for e in per.values())
        stats.median_sentences = statistics.median(e["sentences"] for e in per.values())
        stats.median_tokens = statistics.median(e["tokens"] for e in per.values())
    return stats


# --- document JSON Lines I/O -------------------------------------------------


def doc_to_json(doc: Document) -> str:
    obj = {"id": doc.id, "lang": doc.lang.code, "text": "\n".join(doc.lines)}
    if doc.source_url:
        obj["url"] = doc.source_url
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def doc_from_json(line: str) -> Document:
    obj = json.loads(line)
    return Document(
        id=str(obj["id"]),
        lang=normalize_lang_code(obj["lang"]),
        lines=obj["text"].split("\n") if obj["text"] else [],
        source_url=obj.get("url"),
    )


def read_jsonl(path) -> Iterator[Document]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                yield doc_from_json(line)


def write_jsonl(path, docs: Iterable[Document]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            f.write(doc_to_json(doc) + "\n")
            n += 1
    return n
