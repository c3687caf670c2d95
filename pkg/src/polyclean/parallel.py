"""Parallel-corpus filters, back-translation filtering and pivot mining.

Sentence pairs stream through per-pair filters (dedup, overlap, length
ratio, script, toxicity) whose outcomes are order-independent, then
English-centric bitexts can be pivot-joined into cross bitexts when their
English sides match exactly or share an 8-gram.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .core import LangCode, canon, normalize_lang_code, whitespace_tokens
from .datafiles import load_ratio_exempt_langs
from .metrics import ChrfParams, DEFAULT_CHRF, chrf, ngrams, script_profile, token_overlap

OVERLAP_MAX = 0.75
OVERLAP_MIN_TOKENS = 5
RATIO_LO = 0.66
RATIO_HI = 1.5
IN_SCRIPT_MIN = 0.5
TOXICITY_REVIEW_RATE = 0.03
BT_ROUNDTRIP_MIN = 0.32
BT_COPY_MAX = 0.30
BT_RATIO_BOUNDS = (0.45, 1.6)
PIVOT_NGRAM_ORDER = 8


@dataclass(frozen=True)
class SentencePair:
    src_lang: LangCode
    tgt_lang: LangCode
    src_text: str
    tgt_text: str
    origin: str = ""

    def key(self) -> tuple[str, str, str, str]:
        return (self.src_lang.code, self.tgt_lang.code, self.src_text, self.tgt_text)


@dataclass(frozen=True)
class RatioExemptions:
    langs: frozenset[str]
    _canon: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_canon", frozenset(canon(l) for l in self.langs))

    def __contains__(self, lang) -> bool:
        return canon(lang) in self._canon


def default_ratio_exemptions() -> RatioExemptions:
    return RatioExemptions(load_ratio_exempt_langs())


def dedup_pairs(pairs: Iterable[SentencePair]) -> Iterator[SentencePair]:
    """First occurrence of each (langs, source, target) tuple survives."""
    seen = set()
    for pair in pairs:
        k = pair.key()
        if k not in seen:
            seen.add(k)
            yield pair


def overlap_filter(pair: SentencePair) -> tuple[bool, str | None]:
    """Drop near-copies: > 75% token overlap, but only when both sides are
    longer than 5 tokens (entity translations stay)."""
    src = whitespace_tokens(pair.src_text)
    tgt = whitespace_tokens(pair.tgt_text)
    if min(len(src), len(tgt)) > OVERLAP_MIN_TOKENS and token_overlap(src, tgt) > OVERLAP_MAX:
        return False, "overlap"
    return True, None


def length_ratio_filter(
    pair: SentencePair, exemptions: RatioExemptions | None = None
) -> tuple[bool, str | None]:
    """Drop pairs whose source/target token ratio leaves [0.66, 1.5],
    unless either language is exempt (non-whitespace scripts mostly)."""
    if exemptions is None:
        exemptions = default_ratio_exemptions()
    if pair.src_lang in exemptions or pair.tgt_lang in exemptions:
        return True, None
    n_src = len(whitespace_tokens(pair.src_text))
    n_tgt = len(whitespace_tokens(pair.tgt_text))
    if n_tgt == 0:
        return False, "empty_target"
    ratio = n_src / n_tgt
    if ratio < RATIO_LO or ratio > RATIO_HI:
        return False, "length_ratio"
    return True, None


def script_filter(pair: SentencePair) -> tuple[bool, str | None]:
    """Drop pairs under 50% in-script on either side; unmapped languages
    pass with a warning reason (cannot judge)."""
    for lang, text, side in (
        (pair.src_lang, pair.src_text, "src"),
        (pair.tgt_lang, pair.tgt_text, "tgt"),
    ):
        frac = script_profile(text).in_script(lang)
        if frac is None:
            return True, f"unmapped_script_{side}"
        if frac < IN_SCRIPT_MIN:
            return False, "off_script"
    return True, None


# Toxicity wordlists: {canonical lang code: set of terms}. Terms match as
# whole whitespace tokens after the same split the other filters use.
ToxicityWordlists = dict


def load_toxicity_wordlists(paths: dict[str, str]) -> ToxicityWordlists:
    """paths: lang code -> file with one term per line."""
    lists = {}
    for lang, path in paths.items():
        with open(path, encoding="utf-8") as f:
            terms = {l.strip() for l in f if l.strip() and not l.startswith("#")}
        lists[canon(lang)] = terms
    return lists


def _has_toxic_term(text: str, terms: set[str]) -> bool:
    return any(t in terms for t in whitespace_tokens(text))


def toxicity_filter(
    pair: SentencePair, wordlists: ToxicityWordlists
) -> tuple[bool, str | None]:
    """Drop on unmatched toxicity: a listed term on exactly one side.
    Sides without a wordlist pass through."""
    src_terms = wordlists.get(canon(pair.src_lang))
    tgt_terms = wordlists.get(canon(pair.tgt_lang))
    if src_terms is None and tgt_terms is None:
        return True, None
    src_hit = _has_toxic_term(pair.src_text, src_terms) if src_terms else False
    tgt_hit = _has_toxic_term(pair.tgt_text, tgt_terms) if tgt_terms else False
    if src_hit != tgt_hit:
        return False, "unmatched_toxicity"
    return True, None


def toxicity_report(
    pairs: Sequence[SentencePair], wordlists: ToxicityWordlists
) -> dict:
    """Per-language flagged fractions plus the >3% human-review list.
    Languages over the review rate are reported, not auto-removed."""
    flagged: Counter = Counter()
    totals: Counter = Counter()
    for pair in pairs:
        keep, _ = toxicity_filter(pair, wordlists)
        for lang in (canon(pair.src_lang), canon(pair.tgt_lang)):
            totals[lang] += 1
            if not keep:
                flagged[lang] += 1
    rates = {l: flagged[l] / totals[l] for l in totals}
    review = sorted(l for l, r in rates.items() if r > TOXICITY_REVIEW_RATE)
    return {"flag_rates": rates, "review_languages": review}


# --- back-translation candidate filtering -------------------------------------


@dataclass(frozen=True)
class BtCandidate:
    natural_target: str
    bt_source: str
    roundtrip_target: str
    src_lang: LangCode
    tgt_lang: LangCode


def bt_filter(
    cand: BtCandidate,
    langid_predict: Callable[[str], LangCode] | None = None,
    chrf_params: ChrfParams = DEFAULT_CHRF,
    roundtrip_min: float = BT_ROUNDTRIP_MIN,
    copy_max: float = BT_COPY_MAX,
    ratio_bounds: tuple[float, float] = BT_RATIO_BOUNDS,
) -> tuple[bool, str | None]:
    """Keep a back-translated candidate only when all four checks pass:
    round-trip chrF >= 0.32 (hallucination), source-target chrF <= 0.30
    (copying), token ratio strictly inside (0.45, 1.6), and source LangID
    agreement (skipped when no predictor is supplied)."""
    roundtrip = chrf(cand.roundtrip_target, cand.natural_target, chrf_params) / 100.0
    if roundtrip < roundtrip_min:
        return False, "roundtrip_chrf"
    copy_score = chrf(cand.bt_source, cand.natural_target, chrf_params) / 100.0
    if copy_score > copy_max:
        return False, "copy_chrf"
    n_src = len(whitespace_tokens(cand.bt_source))
    n_tgt = len(whitespace_tokens(cand.natural_target))
    if n_tgt == 0:
        return False, "empty_target"
    ratio = n_src / n_tgt
    lo, hi = ratio_bounds
    if not lo < ratio < hi:
        return False, "length_ratio"
    if langid_predict is not None:
        predicted = langid_predict(cand.bt_source)
        if canon(predicted) != canon(cand.src_lang):
            return False, "langid"
    return True, None


# --- multiway pivot mining -----------------------------------------------------


@dataclass
class MiningReport:
    emitted: int = 0
    duplicates: int = 0
    multiplicity: dict[tuple[str, str], int] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "emitted": self.emitted,
                "duplicates": self.duplicates,
                "multiplicity": {f"{a}-{b}": n for (a, b), n in sorted(self.multiplicity.items())},
            },
            sort_keys=True,
        )


def _pivot_records(pairs: Iterable[SentencePair]):
    """(lang, text, en_text, role) per en-centric pair; role records which
    side English was on, fixing the emit orientation."""
    records = []
    for pair in pairs:
        if canon(pair.tgt_lang) == "en":
            records.append((pair.src_lang, pair.src_text, pair.tgt_text, "left"))
        elif canon(pair.src_lang) == "en":
            records.append((pair.tgt_lang, pair.tgt_text, pair.src_text, "right"))
    return records


def mine_multiway(
    pairs: Iterable[SentencePair],
    predicate: str = "both",
    n: int = PIVOT_NGRAM_ORDER,
    report: MiningReport | None = None,
) -> list[SentencePair]:
    """Join xx-en with en-yy records through their English sides.

    Two English sides match when they are exactly equal ("exact"), share
    an n-gram ("ngram"), or either ("both", the default). Emitted pairs
    are deduplicated; multiplicity before dedup lands in the report. The
    n-gram route is accelerated by an inverted index but stays
    outcome-equivalent to the quadratic scan.
    """
    if predicate not in ("exact", "ngram", "both"):
        raise ValueError(f"unknown predicate: {predicate}")
    records = _pivot_records(pairs)
    lefts = [(i, r) for i, r in enumerate(records) if r[3] == "left"]
    rights = [(i, r) for i, r in enumerate(records) if r[3] == "right"]

    exact_index: dict[str, list[int]] = defaultdict(list)
    gram_index: dict[tuple, list[int]] = defaultdict(list)
    right_grams: dict[int, set] = {}
    for j, (_, _, en, _) in rights:
        if predicate in ("exact", "both"):
            exact_index[en].append(j)
        if predicate in ("ngram", "both"):
            grams = set(ngrams(whitespace_tokens(en), n))
            right_grams[j] = grams
            for g in grams:
                gram_index[g].append(j)

    out: list[SentencePair] = []
    seen = set()
    rep = report if report is not None else MiningReport()
    for _, (x_lang, x_text, en_left, _) in lefts:
        candidates: set[int] = set()
        if predicate in ("exact", "both"):
            candidates.update(exact_index.get(en_left, ()))
        if predicate in ("ngram", "both"):
            for g in set(ngrams(whitespace_tokens(en_left), n)):
                candidates.update(gram_index.get(g, ()))
        for j in sorted(candidates):
            y_lang, y_text, _, _ = records[j]
            if canon(x_lang) == canon(y_lang):
                continue
            mined = SentencePair(x_lang, y_lang, x_text, y_text, origin="multiway")
            lp = (mined.src_lang.code, mined.tgt_lang.code)
            rep.multiplicity[lp] = rep.multiplicity.get(lp, 0) + 1
            k = mined.key()
            if k in seen:
                rep.duplicates += 1
                continue
            seen.add(k)
            out.append(mined)
    rep.emitted = len(out)
    return out


# --- chain orchestration ---------------------------------------------------------


def apply_pair_filters(
    pairs: Iterable[SentencePair],
    wordlists: ToxicityWordlists | None = None,
    exemptions: RatioExemptions | None = None,
    dedup: bool = True,
) -> tuple[list[SentencePair], list]:
    """Run the full per-pair chain; returns survivors and per-stage reports."""
    from .mono_filters import FilterReport

    stages: list[tuple[str, Callable[[SentencePair], tuple[bool, str | None]]]] = [
        ("overlap", overlap_filter),
        ("length_ratio", lambda p: length_ratio_filter(p, exemptions)),
        ("script", script_filter),
    ]
    if wordlists is not None:
        stages.append(("toxicity", lambda p: toxicity_filter(p, wordlists)))

    stream = list(dedup_pairs(pairs)) if dedup else list(pairs)
    reports = []
    if dedup:
        dedup_report = FilterReport(stage="dedup_pairs")
        dedup_report.kept = len(stream)
        reports.append(dedup_report)
    for name, fn in stages:
        rep = FilterReport(stage=name)
        survivors = []
        for pair in stream:
            keep, reason = fn(pair)
            rep.record(keep, reason)
            if keep:
                if reason:  # kept-with-warning (e.g. unmapped script)
                    rep.extras[reason] = rep.extras.get(reason, 0) + 1
                survivors.append(pair)
        stream = survivors
        reports.append(rep)
    return stream, reports


# --- TSV I/O -----------------------------------------------------------------


def pair_to_tsv(pair: SentencePair) -> str:
    fields = (pair.src_lang.code, pair.tgt_lang.code, pair.src_text, pair.tgt_text, pair.origin)
    if any("\t" in f or "\n" in f for f in fields):
        raise ValueError("TSV fields may not contain tabs or newlines")
    return "\t".join(fields)


def pair_from_tsv(line: str) -> SentencePair:
    parts = line.rstrip("\n").split("\t")
    if len(parts) == 4:
        parts.append("")
    if len(parts) != 5:
        raise ValueError(f"expected 4 or 5 tab-separated fields, got {len(parts)}")
    src_lang, tgt_lang, src_text, tgt_text, origin = parts
    return SentencePair(
        normalize_lang_code(src_lang), normalize_lang_code(tgt_lang),
        src_text, tgt_text, origin,
    )


def read_pairs(path) -> Iterator[SentencePair]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                yield pair_from_tsv(line)


def write_pairs(path, pairs: Iterable[SentencePair]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for pair in pairs:
            f.write(pair_to_tsv(pair) + "\n")
            n += 1
    return n
