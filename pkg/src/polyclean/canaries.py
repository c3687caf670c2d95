"""Canary generation: synthetic outlier sequences injected into training
data so later extraction attempts can measure memorization.

Languages get a canary budget from their resource tier; each tier fixes
the canary types, the per-language total and how often each unique canary
repeats. Monolingual canaries reshuffle or interleave real documents (or
append random tails to real prefixes); parallel canaries pair synthetic
sources with interleaved/shuffled real targets; pairwise canaries
interleave two real sentence pairs; generic canaries are fully synthetic.
Everything is deterministic given the master seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .datafiles import load_canary_pairs, load_tier_json
from .tokenizers import SubwordTokenizer, stable_hash

INTERLEAVE_CHUNK = 20
PARALLEL_BATCH = 50
TRAINING_PREFIX_LEN = 100
SHARED_PREFIX_LEN = 100
GENERIC_TOTAL = 80400
GENERIC_SUFFIX_LEN = 100
PAIRWISE_BUCKETS = ((1, 10), (2, 5), (5, 2))  # (repeats, unique) per type
PAIRWISE_TYPES = ("interleaved_both", "interleaved_mislabeled_to")
GENERIC_VARIANTS = (
    ("generic_fully_random", None),
    ("generic_random_prefix", 50),
    ("generic_random_prefix", 100),
    ("generic_random_prefix", 200),
)


class TierTableError(ValueError):
    pass


@dataclass(frozen=True)
class RepeatBucket:
    repeats: int
    unique: int


@dataclass(frozen=True)
class ResourceTier:
    name: str
    lo: int
    hi: int | None  # exclusive; None = unbounded
    rate: float
    types: tuple[str, ...]
    stated_total: int
    buckets: tuple[RepeatBucket, ...]
    known_discrepancy: bool = False
    languages: tuple[str, ...] = ()

    @property
    def instance_total(self) -> int:
        return sum(b.unique * b.repeats for b in self.buckets)

    @property
    def unique_total(self) -> int:
        return sum(b.unique for b in self.buckets)

    def contains(self, count: int) -> bool:
        return count >= self.lo and (self.hi is None or count < self.hi)


@dataclass
class TierTable:
    setting: str
    min_eligible: int
    tiers: tuple[ResourceTier, ...]
    flagged: tuple[str, ...] = ()


def load_tier_table(setting: str) -> TierTable:
    """Load and validate a tier table.

    Every tier must satisfy sum(unique x repeats) == stated total; tiers
    marked known_discrepancy are flagged instead (their bucket list is
    used as-is, never silently patched to the stated total).
    """
    raw = load_tier_json(setting)
    tiers = []
    flagged = []
    for t in raw["tiers"]:
        tier = ResourceTier(
            name=t["name"],
            lo=t["lo"],
            hi=t["hi"],
            rate=t["rate"],
            types=tuple(t["types"]),
            stated_total=t["total"],
            buckets=tuple(RepeatBucket(r, u) for r, u in t["buckets"]),
            known_discrepancy=t.get("known_discrepancy", False),
            languages=tuple(t.get("languages", ())),
        )
        if tier.instance_total != tier.stated_total:
            if not tier.known_discrepancy:
                raise TierTableError(
                    f"tier {tier.name}: bucket sum {tier.instance_total} != "
                    f"stated total {tier.stated_total}"
                )
            flagged.append(
                f"{tier.name}: buckets give {tier.instance_total} instances, "
                f"stated total is {tier.stated_total}; using the bucket list"
            )
        tiers.append(tier)
    return TierTable(raw["setting"], raw["min_eligible_samples"], tuple(tiers), tuple(flagged))


def assign_tier(sample_count: int, table: TierTable) -> ResourceTier | None:
    """Tier whose bounds contain the count; None at or below the
    eligibility floor (no canaries for tiny languages)."""
    if sample_count <= table.min_eligible:
        return None
    for tier in table.tiers:
        if tier.contains(sample_count):
            return tier
    return None


# --- token-sequence generators -------------------------------------------------


def gen_shuffle(doc_tokens: Sequence[int], seed: int) -> list[int]:
    """Uniform permutation of the document's tokens (multiset preserved)."""
    if not doc_tokens:
        raise ValueError("cannot shuffle an empty document")
    out = list(doc_tokens)
    random.Random(seed).shuffle(out)
    return out


def gen_interleave(
    a: Sequence[int], b: Sequence[int], chunk: int = INTERLEAVE_CHUNK
) -> list[int]:
    """Alternate fixed-size chunks of two documents, A first, preserving
    each document's internal order; short trailing chunks are emitted and
    alternation continues with the other side."""
    if not a or not b:
        raise ValueError("both documents must be non-empty")
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    out: list[int] = []
    ia = ib = 0
    take_a = True
    while ia < len(a) or ib < len(b):
        if take_a and ia < len(a):
            out.extend(a[ia : ia + chunk])
            ia += chunk
        elif not take_a and ib < len(b):
            out.extend(b[ib : ib + chunk])
            ib += chunk
        take_a = not take_a
    return out


def random_tokens(n: int, vocab_size: int, rng: random.Random) -> list[int]:
    return [rng.randrange(vocab_size) for _ in range(n)]


def gen_training_prefix(
    doc_tokens: Sequence[int],
    vocab_size: int,
    seed: int,
    prefix_len: int = TRAINING_PREFIX_LEN,
) -> list[int]:
    """Real prefix, uniformly random remainder, same length as the doc.
    Documents shorter than the prefix cannot produce this type."""
    if len(doc_tokens) < prefix_len:
        raise ValueError(
            f"document has {len(doc_tokens)} tokens; needs >= {prefix_len}"
        )
    rng = random.Random(seed)
    return list(doc_tokens[:prefix_len]) + random_tokens(
        len(doc_tokens) - prefix_len, vocab_size, rng
    )


def gen_parallel_canary(
    ctype: str,
    target_docs: Sequence[Sequence[int]],
    shared_prefix: Sequence[int] | None,
    vocab_size: int,
    seed: int,
    batch: int = PARALLEL_BATCH,
) -> tuple[list[int], list[int]]:
    """Source/target token pair for one parallel canary.

    random_prefix_* sources start with the shared 100-token prefix and end
    in a unique random suffix; fully_random_* sources are entirely random.
    *_interleave targets interleave two real targets in 50-token batches;
    *_shuffle targets shuffle one real target.
    """
    rng = random.Random(seed)
    if ctype.endswith("_interleave"):
        if len(target_docs) < 2:
            raise ValueError("interleave targets need two documents")
        target = gen_interleave(target_docs[0], target_docs[1], batch)
    elif ctype.endswith("_shuffle"):
        target = gen_shuffle(target_docs[0], rng.randrange(2**63))
    else:
        raise ValueError(f"unknown parallel canary type: {ctype}")

    if ctype.startswith("random_prefix"):
        if shared_prefix is None:
            raise ValueError("random_prefix canaries need the shared prefix")
        suffix_len = max(1, len(target) - len(shared_prefix))
        source = list(shared_prefix) + random_tokens(suffix_len, vocab_size, rng)
    elif ctype.startswith("fully_random"):
        source = random_tokens(max(1, len(target)), vocab_size, rng)
    else:
        raise ValueError(f"unknown parallel canary type: {ctype}")
    return source, target


def gen_pairwise_canary(
    ctype: str,
    pair_a: tuple[Sequence[int], Sequence[int]],
    pair_b: tuple[Sequence[int], Sequence[int]],
    lang_pair: tuple[str, str],
    qualifying_langs: Sequence[str],
    seed: int,
    batch: int = PARALLEL_BATCH,
) -> tuple[list[int], list[int], str]:
    """Interleave two real sentence pairs on both sides (50-token
    batches); the mislabeled variant also draws a new target-language
    label uniformly from the other qualifying languages."""
    if ctype not in PAIRWISE_TYPES:
        raise ValueError(f"unknown pairwise canary type: {ctype}")
    rng = random.Random(seed)
    source = gen_interleave(pair_a[0], pair_b[0], batch)
    target = gen_interleave(pair_a[1], pair_b[1], batch)
    label = lang_pair[1]
    if ctype == "interleaved_mislabeled_to":
        options = [l for l in qualifying_langs if l != lang_pair[1]]
        if not options:
            raise ValueError("no alternative target labels available")
        label = options[rng.randrange(len(options))]
    return source, target, label


# --- plans ---------------------------------------------------------------------


@dataclass
class CanarySpec:
    canary_id: str
    setting: str
    type: str
    repeats: int
    seed: int
    lang: str | None = None
    lang_pair: tuple[str, str] | None = None
    prefix_seed: int | None = None
    prefix_len: int | None = None
    payload: list[int] | None = None
    payload_pair: tuple[list[int], list[int]] | None = None
    label_override: str | None = None

    def to_json(self, tokenizer: SubwordTokenizer | None = None) -> str:
        obj: dict = {
            "canary_id": self.canary_id,
            "type": self.type,
            "repeats": self.repeats,
            "seed": self.seed,
        }
        if self.lang is not None:
            obj["lang"] = self.lang
        if self.lang_pair is not None:
            obj["lang_pair"] = list(self.lang_pair)
        if self.label_override is not None:
            obj["label_override"] = self.label_override
        if tokenizer is not None:
            if self.payload_pair is not None:
                obj["src_text"] = tokenizer.decode(self.payload_pair[0])
                obj["tgt_text"] = tokenizer.decode(self.payload_pair[1])
            elif self.payload is not None:
                obj["text"] = tokenizer.decode(self.payload)
        else:
            if self.payload_pair is not None:
                obj["src_tokens"] = list(self.payload_pair[0])
                obj["tgt_tokens"] = list(self.payload_pair[1])
            elif self.payload is not None:
                obj["tokens"] = list(self.payload)
        return json.dumps(obj, ensure_ascii=False, sort_keys=True)


@dataclass
class PlanReport:
    setting: str
    per_language: dict[str, dict[str, int]] = field(default_factory=dict)
    flagged_tiers: tuple[str, ...] = ()
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def total_instances(self) -> int:
        return sum(e["instances"] for e in self.per_language.values())

    @property
    def total_unique(self) -> int:
        return sum(e["unique"] for e in self.per_language.values())

    def to_json(self) -> str:
        return json.dumps(
            {
                "setting": self.setting,
                "total_instances": self.total_instances,
                "total_unique": self.total_unique,
                "per_language": self.per_language,
                "flagged_tiers": list(self.flagged_tiers),
                "skipped": self.skipped,
            },
            sort_keys=True,
        )


def plan_language_canaries(
    lang: str,
    tier: ResourceTier,
    setting: str,
    master_seed: int,
) -> list[CanarySpec]:
    """Unique canary specs for one language: canary types cycle
    round-robin inside each repeat bucket."""
    specs = []
    prefix_seed = stable_hash(master_seed, setting, "shared-prefix", lang)
    idx = 0
    for bucket in tier.buckets:
        for u in range(bucket.unique):
            ctype = tier.types[u % len(tier.types)]
            spec = CanarySpec(
                canary_id=f"{setting}:{lang}:{idx:06d}",
                setting=setting,
                type=ctype,
                repeats=bucket.repeats,
                seed=stable_hash(master_seed, setting, lang, idx),
                lang=lang,
            )
            if ctype.startswith("random_prefix") or ctype.startswith("generic_random"):
                spec.prefix_seed = prefix_seed
                spec.prefix_len = SHARED_PREFIX_LEN
            specs.append(spec)
            idx += 1
    return specs


def build_canary_plan(
    sample_counts: dict[str, int],
    table: TierTable,
    master_seed: int,
) -> tuple[list[CanarySpec], PlanReport]:
    """Per-language specs for every eligible language in the inventory."""
    report = PlanReport(setting=table.setting, flagged_tiers=table.flagged)
    specs: list[CanarySpec] = []
    for lang in sorted(sample_counts):
        tier = assign_tier(sample_counts[lang], table)
        if tier is None:
            report.skipped[lang] = "below eligibility threshold"
            continue
        lang_specs = plan_language_canaries(lang, tier, table.setting, master_seed)
        specs.extend(lang_specs)
        report.per_language[lang] = {
            "tier": tier.name,
            "unique": len(lang_specs),
            "instances": sum(s.repeats for s in lang_specs),
        }
    return specs, report


def plan_pairwise_canaries(
    master_seed: int,
    pairs: Sequence[tuple[str, str]] | None = None,
) -> tuple[list[CanarySpec], PlanReport]:
    """60 canaries per qualifying pair: both types get 10x1 + 5x2 + 2x5."""
    if pairs is None:
        pairs = load_canary_pairs()
    report = PlanReport(setting="parallel_pairwise")
    specs: list[CanarySpec] = []
    for src, tgt in pairs:
        idx = 0
        pair_specs = []
        for ctype in PAIRWISE_TYPES:
            for repeats, unique in PAIRWISE_BUCKETS:
                for _ in range(unique):
                    pair_specs.append(
                        CanarySpec(
                            canary_id=f"pairwise:{src}-{tgt}:{idx:04d}",
                            setting="parallel_pairwise",
                            type=ctype,
                            repeats=repeats,
                            seed=stable_hash(master_seed, "pairwise", src, tgt, idx),
                            lang_pair=(src, tgt),
                        )
                    )
                    idx += 1
        specs.extend(pair_specs)
        report.per_language[f"{src}-{tgt}"] = {
            "unique": len(pair_specs),
            "instances": sum(s.repeats for s in pair_specs),
        }
    return specs, report


def plan_generic_canaries(
    master_seed: int,
    count_total: int = GENERIC_TOTAL,
) -> tuple[list[CanarySpec], PlanReport]:
    """Fully synthetic canaries, split evenly across the four variants
    (fully random, and shared prefixes of 50/100/200 tokens); source
    equals target, one instance each."""
    if count_total % len(GENERIC_VARIANTS):
        raise TierTableError("generic total must divide evenly across variants")
    per_variant = count_total // len(GENERIC_VARIANTS)
    report = PlanReport(setting="generic")
    specs: list[CanarySpec] = []
    for ctype, prefix_len in GENERIC_VARIANTS:
        variant = ctype if prefix_len is None else f"{ctype}_{prefix_len}"
        prefix_seed = stable_hash(master_seed, "generic", "shared-prefix", variant)
        for i in range(per_variant):
            spec = CanarySpec(
                canary_id=f"generic:{variant}:{i:06d}",
                setting="generic",
                type=ctype,
                repeats=1,
                seed=stable_hash(master_seed, "generic", variant, i),
            )
            if prefix_len is not None:
                spec.prefix_seed = prefix_seed
                spec.prefix_len = prefix_len
            specs.append(spec)
        report.per_language[variant] = {"unique": per_variant, "instances": per_variant}
    return specs, report


# --- realization -----------------------------------------------------------------


class DocSource(Protocol):
    """Supplies real token sequences for canary construction."""

    def sample_docs(self, lang: str, k: int, rng: random.Random) -> list[list[int]]: ...

    def sample_pairs(
        self, lang_pair: tuple[str, str], k: int, rng: random.Random
    ) -> list[tuple[list[int], list[int]]]: ...


class SyntheticDocSource:
    """Deterministic fake corpus for dry runs and tests."""

    def __init__(self, vocab_size: int, doc_len: int = 220):
        self.vocab_size = vocab_size
        self.doc_len = doc_len

    def sample_docs(self, lang, k, rng):
        return [
            random_tokens(self.doc_len, self.vocab_size, rng) for _ in range(k)
        ]

    def sample_pairs(self, lang_pair, k, rng):
        return [
            (
                random_tokens(self.doc_len, self.vocab_size, rng),
                random_tokens(self.doc_len, self.vocab_size, rng),
            )
            for _ in range(k)
        ]


def shared_prefix_tokens(spec: CanarySpec, vocab_size: int) -> list[int]:
    return random_tokens(
        spec.prefix_len, vocab_size, random.Random(spec.prefix_seed)
    )


def realize_spec(
    spec: CanarySpec,
    source: DocSource,
    vocab_size: int,
    qualifying_langs: Sequence[str] | None = None,
    generic_suffix_len: int = GENERIC_SUFFIX_LEN,
) -> CanarySpec | None:
    """Fill in the payload for one planned canary. Returns None when the
    sampled material cannot support the type (e.g. a document shorter
    than the training prefix); callers count those in their report."""
    rng = random.Random(spec.seed)
    t = spec.type
    if spec.setting == "monolingual":
        if t == "shuffle":
            (doc,) = source.sample_docs(spec.lang, 1, rng)
            spec.payload = gen_shuffle(doc, rng.randrange(2**63))
        elif t == "interleave":
            a, b = source.sample_docs(spec.lang, 2, rng)
            spec.payload = gen_interleave(a, b)
        elif t == "training_prefix":
            (doc,) = source.sample_docs(spec.lang, 1, rng)
            if len(doc) < TRAINING_PREFIX_LEN:
                return None
            spec.payload = gen_training_prefix(doc, vocab_size, rng.randrange(2**63))
        else:
            raise ValueError(f"unknown monolingual canary type: {t}")
    elif spec.setting == "parallel":
        n_docs = 2 if t.endswith("_interleave") else 1
        docs = source.sample_docs(spec.lang, n_docs, rng)
        prefix = (
            shared_prefix_tokens(spec, vocab_size)
            if t.startswith("random_prefix")
            else None
        )
        src, tgt = gen_parallel_canary(t, docs, prefix, vocab_size, rng.randrange(2**63))
        spec.payload_pair = (src, tgt)
    elif spec.setting == "parallel_pairwise":
        a, b = source.sample_pairs(spec.lang_pair, 2, rng)
        src, tgt, label = gen_pairwise_canary(
            t, a, b, spec.lang_pair,
            qualifying_langs or pairwise_qualifying_langs(), rng.randrange(2**63),
        )
        spec.payload_pair = (src, tgt)
        if label != spec.lang_pair[1]:
            spec.label_override = label
    elif spec.setting == "generic":
        if t == "generic_fully_random":
            seq = random_tokens(
                SHARED_PREFIX_LEN + generic_suffix_len, vocab_size, rng
            )
        else:
            prefix = shared_prefix_tokens(spec, vocab_size)
            seq = prefix + random_tokens(generic_suffix_len, vocab_size, rng)
        spec.payload = seq
        spec.payload_pair = (seq, seq)  # source equals target
    else:
        raise ValueError(f"unknown canary setting: {spec.setting}")
    return spec


def pairwise_qualifying_langs() -> tuple[str, ...]:
    return tuple(sorted({l for pair in load_canary_pairs() for l in pair}))


def realize_plan(
    specs: Iterable[CanarySpec],
    source: DocSource,
    vocab_size: int,
    report: PlanReport | None = None,
) -> list[CanarySpec]:
    out = []
    for spec in specs:
        realized = realize_spec(spec, source, vocab_size)
        if realized is None:
            if report is not None:
                report.skipped[spec.canary_id] = "document shorter than prefix"
            continue
        out.append(realized)
    return out
