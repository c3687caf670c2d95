"""Training-data extraction harness.

A probe prompts a generation model with the first P tokens of a training
sequence and checks whether the continuation reproduces the rest:
verbatim (exact window match) or approximate (Levenshtein similarity at
or above 0.9 over the window). translate_copy probes monolingual
sequences; translate_diff probes source->target pairs, sizing the
generation window by the pair's target/prompt length ratio.
"""

from __future__ import annotations

import json
import random
import urllib.request
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .datafiles import load_lang_names
from .metrics import levenshtein_similarity
from .tokenizers import stable_hash

DEFAULT_PROBES_PER_LANG = 2000
DEFAULT_PROMPT_LEN = 50
DEFAULT_DELTA = 50
APPROX_THRESHOLD = 0.9

TRANSLATE_COPY = "translate_copy"
TRANSLATE_DIFF = "translate_diff"


class GenerationModel(Protocol):
    """Greedy-decoding generation contract: returns only the new tokens."""

    def generate(self, prompt: Sequence[int], max_new_tokens: int) -> list[int]: ...


@dataclass(frozen=True)
class ExtractionProbe:
    lang: str
    mode: str
    prompt_tokens: tuple[int, ...]
    continuation_tokens: tuple[int, ...]
    length_ratio: float | None = None  # translate_diff only

    def __post_init__(self):
        if not self.continuation_tokens:
            raise ValueError("probe continuation must be non-empty")


@dataclass(frozen=True)
class ExtractionResult:
    verbatim: bool
    approximate: bool
    similarity: float
    truncated: bool = False

    def __post_init__(self):
        if self.verbatim and not self.approximate:
            raise ValueError("verbatim implies approximate")


def sample_probes(
    sequences: Sequence,
    lang: str,
    n: int = DEFAULT_PROBES_PER_LANG,
    prompt_len: int = DEFAULT_PROMPT_LEN,
    seed: int = 0,
    mode: str = TRANSLATE_COPY,
) -> list[ExtractionProbe]:
    """Uniform sample (without replacement) of eligible sequences.

    translate_copy expects token sequences and requires more than
    prompt_len tokens; translate_diff expects (source, target) pairs,
    requires the source to cover the prompt and takes the whole target as
    the continuation, recording target/prompt length as the ratio.
    """
    if mode == TRANSLATE_COPY:
        eligible = [s for s in sequences if len(s) > prompt_len]
    elif mode == TRANSLATE_DIFF:
        eligible = [p for p in sequences if len(p[0]) >= prompt_len and len(p[1]) > 0]
    else:
        raise ValueError(f"unknown probe mode: {mode}")
    if not eligible:
        return []
    rng = random.Random(stable_hash("probes", lang, mode, seed))
    chosen = eligible if len(eligible) <= n else rng.sample(eligible, n)

    probes = []
    for item in chosen:
        if mode == TRANSLATE_COPY:
            probes.append(
                ExtractionProbe(
                    lang=lang,
                    mode=mode,
                    prompt_tokens=tuple(item[:prompt_len]),
                    continuation_tokens=tuple(item[prompt_len:]),
                )
            )
        else:
            src, tgt = item
            probes.append(
                ExtractionProbe(
                    lang=lang,
                    mode=mode,
                    prompt_tokens=tuple(src[:prompt_len]),
                    continuation_tokens=tuple(tgt),
                    length_ratio=len(tgt) / prompt_len,
                )
            )
    return probes


def target_generation_length(
    mode: str,
    prompt_len: int,
    ratio: float | None = None,
    delta: int = DEFAULT_DELTA,
) -> int:
    """Generation budget S: prompt + delta for copy probes; the
    ratio-scaled prompt plus delta for diff probes."""
    if mode == TRANSLATE_COPY:
        return prompt_len + delta
    if mode == TRANSLATE_DIFF:
        if ratio is None or ratio <= 0:
            raise ValueError("translate_diff needs a positive length ratio")
        return round(prompt_len * ratio) + delta
    raise ValueError(f"unknown probe mode: {mode}")


def test_probe(
    probe: ExtractionProbe,
    model: GenerationModel,
    s_tokens: int,
    approx_threshold: float = APPROX_THRESHOLD,
) -> ExtractionResult:
    """Score one probe: compare the first S-P generated tokens against the
    ground-truth continuation. Models that return fewer tokens are scored
    on the available window and flagged truncated."""
    window = s_tokens - len(probe.prompt_tokens)
    if window <= 0:
        raise ValueError("S must exceed the prompt length")
    window = min(window, len(probe.continuation_tokens))
    generated = list(model.generate(probe.prompt_tokens, window))[:window]
    truncated = len(generated) < window
    reference = list(probe.continuation_tokens[: len(generated)]) if truncated else list(
        probe.continuation_tokens[:window]
    )
    if not generated:
        return ExtractionResult(False, False, 0.0, truncated=True)
    similarity = levenshtein_similarity(generated, reference)
    verbatim = generated == reference
    approximate = similarity >= approx_threshold
    return ExtractionResult(verbatim, approximate, similarity, truncated)


def run_probes(
    probes: Sequence[ExtractionProbe],
    model: GenerationModel,
    delta: int = DEFAULT_DELTA,
    approx_threshold: float = APPROX_THRESHOLD,
) -> list[ExtractionResult]:
    results = []
    for probe in probes:
        s = target_generation_length(
            probe.mode, len(probe.prompt_tokens), probe.length_ratio, delta
        )
        results.append(test_probe(probe, model, s, approx_threshold))
    return results


@dataclass
class ExtractionReport:
    per_language: dict[str, dict] = field(default_factory=dict)

    @property
    def zero_memorization_count(self) -> int:
        return sum(1 for e in self.per_language.values() if e["verbatim_hits"] == 0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "per_language": self.per_language,
                "zero_memorization_languages": self.zero_memorization_count,
            },
            sort_keys=True,
        )


def extraction_report(
    results_by_lang: dict[str, Sequence[ExtractionResult]],
) -> ExtractionReport:
    """Per-language verbatim/approximate rates and the count of languages
    with no positive probe at all."""
    report = ExtractionReport()
    for lang, results in sorted(results_by_lang.items()):
        n = len(results)
        verbatim = sum(1 for r in results if r.verbatim)
        approx = sum(1 for r in results if r.approximate)
        report.per_language[lang] = {
            "probes": n,
            "verbatim_hits": verbatim,
            "approximate_hits": approx,
            "verbatim_rate": verbatim / n if n else 0.0,
            "approximate_rate": approx / n if n else 0.0,
            "truncated": sum(1 for r in results if r.truncated),
        }
    return report


# --- few-shot prompting ----------------------------------------------------------


def language_display_name(code: str) -> str:
    return load_lang_names().get(str(code), str(code))


def few_shot_prompt(
    demos: Sequence[tuple[str, str]],
    test_src: str,
    source_lang: str,
    target_lang: str,
) -> str:
    """Translation prompt: one "<src name>:X\\n<tgt name>:Y" block per
    demonstration, blank-line separated, ending with the open test block.
    Language names render in English."""
    sl = language_display_name(source_lang)
    tl = language_display_name(target_lang)
    blocks = [f"{sl}:{x}\n{tl}:{y}" for x, y in demos]
    blocks.append(f"{sl}:{test_src}\n{tl}:")
    return "\n\n".join(blocks)


# --- reference models -------------------------------------------------------------


class ReplayModel:
    """Oracle that memorized everything: replays the training continuation
    for any known prompt."""

    def __init__(self, corpus: dict[tuple[int, ...], Sequence[int]]):
        self._continuations = {tuple(k): list(v) for k, v in corpus.items()}

    @classmethod
    def from_probes(cls, probes: Sequence[ExtractionProbe]) -> "ReplayModel":
        return cls({p.prompt_tokens: p.continuation_tokens for p in probes})

    def generate(self, prompt, max_new_tokens):
        cont = self._continuations.get(tuple(prompt), [])
        return list(cont[:max_new_tokens])


class RandomModel:
    """Never-saw-the-data baseline: uniform random tokens."""

    def __init__(self, vocab_size: int, seed: int = 0):
        self.vocab_size = vocab_size
        self.seed = seed

    def generate(self, prompt, max_new_tokens):
        rng = random.Random(stable_hash("randmodel", self.seed, tuple(prompt)))
        return [rng.randrange(self.vocab_size) for _ in range(max_new_tokens)]


class PerturbedReplayModel:
    """Replays the continuation with a fixed number of token substitutions
    inside the scored window (approximate-but-not-verbatim oracle)."""

    def __init__(self, corpus, vocab_size: int, n_errors: int, seed: int = 0):
        self._replay = ReplayModel(corpus)
        self.vocab_size = vocab_size
        self.n_errors = n_errors
        self.seed = seed

    @classmethod
    def from_probes(cls, probes, vocab_size, n_errors, seed=0):
        return cls(
            {p.prompt_tokens: p.continuation_tokens for p in probes},
            vocab_size, n_errors, seed,
        )

    def generate(self, prompt, max_new_tokens):
        out = self._replay.generate(prompt, max_new_tokens)
        if not out:
            return out
        rng = random.Random(stable_hash("perturb", self.seed, tuple(prompt)))
        positions = rng.sample(range(len(out)), min(self.n_errors, len(out)))
        for pos in positions:
            out[pos] = (out[pos] + 1 + rng.randrange(self.vocab_size - 1)) % self.vocab_size
        return out


class HttpModel:
    """Adapter for an external generation endpoint.

    Request: JSON {"tokens": [...], "max_new_tokens": N}
    Response: JSON {"tokens": [...]}
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def generate(self, prompt, max_new_tokens):
        body = json.dumps(
            {"tokens": list(prompt), "max_new_tokens": max_new_tokens}
        ).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=body, headers={"Content-Type": "application/json"}
        )
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        return list(payload["tokens"])


# --- probe serialization -----------------------------------------------------------


def probe_to_json(probe: ExtractionProbe) -> str:
    obj = {
        "lang": probe.lang,
        "mode": probe.mode,
        "prompt_tokens": list(probe.prompt_tokens),
        "continuation_tokens": list(probe.continuation_tokens),
    }
    if probe.length_ratio is not None:
        obj["length_ratio"] = probe.length_ratio
    return json.dumps(obj, sort_keys=True)


def probe_from_json(line: str) -> ExtractionProbe:
    obj = json.loads(line)
    return ExtractionProbe(
        lang=obj["lang"],
        mode=obj["mode"],
        prompt_tokens=tuple(obj["prompt_tokens"]),
        continuation_tokens=tuple(obj["continuation_tokens"]),
        length_ratio=obj.get("length_ratio"),
    )
