"""Pipeline orchestration: stage graph, sharded execution, UniMax weights.

The monolingual chain runs dedup -> preliminary page filter -> script
repairs -> LangID annotation -> questionable gate -> audit-decision gate.
Execution is sharded but the contract is stronger: output and reports are
byte-identical for any shard count, because cross-shard state (the line
registry) is merged by global stream position and map stages are pure.
Outputs are staged and renamed only on success; partial results never
land in the output directory.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    Document,
    canon,
    compute_stats,
    doc_to_json,
    normalize_lang_code,
    predict_document_lang,
    read_jsonl,
    split_sentences,
)
from .langid import ScriptStopwordLangID
from .mono_filters import FilterReport, clean_gate, flag_sentence, prelim_page_filter
from .scriptfix import (
    default_virama_config,
    default_zh_blocklist,
    fix_virama,
    maybe_convert_zawgyi,
    zh_blocklist_filter,
)

DEFAULT_STAGES = (
    "dedup_lines",
    "prelim_page_filter",
    "script_fixes",
    "langid_annotate",
    "questionable_gate",
    "audit_gate",
)
KNOWN_STAGES = DEFAULT_STAGES + ("drop_tiny",)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_STAGE = 4


class ConfigError(ValueError):
    pass


class StageFailure(RuntimeError):
    def __init__(self, stage: str, shard: int, cause: Exception):
        super().__init__(f"stage {stage} failed on shard {shard}: {cause}")
        self.stage = stage
        self.shard = shard


@dataclass
class PipelineConfig:
    input: str = ""
    output: str = ""
    shards: int = 1
    seed: int = 0
    stages: tuple[str, ...] = DEFAULT_STAGES
    audit_decisions: str | None = None
    langid_mode: str = "predict"  # or "trust_input"
    min_docs: int = 20
    zawgyi_threshold: float = 0.5
    questionable_max: float = 0.20
    min_sentences: int = 5

    def validate(self):
        if self.shards < 1:
            raise ConfigError("shards must be >= 1")
        if not 0.0 <= self.questionable_max <= 1.0:
            raise ConfigError("questionable_max must be in [0, 1]")
        if not 0.0 <= self.zawgyi_threshold <= 1.0:
            raise ConfigError("zawgyi_threshold must be in [0, 1]")
        if self.langid_mode not in ("predict", "trust_input"):
            raise ConfigError(f"unknown langid_mode: {self.langid_mode}")
        unknown = [s for s in self.stages if s not in KNOWN_STAGES]
        if unknown:
            raise ConfigError(f"unknown stages: {unknown}")
        if self.audit_decisions and not Path(self.audit_decisions).exists():
            raise ConfigError(f"audit decisions file not found: {self.audit_decisions}")


def load_config(path: str) -> PipelineConfig:
    """Read a config file: JSON object, or flat `key = value` lines."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            if not _:
                raise ConfigError(f"bad config line: {line!r}")
            raw[key.strip()] = _coerce(value.strip())
    if "stages" in raw and isinstance(raw["stages"], str):
        raw["stages"] = [s.strip() for s in raw["stages"].split(",")]
    if "stages" in raw:
        raw["stages"] = tuple(raw["stages"])
    known = {f.name for f in PipelineConfig.__dataclass_fields__.values()}
    unknown = set(raw) - {str(k) for k in known}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = PipelineConfig(**raw)
    cfg.validate()
    return cfg


def _coerce(value: str):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value.strip("\"'")


def load_audit_decisions(path: str) -> dict[str, dict]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return {canon(lang): entry for lang, entry in raw.items()}


# --- sharded execution ----------------------------------------------------------


def _shard_slices(n_items: int, shards: int) -> list[range]:
    """Contiguous blocks; concatenating shard outputs reproduces the
    single-shard stream byte for byte."""
    bounds = [round(i * n_items / shards) for i in range(shards + 1)]
    return [range(bounds[i], bounds[i + 1]) for i in range(shards)]


def _dedup_two_phase(shard_docs: list[list[Document]]) -> int:
    """Cross-shard line dedup, equivalent to one sequential pass.

    Phase 1 scans each shard independently, recording the globally
    smallest (doc position, line position) per line key; phase 2 deletes
    every other occurrence. Returns the number of removed lines.
    """
    first_seen: dict[str, tuple[int, int]] = {}
    offsets = []
    pos = 0
    for docs in shard_docs:
        offsets.append(pos)
        pos += len(docs)
    for docs, offset in zip(shard_docs, offsets):
        for d_idx, doc in enumerate(docs):
            for l_idx, line in enumerate(doc.lines):
                key = line.rstrip()
                loc = (offset + d_idx, l_idx)
                if key not in first_seen or loc < first_seen[key]:
                    first_seen[key] = loc
    removed = 0
    for docs, offset in zip(shard_docs, offsets):
        for d_idx, doc in enumerate(docs):
            kept = []
            for l_idx, line in enumerate(doc.lines):
                if first_seen[line.rstrip()] == (offset + d_idx, l_idx):
                    kept.append(line)
                else:
                    removed += 1
            doc.lines = kept
    return removed


@dataclass
class PipelineResult:
    reports: list[FilterReport] = field(default_factory=list)
    n_input: int = 0
    n_output: int = 0
    manifest: dict = field(default_factory=dict)

    def reports_json(self) -> str:
        return json.dumps(
            [json.loads(r.to_json()) for r in self.reports], sort_keys=True
        )


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    cfg.validate()
    if not Path(cfg.input).exists():
        raise FileNotFoundError(cfg.input)
    docs = list(read_jsonl(cfg.input))
    result = PipelineResult(n_input=len(docs))

    shard_docs = [[docs[i] for i in block] for block in _shard_slices(len(docs), cfg.shards)]
    predictor = ScriptStopwordLangID()
    virama_cfg = default_virama_config()
    blocklist = default_zh_blocklist()
    decisions = (
        load_audit_decisions(cfg.audit_decisions) if cfg.audit_decisions else {}
    )

    for stage in cfg.stages:
        report = FilterReport(stage=stage)
        try:
            if stage == "dedup_lines":
                removed = _dedup_two_phase(shard_docs)
                report.kept = sum(len(s) for s in shard_docs)
                report.extras["duplicate_lines_removed"] = removed
            elif stage == "drop_tiny":
                merged = [d for shard in shard_docs for d in shard]
                kept_docs = drop_tiny_languages(merged, cfg.min_docs)
                kept_ids = {id(d) for d in kept_docs}
                for shard in shard_docs:
                    for doc in shard:
                        report.record(id(doc) in kept_ids, "tiny_language")
                    shard[:] = [d for d in shard if id(d) in kept_ids]
            else:
                for s_idx, shard in enumerate(shard_docs):
                    try:
                        shard[:] = _run_map_stage(
                            stage, shard, report, cfg, predictor,
                            virama_cfg, blocklist, decisions,
                        )
                    except Exception as exc:
                        raise StageFailure(stage, s_idx, exc) from exc
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(stage, -1, exc) from exc
        result.reports.append(report)

    survivors = [d for shard in shard_docs for d in shard]
    result.n_output = len(survivors)
    if cfg.output:
        result.manifest = _write_sharded(cfg.output, shard_docs, cfg)
    return result


def _run_map_stage(
    stage, docs, report, cfg, predictor, virama_cfg, blocklist, decisions
):
    out = []
    for doc in docs:
        keep, reason = True, None
        if stage == "prelim_page_filter":
            keep, reason = prelim_page_filter(doc)
        elif stage == "script_fixes":
            doc.lines = [fix_virama(l, doc.lang, virama_cfg) for l in doc.lines]
            zres = maybe_convert_zawgyi(doc, cfg.zawgyi_threshold)
            if zres.converted:
                report.extras["zawgyi_converted"] = report.extras.get("zawgyi_converted", 0) + 1
            if zres.error:
                report.extras["zawgyi_errors"] = report.extras.get("zawgyi_errors", 0) + 1
            if canon(doc.lang) == "zh":
                keep, reason = zh_blocklist_filter(doc, blocklist)
        elif stage == "langid_annotate":
            split_sentences(doc)
            if doc.sentences:
                predicted = predict_document_lang(doc, predictor)
                if cfg.langid_mode == "predict" and not predicted.unmapped:
                    doc.lang = predicted
        elif stage == "questionable_gate":
            if not doc.sentences:
                split_sentences(doc)
            for sent in doc.sentences:
                flag_sentence(sent, doc.lang)
            keep, reason = clean_gate(doc)
        elif stage == "audit_gate":
            entry = decisions.get(canon(doc.lang))
            if entry:
                decision = entry.get("decision")
                if decision == "remove":
                    keep, reason = False, "audit_removed"
                elif decision in ("rename", "merge") and entry.get("target"):
                    doc.lang = normalize_lang_code(entry["target"])
        else:
            raise ConfigError(f"unknown stage: {stage}")
        report.record(keep, reason)
        if keep:
            out.append(doc)
    return out


def _write_sharded(output_dir: str, shard_docs: list[list[Document]], cfg) -> dict:
    out = Path(output_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out.parent))
    manifest = {"shards": [], "seed": cfg.seed, "n_documents": 0}
    try:
        for i, docs in enumerate(shard_docs):
            name = f"part-{i:05d}.jsonl"
            payload = "".join(doc_to_json(d) + "\n" for d in docs)
            (staging / name).write_text(payload, encoding="utf-8")
            manifest["shards"].append(
                {
                    "name": name,
                    "documents": len(docs),
                    "sha256": hashlib.sha256(payload.encode("utf-8")).hexdigest(),
                }
            )
            manifest["n_documents"] += len(docs)
        (staging / "manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True), encoding="utf-8"
        )
        if out.exists():
            shutil.rmtree(out)
        os.replace(staging, out)
    except Exception:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return manifest


# --- UniMax sampling weights -----------------------------------------------------


@dataclass
class MixtureWeights:
    probabilities: dict[str, float]
    epochs: dict[str, float]
    allocations: dict[str, float]
    warning: str | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "probabilities": self.probabilities,
                "epochs": self.epochs,
                "allocations": self.allocations,
                "warning": self.warning,
            },
            sort_keys=True,
        )


def unimax_weights(
    token_counts: dict[str, int], budget_tokens: float, n_epochs: int = 10
) -> MixtureWeights:
    """Spread the token budget as uniformly as possible across languages,
    capping each language at n_epochs passes over its own data.

    Languages are visited in ascending count order; each receives
    min(cap, remaining budget / remaining languages), which realizes the
    water-filling solution exactly.
    """
    if not token_counts:
        raise ValueError("no languages")
    if any(c <= 0 for c in token_counts.values()):
        raise ValueError("token counts must be positive")
    if budget_tokens <= 0:
        raise ValueError("budget must be positive")

    caps = {lang: n_epochs * count for lang, count in token_counts.items()}
    total_cap = sum(caps.values())
    warning = None
    alloc: dict[str, float] = {}
    if budget_tokens >= total_cap:
        alloc = dict(caps)
        if budget_tokens > total_cap:
            warning = (
                f"budget {budget_tokens} exceeds total capacity {total_cap}; "
                "every language is at its epoch cap"
            )
    else:
        remaining = float(budget_tokens)
        langs = sorted(token_counts, key=lambda l: (token_counts[l], l))
        for i, lang in enumerate(langs):
            share = remaining / (len(langs) - i)
            take = min(caps[lang], share)
            alloc[lang] = take
            remaining -= take

    total = sum(alloc.values())
    probabilities = {l: a / total for l, a in alloc.items()}
    epochs = {l: alloc[l] / token_counts[l] for l in alloc}
    return MixtureWeights(probabilities, epochs, alloc, warning)


def drop_tiny_languages(docs: list[Document], min_docs: int = 20) -> list[Document]:
    """Remove languages with fewer than min_docs documents (a language
    with exactly min_docs stays)."""
    counts: dict[str, int] = {}
    for doc in docs:
        counts[canon(doc.lang)] = counts.get(canon(doc.lang), 0) + 1
    return [d for d in docs if counts[canon(d.lang)] >= min_docs]


def emit_stats(docs, tokenizer=None) -> str:
    from .core import whitespace_tokens

    return compute_stats(docs, tokenizer or whitespace_tokens).to_json()
