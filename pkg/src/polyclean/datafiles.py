"""Loaders for the packaged data files.

Every list that drives a filter (cursed patterns, virama characters,
blocklists, tier tables) lives under ``polyclean/data`` as a plain text or
JSON file so it can be diffed, checksummed and swapped out. The loaders
here are the only code that parses those formats.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(resources.files("polyclean").joinpath("data", name)))


def _data_lines(name: str) -> list[str]:
    text = data_path(name).read_text(encoding="utf-8")
    out = []
    for line in text.split("\n"):
        if not line or line.startswith("#"):
            continue
        out.append(line)
    return out


@dataclass(frozen=True)
class CursedPattern:
    raw: str
    is_regex: bool
    compiled: re.Pattern | None = field(default=None, compare=False)

    def matches(self, text: str) -> bool:
        if self.is_regex:
            return self.compiled.search(text) is not None
        return self.raw in text


@lru_cache(maxsize=None)
def load_cursed_patterns(path: str | None = None) -> tuple[CursedPattern, ...]:
    """Parse a cursed-pattern file: ``<substr|regex>\\t<pattern>`` per line.

    Pattern text is taken verbatim after the tab, spaces included.
    """
    lines = (
        _data_lines("cursed_patterns.txt")
        if path is None
        else [
            l
            for l in Path(path).read_text(encoding="utf-8").split("\n")
            if l and not l.startswith("#")
        ]
    )
    pats = []
    for line in lines:
        flag, _, pat = line.partition("\t")
        if flag not in ("substr", "regex") or not pat:
            raise ValueError(f"bad cursed-pattern line: {line!r}")
        is_regex = flag == "regex"
        pats.append(
            CursedPattern(pat, is_regex, re.compile(pat) if is_regex else None)
        )
    return tuple(pats)


@lru_cache(maxsize=None)
def load_virama_chars() -> frozenset[str]:
    chars = set()
    for line in _data_lines("virama_chars.txt"):
        cp = line.split("\t")[0]
        if not cp.startswith("U+"):
            raise ValueError(f"bad virama char line: {line!r}")
        chars.add(chr(int(cp[2:], 16)))
    return frozenset(chars)


@lru_cache(maxsize=None)
def load_virama_langs() -> frozenset[str]:
    return frozenset(_data_lines("virama_langs.txt"))


@lru_cache(maxsize=None)
def load_zh_blocklist() -> tuple[str, ...]:
    entries = tuple(_data_lines("zh_blocklist.txt"))
    if not entries or any(not e for e in entries):
        raise ValueError("zh blocklist must be non-empty strings")
    return entries


@lru_cache(maxsize=None)
def load_ratio_exempt_langs() -> frozenset[str]:
    return frozenset(_data_lines("ratio_exempt_langs.txt"))


@lru_cache(maxsize=None)
def load_lang_scripts() -> dict[str, tuple[str, ...]]:
    """Language code -> tuple of acceptable Unicode script names."""
    table = {}
    for line in _data_lines("lang_scripts.tsv"):
        code, _, scripts = line.partition("\t")
        table[code] = tuple(scripts.split(","))
    return table


@lru_cache(maxsize=None)
def load_lang_names() -> dict[str, str]:
    names = {}
    for line in _data_lines("lang_names.tsv"):
        code, _, name = line.partition("\t")
        names[code] = name
    return names


def load_guidelines() -> str:
    return data_path("audit_guidelines.md").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_canary_pairs() -> tuple[tuple[str, str], ...]:
    pairs = []
    for line in _data_lines("canary_lang_pairs.txt"):
        src, _, tgt = line.partition("-")
        pairs.append((src, tgt))
    return tuple(pairs)


def load_tier_json(setting: str) -> dict:
    name = {"monolingual": "canary_tiers_mono.json", "parallel": "canary_tiers_parallel.json"}[
        setting
    ]
    return json.loads(data_path(name).read_text(encoding="utf-8"))
