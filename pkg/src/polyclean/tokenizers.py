"""Subword tokenizer contract plus a deterministic toy implementation.

Canary generation and memorization probing operate on integer token ids
from whatever tokenizer the surrounding training setup uses. The contract
is intentionally minimal; ToyTokenizer satisfies it hermetically for
tests and dry runs.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol, Sequence


class SubwordTokenizer(Protocol):
    vocab_size: int

    def encode(self, text: str) -> list[int]: ...

    def decode(self, ids: Sequence[int]) -> str: ...


def stable_hash(*parts) -> int:
    """Process-independent 64-bit hash (Python's hash() is salted)."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")


_TOY_WORD = re.compile(r"w(\d+)$")


class ToyTokenizer:
    """Whitespace word tokenizer with a synthetic id vocabulary.

    Ids render as "w<id>", and encode() maps such words back to their id,
    so decode/encode round-trips are stable. Real words hash into the
    vocabulary deterministically.
    """

    def __init__(self, vocab_size: int = 4096):
        self.vocab_size = vocab_size

    def encode(self, text: str) -> list[int]:
        ids = []
        for word in text.split():
            m = _TOY_WORD.match(word)
            if m and int(m.group(1)) < self.vocab_size:
                ids.append(int(m.group(1)))
            else:
                ids.append(stable_hash("toy", word) % self.vocab_size)
        return ids

    def decode(self, ids: Sequence[int]) -> str:
        for i in ids:
            if not 0 <= i < self.vocab_size:
                raise ValueError(f"token id {i} outside vocabulary")
        return " ".join(f"w{i}" for i in ids)
