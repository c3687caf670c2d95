import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyclean.core import Document, normalize_lang_code


def make_doc(doc_id, lang, lines, url=None):
    return Document(doc_id, normalize_lang_code(lang), list(lines), source_url=url)


@pytest.fixture
def rng():
    return random.Random(20240811)


def long_line(rng, n=250, alphabet="abcdefghij "):
    return "".join(rng.choice(alphabet) for _ in range(n - 1)) + "x"


def clean_doc(doc_id, lang="en", n_lines=4, rng=None, line_len=250):
    rng = rng or random.Random(hash(doc_id) & 0xFFFF)
    words = ["the", "cat", "sat", "firmly", "on", "its", "warm", "mat", "today"]
    lines = []
    for _ in range(n_lines):
        parts = []
        while sum(len(p) + 1 for p in parts) < line_len:
            parts.append(rng.choice(words))
        lines.append(" ".join(parts) + ".")
    return make_doc(doc_id, lang, lines)
