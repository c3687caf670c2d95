"""polyclean: multilingual web-corpus curation toolkit."""

from .core import (
    CorpusStats,
    Document,
    LangCode,
    LangPrediction,
    Sentence,
    compute_stats,
    normalize_lang_code,
    predict_document_lang,
    split_sentences,
)
from .mono_filters import FilterReport, QuestionableFlags
from .parallel import BtCandidate, SentencePair

__version__ = "0.1.0"

__all__ = [
    "BtCandidate",
    "CorpusStats",
    "Document",
    "FilterReport",
    "LangCode",
    "LangPrediction",
    "QuestionableFlags",
    "Sentence",
    "SentencePair",
    "compute_stats",
    "normalize_lang_code",
    "predict_document_lang",
    "split_sentences",
    "__version__",
]
