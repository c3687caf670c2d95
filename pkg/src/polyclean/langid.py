"""Bundled deterministic sentence-level LangID.

This is a lightweight stand-in for a real neural LangID model: a Unicode
script histogram picks the script, then small stopword lists disambiguate
languages sharing that script. It exists so the pipeline, tests and audit
fixtures run hermetically; swap in a real model through the
SentenceLangID contract for production runs.
"""

from __future__ import annotations

from .core import LangCode, LangPrediction, normalize_lang_code
from .metrics import script_profile

# Stopwords per candidate language, grouped by script. Short, frequent,
# reasonably exclusive words; enough to separate the major languages that
# share a script in test corpora.
_STOPWORDS: dict[str, dict[str, frozenset[str]]] = {
    "Latin": {
        "en": frozenset("the and of to in is you that it for was are with his they".split()),
        "fr": frozenset("le la les des une est pour que dans nous vous avec sur pas".split()),
        "de": frozenset("der die das und ist nicht ein eine mit sich auf für von zu".split()),
        "es": frozenset("el los las de y que en un una por es para con no su".split()),
        "it": frozenset("il di e che un una per non sono con della nel alla".split()),
        "pt": frozenset("o os as de e que um uma para não com por mais dos".split()),
        "nl": frozenset("de het een en van is dat op te niet voor met zijn".split()),
        "fil": frozenset("ang ng mga sa ay na ito para ako hindi kung siya".split()),
        "sw": frozenset("ya na wa kwa ni za katika hii ili kama cha watu".split()),
        "id": frozenset("yang dan di ini untuk dengan tidak dari dalam akan pada".split()),
        "tr": frozenset("ve bir bu da için ile olarak daha çok gibi".split()),
    },
    "Cyrillic": {
        "ru": frozenset("и в не на я что с по это как но из его".split()),
        "uk": frozenset("і в не на що з до як це у за від".split()),
        "bg": frozenset("и в не на за да се от с по като той".split()),
        "kk": frozenset("және бұл мен бар үшін деп болып еді".split()),
        "sr": frozenset("и у не на је да се од са по као што".split()),
    },
    "Devanagari": {
        "hi": frozenset("है के की का में से को और यह नहीं पर हो".split()),
        "mr": frozenset("आहे च्या आणि ते मध्ये या केली असून हे".split()),
        "ne": frozenset("छ को र मा हो यो गरेको लागि पनि छन्".split()),
    },
    "Arabic": {
        "ar": frozenset("في من على أن إلى عن مع هذا التي الذي".split()),
        "fa": frozenset("در از به که را با این است های برای".split()),
        "ur": frozenset("ہے کے کی کا میں سے کو اور ایک نہیں".split()),
    },
}

# Single-language (or clearly-dominant) scripts fall straight through to a
# default code.
_SCRIPT_DEFAULTS = {
    "Latin": "en",
    "Cyrillic": "ru",
    "Greek": "el",
    "Arabic": "ar",
    "Hebrew": "he",
    "Devanagari": "hi",
    "Bengali": "bn",
    "Gurmukhi": "pa",
    "Gujarati": "gu",
    "Oriya": "or",
    "Tamil": "ta",
    "Telugu": "te",
    "Kannada": "kn",
    "Malayalam": "ml",
    "Sinhala": "si",
    "Thai": "th",
    "Lao": "lo",
    "Myanmar": "my",
    "Khmer": "km",
    "Tibetan": "bo",
    "Georgian": "ka",
    "Ethiopic": "am",
    "Armenian": "hy",
    "Thaana": "dv",
    "Han": "zh",
    "Hiragana": "ja",
    "Katakana": "ja",
    "Hangul": "ko",
    "Canadian_Aboriginal": "iu",
    "Cherokee": "chr",
    "Tifinagh": "ber",
    "Syriac": "syr",
    "Mongolian": "mn",
}

UND = LangCode("und", unmapped=True)


class ScriptStopwordLangID:
    """Deterministic LangID: dominant script + stopword vote."""

    def predict(self, text: str) -> LangPrediction:
        profile = script_profile(text)
        if profile.dominant_script is None:
            return LangPrediction(UND, 0.0)
        script = profile.dominant_script
        script_frac = profile.fractions[script]
        # Japanese mixes Han with kana; any kana presence wins over Han.
        if script == "Han" and (
            profile.fractions.get("Hiragana") or profile.fractions.get("Katakana")
        ):
            script = "Hiragana"

        candidates = _STOPWORDS.get(script)
        code = _SCRIPT_DEFAULTS.get(script, "und")
        confidence = script_frac
        if candidates:
            tokens = [t.strip(".,;:!?\"'()[]").lower() for t in text.split()]
            tokens = [t for t in tokens if t]
            hits = {
                lang: sum(1 for t in tokens if t in words)
                for lang, words in candidates.items()
            }
            best = min(hits, key=lambda l: (-hits[l], l))
            if tokens and hits[best] > 0:
                code = best
                confidence = script_frac * min(1.0, 0.6 + 0.4 * hits[best] / len(tokens))
            else:
                confidence = script_frac * 0.5
        if code == "und":
            return LangPrediction(UND, 0.0)
        return LangPrediction(normalize_lang_code(code), confidence)
