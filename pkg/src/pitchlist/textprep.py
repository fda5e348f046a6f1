"""Text cleaning pipeline: unicode repair, emoji stripping, tokenization,
stopword removal, POS-guided lemmatization, and an English-language filter.

All functions are pure; configuration is immutable and shareable across
threads. Lemmatization is table-driven (shipped data file) with deterministic
suffix rules as fallback, so the same input always produces the same tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import NonEnglishTextError

REPLACEMENT_CHAR = "\ufffd"

ENGLISH_THRESHOLD = 0.5

LEMMATIZER_MODES = ("dictionary-pos", "suffix-stemmer", "off")

POS_TAGS = ("noun", "verb", "adjective", "adverb", "other")

# Code point ranges removed by strip_emoji: emoticons, pictographs, transport
# and map symbols, supplemental/extended pictographs, regional indicators,
# misc symbols and dingbats, plus the variation selector and ZWJ used in
# emoji sequences.
_EMOJI_RANGES = (
    "\U0001f000-\U0001f0ff"   # mahjong / dominoes / playing cards
    "\U0001f1e6-\U0001f1ff"   # regional indicators (flags)
    "\U0001f300-\U0001f5ff"   # symbols and pictographs
    "\U0001f600-\U0001f64f"   # emoticons
    "\U0001f680-\U0001f6ff"   # transport and map
    "\U0001f700-\U0001f77f"   # alchemical
    "\U0001f780-\U0001f7ff"   # geometric extended
    "\U0001f900-\U0001f9ff"   # supplemental symbols
    "\U0001fa00-\U0001faff"   # symbols extended-A
    "\u2600-\u26ff"           # misc symbols
    "\u2700-\u27bf"           # dingbats
    "\u2b00-\u2bff"           # arrows and stars used as emoji
    "\u2190-\u21ff"           # arrows
    "\u2300-\u23ff"           # misc technical (watch, hourglass, av controls)
    "\ufe0e\ufe0f"            # variation selectors
    "\u200d"                   # zero width joiner
)
_EMOJI_RE = re.compile(f"[{_EMOJI_RANGES}]")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_VOWELS = "aeiou"


@dataclass(frozen=True)
class TokenList:
    """Cleaned, ordered lowercase tokens plus the source character count."""

    tokens: tuple[str, ...]
    source_len: int = 0

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)


@dataclass(frozen=True)
class CleanConfig:
    """Cleaning options. An empty stopword set disables stopword removal."""

    stopword_set: frozenset[str] = field(default_factory=lambda: default_stopwords())
    lemmatizer: str = "dictionary-pos"
    strip_emoji: bool = True
    require_english: bool = False

    def __post_init__(self):
        if self.lemmatizer not in LEMMATIZER_MODES:
            raise ValueError(f"unknown lemmatizer mode {self.lemmatizer!r}")


def _data_text(name: str) -> str:
    return resources.files("pitchlist").joinpath(f"data/{name}").read_text("utf-8")


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(
        w.strip() for w in _data_text("stopwords.txt").splitlines() if w.strip()
    )


@lru_cache(maxsize=None)
def _lemma_table() -> dict[tuple[str, str], str]:
    table = {}
    for line in _data_text("lemmas.tsv").splitlines():
        if not line.strip():
            continue
        word, tag, lemma = line.split("\t")
        table[(word, tag)] = lemma
    return table


@lru_cache(maxsize=None)
def _lemma_any_tag() -> dict[str, str]:
    # fallback when the tagger picked a different tag than the table entry
    table: dict[str, str] = {}
    for (word, _tag), lemma in _lemma_table().items():
        table.setdefault(word, lemma)
    return table


@lru_cache(maxsize=None)
def _tag_lexicon() -> dict[str, str]:
    lexicon: dict[str, str] = {}
    for line in _data_text("tag_lexicon.tsv").splitlines():
        if not line.strip():
            continue
        word, tag = line.split("\t")
        lexicon.setdefault(word, tag)
    return lexicon


@lru_cache(maxsize=None)
def _english_trigrams() -> frozenset[str]:
    grams = set()
    for line in _data_text("english_trigrams.tsv").splitlines():
        if line:
            grams.add(line.split("\t")[0])
    return frozenset(grams)


def repair_unicode(text: str) -> str:
    """Repair mojibake from common mis-encodings; guarantee valid UTF-8 output.

    A repair is applied only when the text round-trips: re-encoding with
    cp1252 or latin-1 and decoding as UTF-8 must succeed, otherwise the text
    is left alone. Code points that cannot be encoded as UTF-8 at all (lone
    surrogates) are replaced with U+FFFD.
    """
    try:
        text.encode("utf-8")
    except UnicodeEncodeError:
        text = "".join(
            ch if not ("\ud800" <= ch <= "\udfff") else REPLACEMENT_CHAR
            for ch in text
        )
    for encoding in ("cp1252", "latin-1"):
        try:
            repaired = text.encode(encoding).decode("utf-8")
        except (UnicodeEncodeError, UnicodeDecodeError):
            continue
        return repaired
    return text


def strip_emoji(text: str) -> str:
    """Remove emoji and pictograph code points, preserving everything else."""
    return _EMOJI_RE.sub("", text)


def tokenize(text: str) -> list[str]:
    """Split on any non-alphanumeric character; underscores are separators too."""
    return _TOKEN_RE.findall(text)


def english_score(text: str) -> float:
    """Fraction of the text's character trigrams found in the English profile.

    The text is lowercased, non-letters become single spaces, and the result
    is padded with one space on each side before trigram extraction. Returns
    0.0 when no trigram can be formed.
    """
    collapsed = re.sub(r"[^a-z]+", " ", text.lower())
    collapsed = " " + re.sub(r"\s+", " ", collapsed).strip() + " "
    total = len(collapsed) - 2
    if total <= 0:
        return 0.0
    profile = _english_trigrams()
    hits = sum(1 for i in range(total) if collapsed[i : i + 3] in profile)
    return hits / total


def pos_tag(tokens: list[str] | tuple[str, ...]) -> list[tuple[str, str]]:
    """Tag each lowercase token as noun/verb/adjective/adverb/other.

    Lexicon lookup first; on a miss, suffix heuristics (-ing/-ed verb,
    -ly adverb, -ous/-ful adjective); anything else is a noun.
    """
    lexicon = _tag_lexicon()
    tagged = []
    for token in tokens:
        tag = lexicon.get(token)
        if tag is None:
            if token.endswith(("ing", "ed")) and len(token) > 4:
                tag = "verb"
            elif token.endswith("ly") and len(token) > 3:
                tag = "adverb"
            elif token.endswith(("ous", "ful")) and len(token) > 4:
                tag = "adjective"
            else:
                tag = "noun"
        tagged.append((token, tag))
    return tagged


def _undouble(stem: str) -> str | None:
    """Drop a doubled final consonant where doubling marks inflection."""
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] in "bdgmnprt":
        return stem[:-1]
    return None


def _restore_e(stem: str) -> str | None:
    """Re-attach a dropped silent e: single-vowel stems ending vowel+consonant."""
    if (
        len(stem) >= 3
        and stem[-1] not in _VOWELS + "wxy"
        and stem[-2] in _VOWELS
        and sum(c in _VOWELS for c in stem) == 1
    ):
        return stem + "e"
    return None


def _has_vowel(stem: str) -> bool:
    return any(c in _VOWELS for c in stem)


def _strip_verb_suffix(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("ing") and len(word) >= 6 and _has_vowel(word[:-3]):
        stem = word[:-3]
        return _undouble(stem) or _restore_e(stem) or stem
    if word.endswith("ied") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("eed"):
        # agreed -> agree, but speed/need keep their d
        return word[:-1] if _has_vowel(word[:-3]) else word
    if word.endswith("ed") and len(word) >= 5 and _has_vowel(word[:-2]):
        stem = word[:-2]
        return _undouble(stem) or _restore_e(stem) or stem
    if word.endswith(("oes", "ches", "shes", "sses", "xes", "zes")) and len(word) > 4:
        return word[:-2]
    if word.endswith("s") and len(word) > 3 and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def _strip_noun_suffix(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("ches", "shes", "sses", "xes", "zes", "oes")) and len(word) > 4:
        return word[:-2]
    if word.endswith("s") and len(word) > 3 and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    return word


def _strip_adjective_suffix(word: str) -> str:
    for suffix in ("est", "er"):
        if word.endswith(suffix) and len(word) - len(suffix) >= 3:
            stem = word[: -len(suffix)]
            return _undouble(stem) or stem
    return word


def lemmatize(word: str, tag: str = "noun", mode: str = "dictionary-pos") -> str:
    """Reduce a lowercase word to its root form.

    dictionary-pos: shipped (word, tag) table, then tag-specific suffix rules.
    suffix-stemmer: suffix rules only (verb rules for -ing/-ed, noun otherwise).
    off: identity.
    """
    if mode == "off":
        return word
    if mode == "suffix-stemmer":
        if word.endswith(("ing", "ed")):
            return _strip_verb_suffix(word)
        return _strip_noun_suffix(word)
    lemma = _lemma_table().get((word, tag))
    if lemma is None:
        lemma = _lemma_any_tag().get(word)
    if lemma is not None:
        return lemma
    if tag == "verb":
        return _strip_verb_suffix(word)
    if tag == "noun":
        return _strip_noun_suffix(word)
    if tag == "adjective":
        return _strip_adjective_suffix(word)
    return word


def clean(text: str, config: CleanConfig | None = None) -> TokenList:
    """Run the full cleaning pipeline and return the token list.

    Order: unicode repair, lowercase, emoji strip, tokenize, stopword
    removal, lemmatization. With require_english set, text scoring below
    the trigram threshold raises NonEnglishTextError rather than returning
    an empty result.
    """
    if config is None:
        config = CleanConfig()
    source_len = len(text)
    text = repair_unicode(text).lower()
    if config.require_english:
        score = english_score(text)
        if score < ENGLISH_THRESHOLD:
            raise NonEnglishTextError(score, ENGLISH_THRESHOLD)
    if config.strip_emoji:
        text = strip_emoji(text)
    tokens = tokenize(text)
    if config.stopword_set:
        tokens = [t for t in tokens if t not in config.stopword_set]
    if config.lemmatizer == "dictionary-pos":
        tokens = [lemmatize(t, tag) for t, tag in pos_tag(tokens)]
    elif config.lemmatizer == "suffix-stemmer":
        tokens = [lemmatize(t, mode="suffix-stemmer") for t in tokens]
    if config.stopword_set:
        # lemmatization can map an inflected form onto a stopword
        tokens = [t for t in tokens if t not in config.stopword_set]
    return TokenList(tuple(tokens), source_len)
