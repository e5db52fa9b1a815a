"""Tokenization, sentence splitting, stemming and n-grams.

Everything here is a pure function of its input and the vendored word lists,
so the same text always normalizes the same way in curation, oracle search
and evaluation.
"""

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from nltk.stem.porter import PorterStemmer

from . import resources

# word characters, optionally joined by internal periods or apostrophes
# ("u.s", "don't"); anything else is a separator
_TOKEN_RE = re.compile(r"\w+(?:[.'’]\w+)*", re.UNICODE)

# candidate sentence end: terminal punctuation, optional closers, whitespace
_BOUNDARY_RE = re.compile(r"[.!?]+[\"'’”)\]]*(?=\s)")
_PARAGRAPH_RE = re.compile(r"\n\s*\n")

_STEMMER = PorterStemmer(PorterStemmer.ORIGINAL_ALGORITHM)

# ROUGE-1.5.5 leaves tokens of three characters or fewer unstemmed under -m
MIN_STEM_LENGTH = 4


def tokenize(text: str) -> list[str]:
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def _last_word(fragment: str) -> str:
    words = fragment.split()
    if not words:
        return ""
    return words[-1].lstrip("\"'(“[").lower().rstrip(".!?")


def _split_paragraph(text: str, abbrevs: frozenset) -> list[str]:
    sentences = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        head = text[start:m.start() + 1]
        if m.group(0).startswith(".") and _last_word(head) in abbrevs:
            continue
        sentence = text[start:m.end()].strip()
        if sentence:
            sentences.append(sentence)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def split_sentences(text: str) -> list[str]:
    """Rule-based splitter: terminal punctuation followed by whitespace ends a
    sentence unless the word before the period is a known abbreviation.
    Blank lines always end a sentence."""
    abbrevs = resources.abbreviations()
    out = []
    for para in _PARAGRAPH_RE.split(text):
        para = " ".join(para.split())
        if para:
            out.extend(_split_paragraph(para, abbrevs))
    return out


@lru_cache(maxsize=65536)
def stem(token: str) -> str:
    return _STEMMER.stem(token)


def is_stopword(token: str) -> bool:
    return token in resources.stopwords()


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class NormalizationConfig:
    lowercase: bool = True
    apply_stemmer: bool = False
    drop_stopwords: bool = False


IDENTITY = NormalizationConfig(lowercase=False, apply_stemmer=False, drop_stopwords=False)


def normalize(tokens: Iterable[str], config: NormalizationConfig) -> list[str]:
    out = []
    for tok in tokens:
        if config.lowercase:
            tok = tok.lower()
        if config.drop_stopwords and is_stopword(tok.lower()):
            continue
        if config.apply_stemmer and len(tok) >= MIN_STEM_LENGTH:
            tok = stem(tok)
        out.append(tok)
    return out
