"""Text normalization shared by profiles, embeddings, the knowledge base, and query parsing.

Raw text is lowercased and tokenized, punctuation-only and digit-only tokens
are dropped, exclusion-list tokens (determiners, pronouns, prepositions,
conjunctions, auxiliaries) are removed, and the survivors are lemmatized with
a rule-based suffix lemmatizer driven by two data files:

  data/lemma_rules.tsv       suffix -> replacement, longest match first
  data/lemma_exceptions.tsv  irregular forms, checked before the rules
  data/stopwords.txt         exclusion list

Adjacency is computed after removal, so removed tokens close the gap
("analysis of sentiment" yields the bigram "analysis sentiment"). Pass
gap_close=False to extract_features to restrict bigrams to originally
adjacent tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Suffix-rule guards that do not fit the TSV format: never strip a bare -s
# from these endings, never strip -ed from -eed verbs.
_KEEP_S_ENDINGS = ("ss", "us", "is")
_NO_UNDOUBLE = ("ss", "ll", "zz")

_MAX_LEMMA_PASSES = 10


def _data_text(name: str) -> str:
    return resources.files("expertsearch.data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    words = set()
    for line in _data_text("stopwords.txt").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


@lru_cache(maxsize=1)
def _exceptions() -> dict[str, str]:
    table = {}
    for line in _data_text("lemma_exceptions.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, lemma = line.split("\t")
        table[word] = lemma
    return table


@lru_cache(maxsize=1)
def _rules() -> list[tuple[str, str, int]]:
    rules = []
    for line in _data_text("lemma_rules.tsv").splitlines():
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        suffix, replacement, min_stem = line.split("\t")
        rules.append((suffix, "" if replacement == "-" else replacement, int(min_stem)))
    # longest suffix first; original order breaks ties
    rules.sort(key=lambda r: -len(r[0]))
    return rules


def _undouble(stem: str) -> str:
    if (
        len(stem) >= 4
        and stem[-1] == stem[-2]
        and stem[-1].isalpha()
        and stem[-2:] not in _NO_UNDOUBLE
        and stem[-1] not in "aeiou"
    ):
        return stem[:-1]
    return stem


def _apply_rules(word: str) -> str:
    for suffix, replacement, min_stem in _rules():
        if not word.endswith(suffix) or len(word) - len(suffix) < min_stem:
            continue
        if suffix == "s" and word.endswith(_KEEP_S_ENDINGS):
            continue
        if suffix == "ed" and word.endswith("eed"):
            continue
        stem = word[: len(word) - len(suffix)] + replacement
        if suffix in ("ing", "ed"):
            stem = _undouble(stem)
        return stem
    return word


def lemmatize(word: str) -> str:
    """Reduce a lowercased token to its lemma. Idempotent: lemmas map to themselves."""
    for _ in range(_MAX_LEMMA_PASSES):
        nxt = _exceptions().get(word)
        if nxt is None:
            nxt = _apply_rules(word)
        if nxt == word:
            return word
        word = nxt
    return word


@dataclass(frozen=True)
class TokenStream:
    """Lemmatized content tokens of one text, with original token positions."""

    tokens: tuple[str, ...]
    source_len: int
    positions: tuple[int, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class FeatureSet:
    unigrams: frozenset[str]
    bigrams: frozenset[str]

    def __contains__(self, feature: str) -> bool:
        return feature in self.unigrams or feature in self.bigrams

    def all(self) -> frozenset[str]:
        return self.unigrams | self.bigrams


def normalize(raw_text: str) -> TokenStream:
    """Lowercase, drop punctuation/numeral and exclusion-list tokens, lemmatize.

    Tokens that mix digits and letters (e.g. "3d") are kept; single characters
    and lemmas that land back on the exclusion list are dropped.
    """
    raw_tokens = _TOKEN_RE.findall(raw_text.lower())
    stop = stopwords()
    tokens: list[str] = []
    positions: list[int] = []
    for i, tok in enumerate(raw_tokens):
        if len(tok) < 2 or not any(c.isalpha() for c in tok):
            continue
        if tok in stop:
            continue
        lemma = lemmatize(tok)
        if lemma in stop or len(lemma) < 2 or not any(c.isalpha() for c in lemma):
            continue
        tokens.append(lemma)
        positions.append(i)
    return TokenStream(tuple(tokens), len(raw_tokens), tuple(positions))


def adjacent_pairs(ts: TokenStream, gap_close: bool = True) -> list[str]:
    """Ordered bigrams of a token stream (duplicates preserved)."""
    pairs = []
    for i in range(len(ts.tokens) - 1):
        if not gap_close and ts.positions and ts.positions[i + 1] != ts.positions[i] + 1:
            continue
        pairs.append(f"{ts.tokens[i]} {ts.tokens[i + 1]}")
    return pairs


def extract_features(ts: TokenStream, gap_close: bool = True) -> FeatureSet:
    """Unigram and bigram feature sets of a token stream."""
    return FeatureSet(
        unigrams=frozenset(ts.tokens),
        bigrams=frozenset(adjacent_pairs(ts, gap_close=gap_close)),
    )


def normalize_term(raw: str) -> str:
    """Normalize a standalone term (query word, KB entry) to its feature form."""
    return " ".join(normalize(raw).tokens)
