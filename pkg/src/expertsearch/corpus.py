"""Author/publication/grant datasets: validation, line-delimited persistence,
and a deterministic synthetic corpus generator used by the tests and demos.

File formats (one JSON object per line, UTF-8):
  authors.jsonl       id, first_name, last_name, post, department, faculty
  publications.jsonl  id, abstract, authors (array of ids), year
  grants.jsonl        id, title, keywords (array), holders (array of ids)

Unknown keys are ignored with a warning. Loaded datasets are immutable
values, safe to share across concurrent readers.
"""

from __future__ import annotations

import json
import logging
import random
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from . import textpipe

logger = logging.getLogger(__name__)

MIN_YEAR = 1900

# Term filter applied to grant titles before evaluation; length and term
# filters only, no named-entity filtering.
DEFAULT_GRANT_STOP_TERMS = frozenset({"studentship", "bursary", "salary"})
DEFAULT_GRANT_MIN_WORDS = 5


class CorpusError(ValueError):
    pass


class CorpusFormatError(CorpusError):
    """Malformed record; carries the offending file and line number."""


class ReferentialIntegrityError(CorpusError):
    """A record references author ids that do not exist."""

    def __init__(self, unknown_ids: set[str], where: str):
        self.unknown_ids = set(unknown_ids)
        super().__init__(f"unknown author ids {sorted(self.unknown_ids)} referenced by {where}")


@dataclass(frozen=True)
class AuthorRecord:
    author_id: str
    first_name: str
    last_name: str
    post: str
    department: str
    faculty: str

    @property
    def display_name(self) -> str:
        return f"{self.first_name} {self.last_name}".strip()


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    abstract_text: str
    author_ids: tuple[str, ...]
    year: int


@dataclass(frozen=True)
class GrantRecord:
    grant_id: str
    title: str
    keywords: tuple[str, ...]
    holder_ids: tuple[str, ...]

    def query_text(self) -> str:
        """Grant title with keywords concatenated, used as the search query."""
        return " ".join([self.title, *self.keywords]).strip()


_AUTHOR_KEYS = {"id", "first_name", "last_name", "post", "department", "faculty"}
_PUB_KEYS = {"id", "abstract", "authors", "year"}
_GRANT_KEYS = {"id", "title", "keywords", "holders"}


def _read_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path.name}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"{path.name}:{lineno}: expected an object")
            yield lineno, obj


def _warn_unknown(obj: dict, known: set[str], path: Path, lineno: int) -> None:
    extra = set(obj) - known
    if extra:
        logger.warning("%s:%d: ignoring unknown keys %s", path.name, lineno, sorted(extra))


def _require(obj: dict, key: str, path: Path, lineno: int):
    if key not in obj:
        raise CorpusFormatError(f"{path.name}:{lineno}: missing key '{key}'")
    return obj[key]


def load_authors(path: str | Path) -> list[AuthorRecord]:
    path = Path(path)
    authors: list[AuthorRecord] = []
    seen: set[str] = set()
    for lineno, obj in _read_lines(path):
        _warn_unknown(obj, _AUTHOR_KEYS, path, lineno)
        rec = AuthorRecord(
            author_id=str(_require(obj, "id", path, lineno)),
            first_name=str(obj.get("first_name", "")),
            last_name=str(obj.get("last_name", "")),
            post=str(_require(obj, "post", path, lineno)),
            department=str(_require(obj, "department", path, lineno)),
            faculty=str(obj.get("faculty", "")),
        )
        if not rec.author_id:
            raise CorpusFormatError(f"{path.name}:{lineno}: empty author id")
        if rec.author_id in seen:
            raise CorpusFormatError(f"{path.name}:{lineno}: duplicate author id '{rec.author_id}'")
        if not rec.post or not rec.department:
            raise CorpusFormatError(f"{path.name}:{lineno}: post and department must be non-empty")
        seen.add(rec.author_id)
        authors.append(rec)
    return authors


def load_publications(
    path: str | Path, known_authors: set[str], max_year: int | None = None
) -> list[PublicationRecord]:
    path = Path(path)
    max_year = max_year if max_year is not None else date.today().year
    pubs: list[PublicationRecord] = []
    seen: set[str] = set()
    for lineno, obj in _read_lines(path):
        _warn_unknown(obj, _PUB_KEYS, path, lineno)
        pub_id = str(_require(obj, "id", path, lineno))
        abstract = str(_require(obj, "abstract", path, lineno))
        author_ids = tuple(str(a) for a in _require(obj, "authors", path, lineno))
        year = _require(obj, "year", path, lineno)
        if pub_id in seen:
            raise CorpusFormatError(f"{path.name}:{lineno}: duplicate publication id '{pub_id}'")
        if not abstract:
            raise CorpusFormatError(f"{path.name}:{lineno}: empty abstract")
        if not author_ids:
            raise CorpusFormatError(f"{path.name}:{lineno}: publication has no authors")
        if not isinstance(year, int) or not (MIN_YEAR <= year <= max_year):
            raise CorpusFormatError(
                f"{path.name}:{lineno}: year {year!r} outside [{MIN_YEAR}, {max_year}]"
            )
        unknown = set(author_ids) - known_authors
        if unknown:
            raise ReferentialIntegrityError(unknown, f"{path.name}:{lineno}")
        seen.add(pub_id)
        pubs.append(PublicationRecord(pub_id, abstract, author_ids, year))
    return pubs


def load_grants(path: str | Path, known_authors: set[str]) -> list[GrantRecord]:
    path = Path(path)
    grants: list[GrantRecord] = []
    for lineno, obj in _read_lines(path):
        _warn_unknown(obj, _GRANT_KEYS, path, lineno)
        rec = GrantRecord(
            grant_id=str(_require(obj, "id", path, lineno)),
            title=str(_require(obj, "title", path, lineno)),
            keywords=tuple(str(k) for k in obj.get("keywords", [])),
            holder_ids=tuple(str(h) for h in _require(obj, "holders", path, lineno)),
        )
        if not rec.title:
            raise CorpusFormatError(f"{path.name}:{lineno}: empty grant title")
        if not rec.holder_ids:
            raise CorpusFormatError(f"{path.name}:{lineno}: grant has no holders")
        unknown = set(rec.holder_ids) - known_authors
        if unknown:
            raise ReferentialIntegrityError(unknown, f"{path.name}:{lineno}")
        grants.append(rec)
    return grants


def load_corpus(
    path: str | Path, max_year: int | None = None
) -> tuple[list[AuthorRecord], list[PublicationRecord]]:
    """Load authors.jsonl and publications.jsonl from a corpus directory."""
    path = Path(path)
    authors_file = path / "authors.jsonl"
    pubs_file = path / "publications.jsonl"
    authors = load_authors(authors_file) if authors_file.exists() else []
    known = {a.author_id for a in authors}
    pubs = load_publications(pubs_file, known, max_year=max_year) if pubs_file.exists() else []
    return authors, pubs


def save_corpus(
    path: str | Path,
    authors: list[AuthorRecord],
    publications: list[PublicationRecord],
    grants: list[GrantRecord] | None = None,
) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / "authors.jsonl", "w", encoding="utf-8") as fh:
        for a in authors:
            fh.write(
                json.dumps(
                    {
                        "id": a.author_id,
                        "first_name": a.first_name,
                        "last_name": a.last_name,
                        "post": a.post,
                        "department": a.department,
                        "faculty": a.faculty,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )
    with open(path / "publications.jsonl", "w", encoding="utf-8") as fh:
        for p in publications:
            fh.write(
                json.dumps(
                    {
                        "id": p.pub_id,
                        "abstract": p.abstract_text,
                        "authors": list(p.author_ids),
                        "year": p.year,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )
    if grants is not None:
        with open(path / "grants.jsonl", "w", encoding="utf-8") as fh:
            for g in grants:
                fh.write(
                    json.dumps(
                        {
                            "id": g.grant_id,
                            "title": g.title,
                            "keywords": list(g.keywords),
                            "holders": list(g.holder_ids),
                        },
                        sort_keys=True,
                        ensure_ascii=False,
                    )
                    + "\n"
                )


def filter_grants(
    grants: list[GrantRecord],
    stop_terms: frozenset[str] | set[str] = DEFAULT_GRANT_STOP_TERMS,
    min_words: int = DEFAULT_GRANT_MIN_WORDS,
) -> list[GrantRecord]:
    """Drop grants with short titles or administrative stop terms.

    Stop terms match case-insensitively on word boundaries in the title.
    Idempotent; named-entity based filtering is deliberately not applied.
    """
    if min_words < 1:
        raise ValueError("min_words must be >= 1")
    patterns = [re.compile(r"\b" + re.escape(t.lower()) + r"\b") for t in sorted(stop_terms)]
    kept = []
    for g in grants:
        if len(g.title.split()) < min_words:
            continue
        title = g.title.lower()
        if any(p.search(title) for p in patterns):
            continue
        kept.append(g)
    return kept


# ---------------------------------------------------------------------------
# Synthetic corpus generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Topic:
    name: str
    words: tuple[str, ...]


@dataclass(frozen=True)
class TopicSpec:
    """Topic mixture driving the generator.

    With signature_bigrams on, every author gets a private two-word phrase
    injected into each of their first-author abstracts; grant titles embed the
    signatures of their holders, so each holder is retrievable from the title
    alone (this requires >= 2 papers per author to clear the profile
    document-frequency threshold).
    """

    topics: tuple[Topic, ...]
    n_grants: int | None = None
    signature_bigrams: bool = True
    max_topics_per_author: int = 3
    max_holders: int = 4
    sentences_per_abstract: tuple[int, int] = (4, 7)
    words_per_sentence: tuple[int, int] = (6, 11)
    year_range: tuple[int, int] = (2002, 2021)


DEFAULT_TOPICS = (
    Topic(
        "machine_learning",
        (
            "neural", "network", "deep", "learn", "model", "training", "classifier",
            "gradient", "layer", "convolutional", "supervised", "feature", "dataset",
            "embedding", "transformer", "attention", "accuracy", "regression",
        ),
    ),
    Topic(
        "quantum_physics",
        (
            "quantum", "photon", "entanglement", "qubit", "superconducting", "lattice",
            "spin", "coherence", "interferometer", "boson", "cavity", "resonator",
            "cryogenic", "decoherence", "tunneling", "condensate", "magnon", "phonon",
        ),
    ),
)

_DEPARTMENTS = ("Computing", "Mathematics", "Bioengineering", "Electrical Engineering", "Physics")
_POSTS = ("professor", "lecturer", "researcher")
_FACULTIES = ("Engineering", "Natural Sciences")
_FIRST_NAMES = ("Ada", "Alan", "Grace", "Edsger", "Barbara", "John", "Maryam", "Claude",
                "Dorothy", "Leslie", "Radia", "Tim", "Shafi", "Katherine", "Donald", "Frances")
_LAST_NAMES = ("Moreno", "Okafor", "Novak", "Tanaka", "Svensson", "Rossi", "Mehta", "Dubois",
               "Kovacs", "Iversen", "Nakamura", "Haddad", "Bauer", "Costa", "Lindgren", "Farrell")

_GLUE = ("of", "for", "with", "in", "and")
_SYLLABLES = ("va", "ze", "ku", "ro", "mi", "ta", "lo", "pe", "du", "sa", "ni", "go")


def _randint(rng: random.Random, lo: int, hi: int) -> int:
    return lo + rng.randrange(hi - lo + 1)


def _choice(rng: random.Random, seq):
    return seq[rng.randrange(len(seq))]


def _sample(rng: random.Random, seq, k: int) -> list:
    pool = list(seq)
    out = []
    for _ in range(k):
        out.append(pool.pop(rng.randrange(len(pool))))
    return out


def _signature_word(index: int) -> str:
    n = len(_SYLLABLES)
    return _SYLLABLES[index // (n * n) % n] + _SYLLABLES[index // n % n] + _SYLLABLES[index % n]


def _pluralizable(word: str) -> bool:
    return textpipe.lemmatize(word + "s") == word


def _sentence(rng: random.Random, topic: Topic, cfg: TopicSpec) -> str:
    n_words = _randint(rng, *cfg.words_per_sentence)
    words = []
    for _ in range(n_words):
        if words and rng.random() < 0.18:
            words.append(_choice(rng, _GLUE))
        w = _choice(rng, topic.words)
        if rng.random() < 0.25 and _pluralizable(w):
            w = w + "s"
        words.append(w)
    return " ".join(words).capitalize() + "."


def generate_synthetic_corpus(
    seed: int,
    n_authors: int,
    n_papers: int,
    topic_spec: TopicSpec = TopicSpec(DEFAULT_TOPICS),
) -> tuple[list[AuthorRecord], list[PublicationRecord], list[GrantRecord]]:
    """Deterministic synthetic corpus: same seed, same bytes, any platform."""
    if n_authors < 1 or n_papers < n_authors:
        raise ValueError("need n_authors >= 1 and n_papers >= n_authors")
    rng = random.Random(seed)
    topics = topic_spec.topics

    authors = []
    author_topics: dict[str, list[Topic]] = {}
    signatures: dict[str, tuple[str, str]] = {}
    for i in range(n_authors):
        aid = f"a{i:03d}"
        last = _LAST_NAMES[(i // len(_FIRST_NAMES)) % len(_LAST_NAMES)]
        bucket = i // (len(_FIRST_NAMES) * len(_LAST_NAMES))
        if bucket:
            last += str(bucket)
        authors.append(
            AuthorRecord(
                author_id=aid,
                first_name=_FIRST_NAMES[i % len(_FIRST_NAMES)],
                last_name=last,
                post=_POSTS[i % len(_POSTS)],
                department=_DEPARTMENTS[i % len(_DEPARTMENTS)],
                faculty=_FACULTIES[i % len(_FACULTIES)],
            )
        )
        k = _randint(rng, 1, min(topic_spec.max_topics_per_author, len(topics)))
        author_topics[aid] = _sample(rng, topics, k)
        signatures[aid] = (_signature_word(2 * i), _signature_word(2 * i + 1))

    publications = []
    owner_of: dict[str, str] = {}
    for j in range(n_papers):
        owner = authors[j % n_authors].author_id
        coauthors = [owner]
        # occasional coauthor with an overlapping-topic preference
        if n_authors > 1 and rng.random() < 0.3:
            other = _choice(rng, [a.author_id for a in authors if a.author_id != owner])
            coauthors.append(other)
        n_sent = _randint(rng, *topic_spec.sentences_per_abstract)
        sentences = [
            _sentence(rng, _choice(rng, author_topics[owner]), topic_spec)
            for _ in range(n_sent)
        ]
        if topic_spec.signature_bigrams:
            sig = signatures[owner]
            pos = rng.randrange(len(sentences) + 1)
            sentences.insert(pos, f"We study {sig[0]} {sig[1]} models in this setting.")
        pid = f"p{j:04d}"
        owner_of[pid] = owner
        publications.append(
            PublicationRecord(
                pub_id=pid,
                abstract_text=" ".join(sentences),
                author_ids=tuple(coauthors),
                year=_randint(rng, *topic_spec.year_range),
            )
        )

    abstracts_of: dict[str, list[PublicationRecord]] = {a.author_id: [] for a in authors}
    for p in publications:
        abstracts_of[owner_of[p.pub_id]].append(p)

    n_grants = topic_spec.n_grants if topic_spec.n_grants is not None else max(1, n_authors // 2)
    grants = []
    for gidx in range(n_grants):
        h = _randint(rng, 1, min(topic_spec.max_holders, n_authors))
        holders = _sample(rng, [a.author_id for a in authors], h)
        words: list[str] = []
        for holder in holders:
            if topic_spec.signature_bigrams:
                words.extend(signatures[holder])
            else:
                words.extend(_holder_phrase(rng, abstracts_of[holder]))
        topic = _choice(rng, author_topics[holders[0]])
        while len(words) < DEFAULT_GRANT_MIN_WORDS:
            words.append(_choice(rng, topic.words))
        keywords = tuple(_sample(rng, topic.words, _randint(rng, 0, 2)))
        grants.append(
            GrantRecord(
                grant_id=f"g{gidx:03d}",
                title=" ".join(words).capitalize(),
                keywords=keywords,
                holder_ids=tuple(holders),
            )
        )
    return authors, publications, grants


def _holder_phrase(rng: random.Random, pubs: list[PublicationRecord]) -> tuple[str, str]:
    """An adjacent lemma pair from one of the holder's abstracts."""
    pub = _choice(rng, pubs)
    tokens = textpipe.normalize(pub.abstract_text).tokens
    if len(tokens) < 2:
        return (tokens[0], tokens[0]) if tokens else ("shared", "phrase")
    i = rng.randrange(len(tokens) - 1)
    return tokens[i], tokens[i + 1]


def corpus_digest(
    authors: list[AuthorRecord],
    publications: list[PublicationRecord],
    grants: list[GrantRecord],
) -> str:
    """SHA-256 over the canonical serialization, for reproducibility checks."""
    import hashlib

    payload = json.dumps(
        {
            "authors": [vars(a) for a in authors],
            "publications": [
                {"id": p.pub_id, "abstract": p.abstract_text, "authors": list(p.author_ids), "year": p.year}
                for p in publications
            ],
            "grants": [
                {"id": g.grant_id, "title": g.title, "keywords": list(g.keywords), "holders": list(g.holder_ids)}
                for g in grants
            ],
        },
        sort_keys=True,
        ensure_ascii=True,
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()
