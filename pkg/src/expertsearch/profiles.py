"""Per-author feature profiles, the global feature vocabulary, and the
inverted feature index.

A feature (unigram or bigram) enters an author's profile once it has appeared
in at least two of that author's abstracts; the profile records the set of
publication years of *all* abstracts containing it. Occurrence counts beyond
presence are deliberately not kept. Document-frequency counters make the
promotion incremental, so inserting one publication costs time proportional
to that abstract alone, never to the corpus.

Snapshots serialize canonically (sorted keys, no whitespace), so any insertion
order that produces the same corpus produces the same bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import PublicationRecord
from .textpipe import extract_features, normalize

MIN_DOC_FREQ = 2

SNAPSHOT_FORMAT = "expertsearch-profile-snapshot"
SNAPSHOT_VERSION = 1


class DuplicatePublicationError(ValueError):
    pass


@dataclass(frozen=True)
class AcademicProfile:
    author_id: str
    features: Mapping[str, frozenset[int]]


@dataclass
class FeatureIndex:
    unigram_index: dict[str, set[str]]
    bigram_index: dict[str, set[str]]

    @property
    def unigrams(self) -> set[str]:
        return set(self.unigram_index)

    @property
    def bigrams(self) -> set[str]:
        return set(self.bigram_index)


_NO_AUTHORS: frozenset[str] = frozenset()


def lookup(term: str, index: FeatureIndex) -> set[str] | frozenset[str]:
    """Authors whose profiles contain the (already lemmatized) term.

    Returns the posting set by reference so the cost stays independent of
    corpus size; treat it as read-only.
    """
    table = index.bigram_index if " " in term else index.unigram_index
    return table.get(term, _NO_AUTHORS)


SCOPE_AUTHOR = "author"
SCOPE_CORPUS = "corpus"


class ProfileStore:
    """Mutable profile/index state with O(1)-amortized insertion.

    min_df_scope picks the document-frequency reading: "author" (default)
    admits a feature into a profile once it appears in two of that author's
    own abstracts; "corpus" admits it for every holder once any two abstracts
    corpus-wide contain it. Readers needing a stable view should take a clone
    and swap references; the store itself is not synchronized.
    """

    def __init__(self, gap_close: bool = True, min_df_scope: str = SCOPE_AUTHOR):
        if min_df_scope not in (SCOPE_AUTHOR, SCOPE_CORPUS):
            raise ValueError(f"unknown min_df_scope '{min_df_scope}'")
        self.gap_close = gap_close
        self.min_df_scope = min_df_scope
        self._df: dict[str, dict[str, int]] = {}
        self._years: dict[str, dict[str, set[int]]] = {}
        self._global_df: dict[str, int] = {}
        self._holders: dict[str, set[str]] = {}
        self._pub_ids: set[str] = set()
        self._profiles: dict[str, dict[str, set[int]]] = {}
        self.index = FeatureIndex({}, {})

    # -- construction -------------------------------------------------

    @classmethod
    def build(
        cls,
        publications: Iterable[PublicationRecord],
        gap_close: bool = True,
        min_df_scope: str = SCOPE_AUTHOR,
    ) -> "ProfileStore":
        store = cls(gap_close=gap_close, min_df_scope=min_df_scope)
        for pub in publications:
            store.insert(pub)
        return store

    def _promote(self, author_id: str, feature: str) -> None:
        self._profiles.setdefault(author_id, {})[feature] = self._years[author_id][feature]
        table = self.index.bigram_index if " " in feature else self.index.unigram_index
        table.setdefault(feature, set()).add(author_id)

    def insert(self, pub: PublicationRecord) -> None:
        if pub.pub_id in self._pub_ids:
            raise DuplicatePublicationError(f"publication '{pub.pub_id}' already indexed")
        self._pub_ids.add(pub.pub_id)
        fs = extract_features(normalize(pub.abstract_text), gap_close=self.gap_close)
        features = fs.all()
        for author_id in pub.author_ids:
            df = self._df.setdefault(author_id, {})
            years = self._years.setdefault(author_id, {})
            self._profiles.setdefault(author_id, {})
            for feature in features:
                df[feature] = df.get(feature, 0) + 1
                years.setdefault(feature, set()).add(pub.year)
                if self.min_df_scope == SCOPE_AUTHOR and df[feature] >= MIN_DOC_FREQ:
                    self._promote(author_id, feature)
        if self.min_df_scope == SCOPE_CORPUS:
            for feature in features:
                count = self._global_df[feature] = self._global_df.get(feature, 0) + 1
                holders = self._holders.setdefault(feature, set())
                holders.update(pub.author_ids)
                if count == MIN_DOC_FREQ:
                    for holder in holders:
                        self._promote(holder, feature)
                elif count > MIN_DOC_FREQ:
                    for holder in pub.author_ids:
                        self._promote(holder, feature)

    # -- views ---------------------------------------------------------

    @property
    def author_ids(self) -> set[str]:
        return set(self._profiles)

    def profile(self, author_id: str) -> dict[str, set[int]]:
        return self._profiles.get(author_id, {})

    def profile_features(self, author_id: str) -> set[str]:
        return set(self._profiles.get(author_id, ()))

    def academic_profile(self, author_id: str) -> AcademicProfile:
        return AcademicProfile(
            author_id,
            {f: frozenset(ys) for f, ys in self._profiles.get(author_id, {}).items()},
        )

    def __contains__(self, pub_id: str) -> bool:
        return pub_id in self._pub_ids

    def clone(self) -> "ProfileStore":
        other = ProfileStore(gap_close=self.gap_close, min_df_scope=self.min_df_scope)
        other._df = {a: dict(d) for a, d in self._df.items()}
        other._years = {a: {f: set(ys) for f, ys in d.items()} for a, d in self._years.items()}
        other._global_df = dict(self._global_df)
        other._holders = {f: set(hs) for f, hs in self._holders.items()}
        other._pub_ids = set(self._pub_ids)
        other._rebuild_views()
        return other

    def _admitted(self, author_id: str, feature: str) -> bool:
        if self.min_df_scope == SCOPE_CORPUS:
            return self._global_df.get(feature, 0) >= MIN_DOC_FREQ
        return self._df[author_id].get(feature, 0) >= MIN_DOC_FREQ

    def _rebuild_views(self) -> None:
        self._profiles = {}
        self.index = FeatureIndex({}, {})
        for author_id, df in self._df.items():
            profile = self._profiles.setdefault(author_id, {})
            for feature in df:
                if self._admitted(author_id, feature):
                    profile[feature] = self._years[author_id][feature]
                    table = (
                        self.index.bigram_index if " " in feature else self.index.unigram_index
                    )
                    table.setdefault(feature, set()).add(author_id)

    # -- persistence ---------------------------------------------------

    def manifest(self) -> dict:
        digest = hashlib.sha256("\n".join(sorted(self._pub_ids)).encode()).hexdigest()
        return {"pub_count": len(self._pub_ids), "pub_ids_digest": digest}

    def to_snapshot(self) -> bytes:
        authors_payload = {}
        for author_id, df in self._df.items():
            years = self._years[author_id]
            authors_payload[author_id] = {
                feature: {"df": count, "years": sorted(years[feature])}
                for feature, count in df.items()
            }
        payload = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "gap_close": self.gap_close,
            "min_df_scope": self.min_df_scope,
            "manifest": self.manifest(),
            "authors": authors_payload,
            "global_df": dict(sorted(self._global_df.items())),
            "holders": {f: sorted(hs) for f, hs in self._holders.items()},
            "unigram_index": {t: sorted(a) for t, a in self.index.unigram_index.items()},
            "bigram_index": {t: sorted(a) for t, a in self.index.bigram_index.items()},
            "pub_ids": sorted(self._pub_ids),
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()

    @classmethod
    def from_snapshot(cls, blob: bytes) -> "ProfileStore":
        payload = json.loads(blob)
        if payload.get("format") != SNAPSHOT_FORMAT or payload.get("version") != SNAPSHOT_VERSION:
            raise ValueError("unrecognized snapshot container")
        store = cls(gap_close=payload["gap_close"], min_df_scope=payload.get("min_df_scope", SCOPE_AUTHOR))
        store._pub_ids = set(payload["pub_ids"])
        store._global_df = dict(payload.get("global_df", {}))
        store._holders = {f: set(hs) for f, hs in payload.get("holders", {}).items()}
        for author_id, features in payload["authors"].items():
            store._df[author_id] = {f: meta["df"] for f, meta in features.items()}
            store._years[author_id] = {f: set(meta["years"]) for f, meta in features.items()}
        store._rebuild_views()
        expected = payload["manifest"]["pub_ids_digest"]
        if store.manifest()["pub_ids_digest"] != expected:
            raise ValueError("snapshot manifest does not match its contents")
        return store

    def state_digest(self) -> str:
        return hashlib.sha256(self.to_snapshot()).hexdigest()


def build_profiles(
    publications: Iterable[PublicationRecord],
    gap_close: bool = True,
    min_df_scope: str = SCOPE_AUTHOR,
) -> tuple[dict[str, AcademicProfile], FeatureIndex]:
    """Batch profile construction; returns per-author profiles and the index."""
    store = ProfileStore.build(publications, gap_close=gap_close, min_df_scope=min_df_scope)
    return {a: store.academic_profile(a) for a in store.author_ids}, store.index


def insert_publication(pub: PublicationRecord, store: ProfileStore) -> ProfileStore:
    store.insert(pub)
    return store
