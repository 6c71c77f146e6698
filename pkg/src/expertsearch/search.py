"""The query engine: parse queries into valid terms, retrieve authors from the
feature index, build explanation vectors, score, and optionally explore
related terms through the knowledge base and the embedding table.

Scoring:
  explanation score  10 per bigram + 1 per unigram in the explanation vector
  academic score     sum over the author's query-matching publications of a
                     recency weight: 20 evenly spaced values from 0.05 (age
                     19) to 1.0 (age 0), and 0.01 beyond the window

Expansion runs one sub-search per new term, keeps the top `expansion_top_n`
authors of each, and merges duplicates by concatenating explanation vectors
(first occurrence wins) and summing both scores. Results order is total:
explanation score desc, academic score desc, author id asc.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

from .corpus import AuthorRecord, PublicationRecord
from .kb import RELATION_CHILDREN, RELATION_CHILDREN_SIBLINGS, KnowledgeBase, expand_terms
from .embeddings import EmbeddingTable
from .profiles import FeatureIndex, ProfileStore, lookup
from .textpipe import FeatureSet, adjacent_pairs, extract_features, normalize

PROVENANCE_DIRECT = "direct"
PROVENANCE_KB = "kb"
PROVENANCE_EMBEDDING = "embedding"

NO_VALID_TERMS = "no valid query terms"

RANK_LEXICOGRAPHIC = "lexicographic"
RANK_WEIGHTED = "weighted"


@dataclass(frozen=True)
class QueryTerms:
    raw_query: str
    tokens: tuple[str, ...]
    pairs: tuple[str, ...]  # all adjacent lemma pairs of the query, valid or not
    unigrams: frozenset[str]  # tokens that exist in the unigram index
    bigrams: frozenset[str]  # pairs that exist in the bigram index

    @property
    def terms(self) -> frozenset[str]:
        return self.unigrams | self.bigrams

    def ordered_terms(self) -> list[str]:
        out = [t for t in dict.fromkeys(self.tokens) if t in self.unigrams]
        out += [b for b in dict.fromkeys(self.pairs) if b in self.bigrams]
        return out


@dataclass(frozen=True)
class MatchResult:
    author_id: str
    explanation: tuple[str, ...]
    s_e: int
    s_a: float
    provenance: frozenset[str]


@dataclass(frozen=True)
class SearchResponse:
    results: tuple[MatchResult, ...]
    query_terms: QueryTerms
    diagnostic: str | None = None


@dataclass(frozen=True)
class SearchConfig:
    use_kb: bool = False
    use_embeddings: bool = False
    neighbors_k: int = 25
    expansion_top_n: int = 50
    reference_year: int | None = None  # None: most recent publication year
    recency_window: int = 20
    old_score: float = 0.01
    min_year_score: float = 0.05
    max_year_score: float = 1.0
    kb_relation: str = RELATION_CHILDREN
    ranking: str = RANK_LEXICOGRAPHIC
    weight_explanation: float = 1.0
    weight_academic: float = 1.0

    def __post_init__(self):
        if self.neighbors_k < 1 or self.expansion_top_n < 1:
            raise ValueError("neighbors_k and expansion_top_n must be >= 1")
        if not self.min_year_score < self.max_year_score:
            raise ValueError("min_year_score must be below max_year_score")
        if self.recency_window < 2:
            raise ValueError("recency_window must be >= 2")
        if self.kb_relation not in (RELATION_CHILDREN, RELATION_CHILDREN_SIBLINGS):
            raise ValueError(f"unknown kb_relation '{self.kb_relation}'")
        if self.ranking not in (RANK_LEXICOGRAPHIC, RANK_WEIGHTED):
            raise ValueError(f"unknown ranking '{self.ranking}'")


def parse_query(raw: str, index: FeatureIndex) -> QueryTerms:
    """Lemmatize the query and keep the unigrams/bigrams that exist in the
    global feature vocabulary."""
    ts = normalize(raw)
    pairs = tuple(dict.fromkeys(adjacent_pairs(ts)))
    return QueryTerms(
        raw_query=raw,
        tokens=ts.tokens,
        pairs=pairs,
        unigrams=frozenset(t for t in ts.tokens if t in index.unigram_index),
        bigrams=frozenset(b for b in pairs if b in index.bigram_index),
    )


def retrieve(qt: QueryTerms, index: FeatureIndex) -> set[str]:
    """Authors whose profiles contain at least one query term."""
    found: set[str] = set()
    for term in qt.terms:
        found |= lookup(term, index)
    return found


def explain(author_id: str, qt: QueryTerms, store: ProfileStore) -> tuple[str, ...]:
    """Explanation vector: query bigrams found in the profile first, then the
    component unigrams of bigrams that were not found, then standalone
    unigrams; first occurrence wins, bigrams listed before unigrams."""
    features = store.profile_features(author_id)
    bigram_part: list[str] = []
    unigram_part: list[str] = []
    for pair in qt.pairs:
        if pair in qt.bigrams and pair in features:
            bigram_part.append(pair)
        elif pair not in features:
            for word in pair.split(" "):
                if word in qt.unigrams and word in features:
                    unigram_part.append(word)
    paired = {w for pair in qt.pairs for w in pair.split(" ")}
    for token in qt.tokens:
        if token not in paired and token in qt.unigrams and token in features:
            unigram_part.append(token)
    ordered = dict.fromkeys(bigram_part)
    ordered.update(dict.fromkeys(unigram_part))
    return tuple(ordered)


def explanation_score(explanation: Sequence[str]) -> int:
    return sum(10 if " " in f else 1 for f in explanation)


def year_score(age: int, cfg: SearchConfig) -> float:
    """Recency weight of one publication given its age in years."""
    if age >= cfg.recency_window:
        return cfg.old_score
    age = max(age, 0)
    span = cfg.max_year_score - cfg.min_year_score
    return cfg.min_year_score + span * (cfg.recency_window - 1 - age) / (cfg.recency_window - 1)


class Engine:
    """Immutable-by-convention search snapshot over one corpus.

    Queries are read-only and safe to run concurrently; to add publications
    under live traffic, clone the engine, insert, and swap references.
    """

    def __init__(
        self,
        authors: Iterable[AuthorRecord],
        publications: Iterable[PublicationRecord],
        table: EmbeddingTable | None = None,
        kb: KnowledgeBase | None = None,
        gap_close: bool = True,
        min_df_scope: str = "author",
    ):
        self.authors: dict[str, AuthorRecord] = {a.author_id: a for a in authors}
        self.publications: dict[str, PublicationRecord] = {}
        self.pub_features: dict[str, FeatureSet] = {}
        self.author_pubs: dict[str, list[str]] = {a: [] for a in self.authors}
        self.gap_close = gap_close
        self.store = ProfileStore(gap_close=gap_close, min_df_scope=min_df_scope)
        self.table = table
        self.kb = kb
        for pub in publications:
            self.insert_publication(pub)

    # -- corpus maintenance ---------------------------------------------

    def insert_publication(self, pub: PublicationRecord) -> None:
        unknown = set(pub.author_ids) - set(self.authors)
        if unknown:
            raise ValueError(f"publication '{pub.pub_id}' references unknown authors {sorted(unknown)}")
        self.store.insert(pub)  # raises on duplicate ids before any cache changes
        self.publications[pub.pub_id] = pub
        self.pub_features[pub.pub_id] = extract_features(
            normalize(pub.abstract_text), gap_close=self.gap_close
        )
        for aid in pub.author_ids:
            self.author_pubs.setdefault(aid, []).append(pub.pub_id)

    def clone(self) -> "Engine":
        other = Engine.__new__(Engine)
        other.authors = dict(self.authors)
        other.publications = dict(self.publications)
        other.pub_features = dict(self.pub_features)
        other.author_pubs = {a: list(ps) for a, ps in self.author_pubs.items()}
        other.gap_close = self.gap_close
        other.store = self.store.clone()
        other.table = self.table
        other.kb = self.kb
        return other

    @property
    def index(self) -> FeatureIndex:
        return self.store.index

    def default_reference_year(self) -> int:
        if self.publications:
            return max(p.year for p in self.publications.values())
        return date.today().year

    # -- scoring ----------------------------------------------------------

    def academic_score(self, author_id: str, terms: frozenset[str] | set[str], cfg: SearchConfig) -> float:
        """Sum of recency weights over the author's publications containing at
        least one query term; each publication counts once."""
        if not terms:
            return 0.0
        reference = cfg.reference_year if cfg.reference_year is not None else self.default_reference_year()
        total = 0.0
        for pid in self.author_pubs.get(author_id, ()):
            feats = self.pub_features[pid]
            if any(t in feats for t in terms):
                total += year_score(reference - self.publications[pid].year, cfg)
        return total

    # -- search -------------------------------------------------------------

    def _rank_key(self, cfg: SearchConfig):
        if cfg.ranking == RANK_WEIGHTED:
            return lambda r: (
                -(cfg.weight_explanation * r.s_e + cfg.weight_academic * r.s_a),
                r.author_id,
            )
        return lambda r: (-r.s_e, -r.s_a, r.author_id)

    def _sub_search(self, raw_term: str, cfg: SearchConfig, provenance: str) -> list[MatchResult]:
        qt = parse_query(raw_term, self.index)
        hits = []
        for author_id in retrieve(qt, self.index):
            explanation = explain(author_id, qt, self.store)
            hits.append(
                MatchResult(
                    author_id=author_id,
                    explanation=explanation,
                    s_e=explanation_score(explanation),
                    s_a=self.academic_score(author_id, qt.terms, cfg),
                    provenance=frozenset({provenance}),
                )
            )
        hits.sort(key=self._rank_key(cfg))
        return hits[: cfg.expansion_top_n]

    def _expansion_terms_kb(self, qt: QueryTerms, cfg: SearchConfig) -> list[str]:
        if not (cfg.use_kb and self.kb):
            return []
        return sorted(expand_terms(set(qt.terms), self.kb, relation=cfg.kb_relation))

    def _expansion_terms_embedding(self, qt: QueryTerms, cfg: SearchConfig) -> list[str]:
        """Neighbor words of every component word of every query term, first
        occurrence order, excluding words already in the query terms."""
        if not (cfg.use_embeddings and self.table):
            return []
        out: dict[str, None] = {}
        for term in qt.ordered_terms():
            for word in term.split(" "):
                for neighbor, _ in self.table.nearest_words(word, cfg.neighbors_k):
                    if neighbor not in qt.terms:
                        out.setdefault(neighbor)
        return list(out)

    def search(self, raw_query: str, cfg: SearchConfig | None = None) -> SearchResponse:
        cfg = cfg or SearchConfig()
        qt = parse_query(raw_query, self.index)

        pools: list[list[MatchResult]] = []
        direct = []
        for author_id in retrieve(qt, self.index):
            explanation = explain(author_id, qt, self.store)
            direct.append(
                MatchResult(
                    author_id=author_id,
                    explanation=explanation,
                    s_e=explanation_score(explanation),
                    s_a=self.academic_score(author_id, qt.terms, cfg),
                    provenance=frozenset({PROVENANCE_DIRECT}),
                )
            )
        direct.sort(key=self._rank_key(cfg))
        pools.append(direct)

        for term in self._expansion_terms_kb(qt, cfg):
            pools.append(self._sub_search(term, cfg, PROVENANCE_KB))
        for term in self._expansion_terms_embedding(qt, cfg):
            pools.append(self._sub_search(term, cfg, PROVENANCE_EMBEDDING))

        merged = _merge(pools)
        merged.sort(key=self._rank_key(cfg))
        diagnostic = NO_VALID_TERMS if not qt.terms else None
        return SearchResponse(tuple(merged), qt, diagnostic)


def _merge(pools: list[list[MatchResult]]) -> list[MatchResult]:
    """Combine per-source results: concatenate explanations (deduped, order
    preserved), sum both scores, union provenance."""
    by_author: dict[str, MatchResult] = {}
    for pool in pools:
        for result in pool:
            prev = by_author.get(result.author_id)
            if prev is None:
                by_author[result.author_id] = result
                continue
            combined = dict.fromkeys(prev.explanation)
            combined.update(dict.fromkeys(result.explanation))
            by_author[result.author_id] = MatchResult(
                author_id=result.author_id,
                explanation=tuple(combined),
                s_e=prev.s_e + result.s_e,
                s_a=prev.s_a + result.s_a,
                provenance=prev.provenance | result.provenance,
            )
    return list(by_author.values())


class FilterConflictError(ValueError):
    pass


def filter_results(
    results: Sequence[MatchResult],
    authors: dict[str, AuthorRecord],
    include_depts: set[str] | None = None,
    exclude_depts: set[str] | None = None,
    include_posts: set[str] | None = None,
    exclude_posts: set[str] | None = None,
) -> list[MatchResult]:
    """Keep results whose author matches the department/position facets.

    Per facet, at most one of include/exclude may be set. Order is preserved.
    """
    include_depts = include_depts or set()
    exclude_depts = exclude_depts or set()
    include_posts = include_posts or set()
    exclude_posts = exclude_posts or set()
    if include_depts and exclude_depts:
        raise FilterConflictError("cannot both include and exclude departments")
    if include_posts and exclude_posts:
        raise FilterConflictError("cannot both include and exclude positions")

    out = []
    for r in results:
        author = authors.get(r.author_id)
        if author is None:
            continue
        if include_depts and author.department not in include_depts:
            continue
        if exclude_depts and author.department in exclude_depts:
            continue
        if include_posts and author.post not in include_posts:
            continue
        if exclude_posts and author.post in exclude_posts:
            continue
        out.append(r)
    return out


def result_to_dict(result: MatchResult, authors: dict[str, AuthorRecord]) -> dict:
    author = authors.get(result.author_id)
    return {
        "author": result.author_id,
        "name": author.display_name if author else result.author_id,
        "department": author.department if author else "",
        "post": author.post if author else "",
        "s_e": result.s_e,
        "s_a": result.s_a,
        "explanation": list(result.explanation),
        "provenance": sorted(result.provenance),
    }


def response_to_dict(
    response: SearchResponse,
    authors: dict[str, AuthorRecord],
    limit: int | None = None,
    offset: int = 0,
) -> dict:
    results = list(response.results)
    total = len(results)
    if offset:
        results = results[offset:]
    if limit is not None:
        results = results[:limit]
    return {
        "results": [result_to_dict(r, authors) for r in results],
        "total": total,
        "offset": offset,
        "diagnostic": response.diagnostic,
        "query_terms": sorted(response.query_terms.terms),
    }
