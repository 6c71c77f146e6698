"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the assertions are the authoritative gate either way.
"""

import itertools
import json
import random
import time

import numpy as np
import pytest

from expertsearch.corpus import (
    DEFAULT_TOPICS,
    AuthorRecord,
    GrantRecord,
    PublicationRecord,
    TopicSpec,
    filter_grants,
    generate_synthetic_corpus,
)
from expertsearch.embeddings import TrainingConfig, train_cbow
from expertsearch.evalharness import evaluate_grants, measure_diversity, measure_novelty
from expertsearch.kb import load_kb
from expertsearch.profiles import ProfileStore, lookup
from expertsearch.search import (
    Engine,
    SearchConfig,
    explain,
    explanation_score,
    parse_query,
    retrieve,
    year_score,
)
from expertsearch.textpipe import lemmatize

from reference import ReferenceSearch, ref_neighbors


def ok(n, message):
    print(f"\n[PASS] criterion {n}: {message}")


def author(aid, dept="Computing", post="professor"):
    return AuthorRecord(aid, "F", aid.upper(), post, dept, "Engineering")


def pub(pid, text, authors, year=2020):
    return PublicationRecord(pid, text, tuple(authors), year)


# -- criterion 1: score-formula exactness -----------------------------------

def test_criterion_1_score_formulas():
    start = time.perf_counter()

    authors = [author("ax"), author("ay"), author("az")]
    pubs = [
        pub("p1", "Sentiment analysis tools for robust speech language models.", ["ax"], 2019),
        pub("p2", "Sentiment analysis tools improve robust speech language models.", ["ax"], 2021),
        pub("p3", "Natural language processing advances rapidly.", ["ay"], 2018),
        pub("p4", "Natural language processing advances slowly.", ["ay"], 2020),
        pub("p5", "Language acquisition in children worldwide.", ["az"], 2015),
        pub("p6", "Language acquisition across cultures studied.", ["az"], 2016),
    ]
    engine = Engine(authors, pubs)

    qt = parse_query("natural language processing", engine.index)
    v_both = explain("ay", qt, engine.store)
    assert set(v_both) == {"language processing", "natural language"}
    assert explanation_score(v_both) == 20

    assert explanation_score(["language", "processing"]) == 2
    assert explanation_score(["language"]) == 1
    v_az = explain("az", qt, engine.store)
    assert v_az == ("language",)
    assert explanation_score(v_az) == 1

    qt5 = parse_query("sentiment analysis speech language models", engine.index)
    v5 = explain("ax", qt5, engine.store)
    assert set(v5) == {"sentiment analysis", "speech language", "language model", "analysis", "speech"}
    assert explanation_score(v5) == 32

    cfg = SearchConfig(reference_year=2020)
    assert abs(year_score(2020 - 2020, cfg) - 1.0) <= 1e-12
    assert abs(year_score(2020 - 2017, cfg) - 0.85) <= 1e-12
    assert abs(year_score(2020 - 2001, cfg) - 0.05) <= 1e-12
    assert abs(year_score(2020 - 1995, cfg) - 0.01) <= 1e-12
    assert abs(year_score(25, cfg) - 0.01) <= 1e-12

    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    ok(1, f"explanation scores 20/2/1/32 and year scores exact ({elapsed:.3f}s)")


# -- shared fixtures for criteria 2 and 5 ------------------------------------

@pytest.fixture(scope="module")
def oracle_setup(tmp_path_factory):
    authors, pubs, _ = generate_synthetic_corpus(
        seed=42,
        n_authors=20,
        n_papers=120,
        topic_spec=TopicSpec(DEFAULT_TOPICS, signature_bigrams=True, n_grants=12),
    )
    assert len(authors) <= 100 and len(pubs) <= 1000
    table = train_cbow(pubs, TrainingConfig(seed=7))

    kb_file = tmp_path_factory.mktemp("kb") / "topics_kb.json"
    kb_file.write_text(json.dumps([
        {"term": "machine learning", "children": [
            "neural networks", "deep learning", "convolutional layers", "gradient training",
        ]},
        {"term": "quantum physics", "children": [
            "quantum entanglement", "superconducting qubits", "cavity resonators",
        ]},
    ]))
    kb = load_kb(kb_file)

    engine = Engine(authors, pubs, table=table, kb=kb)
    oracle = ReferenceSearch(pubs, table=table, kb=kb)

    vocab = sorted({lemmatize(w) for t in DEFAULT_TOPICS for w in t.words})
    extras = ["machine learning", "quantum physics", "the of and", "zzzz"]
    rng = random.Random(1234)
    queries = []
    for _ in range(100):
        n = rng.randrange(2, 5)
        words = [vocab[rng.randrange(len(vocab))] for _ in range(n)]
        if rng.random() < 0.3:
            words.insert(rng.randrange(len(words) + 1), extras[rng.randrange(len(extras))])
        queries.append(" ".join(words))

    ref_year = engine.default_reference_year()
    configs = {
        "baseline": SearchConfig(reference_year=ref_year),
        "kb": SearchConfig(use_kb=True, reference_year=ref_year),
        "emb": SearchConfig(use_embeddings=True, reference_year=ref_year),
        "kb+emb": SearchConfig(use_kb=True, use_embeddings=True, reference_year=ref_year),
    }
    return engine, oracle, queries, configs, ref_year


def test_criterion_2_oracle_equivalence(oracle_setup):
    engine, oracle, queries, configs, ref_year = oracle_setup
    start = time.perf_counter()
    compared = 0
    for name, cfg in configs.items():
        for q in queries:
            got = engine.search(q, cfg).results
            want = oracle.search(q, cfg, ref_year)
            assert [
                (r.author_id, r.s_e, r.s_a, r.explanation, set(r.provenance)) for r in got
            ] == [
                (w["author"], w["s_e"], w["s_a"], w["explanation"], w["provenance"]) for w in want
            ], (name, q)
            compared += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    ok(2, f"{compared} query/config runs equal the no-index reference ({elapsed:.1f}s)")


def test_criterion_5_expansion_bounds_and_merging(oracle_setup):
    engine, oracle, queries, configs, ref_year = oracle_setup
    cfg = configs["kb+emb"]
    checked = 0
    for q in queries:
        response = engine.search(q, cfg)
        qt = response.query_terms
        direct_ids = retrieve(qt, engine.index)
        result_ids = {r.author_id for r in response.results}
        assert direct_ids <= result_ids  # R_Q ⊆ R_Q⁺

        n_subsearches = len(engine._expansion_terms_kb(qt, cfg)) + len(
            engine._expansion_terms_embedding(qt, cfg)
        )
        assert len(result_ids - direct_ids) <= cfg.expansion_top_n * n_subsearches

        for r in response.results:
            profile = engine.store.profile_features(r.author_id)
            assert r.explanation
            assert len(set(r.explanation)) == len(r.explanation)  # deduped
            for f in r.explanation:
                assert f in profile
            if r.provenance == {"direct"}:
                assert r.s_e == explanation_score(r.explanation)
        checked += 1

    # summation on a crafted merge: direct + one embedding sub-search
    a = [author("m1"), author("m2", dept="Mathematics", post="lecturer")]
    p = [
        pub("x1", "alpha signals with beta undertones", ["m1"], 2019),
        pub("x2", "alpha signals and beta undertones", ["m1"], 2021),
        pub("x3", "beta undertones analyzed closely", ["m2"], 2020),
        pub("x4", "beta undertones analyzed again", ["m2"], 2021),
    ]
    from expertsearch.embeddings import EmbeddingTable

    tiny = EmbeddingTable(["alpha", "beta"], np.array([[1.0, 0.0], [0.9, 0.1]], dtype=np.float32))
    eng = Engine(a, p, table=tiny)
    merged = {r.author_id: r for r in eng.search(
        "alpha", SearchConfig(use_embeddings=True, neighbors_k=1, reference_year=2021)
    ).results}
    direct = {r.author_id: r for r in eng.search("alpha", SearchConfig(reference_year=2021)).results}
    sub = {r.author_id: r for r in eng.search("beta", SearchConfig(reference_year=2021)).results}
    assert merged["m1"].s_e == direct["m1"].s_e + sub["m1"].s_e
    assert merged["m1"].s_a == direct["m1"].s_a + sub["m1"].s_a
    assert merged["m1"].explanation == ("alpha", "beta")
    assert merged["m1"].provenance == {"direct", "embedding"}

    ok(5, f"expansion bounds and merge invariants hold on {checked} queries")


# -- criterion 3: incremental equals batch ------------------------------------

def test_criterion_3_incremental_equals_batch():
    start = time.perf_counter()
    _, pubs, _ = generate_synthetic_corpus(seed=5, n_authors=6, n_papers=16)
    batch_bytes = ProfileStore.build(pubs).to_snapshot()
    rng = random.Random(99)
    for _ in range(500):
        order = list(pubs)
        rng.shuffle(order)
        store = ProfileStore(gap_close=True)
        for p in order:
            store.insert(p)
        assert store.to_snapshot() == batch_bytes
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    ok(3, f"500 randomized insertion orders byte-identical to rebuild ({elapsed:.1f}s)")


# -- criterion 4: embedding properties ----------------------------------------

def test_criterion_4_embedding_properties(two_topic_corpus, frozen_table):
    start = time.perf_counter()
    table = frozen_table
    ml, qp = DEFAULT_TOPICS
    ml_words = sorted({lemmatize(w) for w in ml.words} & set(table.vocab))
    qp_words = sorted({lemmatize(w) for w in qp.words} & set(table.vocab))

    def mean_cos(pairs):
        vals = [table.cosine(a, b) for a, b in pairs]
        return sum(vals) / len(vals)

    intra = mean_cos(list(itertools.combinations(ml_words, 2))
                     + list(itertools.combinations(qp_words, 2)))
    inter = mean_cos(list(itertools.product(ml_words, qp_words)))
    assert intra - inter >= 0.15

    rng = random.Random(2024)
    for _ in range(50):
        word = table.words[rng.randrange(len(table.words))]
        fast = table.nearest_words(word, 10)
        assert [w for w, _ in fast] == ref_neighbors(table, word, 10)

    assert all(f >= 10 for f in table.freqs.values())

    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    ok(4, f"separation {intra - inter:.2f} >= 0.15, 50 neighbor scans match, "
          f"min frequency respected ({elapsed:.1f}s)")


# -- criterion 6: evaluation harness ------------------------------------------

def test_criterion_6_eval_harness(two_topic_corpus, frozen_table):
    # (a) holder-unique signature bigrams: perfect recall and exact match
    authors, pubs, grants = two_topic_corpus
    engine = Engine(authors, pubs)
    usable = filter_grants(grants)
    assert usable
    row = evaluate_grants(usable, engine, {"baseline": SearchConfig()}).row("baseline")
    assert row.recall == 100.0
    assert row.g_all == 100.0

    # (b) no signatures, embeddings on: at least one novelty hit
    authors2, pubs2, grants2 = generate_synthetic_corpus(
        seed=43, n_authors=16, n_papers=96,
        topic_spec=TopicSpec(DEFAULT_TOPICS, signature_bigrams=False, n_grants=10),
    )
    engine2 = Engine(authors2, pubs2, table=frozen_table)
    novelty = measure_novelty(filter_grants(grants2), engine2, SearchConfig(use_embeddings=True))
    assert novelty >= 1
    assert measure_novelty(filter_grants(grants2), engine2, SearchConfig()) == 0

    # (c) two departments x two posts sharing one topic: fully diverse
    div_authors = [
        author("d1", dept="Computing", post="professor"),
        author("d2", dept="Mathematics", post="lecturer"),
    ]
    div_pubs = [
        pub("v1", "shared retrieval topics explored", ["d1"], 2019),
        pub("v2", "shared retrieval topics extended", ["d1"], 2021),
        pub("v3", "shared retrieval topics examined", ["d2"], 2020),
        pub("v4", "shared retrieval topics debated", ["d2"], 2021),
    ]
    div_grants = [GrantRecord("g1", "shared retrieval topics grant work", (), ("d1", "d2"))]
    assert measure_diversity(div_grants, Engine(div_authors, div_pubs), SearchConfig()) == 100.0

    ok(6, f"signature fixture 100/100, novelty hits {novelty} >= 1, diversity fixture 100%")


# -- criterion 7: performance envelope ----------------------------------------

def _best_lookup_time(store, terms, repeats=7, rounds=400):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(rounds):
            for term in terms:
                lookup(term, store.index)
        best = min(best, time.perf_counter() - t0)
    return best


def _best_insert_time(store, texts, author_id, tag):
    best = float("inf")
    for i, text in enumerate(texts):
        p = pub(f"bench_{tag}_{i}", text, [author_id], 2020)
        t0 = time.perf_counter()
        store.insert(p)
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_7_performance_envelope():
    small_authors, small_pubs, _ = generate_synthetic_corpus(seed=77, n_authors=25, n_papers=100)
    big_authors, big_pubs, _ = generate_synthetic_corpus(seed=78, n_authors=200, n_papers=800)
    small = ProfileStore.build(small_pubs)
    big = ProfileStore.build(big_pubs)
    assert len(big_pubs) == 8 * len(small_pubs)

    terms = [lemmatize(w) for t in DEFAULT_TOPICS for w in t.words][:20]
    terms += ["absent_term", "another absent"]
    t_small = _best_lookup_time(small, terms)
    t_big = _best_lookup_time(big, terms)
    ratio_lookup = t_big / t_small
    assert ratio_lookup < 2.0, f"lookup grew {ratio_lookup:.2f}x on an 8x corpus"

    texts = [
        f"benchmark abstract number {i} about neural network training dynamics"
        for i in range(60)
    ]
    small_author = small_authors[0].author_id
    big_author = big_authors[0].author_id
    i_small = _best_insert_time(small, texts, small_author, "s")
    i_big = _best_insert_time(big, texts, big_author, "b")
    ratio_insert = i_big / i_small
    assert ratio_insert < 2.0, f"insert grew {ratio_insert:.2f}x on an 8x corpus"

    ok(7, f"8x corpus: lookup x{ratio_lookup:.2f}, insert x{ratio_insert:.2f}, both < 2.0")
