import itertools
import math
import random

import numpy as np
import pytest

from expertsearch.corpus import DEFAULT_TOPICS
from expertsearch.embeddings import (
    EmbeddingTable,
    EmptyVocabularyError,
    TrainingConfig,
    train_cbow,
    train_on_sentences,
)
from expertsearch.textpipe import lemmatize

FAST_CFG = TrainingConfig(window=3, min_count=3, dim=16, epochs=2, seed=5)


def brute_force_neighbors(table, word, k):
    """O(|V|) oracle scan with plain python cosines."""
    target = table.vector(word).astype(np.float64)
    tnorm = math.sqrt(float(np.dot(target, target)))
    scored = []
    for other in table.words:
        if other == word:
            continue
        v = table.vector(other).astype(np.float64)
        cos = float(np.dot(target, v)) / (tnorm * math.sqrt(float(np.dot(v, v))))
        scored.append((other, cos))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def test_min_count_pruning():
    sentences = [["rare", "common", "common"] for _ in range(4)]
    sentences.append(["rare", "common"])  # "rare" now occurs 5 times
    cfg = TrainingConfig(window=2, min_count=6, dim=8, epochs=1, seed=1)
    table = train_on_sentences(sentences, cfg)
    assert "rare" not in table
    assert "common" in table
    assert all(f >= cfg.min_count for f in table.freqs.values())


def test_vector_dimension(frozen_table):
    assert frozen_table.dim == 100
    for word in frozen_table.words:
        assert frozen_table.vector(word).shape == (100,)


def test_empty_vocabulary_error():
    with pytest.raises(EmptyVocabularyError):
        train_on_sentences([["a", "b"]], TrainingConfig(min_count=10, dim=4))


def test_training_deterministic(two_topic_corpus):
    _, pubs, _ = two_topic_corpus
    cfg = TrainingConfig(window=3, min_count=10, dim=12, epochs=1, seed=9)
    t1 = train_cbow(pubs[:40], cfg)
    t2 = train_cbow(pubs[:40], cfg)
    assert t1.words == t2.words
    assert np.array_equal(t1.vectors, t2.vectors)


def test_topic_separation(frozen_table, two_topic_corpus):
    ml, qp = DEFAULT_TOPICS
    ml_words = sorted({lemmatize(w) for w in ml.words} & set(frozen_table.vocab))
    qp_words = sorted({lemmatize(w) for w in qp.words} & set(frozen_table.vocab))
    assert len(ml_words) >= 5 and len(qp_words) >= 5

    def mean_cos(pairs):
        vals = [frozen_table.cosine(a, b) for a, b in pairs]
        return sum(vals) / len(vals)

    intra = mean_cos(list(itertools.combinations(ml_words, 2))
                     + list(itertools.combinations(qp_words, 2)))
    inter = mean_cos(list(itertools.product(ml_words, qp_words)))
    assert intra - inter >= 0.15, (intra, inter)


def test_nearest_words_matches_brute_force(frozen_table):
    rng = random.Random(17)
    words = [frozen_table.words[rng.randrange(len(frozen_table.words))] for _ in range(50)]
    for word in words:
        fast = frozen_table.nearest_words(word, 10)
        slow = brute_force_neighbors(frozen_table, word, 10)
        assert [w for w, _ in fast] == [w for w, _ in slow]
        assert np.allclose([c for _, c in fast], [c for _, c in slow], atol=1e-9)


def test_nearest_words_excludes_self_and_caps_k(frozen_table):
    word = frozen_table.words[0]
    result = frozen_table.nearest_words(word, 25)
    assert word not in [w for w, _ in result]
    assert len(result) <= 25
    assert result == sorted(result, key=lambda t: (-t[1], t[0]))


def test_nearest_words_oov_is_empty(frozen_table):
    assert frozen_table.nearest_words("zzzznotaword", 5) == []


def test_nearest_words_full_permutation(frozen_table):
    word = frozen_table.words[3]
    result = frozen_table.nearest_words(word, len(frozen_table) - 1)
    assert sorted(w for w, _ in result) == sorted(w for w in frozen_table.words if w != word)


def test_cosine_symmetry(frozen_table):
    rng = random.Random(3)
    for _ in range(100):
        a = frozen_table.words[rng.randrange(len(frozen_table.words))]
        b = frozen_table.words[rng.randrange(len(frozen_table.words))]
        assert abs(frozen_table.cosine(a, b) - frozen_table.cosine(b, a)) <= 1e-12


def test_loss_non_increasing(frozen_table):
    losses = frozen_table.epoch_losses
    assert len(losses) == 5
    for earlier, later in zip(losses, losses[1:]):
        assert later <= earlier * 1.05, losses


def test_save_load_round_trip(tmp_path, frozen_table):
    path = tmp_path / "vectors.txt"
    frozen_table.save_text(path)
    loaded = EmbeddingTable.load_text(path)
    assert loaded.words == frozen_table.words
    assert np.array_equal(loaded.vectors, frozen_table.vectors)


def test_load_rejects_malformed(tmp_path):
    bad = tmp_path / "vec.txt"
    bad.write_text("2 3\nword 0.1 0.2\n")
    with pytest.raises(ValueError):
        EmbeddingTable.load_text(bad)


def test_vectors_finite_and_norms_positive(frozen_table):
    assert np.all(np.isfinite(frozen_table.vectors))
    assert np.all(frozen_table.norms > 0)
