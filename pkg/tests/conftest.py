import pytest

from expertsearch.corpus import DEFAULT_TOPICS, TopicSpec, generate_synthetic_corpus
from expertsearch.embeddings import TrainingConfig, train_cbow


@pytest.fixture(scope="session")
def two_topic_corpus():
    """Seeded two-topic corpus with per-author signature bigrams."""
    return generate_synthetic_corpus(
        seed=42,
        n_authors=20,
        n_papers=120,
        topic_spec=TopicSpec(DEFAULT_TOPICS, signature_bigrams=True, n_grants=12),
    )


@pytest.fixture(scope="session")
def frozen_table(two_topic_corpus):
    """One CBOW table trained per test session; reused wherever a frozen
    embedding table is required."""
    _, pubs, _ = two_topic_corpus
    return train_cbow(pubs, TrainingConfig(seed=7))


def topic_lemmas(topic):
    from expertsearch.textpipe import lemmatize

    return {lemmatize(w) for w in topic.words}
