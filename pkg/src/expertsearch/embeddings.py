"""Corpus-trained CBOW word vectors with cosine nearest-neighbor lookup.

Training follows the classic continuous-bag-of-words recipe: average the
input vectors of the words in a dynamically shrunk context window, score the
center word plus sampled negatives against output vectors through a sigmoid,
and nudge both sides by the prediction error. Negatives are drawn from the
unigram distribution raised to 0.75.

Training is single threaded and fully seeded: the same corpus, config, and
seed produce bit-identical tables on any platform. Out-of-vocabulary queries
yield empty neighbor lists so the search pipeline can degrade gracefully.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import PublicationRecord
from .textpipe import normalize


class EmptyVocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    window: int = 5
    min_count: int = 10
    dim: int = 100
    epochs: int = 5
    negative_samples: int = 5
    initial_lr: float = 0.025
    min_lr: float = 1e-4
    seed: int = 1

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        for name in ("min_count", "dim", "epochs", "negative_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.initial_lr <= 0 or self.min_lr <= 0:
            raise ValueError("learning rates must be positive")


class EmbeddingTable:
    """Immutable vocabulary -> vector mapping with precomputed norms."""

    def __init__(
        self,
        words: Sequence[str],
        vectors: np.ndarray,
        freqs: dict[str, int] | None = None,
        epoch_losses: tuple[float, ...] = (),
    ):
        if len(words) != vectors.shape[0]:
            raise ValueError("vocabulary and vector count differ")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors must be finite")
        self.words = list(words)
        self.vocab = {w: i for i, w in enumerate(self.words)}
        self.vectors = np.asarray(vectors, dtype=np.float32)
        self.norms = np.linalg.norm(self.vectors.astype(np.float64), axis=1)
        if np.any(self.norms <= 0):
            raise ValueError("every vector must have a strictly positive norm")
        self.freqs = dict(freqs) if freqs else None
        self.epoch_losses = tuple(epoch_losses)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def vector(self, word: str) -> np.ndarray | None:
        idx = self.vocab.get(word)
        return None if idx is None else self.vectors[idx]

    def cosine(self, w1: str, w2: str) -> float:
        i, j = self.vocab.get(w1), self.vocab.get(w2)
        if i is None or j is None:
            return 0.0
        u = self.vectors[i].astype(np.float64)
        v = self.vectors[j].astype(np.float64)
        return float(np.dot(u, v) / (self.norms[i] * self.norms[j]))

    def nearest_words(self, word: str, k: int) -> list[tuple[str, float]]:
        """k most cosine-similar vocabulary words, the query word excluded.

        Ordered by descending cosine, ties broken lexicographically; unknown
        words return an empty list.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        idx = self.vocab.get(word)
        if idx is None:
            return []
        sims = (self.vectors.astype(np.float64) @ self.vectors[idx].astype(np.float64))
        sims /= self.norms * self.norms[idx]
        order = sorted(
            (i for i in range(len(self.words)) if i != idx),
            key=lambda i: (-sims[i], self.words[i]),
        )
        return [(self.words[i], float(sims[i])) for i in order[:k]]

    # -- interchange format ---------------------------------------------

    def save_text(self, path: str | Path) -> None:
        """Write the standard textual word-vector format: "count dim" header,
        then one "word v1 .. vd" row per word."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.words)} {self.dim}\n")
            for word, row in zip(self.words, self.vectors):
                values = " ".join(repr(float(x)) for x in row)
                fh.write(f"{word} {values}\n")

    @classmethod
    def load_text(cls, path: str | Path) -> "EmbeddingTable":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValueError("malformed header; expected 'count dim'")
            count, dim = int(header[0]), int(header[1])
            words, rows = [], []
            for line in fh:
                parts = line.rstrip("\n").split(" ")
                if len(parts) != dim + 1:
                    raise ValueError(f"row for '{parts[0]}' has wrong arity")
                words.append(parts[0])
                rows.append(np.array([float(x) for x in parts[1:]], dtype=np.float32))
        if len(words) != count:
            raise ValueError("header count does not match row count")
        return cls(words, np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.float32))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def train_on_sentences(sentences: Iterable[Sequence[str]], cfg: TrainingConfig) -> EmbeddingTable:
    sentences = [list(s) for s in sentences if s]
    counts = Counter(tok for sent in sentences for tok in sent)
    kept = {w: c for w, c in counts.items() if c >= cfg.min_count}
    if not kept:
        raise EmptyVocabularyError(
            f"no word reaches min_count={cfg.min_count}; corpus too small"
        )
    # frequency-descending order, lexicographic tie-break: stable across runs
    words = sorted(kept, key=lambda w: (-kept[w], w))
    vocab = {w: i for i, w in enumerate(words)}
    freq = np.array([kept[w] for w in words], dtype=np.float64)

    noise = freq ** 0.75
    noise_cum = np.cumsum(noise / noise.sum())

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    vec_in = rng.uniform(-0.5 / cfg.dim, 0.5 / cfg.dim, size=(len(words), cfg.dim))
    vec_out = np.zeros((len(words), cfg.dim))

    pruned = [[vocab[t] for t in sent if t in vocab] for sent in sentences]
    pruned = [s for s in pruned if len(s) >= 2]
    if not pruned:
        raise EmptyVocabularyError("no sentence retains two in-vocabulary words")

    total_words = sum(len(s) for s in pruned) * cfg.epochs
    processed = 0
    lr = cfg.initial_lr
    epoch_losses = []

    for _ in range(cfg.epochs):
        loss_sum = 0.0
        loss_n = 0
        for sent in pruned:
            lr = max(cfg.min_lr, cfg.initial_lr * (1.0 - processed / (total_words + 1)))
            processed += len(sent)
            for pos, center in enumerate(sent):
                half = 1 + int(rng.integers(cfg.window))
                lo, hi = max(0, pos - half), min(len(sent), pos + half + 1)
                ctx = [sent[j] for j in range(lo, hi) if j != pos]
                if not ctx:
                    continue
                h = vec_in[ctx].mean(axis=0)

                draws = rng.random(cfg.negative_samples)
                negatives = np.searchsorted(noise_cum, draws)
                targets = np.concatenate(([center], negatives[negatives != center]))
                labels = np.zeros(len(targets))
                labels[0] = 1.0

                out_rows = vec_out[targets]
                scores = _sigmoid(out_rows @ h)
                gradients = (labels - scores) * lr
                neu1e = gradients @ out_rows
                np.add.at(vec_out, targets, np.outer(gradients, h))
                np.add.at(vec_in, ctx, neu1e)

                eps = 1e-10
                loss_sum -= math.log(max(scores[0], eps))
                loss_sum -= float(np.log(np.maximum(1.0 - scores[1:], eps)).sum())
                loss_n += 1
        epoch_losses.append(loss_sum / max(loss_n, 1))

    return EmbeddingTable(
        words,
        vec_in.astype(np.float32),
        freqs=kept,
        epoch_losses=tuple(epoch_losses),
    )


def train_cbow(publications: Iterable[PublicationRecord], cfg: TrainingConfig) -> EmbeddingTable:
    """Train CBOW vectors on normalized abstracts (same pipeline as profiles)."""
    sentences = [normalize(p.abstract_text).tokens for p in publications]
    return train_on_sentences(sentences, cfg)


def nearest_words(word: str, k: int, table: EmbeddingTable) -> list[tuple[str, float]]:
    return table.nearest_words(word, k)
