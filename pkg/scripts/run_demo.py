#!/usr/bin/env python3
"""End-to-end demo on a synthetic corpus: build profiles, train embeddings,
and walk a few queries through every configuration, printing explanations.

Usage: python3 scripts/run_demo.py [--seed 42] [--authors 20] [--papers 120]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from expertsearch.corpus import DEFAULT_TOPICS, TopicSpec, generate_synthetic_corpus
from expertsearch.embeddings import TrainingConfig, train_cbow
from expertsearch.kb import bundled_kb_path, load_kb
from expertsearch.search import Engine, SearchConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--authors", type=int, default=20)
    ap.add_argument("--papers", type=int, default=120)
    args = ap.parse_args()

    print(f"generating corpus (seed={args.seed}, {args.authors} authors, {args.papers} papers)")
    authors, pubs, grants = generate_synthetic_corpus(
        args.seed, args.authors, args.papers,
        TopicSpec(DEFAULT_TOPICS, signature_bigrams=False, n_grants=8),
    )

    print("training CBOW vectors (window 5, min count 10, dim 100)")
    table = train_cbow(pubs, TrainingConfig(seed=7))
    print(f"  vocabulary: {len(table)} words; epoch losses "
          f"{[round(x, 3) for x in table.epoch_losses]}")
    for probe in ("neural", "quantum"):
        if probe in table:
            names = ", ".join(w for w, _ in table.nearest_words(probe, 6))
            print(f"  nearest to '{probe}': {names}")

    engine = Engine(authors, pubs, table=table, kb=load_kb(bundled_kb_path()))
    queries = ["deep neural network training", "quantum entanglement experiments"]
    for query in queries:
        print(f"\nquery: {query!r}")
        for name, cfg in (
            ("baseline", SearchConfig()),
            ("baseline+emb", SearchConfig(use_embeddings=True)),
        ):
            response = engine.search(query, cfg)
            print(f"  [{name}] {len(response.results)} authors")
            for r in response.results[:3]:
                a = engine.authors[r.author_id]
                print(f"    {a.display_name:<20} S_E={r.s_e:<4} S_A={r.s_a:6.2f} "
                      f"via {'/'.join(sorted(r.provenance))}")
                print(f"      explanation: {', '.join(r.explanation[:8])}")


if __name__ == "__main__":
    main()
