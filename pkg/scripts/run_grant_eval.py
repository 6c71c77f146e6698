#!/usr/bin/env python3
"""Grant-holder prediction experiment on a synthetic corpus: evaluates the
baseline and every expansion configuration, printing the metrics table and
optionally writing the JSON report.

Usage: python3 scripts/run_grant_eval.py [--seed 42] [--out report.json]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from expertsearch.corpus import DEFAULT_TOPICS, TopicSpec, filter_grants, generate_synthetic_corpus
from expertsearch.embeddings import TrainingConfig, train_cbow
from expertsearch.evalharness import evaluate_grants, preset_configs
from expertsearch.kb import bundled_kb_path, load_kb
from expertsearch.search import Engine


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--authors", type=int, default=24)
    ap.add_argument("--papers", type=int, default=144)
    ap.add_argument("--grants", type=int, default=16)
    ap.add_argument("--no-signatures", action="store_true",
                    help="drop holder-unique title bigrams (harder setting)")
    ap.add_argument("--top-k", type=int, default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    spec = TopicSpec(DEFAULT_TOPICS, signature_bigrams=not args.no_signatures,
                     n_grants=args.grants)
    authors, pubs, grants = generate_synthetic_corpus(args.seed, args.authors, args.papers, spec)
    grants = filter_grants(grants)
    print(f"{len(authors)} authors, {len(pubs)} papers, {len(grants)} evaluable grants")

    table = train_cbow(pubs, TrainingConfig(seed=7))
    engine = Engine(authors, pubs, table=table, kb=load_kb(bundled_kb_path()))

    configs = preset_configs(["baseline", "kb", "emb", "kb+emb"])
    report = evaluate_grants(grants, engine, configs, top_k=args.top_k)
    print()
    print(report.render_text())

    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
        print(f"\nreport -> {args.out}")


if __name__ == "__main__":
    main()
