"""Command line entry points.

    engine generate --seed 7 --authors 20 --papers 80 --out corpus/
    engine train --corpus corpus/ --out vectors.txt
    engine build --corpus corpus/ --out profiles.snapshot
    engine search "natural language processing" --corpus corpus/ --emb vectors.txt --json
    engine eval --corpus corpus/ --grants corpus/grants.jsonl --configs baseline,emb --out report.json
    engine serve --corpus corpus/ --kb kb.json --port 8000
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus as corpusmod
from .embeddings import TrainingConfig, train_cbow
from .evalharness import evaluate_grants, preset_configs
from .kb import bundled_kb_path
from .profiles import ProfileStore
from .search import SearchConfig
from .service import (
    EngineSnapshot,
    build_engine,
    canonical_json,
    run_search,
    serve,
)


def _add_engine_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="directory with authors.jsonl and publications.jsonl")
    p.add_argument("--kb", metavar="FILE", help="knowledge base JSON ('bundled' for the built-in example)")
    p.add_argument("--emb", metavar="FILE", help="word vectors in textual interchange format")
    p.add_argument("--no-gap-close", action="store_true",
                   help="restrict bigrams to originally adjacent tokens")
    p.add_argument("--min-df-scope", choices=["author", "corpus"], default="author",
                   help="document-frequency scope for profile admission")


def _resolve_kb(arg: str | None):
    if arg == "bundled":
        return bundled_kb_path()
    return arg


def _engine_from_args(args) -> "object":
    return build_engine(
        args.corpus,
        kb_file=_resolve_kb(args.kb),
        embeddings_file=args.emb,
        gap_close=not args.no_gap_close,
        min_df_scope=args.min_df_scope,
    )


def cmd_generate(args) -> int:
    spec = corpusmod.TopicSpec(
        corpusmod.DEFAULT_TOPICS,
        n_grants=args.grants,
        signature_bigrams=not args.no_signatures,
    )
    authors, pubs, grants = corpusmod.generate_synthetic_corpus(
        args.seed, args.authors, args.papers, spec
    )
    corpusmod.save_corpus(args.out, authors, pubs, grants)
    digest = corpusmod.corpus_digest(authors, pubs, grants)
    print(f"wrote {len(authors)} authors, {len(pubs)} publications, {len(grants)} grants to {args.out}")
    print(f"corpus digest: {digest}")
    return 0


def cmd_train(args) -> int:
    _, pubs = corpusmod.load_corpus(args.corpus)
    cfg = TrainingConfig(
        window=args.window,
        min_count=args.min_count,
        dim=args.dim,
        epochs=args.epochs,
        seed=args.seed,
    )
    table = train_cbow(pubs, cfg)
    table.save_text(args.out)
    print(f"trained {len(table)} vectors of dim {table.dim} -> {args.out}")
    print(f"epoch losses: {[round(x, 4) for x in table.epoch_losses]}")
    return 0


def cmd_build(args) -> int:
    _, pubs = corpusmod.load_corpus(args.corpus)
    store = ProfileStore.build(pubs, gap_close=not args.no_gap_close,
                               min_df_scope=args.min_df_scope)
    Path(args.out).write_bytes(store.to_snapshot())
    print(f"profiles for {len(store.author_ids)} authors -> {args.out}")
    print(f"state digest: {store.state_digest()}")
    return 0


def cmd_search(args) -> int:
    engine = _engine_from_args(args)
    cfg = SearchConfig(
        use_kb=args.use_kb or bool(args.kb),
        use_embeddings=args.use_emb or bool(args.emb),
        reference_year=args.reference_year,
        ranking=args.ranking,
    )
    from .service import _parse_facets

    dept_in, dept_out = _parse_facets(args.dept or [])
    post_in, post_out = _parse_facets(args.post or [])
    payload = run_search(
        engine, args.query, cfg,
        dept_in=dept_in or None, dept_out=dept_out or None,
        post_in=post_in or None, post_out=post_out or None,
        limit=args.top, offset=args.offset,
    )
    if args.json:
        print(canonical_json(payload))
        return 0
    if payload["diagnostic"]:
        print(f"({payload['diagnostic']})")
    for rank, row in enumerate(payload["results"], start=1 + args.offset):
        print(f"{rank:>3}. {row['name']} [{row['author']}]  {row['department']} / {row['post']}")
        print(f"     S_E={row['s_e']}  S_A={row['s_a']:.4f}  via {','.join(row['provenance'])}")
        print(f"     explanation: {', '.join(row['explanation'])}")
    print(f"{len(payload['results'])} of {payload['total']} results")
    return 0


def cmd_eval(args) -> int:
    engine = _engine_from_args(args)
    known = set(engine.authors)
    grants = corpusmod.load_grants(args.grants, known)
    grants = corpusmod.filter_grants(
        grants,
        stop_terms=set(args.stop_term) if args.stop_term else corpusmod.DEFAULT_GRANT_STOP_TERMS,
        min_words=args.min_words,
    )
    base = SearchConfig(reference_year=args.reference_year)
    configs = preset_configs(args.configs.split(","), base=base)
    report = evaluate_grants(grants, engine, configs, top_k=args.top_k)
    print(report.render_text())
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
        print(f"report -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    engine = _engine_from_args(args)
    snapshot = EngineSnapshot.create(engine, version=1, source=str(args.corpus))
    serve(snapshot, host=args.host, port=args.port)
    return 0


def _merge_facet_values(argv: list[str]) -> list[str]:
    """Allow `--post -professor` by folding facet values into `--post=-professor`,
    which argparse would otherwise read as an unknown option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--dept", "--post") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _merge_facet_values(list(sys.argv[1:] if argv is None else argv))
    parser = argparse.ArgumentParser(prog="engine", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic corpus")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--authors", type=int, default=20)
    p.add_argument("--papers", type=int, default=80)
    p.add_argument("--grants", type=int, default=None)
    p.add_argument("--no-signatures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train CBOW word vectors on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("build", help="build and persist the profile snapshot")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-gap-close", action="store_true")
    p.add_argument("--min-df-scope", choices=["author", "corpus"], default="author")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="query a corpus")
    p.add_argument("query")
    _add_engine_inputs(p)
    p.add_argument("--use-kb", action="store_true", help="enable kb expansion (implied by --kb)")
    p.add_argument("--use-emb", action="store_true", help="enable embedding expansion (implied by --emb)")
    p.add_argument("--dept", action="append", metavar="[+|-]NAME",
                   help="include (+) or exclude (-) a department; repeatable")
    p.add_argument("--post", action="append", metavar="[+|-]NAME",
                   help="include (+) or exclude (-) a position; repeatable")
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--reference-year", type=int, default=None)
    p.add_argument("--ranking", choices=["lexicographic", "weighted"], default="lexicographic")
    p.add_argument("--json", action="store_true", help="canonical JSON, identical to the HTTP API")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="grant-holder prediction metrics")
    _add_engine_inputs(p)
    p.add_argument("--grants", required=True)
    p.add_argument("--configs", default="baseline,kb,emb,kb+emb")
    p.add_argument("--out", default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--min-words", type=int, default=corpusmod.DEFAULT_GRANT_MIN_WORDS)
    p.add_argument("--stop-term", action="append", default=None)
    p.add_argument("--reference-year", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_engine_inputs(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
