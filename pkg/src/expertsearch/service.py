"""HTTP facade over the engine for the browser UI and programmatic clients.

One immutable engine snapshot serves all requests; admin endpoints build a
replacement off-line and swap it in atomically, so in-flight searches finish
on the snapshot they started with. The JSON serializer is shared with the
CLI, so both produce byte-identical output for the same query and config.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .corpus import PublicationRecord, load_corpus
from .embeddings import EmbeddingTable
from .kb import load_kb
from .search import (
    Engine,
    FilterConflictError,
    SearchConfig,
    filter_results,
    response_to_dict,
)
from .textpipe import normalize_term


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class EngineSnapshot:
    engine: Engine
    version: int
    manifest: dict

    @classmethod
    def create(cls, engine: Engine, version: int = 1, source: str = "") -> "EngineSnapshot":
        return cls(
            engine=engine,
            version=version,
            manifest={
                "source": source,
                "profile_digest": engine.store.state_digest(),
                "built_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "n_authors": len(engine.authors),
                "n_publications": len(engine.publications),
            },
        )


class ServiceState:
    """Holds the published snapshot; swaps are atomic and versions increase."""

    def __init__(self, snapshot: EngineSnapshot):
        self._lock = threading.Lock()
        self._snapshot = snapshot

    @property
    def snapshot(self) -> EngineSnapshot:
        return self._snapshot

    def publish(self, engine: Engine, source: str = "") -> EngineSnapshot:
        with self._lock:
            new = EngineSnapshot.create(engine, version=self._snapshot.version + 1, source=source)
            self._snapshot = new
            return new


def suggest_terms(raw: str, engine: Engine, k: int = 10) -> list[str]:
    """Related terms for UI-assisted refinement: KB children first (sorted),
    then embedding neighbors in similarity order."""
    term = normalize_term(raw)
    if not term:
        return []
    out: dict[str, None] = {}
    if engine.kb is not None:
        for child in sorted(engine.kb.children_of(term)):
            out.setdefault(child)
    if engine.table is not None:
        for word in term.split(" "):
            for neighbor, _ in engine.table.nearest_words(word, k):
                if neighbor != term:
                    out.setdefault(neighbor)
    return list(out)[:k]


def _parse_facets(values: list[str]) -> tuple[set[str], set[str]]:
    """Split ["+Computing", "-Maths", "Physics"] into include/exclude sets;
    unprefixed values are includes."""
    include, exclude = set(), set()
    for v in values:
        if v.startswith("-"):
            exclude.add(v[1:])
        elif v.startswith("+"):
            include.add(v[1:])
        else:
            include.add(v)
    return include, exclude


def run_search(
    engine: Engine,
    query: str,
    cfg: SearchConfig,
    dept_in: set[str] | None = None,
    dept_out: set[str] | None = None,
    post_in: set[str] | None = None,
    post_out: set[str] | None = None,
    limit: int | None = None,
    offset: int = 0,
) -> dict:
    """Search, filter, paginate, serialize: the single code path behind both
    the CLI and the HTTP endpoint."""
    response = engine.search(query, cfg)
    filtered = filter_results(
        response.results, engine.authors,
        include_depts=dept_in, exclude_depts=dept_out,
        include_posts=post_in, exclude_posts=post_out,
    )
    trimmed = type(response)(tuple(filtered), response.query_terms, response.diagnostic)
    return response_to_dict(trimmed, engine.authors, limit=limit, offset=offset)


def _error(code: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=code, content={"error": message, "code": code})


def build_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="expertsearch", docs_url=None, redoc_url=None)
    app.state.service = state

    @app.get("/health")
    def health():
        snap = state.snapshot
        return {"status": "ok", "version": snap.version, "manifest": snap.manifest}

    @app.get("/search")
    def search(
        request: Request,
        q: str = "",
        kb: int = 0,
        emb: int = 0,
        limit: int | None = None,
        offset: int = 0,
        reference_year: int | None = None,
    ):
        snap = state.snapshot
        params = request.query_params
        try:
            cfg = SearchConfig(
                use_kb=bool(kb),
                use_embeddings=bool(emb),
                reference_year=reference_year,
            )
            payload = run_search(
                snap.engine, q, cfg,
                dept_in=set(params.getlist("dept_in")) or None,
                dept_out=set(params.getlist("dept_out")) or None,
                post_in=set(params.getlist("post_in")) or None,
                post_out=set(params.getlist("post_out")) or None,
                limit=limit,
                offset=offset,
            )
        except FilterConflictError as exc:
            return _error(400, str(exc))
        return Response(content=canonical_json(payload), media_type="application/json")

    @app.get("/authors/{author_id}")
    def get_author(author_id: str):
        author = state.snapshot.engine.authors.get(author_id)
        if author is None:
            return _error(404, f"unknown author '{author_id}'")
        return {
            "id": author.author_id,
            "first_name": author.first_name,
            "last_name": author.last_name,
            "post": author.post,
            "department": author.department,
            "faculty": author.faculty,
        }

    @app.get("/suggest")
    def suggest(term: str = "", k: int = 10):
        return {"term": term, "suggestions": suggest_terms(term, state.snapshot.engine, k=k)}

    @app.post("/admin/reload")
    def reload(body: dict):
        corpus_dir = body.get("corpus_dir")
        if not corpus_dir:
            return _error(400, "corpus_dir is required")
        try:
            engine = build_engine(
                corpus_dir,
                kb_file=body.get("kb_file"),
                embeddings_file=body.get("embeddings_file"),
                gap_close=body.get("gap_close", True),
            )
        except Exception as exc:  # surfaced to the admin caller
            return _error(400, str(exc))
        snap = state.publish(engine, source=str(corpus_dir))
        return {"status": "reloaded", "version": snap.version}

    @app.post("/admin/publications")
    def add_publication(body: dict):
        try:
            pub = PublicationRecord(
                pub_id=str(body["id"]),
                abstract_text=str(body["abstract"]),
                author_ids=tuple(str(a) for a in body["authors"]),
                year=int(body["year"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            return _error(400, f"malformed publication: {exc}")
        engine = state.snapshot.engine.clone()
        try:
            engine.insert_publication(pub)
        except ValueError as exc:
            return _error(409, str(exc))
        snap = state.publish(engine, source=state.snapshot.manifest.get("source", ""))
        return {"status": "inserted", "version": snap.version, "publication": pub.pub_id}

    return app


def build_engine(
    corpus_dir: str | Path,
    kb_file: str | Path | None = None,
    embeddings_file: str | Path | None = None,
    gap_close: bool = True,
    min_df_scope: str = "author",
) -> Engine:
    authors, publications = load_corpus(corpus_dir)
    table = EmbeddingTable.load_text(embeddings_file) if embeddings_file else None
    kb = load_kb(kb_file) if kb_file else None
    return Engine(authors, publications, table=table, kb=kb,
                  gap_close=gap_close, min_df_scope=min_df_scope)


def engine_state_digest(engine: Engine) -> str:
    """Digest of everything a request could observe; used to prove handlers
    never mutate a published snapshot."""
    h = hashlib.sha256(engine.store.to_snapshot())
    h.update(canonical_json(sorted(engine.publications)).encode())
    h.update(canonical_json({a: vars(r) for a, r in engine.authors.items()}).encode())
    if engine.table is not None:
        h.update(engine.table.vectors.tobytes())
        h.update(canonical_json(engine.table.words).encode())
    return h.hexdigest()


def serve(snapshot: EngineSnapshot, host: str = "127.0.0.1", port: int = 8000):
    """Run the HTTP service until interrupted."""
    import uvicorn

    app = build_app(ServiceState(snapshot))
    uvicorn.run(app, host=host, port=port, log_level="info")
