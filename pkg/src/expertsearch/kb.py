"""Two-level subject taxonomy used for query expansion.

The on-disk format is a JSON array of subjects, each a node of the form
{"term": ..., "children": [...]} where children are either nested nodes or
bare strings. Terms are raw text; they are normalized through the shared text
pipeline at load time so that, for example, plural forms in the file still
match profile features. Expansion returns related terms; by default these are
the children of a query term (specializations), optionally siblings too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .textpipe import normalize_term

RELATION_CHILDREN = "children"
RELATION_CHILDREN_SIBLINGS = "children+siblings"


class KnowledgeBaseError(ValueError):
    pass


class KnowledgeBaseCycleError(KnowledgeBaseError):
    def __init__(self, term: str):
        self.term = term
        super().__init__(f"cycle through term '{term}'")


@dataclass
class KnowledgeBase:
    children: dict[str, set[str]] = field(default_factory=dict)
    parents: dict[str, set[str]] = field(default_factory=dict)
    depth: dict[str, int] = field(default_factory=dict)

    @property
    def terms(self) -> set[str]:
        return set(self.depth)

    def __len__(self) -> int:
        return len(self.depth)

    def children_of(self, term: str) -> set[str]:
        return set(self.children.get(term, ()))

    def siblings_of(self, term: str) -> set[str]:
        out: set[str] = set()
        for parent in self.parents.get(term, ()):
            out |= self.children.get(parent, set())
        out.discard(term)
        return out


def _add_edge(kb: KnowledgeBase, parent: str, child: str) -> None:
    kb.children.setdefault(parent, set()).add(child)
    kb.parents.setdefault(child, set()).add(parent)


def _register(kb: KnowledgeBase, term: str, depth: int) -> None:
    kb.depth[term] = min(kb.depth.get(term, depth), depth)


def _check_acyclic(kb: KnowledgeBase) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    state = {t: WHITE for t in set(kb.children) | set(kb.parents) | kb.terms}

    def visit(term: str) -> None:
        state[term] = GREY
        for child in kb.children.get(term, ()):
            if state[child] == GREY:
                raise KnowledgeBaseCycleError(child)
            if state[child] == WHITE:
                visit(child)
        state[term] = BLACK

    for term in sorted(state):
        if state[term] == WHITE:
            visit(term)


def load_kb(path: str | Path) -> KnowledgeBase:
    """Load and normalize a taxonomy file; rejects cyclic term graphs."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise KnowledgeBaseError(f"{path.name}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, list):
        raise KnowledgeBaseError(f"{path.name}: expected a top-level array of subjects")

    kb = KnowledgeBase()

    def norm(raw, context: str) -> str:
        if not isinstance(raw, str):
            raise KnowledgeBaseError(f"{path.name}: non-string term in {context}")
        term = normalize_term(raw)
        if not term:
            raise KnowledgeBaseError(f"{path.name}: term '{raw}' is empty after normalization")
        return term

    def walk(node, depth: int, parent: str | None) -> None:
        if depth > 2:
            raise KnowledgeBaseError(f"{path.name}: taxonomy deeper than two levels")
        if isinstance(node, str):
            term = norm(node, "children list")
            children = []
        elif isinstance(node, dict):
            term = norm(node.get("term"), "node")
            children = node.get("children", [])
            if not isinstance(children, list):
                raise KnowledgeBaseError(f"{path.name}: children of '{term}' must be an array")
        else:
            raise KnowledgeBaseError(f"{path.name}: node must be a string or object")
        _register(kb, term, depth)
        if parent is not None and term != parent:
            _add_edge(kb, parent, term)
        for child in children:
            walk(child, depth + 1, term)

    for subject in data:
        walk(subject, 0, None)

    _check_acyclic(kb)
    return kb


def expand_terms(
    terms: set[str], kb: KnowledgeBase, relation: str = RELATION_CHILDREN
) -> set[str]:
    """Taxonomy terms related to the query terms, minus the query terms.

    Terms absent from the taxonomy contribute nothing. relation selects
    children only (default) or children plus siblings.
    """
    if relation not in (RELATION_CHILDREN, RELATION_CHILDREN_SIBLINGS):
        raise ValueError(f"unknown relation '{relation}'")
    out: set[str] = set()
    for term in terms:
        out |= kb.children_of(term)
        if relation == RELATION_CHILDREN_SIBLINGS:
            out |= kb.siblings_of(term)
    return out - set(terms)


def bundled_kb_path() -> Path:
    from importlib import resources

    return Path(str(resources.files("expertsearch.data").joinpath("example_kb.json")))
