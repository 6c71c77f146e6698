import json

import pytest

from expertsearch import kb as kbmod
from expertsearch.kb import (
    KnowledgeBaseCycleError,
    KnowledgeBaseError,
    bundled_kb_path,
    expand_terms,
    load_kb,
)
from expertsearch.textpipe import normalize_term


def write_kb(tmp_path, data):
    p = tmp_path / "kb.json"
    p.write_text(json.dumps(data), encoding="utf-8")
    return p


def test_bundled_kb_loads_with_normalized_terms():
    kb = load_kb(bundled_kb_path())
    ai = normalize_term("artificial intelligence")
    ml = normalize_term("machine learning")
    assert ai in kb.terms
    assert ml in kb.children_of(normalize_term("computer science"))
    assert ml in kb.children_of(ai)


def test_expansion_contains_subject_children():
    kb = load_kb(bundled_kb_path())
    expanded = expand_terms({normalize_term("computer science")}, kb)
    expected = {
        normalize_term("artificial intelligence"),
        normalize_term("machine learning"),
        normalize_term("formal verification"),
    }
    assert expected <= expanded


def test_expansion_unknown_term_and_disjointness():
    kb = load_kb(bundled_kb_path())
    assert expand_terms({"zzzz"}, kb) == set()
    terms = {normalize_term("computer science"), normalize_term("machine learning")}
    assert expand_terms(terms, kb).isdisjoint(terms)


def test_expansion_monotone():
    kb = load_kb(bundled_kb_path())
    small = {normalize_term("artificial intelligence")}
    big = small | {normalize_term("computer science")}
    assert expand_terms(small, kb) <= expand_terms(big, kb) | big


def test_children_plus_siblings_relation():
    kb = load_kb(bundled_kb_path())
    ml = normalize_term("machine learning")
    with_siblings = expand_terms({ml}, kb, relation=kbmod.RELATION_CHILDREN_SIBLINGS)
    assert normalize_term("formal verification") in with_siblings
    assert normalize_term("formal verification") not in expand_terms({ml}, kb)


def test_terms_lemmatized_at_load(tmp_path):
    path = write_kb(tmp_path, [{"term": "frameworks", "children": ["software libraries"]}])
    kb = load_kb(path)
    assert "framework" in kb.terms
    assert kb.children_of("framework") == {"software library"}


def test_cycle_rejected(tmp_path):
    path = write_kb(tmp_path, [{"term": "a1x", "children": [{"term": "b1x", "children": ["a1x"]}]}])
    with pytest.raises(KnowledgeBaseCycleError):
        load_kb(path)


def test_empty_kb_is_identity(tmp_path):
    path = write_kb(tmp_path, [])
    kb = load_kb(path)
    assert len(kb) == 0
    assert expand_terms({"anything"}, kb) == set()


def test_parse_errors(tmp_path):
    bad = tmp_path / "kb.json"
    bad.write_text("{not json")
    with pytest.raises(KnowledgeBaseError):
        load_kb(bad)
    with pytest.raises(KnowledgeBaseError):
        load_kb(write_kb(tmp_path, {"term": "not-a-list"}))
    with pytest.raises(KnowledgeBaseError):
        load_kb(write_kb(tmp_path, [{"term": "the", "children": []}]))


def test_depth_bounded_by_two_levels(tmp_path):
    kb = load_kb(bundled_kb_path())
    assert kb.depth and max(kb.depth.values()) <= 2
    too_deep = [{"term": "l0x", "children": [
        {"term": "l1x", "children": [{"term": "l2x", "children": ["l3x"]}]}
    ]}]
    with pytest.raises(KnowledgeBaseError):
        load_kb(write_kb(tmp_path, too_deep))


def test_load_idempotent():
    kb1 = load_kb(bundled_kb_path())
    kb2 = load_kb(bundled_kb_path())
    assert kb1.children == kb2.children
    assert kb1.depth == kb2.depth
