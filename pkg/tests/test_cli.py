import json

import pytest

from expertsearch import cli
from expertsearch.corpus import load_corpus, load_grants
from expertsearch.embeddings import EmbeddingTable
from expertsearch.profiles import ProfileStore


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_corpus")
    assert cli.main([
        "generate", "--seed", "7", "--authors", "8", "--papers", "40",
        "--grants", "4", "--out", str(out),
    ]) == 0
    return out


def test_generate_writes_loadable_corpus(generated):
    authors, pubs = load_corpus(generated)
    assert len(authors) == 8 and len(pubs) == 40
    grants = load_grants(generated / "grants.jsonl", {a.author_id for a in authors})
    assert len(grants) == 4


def test_build_snapshot(generated, tmp_path, capsys):
    snap = tmp_path / "profiles.snapshot"
    assert cli.main(["build", "--corpus", str(generated), "--out", str(snap)]) == 0
    capsys.readouterr()
    store = ProfileStore.from_snapshot(snap.read_bytes())
    _, pubs = load_corpus(generated)
    assert store.to_snapshot() == ProfileStore.build(pubs).to_snapshot()


def test_train_and_search_json(generated, tmp_path, capsys):
    vectors = tmp_path / "vectors.txt"
    assert cli.main([
        "train", "--corpus", str(generated), "--out", str(vectors),
        "--dim", "12", "--min-count", "5", "--epochs", "1",
    ]) == 0
    capsys.readouterr()
    table = EmbeddingTable.load_text(vectors)
    assert table.dim == 12

    assert cli.main([
        "search", "neural network training", "--corpus", str(generated),
        "--emb", str(vectors), "--json",
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"results", "total", "offset", "diagnostic", "query_terms"}
    for row in payload["results"]:
        assert row["s_e"] >= 1
        assert row["explanation"]


def test_search_facet_exclusion_spec_syntax(generated, capsys):
    assert cli.main([
        "search", "neural network", "--corpus", str(generated),
        "--post", "-professor", "--json",
    ]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert all(row["post"] != "professor" for row in payload["results"])

    assert cli.main([
        "search", "neural network", "--corpus", str(generated),
        "--dept", "+Computing", "--top", "3",
    ]) == 0
    out = capsys.readouterr().out
    assert "Computing" in out or "0 of" in out


def test_eval_command(generated, tmp_path, capsys):
    report_file = tmp_path / "report.json"
    assert cli.main([
        "eval", "--corpus", str(generated), "--grants", str(generated / "grants.jsonl"),
        "--configs", "baseline", "--out", str(report_file),
    ]) == 0
    out = capsys.readouterr().out
    assert "Recall" in out and "G_All" in out
    payload = json.loads(report_file.read_text())
    assert payload["rows"][0]["name"] == "baseline"
    assert payload["rows"][0]["recall"] == 100.0
