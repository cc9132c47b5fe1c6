# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The typeswap Authors

import pathlib

import pytest

import typeswap

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="module")
def fixture():
    return typeswap.synth(nodes=200, docs=100, seed=3)


def test_poison_then_invert(fixture):
    run = typeswap.poison(
        fixture.corpus,
        inventory=fixture.inventory,
        query_entities_jsonl=fixture.query_entities_jsonl,
    )
    assert len(run.poisoned) == len(fixture.corpus)
    assert run.poisoned != fixture.corpus
    assert typeswap.invert(run.poisoned, run.rewrite_log_json) == fixture.corpus
    assert run.efficiency()["injected_tokens"] == 0
    assert [phase for phase, _ in run.timings] == ["inventory", "global_pool", "query_pool", "plan", "rewrite"]


def test_global_arm_with_gazetteer(fixture):
    run = typeswap.poison(fixture.corpus, gazetteer=fixture.gazetteer, strategy="global", budget=10)
    assert run.targets
    with pytest.raises(typeswap.TypeswapError):
        typeswap.poison(fixture.corpus, strategy="full")
    with pytest.raises(typeswap.TypeswapError):
        typeswap.poison(fixture.corpus, strategy="sideways")


def test_graph_analysis(fixture):
    g = typeswap.build_graph(fixture.corpus, fixture.inventory)
    assert g.node_count == fixture.inventory.entity_count
    m = typeswap.metrics(g)
    assert m["kappa"] == pytest.approx(m["second_moment"] / m["mean_degree"])
    c = typeswap.centrality(g, threads=2)
    assert len(c["betweenness"]) == g.node_count
    s = typeswap.spectral(g)
    assert s["residual"] < 1e-8
    assert typeswap.frequency_degree_correlation(fixture.inventory, g) > 0.5


def test_star_closed_forms():
    star = typeswap.EntityGraph.from_edges(5, [(0, i, 1.0) for i in range(1, 5)])
    assert typeswap.spectral(star)["lambda_max"] == pytest.approx(2.0)
    assert typeswap.centrality(star)["betweenness"][0] == pytest.approx(6.0)
    assert typeswap.giant_fraction(star, {0}) == pytest.approx(0.2)


def test_evaluation(fixture):
    run = typeswap.poison(
        fixture.corpus, inventory=fixture.inventory, query_entities_jsonl=fixture.query_entities_jsonl
    )
    clean = typeswap.build_graph(fixture.corpus, fixture.inventory)
    poisoned = typeswap.build_graph(run.poisoned, run.poisoned_inventory)
    sev = typeswap.severance(fixture.chains, clean, poisoned)
    assert 0.0 < sev["severance_rate"] <= 1.0

    st = typeswap.stealth(fixture.corpus, run.poisoned)
    assert 0.0 <= st["auc"] <= 1.0

    responses = [(q.id, "unknown") for q in fixture.queries]
    assert typeswap.asr(responses, fixture.queries)["asr"] == 1.0
    with pytest.raises(typeswap.TypeswapError):
        typeswap.asr(responses[1:], fixture.queries)
    assert typeswap.asr(responses[1:], fixture.queries, lenient=True)["asr"] == 1.0


def test_bundled_fixture_files():
    corpus = typeswap.Corpus.load(DATA / "fixture" / "corpus.jsonl")
    queries = typeswap.load_queries(DATA / "fixture" / "queries.jsonl")
    inventory = typeswap.EntityInventory.load(corpus, DATA / "fixture" / "annotations.jsonl")
    run = typeswap.poison(corpus, queries=queries, inventory=inventory)
    golden = (DATA / "golden" / "poisoned_corpus.jsonl").read_text()
    assert run.poisoned.serialize() == golden
    with pytest.raises(OSError):
        typeswap.Corpus.load(DATA / "missing.jsonl")
