import networkx as nx
import pytest

from kglf.synth import (
    MECHANISMS,
    SyntheticSpec,
    build_city_ontology,
    generate,
)

from oracles import adjacency


SMALL = SyntheticSpec(
    node_counts={"Person": 20, "Stop": 10, "City": 5},
    target_links=150,
    rng_seed=7,
)


def signature(g):
    return (
        tuple(sorted(g.ontology.relations)),
        tuple(g.node_ids()),
        tuple((l.subject, l.object, l.relation, l.timestamp) for l in g.all_links()),
    )


def test_generate_is_deterministic():
    g1, h1 = generate(SMALL)
    g2, h2 = generate(SMALL)
    assert signature(g1) == signature(g2)
    assert h1 == h2


def test_seed_changes_the_graph():
    g1, _ = generate(SMALL)
    g2, _ = generate(SyntheticSpec(
        node_counts={"Person": 20, "Stop": 10, "City": 5},
        target_links=150,
        rng_seed=8,
    ))
    assert signature(g1) != signature(g2)


def test_holdout_count_and_partition():
    g, hidden = generate(SMALL)
    total = g.link_count() + len(hidden)
    assert len(hidden) == int(SMALL.holdout * total)
    for link in hidden:
        # at most one link per pair, so a hidden pair is fully non-adjacent
        assert not g.has_link_between(link.subject, link.object)
    keys = {(l.subject, l.object, l.relation) for l in hidden}
    assert len(keys) == len(hidden)


def test_requested_node_counts():
    g, _ = generate(SMALL)
    assert len(g.nodes_of_concept("Person", include_descendants=False)) == 20
    assert len(g.nodes_of_concept("Stop", include_descendants=False)) == 10
    assert len(g.nodes_of_concept("City", include_descendants=False)) == 5
    assert g.node_count() == 35


def test_every_link_is_schema_valid():
    g, hidden = generate(SMALL)
    onto = g.ontology
    for link in list(g.all_links()) + hidden:
        cs = g.concept_of(link.subject)
        co = g.concept_of(link.object)
        assert onto.compatible(link.relation, cs, co)
        assert link.subject != link.object


def test_timestamps_strictly_increase():
    g, hidden = generate(SMALL)
    stamps = sorted(l.timestamp for l in list(g.all_links()) + hidden)
    assert all(b > a for a, b in zip(stamps, stamps[1:]))


def test_every_node_carries_a_tag():
    g, _ = generate(SMALL)
    tags = {g.node(n).attributes["tag"] for n in g.node_ids()}
    assert tags <= {"t%d" % i for i in range(SMALL.tags)}


def test_located_in_toggles_with_the_roster():
    onto = build_city_ontology(located_in=True)
    assert "located_in" in onto.relations
    g_with, _ = generate(SMALL)
    assert "located_in" in g_with.ontology.relations

    no_city = SyntheticSpec(
        node_counts={"Person": 20, "Stop": 10}, target_links=60, rng_seed=7
    )
    g_without, _ = generate(no_city)
    assert "located_in" not in g_without.ontology.relations


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(mechanism_mix=(0.5, 0.5))
    with pytest.raises(ValueError):
        SyntheticSpec(mechanism_mix=(0.7, 0.6, -0.3))
    with pytest.raises(ValueError):
        SyntheticSpec(mechanism_mix=(0.5, 0.3, 0.3))
    with pytest.raises(ValueError):
        SyntheticSpec(holdout=0.0)
    with pytest.raises(ValueError):
        SyntheticSpec(holdout=1.0)
    with pytest.raises(ValueError):
        SyntheticSpec(node_counts={"Person": 1})
    with pytest.raises(ValueError):
        SyntheticSpec(node_counts={"Person": 5, "Stop": -1})
    with pytest.raises(ValueError):
        SyntheticSpec(target_links=5)
    with pytest.raises(ValueError):
        SyntheticSpec(tags=0)
    assert len(SyntheticSpec().mechanism_mix) == len(MECHANISMS)


def _undirected(g):
    und = nx.Graph()
    und.add_nodes_from(g.node_ids())
    for link in g.all_links():
        und.add_edge(link.subject, link.object)
    return und


def test_triadic_closure_leaves_a_clustering_fingerprint():
    """The generator should beat its own degree-matched rewired control."""
    spec = SyntheticSpec(
        node_counts={"Person": 50, "Stop": 15, "City": 5},
        mechanism_mix=(0.9, 0.05, 0.05),
        target_links=300,
        rng_seed=11,
    )
    g, _ = generate(spec)
    und = _undirected(g)
    observed = nx.average_clustering(und)

    controls = []
    for seed in range(5):
        shuffled = und.copy()
        nx.double_edge_swap(
            shuffled, nswap=4 * und.number_of_edges(), max_tries=10**6, seed=seed
        )
        controls.append(nx.average_clustering(shuffled))
    assert observed > 1.5 * max(controls)


def test_affinity_links_follow_tags():
    spec = SyntheticSpec(
        node_counts={"Person": 60, "Stop": 10, "City": 5},
        mechanism_mix=(0.1, 0.8, 0.1),
        target_links=400,
        tags=4,
        rng_seed=13,
    )
    g, _ = generate(spec)
    same = 0
    total = 0
    for link in g.all_links():
        if link.relation != "knows":
            continue
        total += 1
        if (
            g.node(link.subject).attributes["tag"]
            == g.node(link.object).attributes["tag"]
        ):
            same += 1
    assert total > 50
    # four tags: random pairing would land near 25 percent
    assert same / total > 0.45


def test_graph_indexes_stay_consistent():
    g, _ = generate(SMALL)
    und, out, inc = adjacency(g)
    for n in g.node_ids():
        assert g.neighbors(n) == und.get(n, set())
    assert g.link_count() == sum(len(v) for m in out.values() for v in m.values())
