import math

import pytest

from kglf import metrics
from kglf.metrics import (
    EXISTENCE,
    SEMANTIC,
    MetricEnsemble,
    MetricError,
    MetricInstance,
    catalog,
    combined_similarity,
    default_ensemble,
)
from kglf.weights import WeightVector

APPROX = 1e-4


# -- neighborhood overlap -----------------------------------------------------


def test_jaccard_on_f1(f1):
    assert metrics.neighborhood_overlap(f1, "jaccard", "p1", "p2") == pytest.approx(0.25)
    assert metrics.neighborhood_overlap(f1, "jaccard", "p1", "p3") == pytest.approx(1.0)
    assert metrics.neighborhood_overlap(f1, "jaccard", "p1", "s2") == 0.0


def test_adamic_adar_scaled_by_log2(f1):
    expected = math.log(2) / math.log(3)
    assert metrics.neighborhood_overlap(f1, "adamic_adar", "p1", "p3") == pytest.approx(
        expected, abs=APPROX
    )


def test_resource_allocation_scaled_by_two(f1):
    assert metrics.neighborhood_overlap(f1, "resource_allocation", "p1", "p3") == pytest.approx(
        2 / 3, abs=APPROX
    )


def test_remaining_overlap_kinds_on_f1(f1):
    assert metrics.neighborhood_overlap(f1, "sorensen", "p1", "p2") == pytest.approx(0.4)
    assert metrics.neighborhood_overlap(f1, "salton", "p1", "p2") == pytest.approx(
        1 / math.sqrt(6), abs=APPROX
    )
    assert metrics.neighborhood_overlap(f1, "lhn", "p1", "p2") == pytest.approx(1 / 6, abs=APPROX)
    assert metrics.neighborhood_overlap(f1, "hub_promoted", "p1", "p2") == pytest.approx(0.5)
    assert metrics.neighborhood_overlap(f1, "hub_depressed", "p1", "p2") == pytest.approx(
        1 / 3, abs=APPROX
    )


def test_overlap_errors(f1):
    with pytest.raises(MetricError):
        metrics.neighborhood_overlap(f1, "jaccard", "p1", "p1")
    with pytest.raises(MetricError):
        metrics.neighborhood_overlap(f1, "cosine", "p1", "p2")
    with pytest.raises(Exception):
        metrics.neighborhood_overlap(f1, "jaccard", "p1", "ghost")


# -- shortest path ------------------------------------------------------------


def test_shortest_path_similarity(f1):
    assert metrics.shortest_path_similarity(f1, "p1", "p3") == pytest.approx(0.8)
    assert metrics.shortest_path_similarity(f1, "p1", "p2") == pytest.approx(1.0)
    assert metrics.shortest_path_similarity(f1, "p1", "s2") == 0.0
    with pytest.raises(MetricError):
        metrics.shortest_path_similarity(f1, "p1", "p1")


# -- time score ---------------------------------------------------------------


def test_time_score_worked_example(f1):
    # c=s1, time gap 2000ms, freshest common stamp 3000ms old -> k=3
    got = metrics.time_score(f1, "p1", "p3", beta=0.5, mm=1000.0)
    assert got == pytest.approx(0.125 / 3, abs=APPROX)


def test_time_score_no_common_neighbors(f1):
    assert metrics.time_score(f1, "p1", "s2", beta=0.5, mm=1000.0) == 0.0


def test_time_score_freshest_co_occurrence_hits_one():
    from kglf.fixtures import build_f1

    g = build_f1()
    # realign both stamps onto the graph maximum for k=0 and denom 1
    g.remove_link("p1", "s1", "waited_at")
    g.remove_link("p3", "s1", "waited_at")
    g.add_link("p1", "s1", "waited_at", 5000)
    g.add_link("p3", "s1", "waited_at", 5000)
    assert metrics.time_score(g, "p1", "p3", beta=0.5, mm=1000.0) == pytest.approx(1.0)


def test_time_score_param_validation(f1):
    for beta, mm in ((0.0, 1000.0), (1.0, 1000.0), (0.5, 0.0), (-1.0, 5.0)):
        with pytest.raises(MetricError):
            MetricInstance.create("time_score", beta=beta, mm=mm)


# -- euler time ---------------------------------------------------------------


def test_euler_time(f1):
    assert metrics.euler_time(f1, "p1", "p2", d=1000.0) == pytest.approx(1.0)  # age 0
    assert metrics.euler_time(f1, "p1", "s1", d=1000.0) == pytest.approx(math.exp(-1))
    assert metrics.euler_time(f1, "p1", "s2", d=1000.0) == 0.0  # never linked
    with pytest.raises(MetricError):
        MetricInstance.create("euler_time", d=0.0)


# -- focci distance -----------------------------------------------------------


def test_focci_distance(f1):
    assert metrics.focci_distance(f1, "p1", "p3") == pytest.approx(1 / 3, abs=APPROX)
    assert metrics.focci_distance(f1, "p1", "s2") == 0.0


def test_focci_distance_exclusive_neighbor_is_one():
    from kglf.fixtures import build_f1

    # chain a -> c -> b plus b -> d, all knows: the shared neighbor c has a
    # single inverse-neighbor (a), so the exclusivity score maxes out
    g = build_f1()
    for pid in ("pa", "pb", "pc", "pd"):
        g.add_node("Person", pid, pid)
    g.add_link("pa", "pc", "knows", 6000)
    g.add_link("pc", "pb", "knows", 7000)
    g.add_link("pb", "pd", "knows", 8000)
    assert metrics.focci_distance(g, "pa", "pb") == pytest.approx(1.0)


# -- conditional probability ---------------------------------------------------


def test_conditional_probability(f1, f2):
    assert metrics.conditional_probability(f2, "met_at_stop_with") == pytest.approx(1.0)
    assert metrics.conditional_probability(f1, "waited_at") == 0.0
    f1.ontology.add_relation("unused", "unused", "Person", "Person")
    assert metrics.conditional_probability(f1, "unused") == 0.0


# -- taxonomy / relational ----------------------------------------------------


def test_taxonomy_similarity(f1):
    assert metrics.taxonomy_similarity(f1, "p1", "p2") == pytest.approx(1.0)
    assert metrics.taxonomy_similarity(f1, "p1", "s1") == pytest.approx(0.2)


def test_taxonomy_siblings_share_half():
    from kglf.ontology import Ontology
    from kglf.graph import KnowledgeGraph

    onto = Ontology()
    onto.add_concept("root", "Root")
    onto.add_concept("Mid", "Mid", "root")
    onto.add_concept("A", "A", "Mid")
    onto.add_concept("B", "B", "Mid")
    g = KnowledgeGraph(onto)
    g.add_node("A", "a", "a")
    g.add_node("B", "b", "b")
    assert metrics.taxonomy_similarity(g, "a", "b") == pytest.approx(0.5)


def test_relational_similarity(f1):
    assert metrics.relational_similarity(f1, "p1", "p3") == pytest.approx(1.0)
    assert metrics.relational_similarity(f1, "s2", "p1") == 0.0


# -- arr / aor ----------------------------------------------------------------


def test_arr_is_asymmetric(f1):
    assert metrics.arr(f1, "p1", "p3") == pytest.approx(0.5)
    assert metrics.arr(f1, "p3", "p1") == pytest.approx(1.0)
    assert metrics.arr(f1, "s2", "p1") == 0.0


def test_ao_relation_variants(f1):
    assert metrics.ao_relation(f1, "p1", "s1", "aor") == pytest.approx(1.0)
    assert metrics.ao_relation(f1, "p1", "s1", "aorr") == pytest.approx(0.5)
    assert metrics.ao_relation(f1, "p1", "s1", "aorc") == pytest.approx(0.75)
    assert metrics.ao_relation(f1, "p1", "s2", "aor") == 0.0
    with pytest.raises(MetricError):
        metrics.ao_relation(f1, "p1", "s1", "nope")


# -- dimension connectivity ---------------------------------------------------


def test_dimension_connectivity(f1):
    assert metrics.dimension_connectivity(f1, "node", "waited_at") == pytest.approx(0.6)
    assert metrics.dimension_connectivity(f1, "edge", "knows") == pytest.approx(0.4)
    f1.ontology.add_relation("unused", "unused", "Person", "Person")
    assert metrics.dimension_connectivity(f1, "node", "unused") == 0.0
    assert metrics.dimension_connectivity(f1, "edge", "unused") == 0.0


# -- mr link propagation ------------------------------------------------------


def test_mrlp_single_dimension():
    from kglf.ontology import Ontology
    from kglf.graph import KnowledgeGraph

    onto = Ontology()
    onto.add_concept("root", "Root")
    onto.add_concept("P", "P", "root")
    onto.add_relation("r", "r", "P", "P")
    g = KnowledgeGraph(onto)
    g.add_node("P", "u", "u")
    g.add_node("P", "v", "v")
    g.add_link("v", "u", "r", 1000)
    assert metrics.mr_link_propagation(g, "u", "v", "r", damping=0.5) == pytest.approx(0.5)
    assert metrics.mr_link_propagation(g, "u", "v", "r", damping=0.0) == 0.0


def test_mrlp_disconnected_pair(f1):
    assert metrics.mr_link_propagation(f1, "p1", "s2", "knows", 0.5) == 0.0


# -- catalog and ensembles ----------------------------------------------------


def test_catalog_contains_every_family_with_euler_twice():
    cat = catalog()
    assert len(cat) == 23
    names = [inst.display_name for inst in cat]
    assert len(set(names)) == 23
    assert "euler_time_one_day" in names
    assert "euler_time_half_day" in names
    by_family = [inst.family for inst in cat]
    assert by_family.count("euler_time") == 2


def test_default_ensemble_sizes():
    assert len(default_ensemble(EXISTENCE).instances) == 19
    assert len(default_ensemble(SEMANTIC).instances) == 16


def test_ensemble_rejects_mode_mismatch():
    cp = MetricInstance.create("conditional_probability")
    with pytest.raises(MetricError):
        MetricEnsemble(mode=EXISTENCE, instances=[cp])
    with pytest.raises(MetricError):
        MetricEnsemble(mode="nope", instances=[])


def test_ensemble_rejects_weight_length_mismatch():
    insts = [MetricInstance.create("jaccard"), MetricInstance.create("sorensen")]
    with pytest.raises(MetricError):
        MetricEnsemble(mode=EXISTENCE, instances=insts, weights=WeightVector([1.0]))


def test_combined_similarity_worked_example(f1):
    insts = [MetricInstance.create("jaccard"), MetricInstance.create("sorensen")]
    ens = MetricEnsemble(EXISTENCE, insts, WeightVector([0.5, 0.5]))
    assert combined_similarity(ens, f1, "p1", "p2") == pytest.approx(0.325)


def test_combined_similarity_one_hot_identity(f1):
    insts = [MetricInstance.create("jaccard"), MetricInstance.create("sorensen")]
    ens = MetricEnsemble(EXISTENCE, insts, WeightVector([1.0, 0.0]))
    assert combined_similarity(ens, f1, "p1", "p2") == pytest.approx(
        metrics.neighborhood_overlap(f1, "jaccard", "p1", "p2")
    )


def test_combined_similarity_isolated_pair(f1):
    ens = default_ensemble(EXISTENCE)
    # isolated targets: every link-derived metric lands on its 0 convention,
    # only the concept-ancestry term fires (same concept, score 1)
    f1.add_node("Person", "loner", "loner")
    f1.add_node("Person", "loner2", "loner2")
    n = len(ens.instances)
    assert combined_similarity(ens, f1, "loner", "loner2") == pytest.approx(1.0 / n)


def test_combined_similarity_argument_checks(f1):
    ens_e = default_ensemble(EXISTENCE)
    ens_s = default_ensemble(SEMANTIC)
    with pytest.raises(MetricError):
        combined_similarity(ens_e, f1, "p1", "p3", "knows")
    with pytest.raises(MetricError):
        combined_similarity(ens_s, f1, "p1", "p3")


def test_combined_similarity_requires_normalized_weights(f1):
    insts = [MetricInstance.create("jaccard"), MetricInstance.create("sorensen")]
    ens = MetricEnsemble(EXISTENCE, insts, WeightVector([0.9, 0.9]))
    with pytest.raises(MetricError):
        combined_similarity(ens, f1, "p1", "p2")


def test_symmetry_contract(f1):
    symmetric = [
        "jaccard",
        "sorensen",
        "salton",
        "lhn",
        "hub_promoted",
        "hub_depressed",
        "adamic_adar",
        "resource_allocation",
    ]
    pairs = [("p1", "p2"), ("p1", "p3"), ("p2", "s1"), ("p1", "s2")]
    for kind in symmetric:
        for u, v in pairs:
            assert metrics.neighborhood_overlap(f1, kind, u, v) == pytest.approx(
                metrics.neighborhood_overlap(f1, kind, v, u)
            )
    for u, v in pairs:
        assert metrics.shortest_path_similarity(f1, u, v) == pytest.approx(
            metrics.shortest_path_similarity(f1, v, u)
        )
        assert metrics.taxonomy_similarity(f1, u, v) == pytest.approx(
            metrics.taxonomy_similarity(f1, v, u)
        )
        assert metrics.ao_relation(f1, u, v, "aorc") == pytest.approx(
            metrics.ao_relation(f1, v, u, "aorc")
        )
