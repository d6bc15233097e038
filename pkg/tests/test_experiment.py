import pytest

from kglf.experiment import (
    CONTEXT_NOTE,
    ExperimentReport,
    SimulationConfig,
    simulate,
    write_report,
)
from kglf.graph import KnowledgeGraph
from kglf.metrics import EXISTENCE, SEMANTIC
from kglf.ontology import Ontology
from kglf.synth import SyntheticSpec, generate

from oracles import naive_ks


@pytest.fixture(scope="module")
def small_world():
    spec = SyntheticSpec(
        node_counts={"Person": 25, "Stop": 10, "City": 5},
        target_links=250,
        rng_seed=5,
    )
    return generate(spec)


@pytest.fixture(scope="module")
def small_run(small_world):
    visible, hidden = small_world
    config = SimulationConfig(seed=2, retrain_every=60, train_size=30)
    return simulate(visible, hidden, 240, config)


def test_simulate_is_deterministic(small_world):
    visible, hidden = small_world
    config = SimulationConfig(seed=2, retrain_every=60, train_size=30)
    a = simulate(visible, hidden, 120, config)
    b = simulate(visible, hidden, 120, config)
    assert a == b


def test_simulate_leaves_inputs_untouched(small_world):
    visible, hidden = small_world
    before = [(l.subject, l.object, l.relation) for l in visible.all_links()]
    simulate(visible, hidden, 30, SimulationConfig(seed=9))
    after = [(l.subject, l.object, l.relation) for l in visible.all_links()]
    assert before == after


def test_report_accounting(small_run):
    r = small_run
    assert r.reviews <= r.feedback_budget
    assert r.reviews == r.reviews_genetic + r.reviews_baseline
    assert r.found_hidden == r.accepts_genetic + r.accepts_baseline
    assert r.found_hidden <= r.hidden_total
    assert 0.0 <= r.tp_genetic <= 1.0
    assert r.tp_genetic + r.fp_genetic == pytest.approx(1.0)
    assert 0.0 <= r.ks_statistic <= 1.0
    assert abs(sum(r.final_weights.values()) - 1.0) < 1e-9
    assert r.trained >= 1


def test_ks_statistic_matches_brute_force(small_run):
    r = small_run
    assert len(r.positive_scores) > 0
    assert len(r.negative_scores) > 0
    expected = naive_ks(list(r.positive_scores), list(r.negative_scores))
    assert r.ks_statistic == pytest.approx(expected, abs=1e-12)


def test_scoring_disabled_control_is_flat(small_world):
    visible, hidden = small_world
    config = SimulationConfig(seed=2, retrain_every=60, train_size=30, scoring_disabled=True)
    control = simulate(visible, hidden, 240, config)
    assert all(s == 0.0 for s in control.positive_scores)
    assert all(s == 0.0 for s in control.negative_scores)
    assert control.ks_statistic == 0.0 or control.positive_scores == ()


def test_trained_engine_beats_the_control(small_world, small_run):
    visible, hidden = small_world
    config = SimulationConfig(seed=2, retrain_every=60, train_size=30, scoring_disabled=True)
    control = simulate(visible, hidden, 240, config)
    assert small_run.tp_genetic >= control.tp_genetic


def test_simulate_validation(small_world):
    visible, hidden = small_world
    with pytest.raises(ValueError):
        simulate(visible, hidden, 0)
    with pytest.raises(ValueError):
        simulate(visible, [], 10)
    with pytest.raises(ValueError):
        SimulationConfig(mode="nope")
    with pytest.raises(ValueError):
        SimulationConfig(batch_size=2)


def _semantic_world():
    onto = Ontology()
    onto.add_concept("root", "Root")
    onto.add_concept("Person", "Person", "root")
    onto.add_relation("knows", "knows", "Person", "Person")
    onto.add_relation("met_at_stop_with", "met at stop with", "Person", "Person")
    g = KnowledgeGraph(onto)
    people = ["q%02d" % i for i in range(10)]
    for pid in people:
        g.add_node("Person", pid, pid)
    ts = 0
    for i, a in enumerate(people):
        for b in people[i + 1 :]:
            ts += 1000
            g.add_link(a, b, "knows", ts)
    met = []
    for i in range(0, 10, 2):
        ts += 1000
        g.add_link(people[i], people[i + 1], "met_at_stop_with", ts)
        met.append((people[i], people[i + 1]))
    hidden = []
    for a, b in met[:3]:
        hidden.append(g.get_link(a, b, "met_at_stop_with"))
    for a, b in met[:3]:
        g.remove_link(a, b, "met_at_stop_with")
    return g, hidden


def test_semantic_mode_finds_hidden_triplets():
    visible, hidden = _semantic_world()
    config = SimulationConfig(
        mode=SEMANTIC, seed=4, retrain_every=40, train_size=10, candidate_size=20
    )
    report = simulate(visible, hidden, 160, config)
    assert report.mode == SEMANTIC
    assert report.found_hidden >= 1
    assert report.reviews <= 160


def test_write_report_files(tmp_path, small_run):
    out = tmp_path / "report"
    written = write_report([small_run], str(out))
    names = sorted(p.rsplit("/", 1)[-1] for p in written)
    assert names == [
        "cdf_negative.tsv",
        "cdf_positive.tsv",
        "tp_table.tsv",
        "weights.tsv",
        "weights_mean.tsv",
    ]

    lines = (out / "tp_table.tsv").read_text().splitlines()
    assert lines[0] == CONTEXT_NOTE
    assert lines[1].startswith("seed\tmode\tbudget")
    assert len(lines) == 3

    rows = (out / "weights.tsv").read_text().splitlines()[1:]
    total = sum(float(r.split("\t")[2]) for r in rows)
    # each weight is written with six decimals, so the sum can drift a hair
    assert total == pytest.approx(1.0, abs=2e-5)

    cdf_rows = (out / "cdf_positive.tsv").read_text().splitlines()[1:]
    values = [tuple(map(float, r.split("\t"))) for r in cdf_rows]
    assert all(b[0] >= a[0] and b[1] >= a[1] for a, b in zip(values, values[1:]))
    assert values[-1][1] == pytest.approx(1.0)


def test_write_report_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        write_report([], str(tmp_path / "x"))


def test_report_mode_is_recorded(small_run):
    assert small_run.mode == EXISTENCE
    assert isinstance(small_run, ExperimentReport)
