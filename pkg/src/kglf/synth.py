"""Synthetic city graphs with planted link-formation mechanisms.

Three mechanisms drive link creation: triadic closure (wedges get
closed), type affinity (nodes share a latent tag attribute and mostly
link within it), and temporal recency (recently touched nodes attract
new links). A holdout fraction of the generated links is removed from
the visible graph and returned as the oracle's ground truth.

Every pair carries at most one link, so the holdout count is exact at
the link level and a hidden pair is always non-adjacent in the visible
graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graph import KnowledgeGraph
from .ontology import Ontology

TRIADIC_CLOSURE = "triadic_closure"
TYPE_AFFINITY = "type_affinity"
TEMPORAL_RECENCY = "temporal_recency"
MECHANISMS = (TRIADIC_CLOSURE, TYPE_AFFINITY, TEMPORAL_RECENCY)

RECENCY_WINDOW = 20
ATTEMPTS_PER_STEP = 30


def build_city_ontology(located_in: bool = False) -> Ontology:
    onto = Ontology()
    onto.add_concept("root", "Root")
    onto.add_concept("Agent", "Agent", "root")
    onto.add_concept("Person", "Person", "Agent")
    onto.add_concept("Place", "Place", "root")
    onto.add_concept("Stop", "Stop", "Place")
    onto.add_concept("City", "City", "Place")
    onto.add_relation("knows", "knows", "Person", "Person")
    onto.add_relation("waited_at", "waited at", "Person", "Stop")
    onto.add_relation("visited", "visited", "Person", "City")
    if located_in:
        onto.add_relation("located_in", "located in", "Stop", "City")
    return onto


@dataclass(frozen=True)
class SyntheticSpec:
    node_counts: dict = field(
        default_factory=lambda: {"Person": 40, "Stop": 40, "City": 40}
    )
    # aligned with MECHANISMS order
    mechanism_mix: tuple = (0.5, 0.3, 0.2)
    holdout: float = 0.2
    target_links: int = 900
    tags: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if len(self.mechanism_mix) != len(MECHANISMS):
            raise ValueError("mechanism_mix needs %d entries" % len(MECHANISMS))
        if any(w < 0 for w in self.mechanism_mix):
            raise ValueError("mechanism weights must be non-negative")
        if abs(sum(self.mechanism_mix) - 1.0) > 1e-9:
            raise ValueError("mechanism weights must sum to 1")
        if not 0 < self.holdout < 1:
            raise ValueError("holdout must lie in (0, 1)")
        if any(c < 0 for c in self.node_counts.values()):
            raise ValueError("node counts must be non-negative")
        if self.node_counts.get("Person", 0) < 2:
            raise ValueError("need at least two Person nodes to form links")
        if self.target_links < 10:
            raise ValueError("target_links too small to be interesting")
        if self.tags < 1:
            raise ValueError("need at least one tag")


def generate(spec: SyntheticSpec):
    """Build the full graph, then split it into (visible, hidden holdout)."""
    rng = random.Random(spec.rng_seed)
    located_in = spec.node_counts.get("Stop", 0) > 0 and spec.node_counts.get("City", 0) > 0
    g = KnowledgeGraph(build_city_ontology(located_in=located_in))

    by_concept: dict[str, list[str]] = {}
    by_tag: dict[str, list[str]] = {}
    for concept in sorted(spec.node_counts):
        for i in range(spec.node_counts[concept]):
            tag = "t%d" % rng.randrange(spec.tags)
            node_id = "%s_%03d" % (concept.lower(), i)
            g.add_node(concept, node_id, node_id, {"tag": tag})
            by_concept.setdefault(concept, []).append(node_id)
            by_tag.setdefault(tag, []).append(node_id)
    persons = by_concept.get("Person", [])
    all_nodes = g.node_ids()

    clock = 0

    def next_ts() -> int:
        nonlocal clock
        clock += 1000
        return clock

    recent: list[str] = []

    def touch(node_id: str) -> None:
        if node_id in recent:
            recent.remove(node_id)
        recent.append(node_id)
        if len(recent) > RECENCY_WINDOW:
            recent.pop(0)

    def options(a: str, b: str):
        ca, cb = g.concept_of(a), g.concept_of(b)
        if ca == "Person" and cb == "Person":
            return [(a, b, "knows"), (b, a, "knows")]
        for person, other, cother in ((a, b, cb), (b, a, ca)):
            if g.concept_of(person) != "Person":
                continue
            if cother == "Stop":
                return [(person, other, "waited_at")]
            if cother == "City":
                return [(person, other, "visited")]
        if located_in and {ca, cb} == {"Stop", "City"}:
            stop, city = (a, b) if ca == "Stop" else (b, a)
            return [(stop, city, "located_in")]
        return []

    def try_link(a: str, b: str) -> bool:
        # one link per pair keeps the holdout split clean
        if a == b or g.has_link_between(a, b):
            return False
        opts = options(a, b)
        if not opts:
            return False
        s, o, j = opts[int(rng.random() * len(opts))]
        g.add_link(s, o, j, next_ts())
        touch(s)
        touch(o)
        return True

    def random_attach() -> bool:
        for _ in range(ATTEMPTS_PER_STEP):
            if try_link(rng.choice(persons), rng.choice(all_nodes)):
                return True
        return False

    def step_triadic() -> bool:
        for _ in range(ATTEMPTS_PER_STEP):
            u = rng.choice(all_nodes)
            nb = sorted(g.neighbors(u))
            if not nb:
                continue
            v = rng.choice(nb)
            wedge = sorted(g.neighbors(v) - g.neighbors(u) - {u})
            if not wedge:
                continue
            if try_link(u, rng.choice(wedge)):
                return True
        return False

    def step_affinity() -> bool:
        for _ in range(ATTEMPTS_PER_STEP):
            u = rng.choice(persons)
            if rng.random() < 0.8:
                pool = by_tag[g.node(u).attributes["tag"]]
                cand = rng.choice(pool)
            else:
                cand = rng.choice(all_nodes)
            if try_link(u, cand):
                return True
        return False

    def step_recency() -> bool:
        for _ in range(ATTEMPTS_PER_STEP):
            if not recent:
                break
            u = rng.choice(persons)
            if try_link(u, rng.choice(recent)):
                return True
        return False

    steps = {
        TRIADIC_CLOSURE: step_triadic,
        TYPE_AFFINITY: step_affinity,
        TEMPORAL_RECENCY: step_recency,
    }

    # bootstrap so closure and recency have material to work with
    bootstrap = min(60, spec.target_links // 4)
    attempts = 0
    while g.link_count() < bootstrap and attempts < bootstrap * 50:
        random_attach()
        attempts += 1

    attempts = 0
    cap = spec.target_links * 200
    while g.link_count() < spec.target_links and attempts < cap:
        attempts += 1
        draw = rng.random()
        acc = 0.0
        mech = MECHANISMS[-1]
        for name, w in zip(MECHANISMS, spec.mechanism_mix):
            acc += w
            if draw < acc:
                mech = name
                break
        if not steps[mech]():
            random_attach()
    if g.link_count() < 2:
        raise ValueError("spec admits no links; check concepts against the schema")

    links = g.all_links()
    n_hidden = int(spec.holdout * len(links))
    hidden = rng.sample(links, n_hidden)
    for link in hidden:
        g.remove_link(link.subject, link.object, link.relation)
    hidden.sort(key=lambda l: (l.subject, l.object, l.relation))
    return g, hidden
