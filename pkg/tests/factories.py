"""Seeded random graph builders shared by the property suites.

Everything here is deterministic in the seed so failures replay exactly.
"""

import random

from kglf.graph import KnowledgeGraph
from kglf.ontology import Ontology


def random_ontology(rng: random.Random, max_concepts: int = 4, max_relations: int = 4) -> Ontology:
    onto = Ontology()
    onto.add_concept("root", "Root")
    concept_ids = []
    for i in range(rng.randint(1, max_concepts)):
        parent = "root" if not concept_ids or rng.random() < 0.6 else rng.choice(concept_ids)
        cid = "C%d" % i
        onto.add_concept(cid, "Concept %d" % i, parent)
        concept_ids.append(cid)
    for i in range(rng.randint(1, max_relations)):
        # root domains keep small ontologies from strangling the link supply
        domain = rng.choice(concept_ids + ["root"])
        range_ = rng.choice(concept_ids + ["root"])
        onto.add_relation("r%d" % i, "relation %d" % i, domain, range_)
    return onto


def random_graph(
    seed: int,
    max_nodes: int = 14,
    min_nodes: int = 2,
    max_concepts: int = 4,
    max_relations: int = 4,
    link_factor: float = 2.0,
    with_non_links: bool = False,
) -> KnowledgeGraph:
    rng = random.Random(seed)
    onto = random_ontology(rng, max_concepts, max_relations)
    g = KnowledgeGraph(onto)

    concrete = [c for c in onto.concepts if c != "root"]
    n = rng.randint(min_nodes, max_nodes)
    ids = []
    for i in range(n):
        node_id = "n%02d" % i
        concept = rng.choice(concrete)
        attrs = {"tag": "t%d" % rng.randint(0, 2)} if rng.random() < 0.3 else None
        g.add_node(concept, "Node %02d" % i, node_id=node_id, attributes=attrs)
        ids.append(node_id)

    relations = list(onto.relations)
    ts = 1_000
    attempts = int(link_factor * n) + rng.randint(0, 4)
    for _ in range(attempts):
        u, v = rng.choice(ids), rng.choice(ids)
        if u == v:
            continue
        j = rng.choice(relations)
        if not onto.compatible(j, g.concept_of(u), g.concept_of(v)):
            continue
        if g.has_link(u, v, j) or g.has_non_link(u, v, j) or g.has_non_link(u, v, None):
            continue
        g.add_link(u, v, j, ts)
        ts += rng.randint(1, 5_000)

    if with_non_links:
        for _ in range(rng.randint(0, n)):
            u, v = rng.choice(ids), rng.choice(ids)
            if u == v or g.has_link_between(u, v):
                continue
            if rng.random() < 0.5:
                if not g.has_non_link(u, v, None):
                    g.record_non_link(u, v, None, ts)
            else:
                j = rng.choice(relations)
                if not g.has_link(u, v, j) and not g.has_non_link(u, v, j):
                    g.record_non_link(u, v, j, ts)
            ts += 1
    return g


def random_pairs(g, rng: random.Random, count: int):
    """Ordered (u, v) samples with u != v; empty when the graph is too small."""
    ids = g.node_ids()
    if len(ids) < 2:
        return []
    out = []
    for _ in range(count):
        u, v = rng.sample(ids, 2)
        out.append((u, v))
    return out
