"""Small named graphs used across the test suite and docs.

F1 is a five-node commuting scene: three people, two stops, two relations.
F2 adds a second Person-to-Person relation so dimension-overlap metrics
have something to compare against.
"""

from __future__ import annotations

from .graph import KnowledgeGraph
from .ontology import Ontology


def _base_ontology() -> Ontology:
    onto = Ontology()
    onto.add_concept("root", "Root")
    onto.add_concept("Agent", "Agent", "root")
    onto.add_concept("Person", "Person", "Agent")
    onto.add_concept("Place", "Place", "root")
    onto.add_concept("Stop", "Stop", "Place")
    onto.add_relation("knows", "knows", "Person", "Person")
    onto.add_relation("waited_at", "waited at", "Person", "Stop")
    return onto


def build_f1() -> KnowledgeGraph:
    g = KnowledgeGraph(_base_ontology())
    for pid in ("p1", "p2", "p3"):
        g.add_node("Person", pid, pid)
    for sid in ("s1", "s2"):
        g.add_node("Stop", sid, sid)
    g.add_link("p1", "p2", "knows", 1000)
    g.add_link("p1", "s1", "waited_at", 2000)
    g.add_link("p2", "s1", "waited_at", 3000)
    g.add_link("p3", "s1", "waited_at", 4000)
    g.add_link("p2", "p3", "knows", 5000)
    return g


def build_f2() -> KnowledgeGraph:
    g = build_f1()
    g.ontology.add_relation("met_at_stop_with", "met at stop with", "Person", "Person")
    g.add_link("p1", "p2", "met_at_stop_with", 6000)
    return g
