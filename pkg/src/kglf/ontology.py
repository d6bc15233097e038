"""Concept hierarchy and relation schema.

Concepts form a single-parent tree rooted at one distinguished root
concept. Relation identifiers carry domain/range concepts and an optional
declared inverse. Everything downstream references both by opaque string
ids.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


class OntologyError(Exception):
    """Raised on schema violations: unknown ids, cycles, duplicate ids."""


@dataclass(frozen=True)
class Concept:
    id: str
    label: str
    parent: str | None = None  # None only for the root


@dataclass(frozen=True)
class RelationIdentifier:
    id: str
    label: str
    domain: str
    range: str
    inverse_of: str | None = None
    allows_self_loops: bool = False


class Ontology:
    """Mutable registry of concepts and relation identifiers."""

    def __init__(self):
        self.concepts: dict[str, Concept] = {}
        self.relations: dict[str, RelationIdentifier] = {}
        self.root: str | None = None
        self._ancestor_cache: dict[str, frozenset[str]] = {}

    # -- concepts ----------------------------------------------------------

    def add_concept(self, concept_id: str, label: str, parent: str | None = None) -> Concept:
        if concept_id in self.concepts:
            raise OntologyError("duplicate concept id: %s" % concept_id)
        if parent is None:
            if self.root is not None:
                raise OntologyError("root already defined: %s" % self.root)
            self.root = concept_id
        elif parent not in self.concepts:
            # parents must pre-exist, which keeps the hierarchy acyclic
            raise OntologyError("unknown parent concept: %s" % parent)
        concept = Concept(concept_id, label, parent)
        self.concepts[concept_id] = concept
        self._ancestor_cache.clear()
        return concept

    def ancestors(self, concept_id: str) -> frozenset[str]:
        """Upwards cotopy: the concept itself plus every ancestor up to root."""
        cached = self._ancestor_cache.get(concept_id)
        if cached is not None:
            return cached
        if concept_id not in self.concepts:
            raise OntologyError("unknown concept: %s" % concept_id)
        chain = []
        cur: str | None = concept_id
        while cur is not None:
            chain.append(cur)
            cur = self.concepts[cur].parent
        result = frozenset(chain)
        self._ancestor_cache[concept_id] = result
        return result

    def is_a(self, concept_id: str, ancestor_id: str) -> bool:
        """True when concept_id is ancestor_id or one of its descendants."""
        return ancestor_id in self.ancestors(concept_id)

    def descendants_or_self(self, concept_id: str) -> set[str]:
        if concept_id not in self.concepts:
            raise OntologyError("unknown concept: %s" % concept_id)
        return {c for c in self.concepts if concept_id in self.ancestors(c)}

    # -- relations ---------------------------------------------------------

    def add_relation(
        self,
        relation_id: str,
        label: str,
        domain: str,
        range: str,
        inverse_of: str | None = None,
        allows_self_loops: bool = False,
    ) -> RelationIdentifier:
        if relation_id in self.relations:
            raise OntologyError("duplicate relation id: %s" % relation_id)
        for c in (domain, range):
            if c not in self.concepts:
                raise OntologyError("unknown concept in domain/range: %s" % c)
        if inverse_of is not None:
            other = self.relations.get(inverse_of)
            if other is None:
                raise OntologyError("unknown inverse relation: %s" % inverse_of)
            if other.inverse_of not in (None, relation_id):
                raise OntologyError(
                    "inverse_of is not symmetric: %s already inverts %s"
                    % (inverse_of, other.inverse_of)
                )
        relation = RelationIdentifier(
            relation_id, label, domain, range, inverse_of, allows_self_loops
        )
        self.relations[relation_id] = relation
        if inverse_of is not None and self.relations[inverse_of].inverse_of is None:
            # keep the declaration symmetric without asking authors to repeat it
            self.relations[inverse_of] = replace(self.relations[inverse_of], inverse_of=relation_id)
        return relation

    def declare_inverse(self, relation_id: str, inverse_id: str) -> None:
        """Pair two existing relations as inverses after the fact."""
        a = self.relation(relation_id)
        b = self.relation(inverse_id)
        if a.inverse_of == inverse_id and b.inverse_of == relation_id:
            return
        if a.inverse_of is not None or b.inverse_of is not None:
            raise OntologyError(
                "inverse_of is not symmetric between %s and %s" % (relation_id, inverse_id)
            )
        self.relations[relation_id] = replace(a, inverse_of=inverse_id)
        self.relations[inverse_id] = replace(b, inverse_of=relation_id)

    def relation(self, relation_id: str) -> RelationIdentifier:
        try:
            return self.relations[relation_id]
        except KeyError:
            raise OntologyError("unknown relation: %s" % relation_id) from None

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise OntologyError("unknown concept: %s" % concept_id) from None

    def compatible(self, relation_id: str, subject_concept: str, object_concept: str) -> bool:
        """Schema check: subject under the relation's domain, object under its range."""
        rel = self.relation(relation_id)
        return self.is_a(subject_concept, rel.domain) and self.is_a(object_concept, rel.range)

    def copy(self) -> "Ontology":
        clone = Ontology()
        clone.concepts = dict(self.concepts)
        clone.relations = dict(self.relations)
        clone.root = self.root
        return clone
