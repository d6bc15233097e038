"""In-memory heterogeneous, multi-dimensional directed graph.

Nodes are typed by concepts. Links are directed, timestamped triplets
(subject, object, relation). Confirmed rejections are stored as non-links
so they can serve as gold-standard negatives later. The class maintains
every index the similarity metrics query: per-relation undirected
neighborhoods, subject/object adjacency, per-node and per-pair latest
timestamps.

Neighborhood convention: Gamma(u, j) is undirected, the union of in- and
out-neighbors via j. Direction is preserved separately in the subject-based
queries (active_relations, relations_between, pairs_of_relation,
subjects_of_relation).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .ontology import Ontology


class GraphError(Exception):
    """Base class for graph-level violations."""


class UnknownIdError(GraphError):
    """A referenced node, concept or relation does not exist."""


class DuplicateError(GraphError):
    """The triplet or id already exists."""


class SchemaViolation(GraphError):
    """Link violates the relation's domain/range or the self-loop ban."""


@dataclass
class Node:
    id: str
    concept: str
    label: str
    attributes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Link:
    subject: str
    object: str
    relation: str
    timestamp: int  # epoch milliseconds


@dataclass(frozen=True)
class NonLink:
    subject: str
    object: str
    relation: str | None  # None records a pair-level rejection
    timestamp: int


def _pair_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


class KnowledgeGraph:
    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self._nodes: dict[str, Node] = {}
        self._links: dict[tuple[str, str, str], Link] = {}
        self._non_links: dict[tuple[str, str, str | None], NonLink] = {}
        # E(j) as directed pairs, and per-subject link counts for N(j)
        self._pairs_by_rel: dict[str, set[tuple[str, str]]] = {}
        self._subject_counts: dict[str, dict[str, int]] = {}
        # adjacency: out/in are subject-based, und unions both directions
        self._out: dict[str, dict[str, set[str]]] = {}
        self._in: dict[str, dict[str, set[str]]] = {}
        self._und: dict[str, dict[str, set[str]]] = {}
        self._und_all: dict[str, set[str]] = {}
        # timestamps: latest per incident node, per unordered pair, global
        self._node_last_ts: dict[str, int] = {}
        self._pair_last_ts: dict[tuple[str, str], int] = {}
        self._pair_rels: dict[tuple[str, str], set[str]] = {}
        self._auto_id = 0

    # -- mutation ----------------------------------------------------------

    def add_node(
        self,
        concept: str,
        label: str,
        node_id: str | None = None,
        attributes: dict[str, str] | None = None,
    ) -> str:
        if concept not in self.ontology.concepts:
            raise UnknownIdError("unknown concept: %s" % concept)
        if node_id is None:
            node_id = label if label and label not in self._nodes else self._next_auto_id(label)
        if node_id in self._nodes:
            raise DuplicateError("duplicate node id: %s" % node_id)
        self._nodes[node_id] = Node(node_id, concept, label, dict(attributes or {}))
        self._out[node_id] = {}
        self._in[node_id] = {}
        self._und[node_id] = {}
        self._und_all[node_id] = set()
        return node_id

    def _next_auto_id(self, label: str) -> str:
        base = label or "n"
        candidate = base
        while candidate in self._nodes:
            self._auto_id += 1
            candidate = "%s#%d" % (base, self._auto_id)
        return candidate

    def add_link(self, u: str, v: str, j: str, t: int) -> None:
        self._require_node(u)
        self._require_node(v)
        rel = self.ontology.relations.get(j)
        if rel is None:
            raise UnknownIdError("unknown relation: %s" % j)
        if u == v and not rel.allows_self_loops:
            raise SchemaViolation("self-loop not allowed for relation %s" % j)
        if (u, v, j) in self._links:
            raise DuplicateError("duplicate triplet (%s, %s, %s)" % (u, v, j))
        if not self.ontology.compatible(j, self._nodes[u].concept, self._nodes[v].concept):
            raise SchemaViolation(
                "relation %s does not admit %s -> %s"
                % (j, self._nodes[u].concept, self._nodes[v].concept)
            )
        self._links[(u, v, j)] = Link(u, v, j, t)
        self._pairs_by_rel.setdefault(j, set()).add((u, v))
        counts = self._subject_counts.setdefault(j, {})
        counts[u] = counts.get(u, 0) + 1
        self._out[u].setdefault(j, set()).add(v)
        self._in[v].setdefault(j, set()).add(u)
        self._und[u].setdefault(j, set()).add(v)
        self._und[v].setdefault(j, set()).add(u)
        self._und_all[u].add(v)
        self._und_all[v].add(u)
        key = _pair_key(u, v)
        self._node_last_ts[u] = max(t, self._node_last_ts.get(u, t))
        self._node_last_ts[v] = max(t, self._node_last_ts.get(v, t))
        self._pair_last_ts[key] = max(t, self._pair_last_ts.get(key, t))
        self._pair_rels.setdefault(key, set()).add(j)
        # a later acceptance overrides an earlier rejection, both the exact
        # triplet and a pair-level (relation-less) record
        self._non_links.pop((u, v, j), None)
        self._non_links.pop((u, v, None), None)

    def remove_link(self, u: str, v: str, j: str) -> None:
        link = self._links.pop((u, v, j), None)
        if link is None:
            raise UnknownIdError("no such link (%s, %s, %s)" % (u, v, j))
        self._pairs_by_rel[j].discard((u, v))
        if not self._pairs_by_rel[j]:
            del self._pairs_by_rel[j]
        counts = self._subject_counts[j]
        counts[u] -= 1
        if counts[u] == 0:
            del counts[u]
        if not counts:
            del self._subject_counts[j]
        remaining_uv = any(k in self._links for k in ((u, v, i) for i in self.ontology.relations))
        remaining_vu = any(k in self._links for k in ((v, u, i) for i in self.ontology.relations))
        self._out[u][j].discard(v)
        if not self._out[u][j]:
            del self._out[u][j]
        self._in[v][j].discard(u)
        if not self._in[v][j]:
            del self._in[v][j]
        if not ((u, v, j) in self._links or (v, u, j) in self._links):
            self._und[u].get(j, set()).discard(v)
            if j in self._und[u] and not self._und[u][j]:
                del self._und[u][j]
            self._und[v].get(j, set()).discard(u)
            if j in self._und[v] and not self._und[v][j]:
                del self._und[v][j]
        if not remaining_uv and not remaining_vu:
            self._und_all[u].discard(v)
            self._und_all[v].discard(u)
        key = _pair_key(u, v)
        pair_links = [
            l for (a, b, _i), l in self._links.items() if _pair_key(a, b) == key
        ]
        if pair_links:
            self._pair_last_ts[key] = max(l.timestamp for l in pair_links)
            self._pair_rels[key] = {l.relation for l in pair_links}
        else:
            self._pair_last_ts.pop(key, None)
            self._pair_rels.pop(key, None)
        for x in (u, v):
            incident = [
                l for l in self._links.values() if l.subject == x or l.object == x
            ]
            if incident:
                self._node_last_ts[x] = max(l.timestamp for l in incident)
            else:
                self._node_last_ts.pop(x, None)

    def record_non_link(self, u: str, v: str, j: str | None = None, t: int = 0) -> None:
        self._require_node(u)
        self._require_node(v)
        if j is not None and j not in self.ontology.relations:
            raise UnknownIdError("unknown relation: %s" % j)
        if j is not None:
            if (u, v, j) in self._links:
                raise DuplicateError("triplet (%s, %s, %s) exists as a link" % (u, v, j))
        elif self.relations_between(u, v):
            raise DuplicateError("pair (%s, %s) is linked" % (u, v))
        # repeated rejections are idempotent, the first record wins
        self._non_links.setdefault((u, v, j), NonLink(u, v, j, t))

    # -- queries -----------------------------------------------------------

    def _require_node(self, u: str) -> None:
        if u not in self._nodes:
            raise UnknownIdError("unknown node: %s" % u)

    def has_node(self, u: str) -> bool:
        return u in self._nodes

    def node(self, u: str) -> Node:
        self._require_node(u)
        return self._nodes[u]

    def concept_of(self, u: str) -> str:
        return self.node(u).concept

    def node_ids(self) -> list[str]:
        return sorted(self._nodes)

    def nodes_of_concept(self, concept: str, include_descendants: bool = True) -> list[str]:
        if concept not in self.ontology.concepts:
            raise UnknownIdError("unknown concept: %s" % concept)
        if include_descendants:
            scope = self.ontology.descendants_or_self(concept)
        else:
            scope = {concept}
        return sorted(n.id for n in self._nodes.values() if n.concept in scope)

    def neighbors(self, u: str) -> set[str]:
        """Undirected neighborhood over all relations. Treat as read-only."""
        self._require_node(u)
        return self._und_all[u]

    def neighbors_by_relation(self, u: str, j: str) -> set[str]:
        self._require_node(u)
        return self._und[u].get(j, set())

    def out_neighbors(self, u: str, j: str | None = None) -> set[str]:
        self._require_node(u)
        if j is not None:
            return self._out[u].get(j, set())
        result: set[str] = set()
        for vs in self._out[u].values():
            result |= vs
        return result

    def in_neighbors(self, u: str, j: str | None = None) -> set[str]:
        self._require_node(u)
        if j is not None:
            return self._in[u].get(j, set())
        result: set[str] = set()
        for vs in self._in[u].values():
            result |= vs
        return result

    def inverse_neighbors(self, z: str, j: str) -> set[str]:
        """Neighborhood of z via the inverse of j.

        A declared inverse is followed as its own relation; otherwise the
        inverse traverses j from object to subject.
        """
        rel = self.ontology.relation(j)
        if rel.inverse_of is not None:
            return self.neighbors_by_relation(z, rel.inverse_of)
        return self.in_neighbors(z, j)

    def degree(self, u: str) -> int:
        # distinct neighbor nodes, not link count
        return len(self.neighbors(u))

    def active_relations(self, u: str) -> set[str]:
        """J(u): relations in which u is a subject."""
        self._require_node(u)
        return {j for j, vs in self._out[u].items() if vs}

    def incoming_relations(self, u: str) -> set[str]:
        self._require_node(u)
        return {j for j, vs in self._in[u].items() if vs}

    def relations_between(self, u: str, v: str) -> set[str]:
        """J(u, v): relations with u as subject and v as object."""
        self._require_node(u)
        self._require_node(v)
        return {j for j, vs in self._out[u].items() if v in vs}

    def relations_between_any(self, u: str, v: str) -> set[str]:
        """Relations linking u and v in either direction."""
        return self._pair_rels.get(_pair_key(u, v), set())

    def pairs_of_relation(self, j: str) -> set[tuple[str, str]]:
        """E(j): directed (subject, object) pairs."""
        return self._pairs_by_rel.get(j, set())

    def unordered_pairs_of_relation(self, j: str) -> set[frozenset[str]]:
        return {frozenset(p) for p in self._pairs_by_rel.get(j, set())}

    def subjects_of_relation(self, j: str) -> set[str]:
        """N(j): nodes appearing as subject of at least one j link."""
        return set(self._subject_counts.get(j, {}))

    def link_count(self, j: str | None = None) -> int:
        if j is None:
            return len(self._links)
        return len(self._pairs_by_rel.get(j, ()))

    def node_count(self) -> int:
        return len(self._nodes)

    def all_links(self) -> list[Link]:
        return sorted(
            self._links.values(), key=lambda l: (l.subject, l.object, l.relation)
        )

    def all_non_links(self) -> list[NonLink]:
        return sorted(
            self._non_links.values(),
            key=lambda n: (n.subject, n.object, n.relation or ""),
        )

    def has_link(self, u: str, v: str, j: str) -> bool:
        return (u, v, j) in self._links

    def has_link_between(self, u: str, v: str) -> bool:
        """True when any relation links u and v in either direction."""
        return _pair_key(u, v) in self._pair_rels

    def has_non_link(self, u: str, v: str, j: str | None = None) -> bool:
        return (u, v, j) in self._non_links

    def get_link(self, u: str, v: str, j: str) -> Link:
        try:
            return self._links[(u, v, j)]
        except KeyError:
            raise UnknownIdError("no such link (%s, %s, %s)" % (u, v, j)) from None

    # -- timestamps ----------------------------------------------------------

    def latest_timestamp(self) -> int | None:
        if not self._links:
            return None
        return max(self._node_last_ts.values())

    def last_link_ts(self, v: str) -> int | None:
        self._require_node(v)
        return self._node_last_ts.get(v)

    def pair_latest_ts(self, u: str, v: str) -> int | None:
        return self._pair_last_ts.get(_pair_key(u, v))

    # -- paths ---------------------------------------------------------------

    def shortest_path_len(self, u: str, v: str, cap: int = 5) -> int | None:
        """Minimal hop count over undirected neighborhoods, None beyond cap."""
        self._require_node(u)
        self._require_node(v)
        if u == v:
            raise GraphError("shortest_path_len requires distinct nodes")
        if cap < 1:
            raise GraphError("cap must be >= 1")
        seen = {u}
        frontier = deque([(u, 0)])
        while frontier:
            node, dist = frontier.popleft()
            if dist >= cap:
                continue
            for w in self._und_all[node]:
                if w == v:
                    return dist + 1
                if w not in seen:
                    seen.add(w)
                    frontier.append((w, dist + 1))
        return None

    def concept_ancestors(self, concept: str) -> frozenset[str]:
        return self.ontology.ancestors(concept)

    # -- snapshotting ----------------------------------------------------------

    def copy(self) -> "KnowledgeGraph":
        """Independent snapshot. Node/link records are shared, indexes are not."""
        clone = KnowledgeGraph(self.ontology.copy())
        clone._nodes = {
            k: Node(n.id, n.concept, n.label, dict(n.attributes))
            for k, n in self._nodes.items()
        }
        clone._links = dict(self._links)
        clone._non_links = dict(self._non_links)
        clone._pairs_by_rel = {j: set(p) for j, p in self._pairs_by_rel.items()}
        clone._subject_counts = {j: dict(c) for j, c in self._subject_counts.items()}
        clone._out = {u: {j: set(vs) for j, vs in m.items()} for u, m in self._out.items()}
        clone._in = {u: {j: set(vs) for j, vs in m.items()} for u, m in self._in.items()}
        clone._und = {u: {j: set(vs) for j, vs in m.items()} for u, m in self._und.items()}
        clone._und_all = {u: set(vs) for u, vs in self._und_all.items()}
        clone._node_last_ts = dict(self._node_last_ts)
        clone._pair_last_ts = dict(self._pair_last_ts)
        clone._pair_rels = {k: set(v) for k, v in self._pair_rels.items()}
        clone._auto_id = self._auto_id
        return clone
