"""Portable bundle formats, feedback log, and anonymized export.

A bundle is a directory of line-delimited records: ontology, nodes,
links, nonlinks, weights.existence, weights.semantic, feedback.log, plus
a manifest.json with entity counts. Every line is canonical JSON (sorted
keys, compact separators, UTF-8) and every file starts with a versioned
header line, so loading and saving are byte-stable. FORMAT.md in the
repository root pins the exact layout.

The feedback log is the event-sourced part: accepted events add links,
rejected events record non-links, and replaying the log onto the bundle's
base graph reproduces the live graph exactly.
"""

from __future__ import annotations

import hashlib
import hmac
import io
import json
import os
import zipfile
from dataclasses import dataclass, replace

from .graph import GraphError, KnowledgeGraph
from .metrics import EXISTENCE, SEMANTIC
from .ontology import Ontology, OntologyError
from .weights import WeightVector

FORMAT_VERSION = 1

ONTOLOGY_FILE = "ontology"
NODES_FILE = "nodes"
LINKS_FILE = "links"
NONLINKS_FILE = "nonlinks"
WEIGHTS_FILES = {EXISTENCE: "weights.existence", SEMANTIC: "weights.semantic"}
FEEDBACK_FILE = "feedback.log"
MANIFEST_FILE = "manifest.json"
HOLDOUT_FILE = "holdout"


class BundleError(Exception):
    """Unreadable or inconsistent bundle contents."""


def canonical_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _header(kind: str, **extra) -> dict:
    doc = {"format": "kglf/%s" % kind, "version": FORMAT_VERSION}
    doc.update(extra)
    return doc


def _write_lines(path: str, kind: str, records, **header_extra) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_line(_header(kind, **header_extra)) + "\n")
        for record in records:
            fh.write(canonical_line(record) + "\n")


def _read_lines(path: str, kind: str):
    """Yield (line_number, record). Raises BundleError with file:line context."""
    name = os.path.basename(path)
    try:
        fh = open(path, "r", encoding="utf-8")
    except FileNotFoundError:
        raise BundleError("missing bundle file: %s" % name) from None
    with fh:
        header = None
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BundleError(
                    "%s:%d:%d: invalid record: %s" % (name, lineno, exc.colno, exc.msg)
                ) from None
            if header is None:
                header = record
                expected = "kglf/%s" % kind
                if record.get("format") != expected:
                    raise BundleError(
                        "%s:%d: expected %s header, got %r"
                        % (name, lineno, expected, record.get("format"))
                    )
                if record.get("version") != FORMAT_VERSION:
                    raise BundleError(
                        "%s:%d: unsupported version %r" % (name, lineno, record.get("version"))
                    )
                continue
            yield lineno, record
        if header is None:
            raise BundleError("%s: empty file, header line required" % name)


# -- feedback events -----------------------------------------------------------


@dataclass(frozen=True)
class FeedbackEvent:
    subject: str
    object: str
    relation: str | None
    accepted: bool
    timestamp: int
    mode: str
    # existence acceptances materialize a link of this relation
    link_relation: str | None = None

    def __post_init__(self):
        if self.mode not in (EXISTENCE, SEMANTIC):
            raise ValueError("unknown feedback mode: %s" % self.mode)
        if self.mode == SEMANTIC and self.relation is None:
            raise ValueError("semantic feedback names its relation")
        if self.mode == EXISTENCE and self.relation is not None:
            raise ValueError("existence feedback carries no relation")

    def to_record(self) -> dict:
        return {
            "subject": self.subject,
            "object": self.object,
            "relation": self.relation,
            "accepted": self.accepted,
            "timestamp": self.timestamp,
            "mode": self.mode,
            "link_relation": self.link_relation,
        }

    @staticmethod
    def from_record(record: dict) -> "FeedbackEvent":
        return FeedbackEvent(
            subject=record["subject"],
            object=record["object"],
            relation=record.get("relation"),
            accepted=bool(record["accepted"]),
            timestamp=int(record["timestamp"]),
            mode=record["mode"],
            link_relation=record.get("link_relation"),
        )


def apply_feedback(g: KnowledgeGraph, event: FeedbackEvent) -> None:
    """Mutate the graph per the user's verdict."""
    if event.accepted:
        if event.mode == SEMANTIC:
            g.add_link(event.subject, event.object, event.relation, event.timestamp)
        else:
            if event.link_relation is None:
                raise ValueError("existence acceptance needs a link_relation")
            g.add_link(event.subject, event.object, event.link_relation, event.timestamp)
    else:
        relation = event.relation if event.mode == SEMANTIC else None
        g.record_non_link(event.subject, event.object, relation, event.timestamp)


def replay_feedback(g: KnowledgeGraph, events) -> None:
    for event in events:
        apply_feedback(g, event)


class FeedbackLog:
    """Durable append-only event log bound to a bundle file."""

    def __init__(self, path: str):
        self.path = path
        if not os.path.exists(path):
            _write_lines(path, "feedback", [])

    def append(self, event: FeedbackEvent) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(canonical_line(event.to_record()) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def events(self) -> list[FeedbackEvent]:
        return [FeedbackEvent.from_record(r) for _ln, r in _read_lines(self.path, "feedback")]


# -- anonymization ---------------------------------------------------------------


@dataclass(frozen=True)
class AnonymizationPolicy:
    salt: bytes
    concepts_to_anonymize: frozenset[str]

    def pseudonym(self, text: str) -> str:
        digest = hmac.new(self.salt, text.encode("utf-8"), hashlib.sha256).hexdigest()
        return "x%s" % digest[:16]


def _anonymize(g: KnowledgeGraph, policy: AnonymizationPolicy) -> KnowledgeGraph:
    """Rewritten copy: ids, labels and attribute values of matching nodes
    are replaced by salted pseudonyms, structure and timestamps stay."""
    scope: set[str] = set()
    for concept in policy.concepts_to_anonymize:
        scope |= g.ontology.descendants_or_self(concept)
    mapping: dict[str, str] = {}
    clone = KnowledgeGraph(g.ontology.copy())
    for node_id in g.node_ids():
        node = g.node(node_id)
        if node.concept in scope:
            new_id = policy.pseudonym(node.id)
            attrs = {k: policy.pseudonym(v) for k, v in node.attributes.items()}
            clone.add_node(node.concept, policy.pseudonym(node.label), new_id, attrs)
            mapping[node_id] = new_id
        else:
            clone.add_node(node.concept, node.label, node.id, dict(node.attributes))
            mapping[node_id] = node.id
    for link in g.all_links():
        clone.add_link(
            mapping[link.subject], mapping[link.object], link.relation, link.timestamp
        )
    for non_link in g.all_non_links():
        clone.record_non_link(
            mapping[non_link.subject],
            mapping[non_link.object],
            non_link.relation,
            non_link.timestamp,
        )
    return clone


def _anonymize_events(events, g, policy: AnonymizationPolicy):
    scope: set[str] = set()
    for concept in policy.concepts_to_anonymize:
        scope |= g.ontology.descendants_or_self(concept)

    def map_id(node_id: str) -> str:
        if g.has_node(node_id) and g.concept_of(node_id) in scope:
            return policy.pseudonym(node_id)
        return node_id

    return [
        replace(e, subject=map_id(e.subject), object=map_id(e.object)) for e in events
    ]


# -- export / import ---------------------------------------------------------------


def _ordered_concepts(ontology: Ontology):
    # parents before children so the file loads in one pass
    seen: set[str] = set()
    order = []

    def visit(cid: str):
        if cid in seen:
            return
        parent = ontology.concepts[cid].parent
        if parent is not None:
            visit(parent)
        seen.add(cid)
        order.append(ontology.concepts[cid])

    for cid in sorted(ontology.concepts):
        visit(cid)
    return order


def export_bundle(
    g: KnowledgeGraph,
    path: str,
    policy: AnonymizationPolicy | None = None,
    weights_docs: dict | None = None,
    feedback_events: list[FeedbackEvent] | None = None,
    holdout=None,
    applied_events: int | None = None,
) -> None:
    """Write the graph (optionally anonymized) as a bundle directory.

    weights_docs maps mode -> (display_names, WeightVector, timestamp).
    applied_events records how many log events are already reflected in
    the graph files; loaders replay only the remainder. Defaults to all
    of them, which is correct for a snapshot export.
    """
    feedback_events = feedback_events or []
    if policy is not None:
        feedback_events = _anonymize_events(feedback_events, g, policy)
        g = _anonymize(g, policy)
    os.makedirs(path, exist_ok=True)

    concepts = [
        {"id": c.id, "label": c.label, "parent": c.parent}
        for c in _ordered_concepts(g.ontology)
    ]
    relations = [
        {
            "id": r.id,
            "label": r.label,
            "domain": r.domain,
            "range": r.range,
            "inverse_of": r.inverse_of,
            "allows_self_loops": r.allows_self_loops,
        }
        for r in (g.ontology.relations[k] for k in sorted(g.ontology.relations))
    ]
    _write_lines(
        os.path.join(path, ONTOLOGY_FILE),
        "ontology",
        [{"kind": "concept", **c} for c in concepts]
        + [{"kind": "relation", **r} for r in relations],
    )
    _write_lines(
        os.path.join(path, NODES_FILE),
        "nodes",
        (
            {
                "id": n.id,
                "concept": n.concept,
                "label": n.label,
                "attributes": dict(sorted(n.attributes.items())),
            }
            for n in (g.node(i) for i in g.node_ids())
        ),
    )
    _write_lines(
        os.path.join(path, LINKS_FILE),
        "links",
        (
            {
                "subject": l.subject,
                "object": l.object,
                "relation": l.relation,
                "timestamp": l.timestamp,
            }
            for l in g.all_links()
        ),
    )
    _write_lines(
        os.path.join(path, NONLINKS_FILE),
        "nonlinks",
        (
            {
                "subject": n.subject,
                "object": n.object,
                "relation": n.relation,
                "timestamp": n.timestamp,
            }
            for n in g.all_non_links()
        ),
    )
    for mode, filename in WEIGHTS_FILES.items():
        doc = (weights_docs or {}).get(mode)
        if doc is None:
            _write_lines(os.path.join(path, filename), "weights", [], mode=mode, timestamp=0)
        else:
            names, vector, timestamp = doc
            _write_lines(
                os.path.join(path, filename),
                "weights",
                (
                    {"metric": name, "weight": float(w)}
                    for name, w in zip(names, vector.values)
                ),
                mode=mode,
                timestamp=int(timestamp),
            )
    _write_lines(
        os.path.join(path, FEEDBACK_FILE),
        "feedback",
        (e.to_record() for e in feedback_events),
    )
    if holdout is not None:
        _write_lines(
            os.path.join(path, HOLDOUT_FILE),
            "holdout",
            (
                {
                    "subject": l.subject,
                    "object": l.object,
                    "relation": l.relation,
                    "timestamp": l.timestamp,
                }
                for l in holdout
            ),
        )
    manifest = {
        "format": "kglf/manifest",
        "version": FORMAT_VERSION,
        "applied_events": len(feedback_events) if applied_events is None else applied_events,
        "counts": {
            "concepts": len(concepts),
            "relations": len(relations),
            "nodes": g.node_count(),
            "links": g.link_count(),
            "nonlinks": len(g.all_non_links()),
        },
    }
    with open(os.path.join(path, MANIFEST_FILE), "w", encoding="utf-8") as fh:
        fh.write(canonical_line(manifest) + "\n")


def import_bundle(path: str) -> KnowledgeGraph:
    """Load a bundle directory back into a graph, validating as it goes."""
    if not os.path.isdir(path):
        raise BundleError("not a bundle directory: %s" % path)
    ontology = Ontology()
    deferred_inverses = []
    for lineno, record in _read_lines(os.path.join(path, ONTOLOGY_FILE), "ontology"):
        kind = record.get("kind")
        try:
            if kind == "concept":
                ontology.add_concept(record["id"], record["label"], record.get("parent"))
            elif kind == "relation":
                if record.get("inverse_of") is not None:
                    deferred_inverses.append((record["id"], record["inverse_of"]))
                ontology.add_relation(
                    record["id"],
                    record["label"],
                    record["domain"],
                    record["range"],
                    None,
                    bool(record.get("allows_self_loops", False)),
                )
            else:
                raise BundleError(
                    "%s:%d: unknown record kind %r" % (ONTOLOGY_FILE, lineno, kind)
                )
        except (OntologyError, KeyError) as exc:
            raise BundleError("%s:%d: %s" % (ONTOLOGY_FILE, lineno, exc)) from None
    for rel_id, inverse_id in deferred_inverses:
        try:
            ontology.declare_inverse(rel_id, inverse_id)
        except OntologyError as exc:
            raise BundleError("%s: %s" % (ONTOLOGY_FILE, exc)) from None

    g = KnowledgeGraph(ontology)
    for lineno, record in _read_lines(os.path.join(path, NODES_FILE), "nodes"):
        try:
            g.add_node(
                record["concept"],
                record["label"],
                record["id"],
                record.get("attributes") or {},
            )
        except (GraphError, KeyError) as exc:
            raise BundleError("%s:%d: %s" % (NODES_FILE, lineno, exc)) from None
    for lineno, record in _read_lines(os.path.join(path, LINKS_FILE), "links"):
        try:
            g.add_link(
                record["subject"], record["object"], record["relation"], int(record["timestamp"])
            )
        except (GraphError, KeyError) as exc:
            raise BundleError("%s:%d: %s" % (LINKS_FILE, lineno, exc)) from None
    for lineno, record in _read_lines(os.path.join(path, NONLINKS_FILE), "nonlinks"):
        try:
            g.record_non_link(
                record["subject"],
                record["object"],
                record.get("relation"),
                int(record["timestamp"]),
            )
        except (GraphError, KeyError) as exc:
            raise BundleError("%s:%d: %s" % (NONLINKS_FILE, lineno, exc)) from None

    manifest_path = os.path.join(path, MANIFEST_FILE)
    if os.path.exists(manifest_path):
        with open(manifest_path, "r", encoding="utf-8") as fh:
            try:
                manifest = json.load(fh)
            except json.JSONDecodeError as exc:
                raise BundleError("%s: invalid manifest: %s" % (MANIFEST_FILE, exc.msg)) from None
        counts = manifest.get("counts", {})
        actual = {
            "concepts": len(ontology.concepts),
            "relations": len(ontology.relations),
            "nodes": g.node_count(),
            "links": g.link_count(),
            "nonlinks": len(g.all_non_links()),
        }
        for key, expected in counts.items():
            if key in actual and actual[key] != expected:
                raise BundleError(
                    "%s: %s count is %d, manifest says %d"
                    % (MANIFEST_FILE, key, actual[key], expected)
                )
    return g


def save_weights(path: str, mode: str, names, vector: WeightVector, timestamp: int) -> None:
    """Rewrite one mode's weights file in place."""
    _write_lines(
        os.path.join(path, WEIGHTS_FILES[mode]),
        "weights",
        ({"metric": n, "weight": float(w)} for n, w in zip(names, vector.values)),
        mode=mode,
        timestamp=int(timestamp),
    )


def load_manifest(path: str) -> dict:
    filepath = os.path.join(path, MANIFEST_FILE)
    if not os.path.exists(filepath):
        return {}
    with open(filepath, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise BundleError("%s: invalid manifest: %s" % (MANIFEST_FILE, exc.msg)) from None


def load_weights(path: str, mode: str):
    """Return (names, WeightVector, timestamp) or None when never trained."""
    filepath = os.path.join(path, WEIGHTS_FILES[mode])
    if not os.path.exists(filepath):
        return None
    names, values = [], []
    timestamp = 0
    with open(filepath, "r", encoding="utf-8") as fh:
        first = fh.readline()
        header = json.loads(first)
        timestamp = int(header.get("timestamp", 0))
    for _lineno, record in _read_lines(filepath, "weights"):
        names.append(record["metric"])
        values.append(float(record["weight"]))
    if not names:
        return None
    return names, WeightVector(values), timestamp


def load_feedback(path: str) -> list[FeedbackEvent]:
    filepath = os.path.join(path, FEEDBACK_FILE)
    if not os.path.exists(filepath):
        return []
    return [FeedbackEvent.from_record(r) for _ln, r in _read_lines(filepath, "feedback")]


def load_holdout(path: str):
    """Hidden link list for synthetic bundles, [] when absent."""
    filepath = os.path.join(path, HOLDOUT_FILE)
    if not os.path.exists(filepath):
        return []
    from .graph import Link

    return [
        Link(r["subject"], r["object"], r["relation"], int(r["timestamp"]))
        for _ln, r in _read_lines(filepath, "holdout")
    ]


def bundle_to_zip_bytes(path: str) -> bytes:
    """Pack a bundle directory into an uncompressed zip stream."""
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_STORED) as zf:
        for name in sorted(os.listdir(path)):
            full = os.path.join(path, name)
            if os.path.isfile(full):
                zf.write(full, arcname=name)
    return buffer.getvalue()
