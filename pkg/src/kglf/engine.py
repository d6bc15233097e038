"""Live engine behind the HTTP surface.

Owns the graph, the per-mode weight vectors, the feedback log and the
training jobs. Request handling is concurrent: reads share the graph,
mutations serialize through a reader-writer lock, training runs on a
copied snapshot and swaps weights atomically when it finishes.

Persistence model: a bundle directory holds the base graph files plus an
append-only feedback log. The engine never rewrites the base files; on
startup it loads them and replays whatever tail of the log the manifest
says is not yet baked in.
"""

from __future__ import annotations

import logging
import os
import tempfile
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

from .candidates import existence_candidates, semantic_candidates
from .genetic import GPConfig, GPRunReport, run_gp
from .graph import DuplicateError, GraphError, KnowledgeGraph, SchemaViolation, UnknownIdError
from .metrics import EXISTENCE, SEMANTIC, MetricEnsemble, default_ensemble
from .predictor import (
    GENETIC,
    Recommendation,
    interleave_for_review,
    predict_existence,
    predict_type,
)
from .storage import (
    FEEDBACK_FILE,
    AnonymizationPolicy,
    FeedbackEvent,
    FeedbackLog,
    apply_feedback,
    bundle_to_zip_bytes,
    export_bundle,
    import_bundle,
    load_feedback,
    load_manifest,
    load_weights,
    replay_feedback,
    save_weights,
)
from .training import GOLD, SILVER, build_training_set
from .weights import WeightVector

log = logging.getLogger("kglf.engine")

MODES = (EXISTENCE, SEMANTIC)

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


class EngineError(Exception):
    pass


class ConflictError(EngineError):
    """State already contradicts the request (HTTP 409)."""


class InvalidRequest(EngineError):
    """Ids, schema or payload are unusable (HTTP 422)."""


class _RWLock:
    """Many readers or one writer. Desk scale, no fairness guarantees."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False

    @contextmanager
    def read(self):
        with self._cond:
            while self._writing:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self):
        with self._cond:
            while self._writing or self._readers:
                self._cond.wait()
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


@dataclass(frozen=True)
class EngineConfig:
    candidate_size: int = 30
    retrain_every: int = 200
    train_size: int = 40
    seed: int = 0
    anonymization_salt: bytes = b"local-export"
    gp: GPConfig = GPConfig()
    # auto-retrains block the triggering feedback call instead of running
    # in a thread; the eval harness needs that for reproducibility
    sync_auto_train: bool = False
    # control knob: rank candidates with every score forced to zero
    scoring_disabled: bool = False


@dataclass
class TrainJob:
    id: str
    mode: str
    standard: str
    status: str = QUEUED
    report: GPRunReport | None = None
    error: str | None = None
    created: float = field(default_factory=time.time)
    finished: float | None = None


def _now_ms() -> int:
    return int(time.time() * 1000)


class Engine:
    def __init__(
        self,
        graph: KnowledgeGraph | None = None,
        bundle_dir: str | None = None,
        config: EngineConfig | None = None,
    ):
        if graph is None and bundle_dir is None:
            raise ValueError("need a graph or a bundle directory")
        self.config = config or EngineConfig()
        self.bundle_dir = bundle_dir

        events: list[FeedbackEvent] = []
        weights_loaded: dict = {}
        if graph is None:
            graph = import_bundle(bundle_dir)
            events = load_feedback(bundle_dir)
            applied = int(load_manifest(bundle_dir).get("applied_events", len(events)))
            replay_feedback(graph, events[applied:])
            for mode in MODES:
                weights_loaded[mode] = load_weights(bundle_dir, mode)
        self._g = graph

        self._instances = {m: default_ensemble(m).instances for m in MODES}
        self._names = {
            m: [inst.display_name for inst in self._instances[m]] for m in MODES
        }
        self._weights: dict[str, WeightVector] = {}
        self._weights_ts: dict[str, int] = {}
        for mode in MODES:
            doc = weights_loaded.get(mode)
            if doc is not None and doc[0] == self._names[mode]:
                self._weights[mode] = doc[1].normalized()
                self._weights_ts[mode] = doc[2]
            else:
                self._weights[mode] = WeightVector.uniform(len(self._instances[mode]))
                self._weights_ts[mode] = 0

        self._lock = _RWLock()
        self._log = FeedbackLog(os.path.join(bundle_dir, FEEDBACK_FILE)) if bundle_dir else None
        self._events = events
        self._accepted_triplets: set[tuple[str, str, str]] = set()
        self._accept_count = 0
        self._reject_count = 0
        for event in events:
            self._tally(event)

        self._jobs: dict[str, TrainJob] = {}
        self._running: dict[str, str] = {}
        self._jobs_lock = threading.Lock()
        self._job_seq = 0
        self._seq_lock = threading.Lock()
        self._request_seq = 0

    # -- bookkeeping ------------------------------------------------------------

    def _tally(self, event: FeedbackEvent) -> None:
        if event.accepted:
            self._accept_count += 1
            relation = event.relation if event.mode == SEMANTIC else event.link_relation
            if relation is not None:
                self._accepted_triplets.add((event.subject, event.object, relation))
        else:
            self._reject_count += 1

    def _next_seed(self) -> int:
        with self._seq_lock:
            n = self._request_seq
            self._request_seq += 1
        return (self.config.seed * 1_000_003 + n * 7919 + 1) % (2**31 - 1)

    def ensemble(self, mode: str) -> MetricEnsemble:
        if mode not in MODES:
            raise ValueError("unknown mode: %s" % mode)
        return MetricEnsemble(mode, self._instances[mode], self._weights[mode])

    # -- recommendations ---------------------------------------------------------

    def recommend(self, node_id: str, mode: str, k: int, interleave: bool = False):
        if mode not in MODES:
            raise ValueError("unknown mode: %s" % mode)
        if k < 0:
            raise ValueError("k must be non-negative")
        seed = self._next_seed()
        with self._lock.read():
            if not self._g.has_node(node_id):
                raise UnknownIdError("unknown node: %s" % node_id)
            if k == 0:
                return []
            ens = self.ensemble(mode)
            size = self.config.candidate_size
            if self.config.scoring_disabled:
                genetic = self._unscored(node_id, mode, k, size, seed)
            elif mode == EXISTENCE:
                genetic = predict_existence(self._g, node_id, k, ens, size, seed)
            else:
                genetic = predict_type(self._g, node_id, k, ens, size, seed)
            if not interleave or k < 3:
                return genetic
            if mode == EXISTENCE:
                pool = existence_candidates(self._g, node_id, size, seed + 1)
            else:
                pool = semantic_candidates(self._g, node_id, size, seed + 1)
            try:
                mixed = interleave_for_review(self._g, ens, genetic, pool, k, seed + 2)
            except ValueError:
                # both sources empty: nothing reviewable around this node
                return []
            if self.config.scoring_disabled:
                # the control arm must stay blind on both sources
                mixed = [replace(r, score=0.0) for r in mixed]
            return mixed

    def _unscored(self, node_id: str, mode: str, k: int, size: int, seed: int):
        """Signal-free ranking: candidates in id order, every score zero."""
        if mode == EXISTENCE:
            cands = existence_candidates(self._g, node_id, size, seed)
            picks = sorted(cands.candidates)[:k]
            return [
                Recommendation(node_id, v, None, 0.0, GENETIC, i + 1)
                for i, v in enumerate(picks)
            ]
        cands = semantic_candidates(self._g, node_id, size, seed)
        triplets = sorted(c.as_triplet(node_id) for c in cands.candidates)[:k]
        return [
            Recommendation(s, o, j, 0.0, GENETIC, i + 1)
            for i, (s, o, j) in enumerate(triplets)
        ]

    def relation_options(self, subject: str, obj: str) -> list[dict]:
        """Postable (relation, orientation) choices for an existence pair."""
        options = []
        with self._lock.read():
            cs = self._g.concept_of(subject)
            co = self._g.concept_of(obj)
            for s, o, c_s, c_o in ((subject, obj, cs, co), (obj, subject, co, cs)):
                for rid in sorted(self._g.ontology.relations):
                    if not self._g.ontology.compatible(rid, c_s, c_o):
                        continue
                    if s == o and not self._g.ontology.relations[rid].allows_self_loops:
                        continue
                    if self._g.has_link(s, o, rid):
                        continue
                    options.append({"subject": s, "object": o, "relation": rid})
        return options

    # -- feedback ---------------------------------------------------------------

    def default_link_relation(self, subject: str, obj: str) -> str | None:
        """Alphabetically first compatible unrealized relation for s -> o."""
        cs = self._g.concept_of(subject)
        co = self._g.concept_of(obj)
        for rid in sorted(self._g.ontology.relations):
            if self._g.ontology.compatible(rid, cs, co) and not self._g.has_link(
                subject, obj, rid
            ):
                return rid
        return None

    def feedback(self, event: FeedbackEvent) -> FeedbackEvent:
        """Apply one verdict. Returns the event as recorded (existence
        acceptances get their link_relation defaulted when absent)."""
        with self._lock.write():
            for node_id in (event.subject, event.object):
                if not self._g.has_node(node_id):
                    raise InvalidRequest("unknown node: %s" % node_id)
            if event.mode == SEMANTIC and event.relation not in self._g.ontology.relations:
                raise InvalidRequest("unknown relation: %s" % event.relation)
            if event.mode == EXISTENCE and event.accepted and event.link_relation is None:
                default = self.default_link_relation(event.subject, event.object)
                if default is None:
                    raise InvalidRequest(
                        "no compatible relation for %s -> %s" % (event.subject, event.object)
                    )
                event = replace(event, link_relation=default)
            try:
                apply_feedback(self._g, event)
            except DuplicateError as exc:
                raise ConflictError(str(exc)) from None
            except SchemaViolation as exc:
                raise InvalidRequest(str(exc)) from None
            except GraphError as exc:
                raise ConflictError(str(exc)) from None
            except ValueError as exc:
                raise InvalidRequest(str(exc)) from None
            if self._log is not None:
                self._log.append(event)
            self._events.append(event)
            self._tally(event)
            total = len(self._events)
        if self.config.retrain_every > 0 and total % self.config.retrain_every == 0:
            try:
                job = self.train(event.mode, standard=None, wait=self.config.sync_auto_train)
                log.info("feedback #%d enqueued train job %s", total, job.id)
            except (ConflictError, InvalidRequest) as exc:
                log.warning("feedback #%d: auto-train skipped: %s", total, exc)
        return event

    def feedback_totals(self) -> dict:
        with self._lock.read():
            return {
                "total": len(self._events),
                "accepted": self._accept_count,
                "rejected": self._reject_count,
            }

    # -- weights ------------------------------------------------------------------

    def weights(self, mode: str):
        if mode not in MODES:
            raise ValueError("unknown mode: %s" % mode)
        with self._lock.read():
            return list(self._names[mode]), self._weights[mode], self._weights_ts[mode]

    def set_weights(self, mode: str, mapping: dict) -> WeightVector:
        if mode not in MODES:
            raise ValueError("unknown mode: %s" % mode)
        names = self._names[mode]
        for name, value in mapping.items():
            if name not in names:
                raise ValueError("unknown metric name: %s" % name)
            if float(value) < 0:
                raise ValueError("negative weight for %s" % name)
        raw = WeightVector.from_mapping(mapping, names)
        if sum(raw.values) <= 0:
            raise ValueError("weights sum to zero")
        vector = raw.normalized()
        self._swap_weights(mode, vector)
        return vector

    def _swap_weights(self, mode: str, vector: WeightVector) -> None:
        with self._lock.write():
            self._weights[mode] = vector
            self._weights_ts[mode] = _now_ms()
            if self.bundle_dir is not None:
                save_weights(
                    self.bundle_dir, mode, self._names[mode], vector, self._weights_ts[mode]
                )

    # -- training ------------------------------------------------------------------

    def _gold_pool(self, g: KnowledgeGraph, mode: str) -> int:
        non_links = g.all_non_links()
        if mode == EXISTENCE:
            return sum(1 for n in non_links if n.relation is None)
        return sum(1 for n in non_links if n.relation is not None)

    def _positive_pool(self, g: KnowledgeGraph, mode: str) -> int:
        if mode == EXISTENCE:
            return len({(l.subject, l.object) for l in g.all_links()})
        return g.link_count()

    def train(self, mode: str, standard: str | None = None, wait: bool = False) -> TrainJob:
        """Start (or run, when wait=True) a training job for one mode.

        standard None means auto: gold when enough rejections exist to fill
        the negative half, otherwise silver with a logged downgrade.
        """
        if mode not in MODES:
            raise ValueError("unknown mode: %s" % mode)
        if standard not in (None, "auto", GOLD, SILVER):
            raise ValueError("unknown standard: %s" % standard)
        with self._lock.read():
            snapshot = self._g.copy()
            accepted = set(self._accepted_triplets)
        positives = self._positive_pool(snapshot, mode)
        gold_pool = self._gold_pool(snapshot, mode)
        if standard == GOLD and gold_pool == 0:
            raise InvalidRequest("gold standard requires recorded rejections")
        if standard in (None, "auto"):
            if gold_pool >= self.config.train_size // 2:
                standard = GOLD
            else:
                standard = SILVER
                log.info("train %s: auto standard downgraded to silver "
                         "(%d gold negatives on hand)", mode, gold_pool)
        size = min(self.config.train_size, 2 * positives)
        if standard == GOLD:
            size = min(size, 2 * gold_pool)
        size -= size % 2
        if size < 2:
            raise InvalidRequest("not enough training data for mode %s" % mode)

        seed = self._next_seed()
        with self._jobs_lock:
            if mode in self._running:
                raise ConflictError("a %s training job is already running" % mode)
            self._job_seq += 1
            job = TrainJob("t-%04d" % self._job_seq, mode, standard)
            self._jobs[job.id] = job
            self._running[mode] = job.id

        def run():
            job.status = RUNNING
            try:
                training_set = build_training_set(
                    snapshot, mode, standard, size, seed, accepted=accepted
                )
                ens = MetricEnsemble(mode, self._instances[mode])
                gp_config = replace(self.config.gp, rng_seed=seed)
                report = run_gp(snapshot, ens, training_set, gp_config)
                self._swap_weights(mode, report.best_weights)
                job.report = report
                job.status = DONE
            except Exception as exc:  # noqa: BLE001 - job boundary
                job.error = str(exc)
                job.status = FAILED
                log.exception("train job %s failed", job.id)
            finally:
                job.finished = time.time()
                with self._jobs_lock:
                    self._running.pop(mode, None)

        if wait:
            run()
        else:
            threading.Thread(target=run, name="kglf-train-%s" % job.id, daemon=True).start()
        return job

    def jobs(self) -> list[TrainJob]:
        with self._jobs_lock:
            return [self._jobs[k] for k in sorted(self._jobs)]

    def job(self, job_id: str) -> TrainJob:
        try:
            return self._jobs[job_id]
        except KeyError:
            raise UnknownIdError("unknown train job: %s" % job_id) from None

    # -- queries and export -----------------------------------------------------------

    def summary(self) -> dict:
        with self._lock.read():
            per_relation = {
                rid: self._g.link_count(rid) for rid in sorted(self._g.ontology.relations)
            }
            return {
                "nodes": self._g.node_count(),
                "links": self._g.link_count(),
                "non_links": len(self._g.all_non_links()),
                "relations": per_relation,
                "feedback": {
                    "total": len(self._events),
                    "accepted": self._accept_count,
                    "rejected": self._reject_count,
                },
            }

    def nodes_of_concept(self, concept: str | None = None) -> list[str]:
        with self._lock.read():
            if concept is None:
                return self._g.node_ids()
            return sorted(self._g.nodes_of_concept(concept))

    def node_payload(self, node_id: str) -> dict:
        with self._lock.read():
            node = self._g.node(node_id)
            return {
                "id": node.id,
                "label": node.label,
                "concept": node.concept,
                "attributes": dict(node.attributes),
                "degree": self._g.degree(node_id),
            }

    def export_zip(self, anonymize: bool = False) -> bytes:
        policy = None
        if anonymize:
            policy = AnonymizationPolicy(
                self.config.anonymization_salt,
                frozenset(self._g.ontology.concepts),
            )
        with self._lock.read():
            weights_docs = {
                m: (self._names[m], self._weights[m], self._weights_ts[m]) for m in MODES
            }
            with tempfile.TemporaryDirectory(prefix="kglf-export-") as tmp:
                export_bundle(
                    self._g,
                    tmp,
                    policy=policy,
                    weights_docs=weights_docs,
                    feedback_events=list(self._events),
                    applied_events=len(self._events),
                )
                return bundle_to_zip_bytes(tmp)

    def graph_snapshot(self) -> KnowledgeGraph:
        with self._lock.read():
            return self._g.copy()
