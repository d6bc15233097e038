"""Training-set construction and fitness evaluation.

Sets are exactly half positive, half negative. Positives are sampled from
the realized links. Negatives come either from recorded rejections (gold
standard) or from sampled unobserved triplets (silver standard); a gold
set never contains a silver negative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .graph import KnowledgeGraph, UnknownIdError
from .metrics import EXISTENCE, SEMANTIC, MetricEnsemble
from .weights import WeightVector

OBSERVED_LINK = "observed_link"
USER_ACCEPT = "user_accept"
USER_REJECT = "user_reject"
SILVER_NEGATIVE = "silver_negative"

GOLD = "gold"
SILVER = "silver"


class TrainingDataError(Exception):
    """Not enough positives or negatives for the requested standard."""


@dataclass(frozen=True)
class TrainingInstance:
    subject: str
    object: str
    relation: str | None  # present iff semantic mode
    label: int
    provenance: str

    def __post_init__(self):
        if self.label == 1 and self.provenance not in (OBSERVED_LINK, USER_ACCEPT):
            raise ValueError("positive instances come from links or acceptances")
        if self.label == 0 and self.provenance not in (USER_REJECT, SILVER_NEGATIVE):
            raise ValueError("negative instances come from rejections or silver sampling")


@dataclass
class TrainingSet:
    mode: str
    standard: str
    instances: list[TrainingInstance] = field(default_factory=list)

    def labels(self) -> np.ndarray:
        return np.array([inst.label for inst in self.instances], dtype=np.float64)


def _sample(rng: random.Random, pool: list, k: int) -> list:
    return rng.sample(pool, k)


def build_training_set(
    g: KnowledgeGraph,
    mode: str,
    standard: str,
    size: int,
    rng_seed: int,
    accepted: set[tuple[str, str, str]] | None = None,
) -> TrainingSet:
    """Sample a 50/50 labeled set from the graph.

    `accepted` marks triplets that entered the graph through user feedback
    so their provenance reads user_accept instead of observed_link.
    """
    if size % 2 != 0:
        raise TrainingDataError("training set size must be even")
    if mode not in (EXISTENCE, SEMANTIC):
        raise TrainingDataError("unknown mode: %s" % mode)
    if standard not in (GOLD, SILVER):
        raise TrainingDataError("unknown standard: %s" % standard)
    result = TrainingSet(mode, standard)
    if size == 0:
        return result
    half = size // 2
    rng = random.Random(rng_seed)
    accepted = accepted or set()

    links = g.all_links()
    if mode == EXISTENCE:
        # one positive per linked ordered pair, relation left unspecified
        pairs = sorted({(l.subject, l.object) for l in links})
        if len(pairs) < half:
            raise TrainingDataError(
                "need %d positive pairs, graph has %d" % (half, len(pairs))
            )
        accepted_pairs = {(s, o) for (s, o, _j) in accepted}
        for s, o in _sample(rng, pairs, half):
            prov = USER_ACCEPT if (s, o) in accepted_pairs else OBSERVED_LINK
            result.instances.append(TrainingInstance(s, o, None, 1, prov))
    else:
        triplets = [(l.subject, l.object, l.relation) for l in links]
        if len(triplets) < half:
            raise TrainingDataError(
                "need %d positive triplets, graph has %d" % (half, len(triplets))
            )
        for s, o, j in _sample(rng, triplets, half):
            prov = USER_ACCEPT if (s, o, j) in accepted else OBSERVED_LINK
            result.instances.append(TrainingInstance(s, o, j, 1, prov))

    if standard == GOLD:
        if mode == EXISTENCE:
            pool = [(n.subject, n.object, None) for n in g.all_non_links() if n.relation is None]
        else:
            pool = [
                (n.subject, n.object, n.relation)
                for n in g.all_non_links()
                if n.relation is not None
            ]
        if len(pool) < half:
            raise TrainingDataError(
                "gold standard needs %d recorded rejections, found %d" % (half, len(pool))
            )
        for s, o, j in _sample(rng, pool, half):
            result.instances.append(TrainingInstance(s, o, j, 0, USER_REJECT))
    else:
        for s, o, j in _silver_negatives(g, mode, half, rng):
            result.instances.append(TrainingInstance(s, o, j, 0, SILVER_NEGATIVE))
    return result


def _silver_negatives(g: KnowledgeGraph, mode: str, count: int, rng: random.Random):
    """Uniform unobserved candidates. Rejection-sampled with an enumeration
    fallback so small graphs still terminate deterministically."""
    nodes = g.node_ids()
    relations = sorted(g.ontology.relations)
    chosen: set[tuple] = set()

    def valid(s: str, o: str, j: str | None) -> bool:
        if s == o:
            return False
        if mode == EXISTENCE:
            return not g.has_link_between(s, o) and not g.has_non_link(s, o, None)
        return (
            g.ontology.compatible(j, g.concept_of(s), g.concept_of(o))
            and not g.has_link(s, o, j)
            and not g.has_non_link(s, o, j)
        )

    attempts = 0
    max_attempts = max(200, count * 60)
    while len(chosen) < count and attempts < max_attempts:
        attempts += 1
        s = nodes[int(rng.random() * len(nodes))]
        o = nodes[int(rng.random() * len(nodes))]
        j = None if mode == EXISTENCE else relations[int(rng.random() * len(relations))]
        if (s, o, j) not in chosen and valid(s, o, j):
            chosen.add((s, o, j))
    if len(chosen) < count:
        # sparse option space, enumerate what is left and sample exactly
        space = []
        for s in nodes:
            for o in nodes:
                if mode == EXISTENCE:
                    if (s, o, None) not in chosen and valid(s, o, None):
                        space.append((s, o, None))
                else:
                    for j in relations:
                        if (s, o, j) not in chosen and valid(s, o, j):
                            space.append((s, o, j))
        missing = count - len(chosen)
        if len(space) < missing:
            raise TrainingDataError(
                "graph admits only %d unobserved negatives, need %d"
                % (len(chosen) + len(space), count)
            )
        chosen.update(_sample(rng, space, missing))
    return sorted(chosen, key=lambda t: (t[0], t[1], t[2] or ""))


def _masked_links(g: KnowledgeGraph, inst: TrainingInstance, mode: str):
    """Links hidden while scoring a positive, so the instance looks the way
    a candidate would. Scoring positives with their own link in place leaks
    adjacency into every metric (path length 1, each other's neighborhoods)
    and the optimizer latches onto that instead of anything predictive."""
    if inst.label != 1:
        return []
    if mode == EXISTENCE:
        out = []
        for s, o in ((inst.subject, inst.object), (inst.object, inst.subject)):
            for j in g.relations_between(s, o):
                out.append(g.get_link(s, o, j))
        return out
    try:
        return [g.get_link(inst.subject, inst.object, inst.relation)]
    except UnknownIdError:
        return []


def score_matrix(
    g: KnowledgeGraph, ensemble: MetricEnsemble, training_set: TrainingSet
) -> np.ndarray:
    """Per-instance metric scores, shape (instances, metrics).

    The graph is mutated while a positive row is scored (its links come
    out) and restored before the function returns.
    """
    if ensemble.mode != training_set.mode:
        raise TrainingDataError("ensemble mode does not match training set mode")
    rows = []
    for inst in training_set.instances:
        j = inst.relation if training_set.mode == SEMANTIC else None
        masked = _masked_links(g, inst, training_set.mode)
        for link in masked:
            g.remove_link(link.subject, link.object, link.relation)
        try:
            rows.append(
                [m.evaluate(g, inst.subject, inst.object, j) for m in ensemble.instances]
            )
        finally:
            for link in masked:
                g.add_link(link.subject, link.object, link.relation, link.timestamp)
    return np.array(rows, dtype=np.float64)


def fitness(
    weights: WeightVector, training_set: TrainingSet, ensemble: MetricEnsemble,
    g: KnowledgeGraph | None = None, scores: np.ndarray | None = None,
) -> float:
    """Mean squared error of the weighted scores against the labels."""
    if len(weights) != len(ensemble.instances):
        raise TrainingDataError("weight vector length does not match ensemble")
    if scores is None:
        if g is None:
            raise TrainingDataError("pass a graph or a precomputed score matrix")
        scores = score_matrix(g, ensemble, training_set)
    labels = training_set.labels()
    if scores.shape[0] == 0:
        return 0.0
    predicted = scores @ weights.values
    return float(np.mean((predicted - labels) ** 2))
