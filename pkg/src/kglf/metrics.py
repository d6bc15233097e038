"""Similarity metric catalog and the weighted linear combination.

Every metric family maps a node pair (plus a candidate relation for the
semantic families) to a score in [0, 1]. Undefined ratios evaluate to 0 by
convention, never an error, so ensembles stay total functions. Families
are enumerable under stable string ids which double as the display names
used in weight documents and the HTTP API; one family can appear several
times with different parameters (the catalog ships euler_time at one-day
and half-day discounting).

Applicability follows the metric's information needs: pair-overlap, path and
time families work in both prediction modes, the concept/relation-context
families only rank existence candidates, and the relation-share families
only rank semantic candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import KnowledgeGraph
from .weights import WeightVector

ONE_DAY_MS = 86_400_000
HALF_DAY_MS = 43_200_000

EXISTENCE = "existence"
SEMANTIC = "semantic"
BOTH = "both"

OVERLAP_KINDS = (
    "jaccard",
    "adamic_adar",
    "resource_allocation",
    "hub_promoted",
    "hub_depressed",
    "lhn",
    "salton",
    "sorensen",
)


class MetricError(Exception):
    """Bad metric arguments: unknown family, params out of range, mode mismatch."""


# -- pair overlap families ---------------------------------------------------


def neighborhood_overlap(g: KnowledgeGraph, kind: str, u: str, v: str) -> float:
    if kind not in OVERLAP_KINDS:
        raise MetricError("unknown overlap kind: %s" % kind)
    if u == v:
        raise MetricError("overlap metrics require distinct nodes")
    a = g.neighbors(u)
    b = g.neighbors(v)
    common = a & b
    n = len(common)
    if n == 0:
        return 0.0
    ku, kv = len(a), len(b)
    if kind == "jaccard":
        return n / (ku + kv - n)
    if kind == "hub_promoted":
        return n / min(ku, kv)
    if kind == "hub_depressed":
        return n / max(ku, kv)
    if kind == "lhn":
        return n / (ku * kv)
    if kind == "salton":
        return n / math.sqrt(ku * kv)
    if kind == "sorensen":
        return 2.0 * n / (ku + kv)
    if kind == "adamic_adar":
        # common neighbors always have degree >= 2 under the undirected
        # convention, so log is positive and each term is <= 1/log 2
        total = sum(1.0 / math.log(g.degree(z)) for z in common)
        return total * math.log(2.0) / n
    # resource_allocation, each term <= 1/2
    total = sum(1.0 / g.degree(z) for z in common)
    return total * 2.0 / n


def shortest_path_similarity(g: KnowledgeGraph, u: str, v: str, cap: int = 5) -> float:
    if u == v:
        raise MetricError("shortest_path_similarity requires distinct nodes")
    length = g.shortest_path_len(u, v, cap)
    if length is None:
        return 0.0
    return max(0.0, 1.0 - (length - 1) / cap)


def time_score(
    g: KnowledgeGraph, u: str, v: str, beta: float = 0.5, mm: float = ONE_DAY_MS
) -> float:
    """Temporal co-occurrence score over common subject-side neighbors.

    For each common neighbor c the harmonic mean of the link-type
    multiplicities (links between c and either endpoint, both directions)
    is discounted by 1/max(multiplicities), aged by beta per mm-sized time
    step since the graph's latest timestamp, and divided by the stepped gap
    between the two co-occurrence times. The per-neighbor mean keeps the
    value inside [0, 1].
    """
    if u == v:
        raise MetricError("time_score requires distinct nodes")
    common = g.out_neighbors(u) & g.out_neighbors(v)
    if not common:
        return 0.0
    t_latest = g.latest_timestamp()
    total = 0.0
    for c in common:
        tu = g.pair_latest_ts(u, c)
        tv = g.pair_latest_ts(v, c)
        mu = len(g.relations_between_any(u, c))
        mv = len(g.relations_between_any(v, c))
        harmonic = 2.0 / (1.0 / mu + 1.0 / mv)
        damp = 1.0 / max(mu, mv)
        k = math.floor((t_latest - min(tu, tv)) / mm)
        denom = math.floor(abs(tu - tv) / mm) + 1
        total += harmonic * damp * beta**k / denom
    return total / len(common)


def euler_time(g: KnowledgeGraph, u: str, v: str, d: float) -> float:
    """Recency of the candidate node, e^(-age/d) with age 0 for the freshest."""
    last = g.last_link_ts(v)
    if last is None:
        return 0.0
    return math.exp(-(g.latest_timestamp() - last) / d)


def focci_distance(g: KnowledgeGraph, u: str, v: str) -> float:
    if u == v:
        raise MetricError("focci_distance requires distinct nodes")
    shared = g.active_relations(u) & g.active_relations(v)
    best = 0.0
    for j in shared:
        for z in g.neighbors_by_relation(u, j) & g.neighbors_by_relation(v, j):
            inv = g.inverse_neighbors(z, j)
            if inv:
                best = max(best, 1.0 / len(inv))
    return best


def conditional_probability(g: KnowledgeGraph, j: str) -> float:
    """Best overlap of j's unordered pair set with any other relation's."""
    pj = g.unordered_pairs_of_relation(j)
    if not pj:
        return 0.0
    best = 0.0
    for i in g.ontology.relations:
        if i == j:
            continue
        pi = g.unordered_pairs_of_relation(i)
        if pi:
            best = max(best, len(pj & pi) / len(pj))
    return best


def taxonomy_similarity(g: KnowledgeGraph, u: str, v: str) -> float:
    au = g.concept_ancestors(g.concept_of(u))
    av = g.concept_ancestors(g.concept_of(v))
    union = len(au | av)
    if union == 0:
        return 0.0
    return len(au & av) / union


def _taxonomy_concepts(g: KnowledgeGraph, cu: str, cv: str) -> float:
    au = g.concept_ancestors(cu)
    av = g.concept_ancestors(cv)
    union = len(au | av)
    if union == 0:
        return 0.0
    return len(au & av) / union


def _best_match_mean(g: KnowledgeGraph, xs: set[str], ys: set[str]) -> float:
    if not xs or not ys:
        return 0.0
    y_concepts = [g.concept_of(y) for y in ys]
    total = 0.0
    for x in xs:
        cx = g.concept_of(x)
        total += max(_taxonomy_concepts(g, cx, cy) for cy in y_concepts)
    return total / len(xs)


def relational_similarity(g: KnowledgeGraph, u: str, v: str) -> float:
    """Mean over shared relation contexts of the best taxonomy match.

    A shared context is a relation in which both nodes act as subjects
    (compared over their object sets) or both act as objects (compared
    over their subject sets).
    """
    contexts = []
    for j in sorted(g.active_relations(u) & g.active_relations(v)):
        contexts.append(_best_match_mean(g, g.out_neighbors(u, j), g.out_neighbors(v, j)))
    for j in sorted(g.incoming_relations(u) & g.incoming_relations(v)):
        contexts.append(_best_match_mean(g, g.in_neighbors(u, j), g.in_neighbors(v, j)))
    if not contexts:
        return 0.0
    return sum(contexts) / len(contexts)


def arr(g: KnowledgeGraph, u: str, v: str) -> float:
    if u == v:
        raise MetricError("arr requires distinct nodes")
    ju = g.active_relations(u)
    if not ju:
        return 0.0
    return len(ju & g.active_relations(v)) / len(ju)


def ao_relation(g: KnowledgeGraph, u: str, v: str, variant: str = "aor") -> float:
    if u == v:
        raise MetricError("ao_relation requires distinct nodes")
    if variant == "aor":
        neighborhood = g.neighbors(v)
        if not neighborhood:
            return 0.0
        cu = g.concept_of(u)
        hits = sum(1 for z in neighborhood if g.concept_of(z) == cu)
        return hits / len(neighborhood)
    if variant == "aorr":
        return ao_relation(g, v, u, "aor")
    if variant == "aorc":
        return (ao_relation(g, u, v, "aor") + ao_relation(g, v, u, "aor")) / 2.0
    raise MetricError("unknown ao_relation variant: %s" % variant)


def dimension_connectivity(g: KnowledgeGraph, kind: str, j: str) -> float:
    if kind == "node":
        n = g.node_count()
        if n == 0:
            return 0.0
        return len(g.subjects_of_relation(j)) / n
    if kind == "edge":
        e = g.link_count()
        if e == 0:
            return 0.0
        return g.link_count(j) / e
    raise MetricError("unknown dimension_connectivity kind: %s" % kind)


def _relation_pair_jaccard(g: KnowledgeGraph, i: str, j: str) -> float:
    pi = g.unordered_pairs_of_relation(i)
    pj = g.unordered_pairs_of_relation(j)
    inter = len(pi & pj)
    union = len(pi) + len(pj) - inter
    if union == 0:
        return 0.0
    return inter / union


def mr_link_propagation(
    g: KnowledgeGraph, u: str, v: str, j: str, damping: float = 0.5
) -> float:
    """One propagation step from the candidate node v towards u.

    The seed score of v is 1, link weights are binary, and relation
    similarity is the Jaccard overlap of unordered pair sets. The first
    term propagates along the candidate relation itself, the second
    averages the other dimensions linking the pair. Clamped to [0, 1].
    """
    if u == v:
        raise MetricError("mr_link_propagation requires distinct nodes")
    dims = g.relations_between_any(u, v)

    def flow(i: str) -> float:
        deg = len(g.neighbors_by_relation(v, i))
        if deg == 0:
            return 0.0
        return 1.0 / deg

    first = flow(j) if j in dims else 0.0
    second = 0.0
    others = [i for i in dims if i != j]
    if len(dims) > 1 and others:
        second = sum(_relation_pair_jaccard(g, i, j) * flow(i) for i in others)
        second /= len(dims) - 1
    score = damping * (first + second)
    return min(1.0, max(0.0, score))


# -- catalog -----------------------------------------------------------------

# family -> (applicability, default params)
FAMILY_INFO: dict[str, tuple[str, dict]] = {
    "jaccard": (BOTH, {}),
    "adamic_adar": (BOTH, {}),
    "resource_allocation": (BOTH, {}),
    "hub_promoted": (BOTH, {}),
    "hub_depressed": (BOTH, {}),
    "lhn": (BOTH, {}),
    "salton": (BOTH, {}),
    "sorensen": (BOTH, {}),
    "shortest_path": (BOTH, {"cap": 5}),
    "time_score": (BOTH, {"beta": 0.5, "mm": float(ONE_DAY_MS)}),
    "euler_time": (BOTH, {"d": float(ONE_DAY_MS)}),
    "focci_distance": (EXISTENCE, {}),
    "taxonomy": (EXISTENCE, {}),
    "relational": (EXISTENCE, {}),
    "arr": (EXISTENCE, {}),
    "aor": (EXISTENCE, {}),
    "aorr": (EXISTENCE, {}),
    "aorc": (EXISTENCE, {}),
    "conditional_probability": (SEMANTIC, {}),
    "node_dimension_connectivity": (SEMANTIC, {}),
    "edge_dimension_connectivity": (SEMANTIC, {}),
    "mr_link_propagation": (SEMANTIC, {"damping": 0.5}),
}


def _check_params(family: str, params: dict) -> None:
    if family == "shortest_path":
        if not params.get("cap", 0) >= 1:
            raise MetricError("shortest_path cap must be >= 1")
    elif family == "time_score":
        if not 0.0 < params.get("beta", -1.0) < 1.0:
            raise MetricError("time_score beta must be in (0, 1)")
        if not params.get("mm", 0) > 0:
            raise MetricError("time_score mm must be > 0")
    elif family == "euler_time":
        if not params.get("d", 0) > 0:
            raise MetricError("euler_time d must be > 0")
    elif family == "mr_link_propagation":
        if not 0.0 <= params.get("damping", -1.0) <= 1.0:
            raise MetricError("mr_link_propagation damping must be in [0, 1]")


@dataclass(frozen=True)
class MetricInstance:
    """A configured metric family usable inside an ensemble."""

    family: str
    params: tuple = ()
    applicability: str = BOTH
    display_name: str = ""

    @staticmethod
    def create(family: str, display_name: str | None = None, **params) -> "MetricInstance":
        if family not in FAMILY_INFO:
            raise MetricError("unknown metric family: %s" % family)
        applicability, defaults = FAMILY_INFO[family]
        merged = dict(defaults)
        merged.update(params)
        _check_params(family, merged)
        return MetricInstance(
            family=family,
            params=tuple(sorted(merged.items())),
            applicability=applicability,
            display_name=display_name or family,
        )

    def param_dict(self) -> dict:
        return dict(self.params)

    def applicable_to(self, mode: str) -> bool:
        return self.applicability == BOTH or self.applicability == mode

    def evaluate(self, g: KnowledgeGraph, u: str, v: str, j: str | None = None) -> float:
        p = dict(self.params)
        fam = self.family
        if fam in OVERLAP_KINDS:
            return neighborhood_overlap(g, fam, u, v)
        if fam == "shortest_path":
            return shortest_path_similarity(g, u, v, p["cap"])
        if fam == "time_score":
            return time_score(g, u, v, p["beta"], p["mm"])
        if fam == "euler_time":
            return euler_time(g, u, v, p["d"])
        if fam == "focci_distance":
            return focci_distance(g, u, v)
        if fam == "taxonomy":
            return taxonomy_similarity(g, u, v)
        if fam == "relational":
            return relational_similarity(g, u, v)
        if fam == "arr":
            return arr(g, u, v)
        if fam in ("aor", "aorr", "aorc"):
            return ao_relation(g, u, v, fam)
        if fam == "conditional_probability":
            return conditional_probability(g, j)
        if fam == "node_dimension_connectivity":
            return dimension_connectivity(g, "node", j)
        if fam == "edge_dimension_connectivity":
            return dimension_connectivity(g, "edge", j)
        if fam == "mr_link_propagation":
            return mr_link_propagation(g, u, v, j, p["damping"])
        raise MetricError("unknown metric family: %s" % fam)


def catalog() -> list[MetricInstance]:
    """All default instances: every family once, euler_time twice."""
    instances = []
    for family in FAMILY_INFO:
        if family == "euler_time":
            instances.append(
                MetricInstance.create("euler_time", "euler_time_one_day", d=float(ONE_DAY_MS))
            )
            instances.append(
                MetricInstance.create("euler_time", "euler_time_half_day", d=float(HALF_DAY_MS))
            )
        else:
            instances.append(MetricInstance.create(family))
    return instances


@dataclass
class MetricEnsemble:
    """Ordered metric instances plus the weight vector pairing of the
    linear combination. All instances must fit the ensemble's mode."""

    mode: str
    instances: list[MetricInstance]
    weights: WeightVector = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.mode not in (EXISTENCE, SEMANTIC):
            raise MetricError("unknown prediction mode: %s" % self.mode)
        for inst in self.instances:
            if not inst.applicable_to(self.mode):
                raise MetricError(
                    "%s is not applicable to %s prediction" % (inst.display_name, self.mode)
                )
        if self.weights is None:
            self.weights = WeightVector.uniform(len(self.instances))
        if len(self.weights) != len(self.instances):
            raise MetricError("weight vector length does not match instances")

    def display_names(self) -> list[str]:
        return [inst.display_name for inst in self.instances]


def default_ensemble(mode: str) -> MetricEnsemble:
    instances = [inst for inst in catalog() if inst.applicable_to(mode)]
    return MetricEnsemble(mode=mode, instances=instances)


def combined_similarity(
    ensemble: MetricEnsemble, g: KnowledgeGraph, u: str, v: str, j: str | None = None
) -> float:
    """Weighted sum over the ensemble's instances, Eq-style convex combination."""
    if ensemble.mode == SEMANTIC and j is None:
        raise MetricError("semantic ensembles need a candidate relation")
    if ensemble.mode == EXISTENCE and j is not None:
        raise MetricError("existence ensembles take no relation argument")
    w = ensemble.weights
    if not w.is_normalized():
        raise MetricError("weights must be non-negative and sum to 1")
    total = 0.0
    for weight, inst in zip(w.values, ensemble.instances):
        if weight == 0.0:
            continue
        total += weight * inst.evaluate(g, u, v, j)
    return total
