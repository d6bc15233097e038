"""Baseline candidate-set generators.

The existence generator mixes exploitation (neighbors of neighbors) with
exploration (uniformly random non-neighbors), half and half. The semantic
generator walks the target's neighbors in seeded-random order and draws
one unrealized, schema-compatible relation per neighbor. Both are pure
functions of (graph snapshot, target, size, seed) and never emit a
candidate that duplicates an existing link or a recorded rejection.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .graph import KnowledgeGraph, UnknownIdError

TWO_HOP = "two_hop"
GLOBAL = "global"


@dataclass(frozen=True)
class ExistenceCandidateSet:
    target: str
    candidates: tuple[str, ...]
    requested_size: int
    # pool provenance per candidate, aligned with candidates
    pools: tuple[str, ...] = ()


@dataclass(frozen=True)
class SemanticCandidate:
    node: str
    relation: str
    target_is_subject: bool

    def as_triplet(self, target: str) -> tuple[str, str, str]:
        if self.target_is_subject:
            return (target, self.node, self.relation)
        return (self.node, target, self.relation)


@dataclass(frozen=True)
class SemanticCandidateSet:
    target: str
    candidates: tuple[SemanticCandidate, ...]


def _rejected_pair(g: KnowledgeGraph, u: str, v: str) -> bool:
    # pair-level rejections exclude the candidate in both orders
    return g.has_non_link(u, v, None) or g.has_non_link(v, u, None)


def existence_candidates(
    g: KnowledgeGraph, u: str, n: int, rng_seed: int
) -> ExistenceCandidateSet:
    if not g.has_node(u):
        raise UnknownIdError("unknown node: %s" % u)
    if n < 2:
        raise ValueError("candidate size must be >= 2")
    rng = random.Random(rng_seed)
    neighborhood = g.neighbors(u)
    excluded = {u} | neighborhood

    two_hop_pool = set()
    for z in neighborhood:
        two_hop_pool |= g.neighbors(z)
    two_hop_pool -= excluded
    two_hop_pool = {v for v in two_hop_pool if not _rejected_pair(g, u, v)}

    quota = math.ceil(n / 2)
    chosen: list[str] = []
    pools: list[str] = []
    picked = rng.sample(sorted(two_hop_pool), min(quota, len(two_hop_pool)))
    chosen.extend(picked)
    pools.extend([TWO_HOP] * len(picked))

    global_pool = {
        v
        for v in g.node_ids()
        if v not in excluded and v not in set(chosen) and not _rejected_pair(g, u, v)
    }
    remainder = n - len(chosen)
    picked = rng.sample(sorted(global_pool), min(remainder, len(global_pool)))
    chosen.extend(picked)
    pools.extend([GLOBAL] * len(picked))

    return ExistenceCandidateSet(u, tuple(chosen), n, tuple(pools))


def _relation_options(g: KnowledgeGraph, u: str, c: str) -> list[tuple[str, bool]]:
    """Unrealized, schema-compatible (relation, target_is_subject) options."""
    cu = g.concept_of(u)
    cc = g.concept_of(c)
    options = []
    for j in sorted(g.ontology.relations):
        if (
            g.ontology.compatible(j, cu, cc)
            and not g.has_link(u, c, j)
            and not g.has_non_link(u, c, j)
        ):
            options.append((j, True))
        if (
            g.ontology.compatible(j, cc, cu)
            and not g.has_link(c, u, j)
            and not g.has_non_link(c, u, j)
        ):
            options.append((j, False))
    return options


def semantic_candidates(
    g: KnowledgeGraph, u: str, n: int, rng_seed: int
) -> SemanticCandidateSet:
    if not g.has_node(u):
        raise UnknownIdError("unknown node: %s" % u)
    if n < 1:
        raise ValueError("candidate size must be >= 1")
    rng = random.Random(rng_seed)
    order = sorted(g.neighbors(u))
    rng.shuffle(order)
    found: list[SemanticCandidate] = []
    for c in order:
        options = _relation_options(g, u, c)
        if not options:
            continue  # every compatible relation already realized, not an error
        relation, target_is_subject = options[int(rng.random() * len(options))]
        found.append(SemanticCandidate(c, relation, target_is_subject))
        if len(found) >= n:
            break
    return SemanticCandidateSet(u, tuple(found))
