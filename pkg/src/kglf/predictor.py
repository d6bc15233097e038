"""End-to-end link prediction over baseline candidate sets.

Candidates are generated by the baseline heuristics, scored with the
weighted metric combination, ranked, and the top entries returned. For
human review, baseline-sourced items are mixed in (one third) so that
acceptance rates of the learned ranking and the plain heuristic can be
compared on equal footing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .candidates import (
    ExistenceCandidateSet,
    SemanticCandidateSet,
    existence_candidates,
    semantic_candidates,
)
from .graph import KnowledgeGraph
from .metrics import EXISTENCE, MetricEnsemble, combined_similarity

GENETIC = "genetic"
BASELINE = "baseline"


@dataclass(frozen=True)
class Recommendation:
    subject: str
    object: str
    relation: str | None  # present iff semantic mode
    score: float
    source: str
    rank: int


def _key(rec: Recommendation) -> tuple[str, str, str]:
    return (rec.subject, rec.object, rec.relation or "")


def predict_existence(
    g: KnowledgeGraph,
    u: str,
    k: int,
    ensemble: MetricEnsemble,
    candidate_size: int = 30,
    rng_seed: int = 0,
    min_score: float | None = None,
) -> list[Recommendation]:
    """Top-k non-neighbors of u ranked by the weighted ensemble."""
    cands = existence_candidates(g, u, candidate_size, rng_seed)
    scored = [(combined_similarity(ensemble, g, u, v), v) for v in cands.candidates]
    scored.sort(key=lambda t: (-t[0], t[1]))  # ties broken by ascending node id
    out = []
    for rank, (score, v) in enumerate(scored[: max(k, 0)], start=1):
        if min_score is not None and score < min_score:
            break
        out.append(Recommendation(u, v, None, score, GENETIC, rank))
    return out


def predict_type(
    g: KnowledgeGraph,
    u: str,
    k: int,
    ensemble: MetricEnsemble,
    candidate_size: int = 30,
    rng_seed: int = 0,
    min_score: float | None = None,
) -> list[Recommendation]:
    """Top-k unrealized (node, relation) pairs around u, scored per triplet."""
    cands = semantic_candidates(g, u, candidate_size, rng_seed)
    scored = []
    for cand in cands.candidates:
        s, o, j = cand.as_triplet(u)
        scored.append((combined_similarity(ensemble, g, s, o, j), s, o, j))
    scored.sort(key=lambda t: (-t[0], t[1], t[2], t[3]))
    out = []
    for rank, (score, s, o, j) in enumerate(scored[: max(k, 0)], start=1):
        if min_score is not None and score < min_score:
            break
        out.append(Recommendation(s, o, j, score, GENETIC, rank))
    return out


def interleave_for_review(
    g: KnowledgeGraph,
    ensemble: MetricEnsemble,
    genetic: list[Recommendation],
    baseline: ExistenceCandidateSet | SemanticCandidateSet,
    total: int,
    rng_seed: int,
) -> list[Recommendation]:
    """Blind review mix: floor(total/3) baseline draws, the rest genetic top
    ranks. Shortfalls backfill from the other source; duplicates collapse
    keeping the genetic item. Presentation order is a seeded shuffle."""
    if total < 3:
        raise ValueError("interleave needs a total of at least 3")
    rng = random.Random(rng_seed)

    baseline_recs = []
    if isinstance(baseline, ExistenceCandidateSet):
        for v in baseline.candidates:
            score = combined_similarity(ensemble, g, baseline.target, v)
            baseline_recs.append(Recommendation(baseline.target, v, None, score, BASELINE, 0))
    else:
        for cand in baseline.candidates:
            s, o, j = cand.as_triplet(baseline.target)
            score = combined_similarity(ensemble, g, s, o, j)
            baseline_recs.append(Recommendation(s, o, j, score, BASELINE, 0))

    if not genetic and not baseline_recs:
        raise ValueError("both candidate sources are empty")

    want_baseline = total // 3
    want_genetic = total - want_baseline

    genetic_take = genetic[:want_genetic]
    taken_keys = {_key(r) for r in genetic_take}

    pool = [r for r in baseline_recs if _key(r) not in taken_keys]
    pool.sort(key=_key)
    baseline_take = rng.sample(pool, min(want_baseline, len(pool)))

    # backfill whichever source ran short
    missing = total - len(genetic_take) - len(baseline_take)
    if missing > 0:
        extra = [r for r in genetic[want_genetic:] if _key(r) not in taken_keys][:missing]
        genetic_take = genetic_take + extra
        missing -= len(extra)
    if missing > 0:
        left = [
            r
            for r in pool
            if all(_key(r) != _key(t) for t in baseline_take)
        ]
        baseline_take = baseline_take + rng.sample(left, min(missing, len(left)))

    merged: dict[tuple, Recommendation] = {}
    for rec in baseline_take:
        merged[_key(rec)] = rec
    for rec in genetic_take:
        merged[_key(rec)] = rec  # genetic wins on duplicates
    items = list(merged.values())
    items.sort(key=_key)
    rng.shuffle(items)
    return [
        Recommendation(r.subject, r.object, r.relation, r.score, r.source, rank)
        for rank, r in enumerate(items, start=1)
    ]
