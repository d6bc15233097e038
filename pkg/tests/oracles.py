"""Naive re-evaluations used as independent oracles.

Everything is rebuilt from g.all_links() plus the ontology, with plain
loops and sets. Deliberately unshared with the package internals so a
bug there cannot hide here.
"""

import math
from collections import defaultdict


def adjacency(g):
    """(undirected, out[u][j], in[v][j]) rebuilt from the raw link list."""
    und = defaultdict(set)
    out = defaultdict(lambda: defaultdict(set))
    inc = defaultdict(lambda: defaultdict(set))
    for link in g.all_links():
        und[link.subject].add(link.object)
        und[link.object].add(link.subject)
        out[link.subject][link.relation].add(link.object)
        inc[link.object][link.relation].add(link.subject)
    return und, out, inc


def naive_overlap(g, kind, u, v):
    und, _, _ = adjacency(g)
    a, b = und[u], und[v]
    common = a & b
    n = len(common)
    if n == 0:
        return 0.0
    ku, kv = len(a), len(b)
    if kind == "jaccard":
        return n / len(a | b)
    if kind == "sorensen":
        return 2 * n / (ku + kv)
    if kind == "salton":
        return n / math.sqrt(ku * kv)
    if kind == "lhn":
        return n / (ku * kv)
    if kind == "hub_promoted":
        return n / min(ku, kv)
    if kind == "hub_depressed":
        return n / max(ku, kv)
    if kind == "adamic_adar":
        terms = []
        for z in common:
            d = len(und[z])
            terms.append(math.log(2) / math.log(d) if d > 1 else 0.0)
        return sum(terms) / n
    if kind == "resource_allocation":
        return sum(2 / len(und[z]) for z in common) / n
    raise ValueError(kind)


def naive_bfs(g, u, v, cap=5):
    """Hop count over undirected adjacency, None beyond cap."""
    und, _, _ = adjacency(g)
    frontier = {u}
    seen = {u}
    for depth in range(1, cap + 1):
        nxt = set()
        for x in frontier:
            nxt |= und[x]
        nxt -= seen
        if v in nxt:
            return depth
        if not nxt:
            return None
        seen |= nxt
        frontier = nxt
    return None


def naive_fd(g, u, v):
    und, out, inc = adjacency(g)

    def und_by_rel(x, j):
        return out[x].get(j, set()) | inc[x].get(j, set())

    ju = {j for j, vs in out[u].items() if vs}
    jv = {j for j, vs in out[v].items() if vs}
    best = 0.0
    for j in ju & jv:
        for z in und_by_rel(u, j) & und_by_rel(v, j):
            declared = g.ontology.relation(j).inverse_of
            if declared is not None:
                inv = und_by_rel(z, declared)
            else:
                inv = inc[z].get(j, set())
            if inv:
                best = max(best, 1 / len(inv))
    return best


def naive_arr(g, u, v):
    _, out, _ = adjacency(g)
    ju = {j for j, vs in out[u].items() if vs}
    jv = {j for j, vs in out[v].items() if vs}
    if not ju:
        return 0.0
    return len(ju & jv) / len(ju)


def naive_aor(g, u, v, variant="aor"):
    und, _, _ = adjacency(g)
    if variant == "aorr":
        return naive_aor(g, v, u, "aor")
    if variant == "aorc":
        return (naive_aor(g, u, v) + naive_aor(g, v, u)) / 2
    neigh = und[v]
    if not neigh:
        return 0.0
    cu = g.concept_of(u)
    return sum(1 for z in neigh if g.concept_of(z) == cu) / len(neigh)


def _unordered_pairs(g, j):
    return {frozenset((l.subject, l.object)) for l in g.all_links() if l.relation == j}


def naive_cp(g, j):
    pj = _unordered_pairs(g, j)
    if not pj:
        return 0.0
    best = 0.0
    for i in g.ontology.relations:
        if i == j:
            continue
        pi = _unordered_pairs(g, i)
        if pi:
            best = max(best, len(pj & pi) / len(pj))
    return best


def naive_ndc(g, j):
    nodes = g.node_ids()
    if not nodes:
        return 0.0
    subjects = {l.subject for l in g.all_links() if l.relation == j}
    return len(subjects) / len(nodes)


def naive_edc(g, j):
    links = g.all_links()
    if not links:
        return 0.0
    return sum(1 for l in links if l.relation == j) / len(links)


def naive_mse(weights, scores, labels):
    """MSE recomputed with plain python arithmetic."""
    total = 0.0
    for row, label in zip(scores, labels):
        s = 0.0
        for w, x in zip(weights, row):
            s += w * x
        total += (s - label) ** 2
    return total / len(labels)


def naive_ks(xs, ys):
    """Two-sample KS statistic, brute force over both samples."""
    xs, ys = sorted(xs), sorted(ys)
    best = 0.0
    for t in xs + ys:
        fx = sum(1 for x in xs if x <= t) / len(xs)
        fy = sum(1 for y in ys if y <= t) / len(ys)
        best = max(best, abs(fx - fy))
    return best
