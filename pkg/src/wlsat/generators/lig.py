"""Random literal-incidence graphs and clause extraction by clique edge cover."""
from __future__ import annotations

import random

from ..cnf import CnfFormula, make_clause
from ..graphs import SatGraph, lig_from_edges, node_lit


class ExtractionError(ValueError):
    pass


def random_lig(num_literals: int, seed: int, p: float = 0.5) -> SatGraph:
    """Uniform random graph G(n, p) on literal nodes; p = 1/2 is the uniform distribution."""
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(num_literals) for v in range(u + 1, num_literals) if rng.random() < p]
    return lig_from_edges(num_literals, pairs)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def clique_edge_cover(n: int, edges, seed: int) -> list[list[int]]:
    """Greedy cover of every edge by maximal cliques.

    Uncovered edges are visited in a seeded random order. Each one grows into
    a maximal clique: among the common neighbours still compatible with the
    clique, take the node adding the most uncovered edges (ties by seeded
    rank). Every clique contains an edge no earlier clique covered and all
    cliques are maximal, so no clique repeats or contains another.
    """
    rng = random.Random(seed)
    rank = list(range(n))
    rng.shuffle(rank)
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    uncovered = adj[:]
    order = sorted({(min(u, v), max(u, v)) for u, v in edges})
    rng.shuffle(order)
    cliques = []
    for u, v in order:
        if not uncovered[u] >> v & 1:
            continue
        members = [u, v]
        mask = (1 << u) | (1 << v)
        cand = adj[u] & adj[v]
        while cand:
            best = max(_bits(cand), key=lambda w: ((uncovered[w] & mask).bit_count(), -rank[w]))
            members.append(best)
            mask |= 1 << best
            cand &= adj[best]
        for w in members:
            uncovered[w] &= ~mask
        cliques.append(sorted(members))
    return cliques


def extract_from_lig(g: SatGraph, seed: int = 0) -> CnfFormula:
    """Formula whose clauses are the cliques of a greedy clique edge cover of the LIG."""
    n = g.num_nodes
    if n % 2:
        raise ExtractionError("a LIG needs an even number of literal nodes")
    cover = clique_edge_cover(n, [(u, v) for u, v, _ in g.edges], seed)
    clauses = [make_clause(node_lit(x) for x in c) for c in cover]
    _post_filter(clauses)
    return CnfFormula(n // 2, tuple(clauses), meta={"family": "lig", "seed": seed})


def _post_filter(clauses):
    sets = [frozenset(c) for c in clauses]
    if any(len(s) < 2 for s in sets):
        raise ExtractionError("extraction produced a unit clause")
    if len(set(sets)) != len(sets):
        raise ExtractionError("extraction produced duplicate clauses")
    containing: dict[int, set[int]] = {}
    for i, s in enumerate(sets):
        for lit in s:
            containing.setdefault(lit, set()).add(i)
    for i, s in enumerate(sets):
        supersets = set.intersection(*(containing[lit] for lit in s)) - {i}
        if supersets:
            j = min(supersets)
            raise ExtractionError(f"clause {sorted(s)} is subsumed by {sorted(sets[j])}")
