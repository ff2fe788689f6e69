"""Uniform random 3-SAT near the satisfiability threshold."""
from __future__ import annotations

import math
import random

from ..cnf import CnfFormula, make_clause

THRESHOLD_MULTIPLIER = 4.258
EASY_MULTIPLIER = 4.158
FINITE_SIZE_TERM = 58.26


def threshold_clause_count(n: int, multiplier: float = THRESHOLD_MULTIPLIER) -> int:
    """floor(multiplier * n + 58.26 * n^(-2/3))."""
    return math.floor(multiplier * n + FINITE_SIZE_TERM * n ** (-2 / 3))


def random_3sat(n: int, seed: int, multiplier: float = THRESHOLD_MULTIPLIER,
                num_clauses: int | None = None) -> CnfFormula:
    """Clauses over 3 distinct variables with uniform signs, no repeated clause."""
    if n < 3:
        raise ValueError("random 3-SAT needs at least 3 variables")
    m = threshold_clause_count(n, multiplier) if num_clauses is None else num_clauses
    if m > math.comb(n, 3) * 8:
        raise ValueError(f"cannot draw {m} distinct clauses over {n} variables")
    rng = random.Random(seed)
    seen = set()
    clauses = []
    while len(clauses) < m:
        c = make_clause(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3))
        if c not in seen:
            seen.add(c)
            clauses.append(c)
    meta = {"family": "random-3sat", "seed": seed, "multiplier": multiplier}
    return CnfFormula(n, tuple(clauses), meta=meta)
