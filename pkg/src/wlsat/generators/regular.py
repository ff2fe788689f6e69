"""Rewrites towards 3-regular formulas (every literal in 3 clauses, every clause of size 3).

All rewrites keep the original variables 1..n under their own ids and only
append fresh variables, so restricting a model of the output to 1..n gives
a model of the input.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from ..cnf import CnfFormula, make_clause


class _Fresh:
    def __init__(self, start: int):
        self.top = start

    def __call__(self) -> int:
        self.top += 1
        return self.top


def pad_clauses(f: CnfFormula, size: int = 3) -> CnfFormula:
    """Grow every short clause to ``size`` literals: (x|y) -> (x|y|z) & (x|y|-z), repeatedly."""
    fresh = _Fresh(f.num_vars)
    out = []
    for c in f.clauses:
        if len(c) >= size:
            out.append(c)
            continue
        zs = [fresh() for _ in range(size - len(c))]
        for signs in product((1, -1), repeat=len(zs)):
            out.append(make_clause(c + tuple(s * z for s, z in zip(signs, zs))))
    if f.empty_clause:
        zs = [fresh() for _ in range(size)]
        out.extend(make_clause(s * z for s, z in zip(signs, zs)) for signs in product((1, -1), repeat=size))
    return CnfFormula(fresh.top, tuple(out))


def reduce_literal_degree(f: CnfFormula, delta: int) -> CnfFormula:
    """Split every variable whose positive or negative literal occurs more than ``delta`` times.

    The s occurrences of such a variable get their own copies x_1..x_s (x_1
    keeps the original id) tied together by the cycle (x_1|-x_2)...(x_s|-x_1).
    For delta >= 3 each cycle clause is padded to two 3-clauses; for delta = 2
    padding would push the copies to degree 3, so the cycle stays binary.
    """
    if delta < 2:
        raise ValueError("literal degree bound must be at least 2")
    deg = f.literal_degrees()
    split = sorted(v for v in range(1, f.num_vars + 1) if max(deg[v], deg[-v]) > delta)
    if not split:
        return f
    fresh = _Fresh(f.num_vars)
    copies: dict[int, list[int]] = {}
    used: Counter = Counter()
    for v in split:
        s = deg[v] + deg[-v]
        copies[v] = [v] + [fresh() for _ in range(s - 1)]
    clauses = []
    for c in f.clauses:
        new = []
        for lit in c:
            v = abs(lit)
            if v in copies:
                x = copies[v][used[v]]
                used[v] += 1
                new.append(x if lit > 0 else -x)
            else:
                new.append(lit)
        clauses.append(make_clause(new))
    for v in split:
        xs = copies[v]
        for i, x in enumerate(xs):
            nxt = xs[(i + 1) % len(xs)]
            if delta >= 3:
                z = fresh()
                clauses.append(make_clause((x, -nxt, z)))
                clauses.append(make_clause((x, -nxt, -z)))
            else:
                clauses.append(make_clause((x, -nxt)))
    return CnfFormula(fresh.top, tuple(clauses))


def gadget_clauses(l1: int, l2: int, l3: int, a: int, b: int, c: int, d: int) -> list[tuple[int, ...]]:
    """Nine clauses adding one occurrence to each of l1, l2, l3; all satisfied by a = b = c = true."""
    rows = [(l1, a, -b), (l2, -a, c), (l3, b, -c),
            (a, -c, d), (a, -c, -d),
            (b, -a, d), (b, -a, -d),
            (c, -b, d), (c, -b, -d)]
    return [make_clause(r) for r in rows]


@dataclass
class RegularityAudit:
    literal_degrees: Counter
    clause_sizes: Counter

    @property
    def ok(self) -> bool:
        return set(self.literal_degrees) <= {3} and set(self.clause_sizes) <= {3}


def audit_regularity(f: CnfFormula) -> RegularityAudit:
    """Histograms over all 2n literals (absent ones count as degree 0) and over clause sizes."""
    deg = f.literal_degrees()
    lits = Counter(deg[s * v] for v in range(1, f.num_vars + 1) for s in (1, -1))
    sizes = Counter(len(c) for c in f.clauses)
    return RegularityAudit(lits, sizes)


def regularize_to_3(f: CnfFormula, normalize: bool = True) -> CnfFormula:
    """Equisatisfiable 3-regular formula.

    With ``normalize`` the input is first padded to 3-clauses and then
    degree-reduced to 3; otherwise it must already have clauses of size
    exactly 3 and literal degrees at most 3. Each literal then lacks
    3 - d(l) occurrences; the total 6n - 3m is a multiple of 3 and is
    filled three occurrences at a time by the nine-clause gadget on fresh
    a, b, c, d.
    """
    if normalize:
        f = reduce_literal_degree(pad_clauses(f), 3)
    else:
        if f.empty_clause or any(len(c) != 3 for c in f.clauses):
            raise ValueError("regularize_to_3 needs clauses of size exactly 3 (pass normalize=True)")
        if any(d > 3 for d in f.literal_degrees().values()):
            raise ValueError("regularize_to_3 needs literal degrees <= 3 (pass normalize=True)")
    deg = f.literal_degrees()
    need = []
    for v in range(1, f.num_vars + 1):
        for lit in (v, -v):
            need.extend([lit] * (3 - deg[lit]))
    assert len(need) % 3 == 0, "deficit must be a multiple of 3"
    fresh = _Fresh(f.num_vars)
    clauses = list(f.clauses)
    for i in range(0, len(need), 3):
        a, b, c, d = fresh(), fresh(), fresh(), fresh()
        clauses.extend(gadget_clauses(need[i], need[i + 1], need[i + 2], a, b, c, d))
    out = CnfFormula(fresh.top, tuple(clauses))
    assert audit_regularity(out).ok
    return out
