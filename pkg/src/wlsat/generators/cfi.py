"""CFI formula pairs, even orientations and Tseitin parity formulas.

Each vertex v of degree k gets a copy of the gadget X_k over literals
a(v,w), b(v,w) (one pair per neighbour w). Every edge owns two variables;
on a normal edge the two endpoints see each other's literals negated
(a(v,w) = -a(w,v), b(v,w) = -b(w,v)), on the twisted edge the roles cross
(a(v,w) = -b(w,v), b(v,w) = -a(w,v)).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from itertools import combinations, product

from ..cnf import CnfFormula, make_clause
from .base import BaseGraph

GADGET_CAP = 10
TSEITIN_DEGREE_CAP = 10

Edge = tuple[int, int]


def build_xk_gadget(k: int, a_lits=None, b_lits=None, cap: int = GADGET_CAP) -> list[tuple[int, ...]]:
    """Clauses of X_k: one c_S per even S (a_i for i in S, b_i otherwise) then k clauses (a_i | b_i).

    Without explicit literals, a_i = i and b_i = k + i.
    """
    if k < 1:
        raise ValueError("gadget needs k >= 1")
    if k > cap:
        raise ValueError(f"gadget degree {k} exceeds cap {cap} (2^{k - 1} clauses)")
    a = list(a_lits) if a_lits is not None else list(range(1, k + 1))
    b = list(b_lits) if b_lits is not None else list(range(k + 1, 2 * k + 1))
    if len(a) != k or len(b) != k:
        raise ValueError("need k literals for each of a and b")
    clauses = []
    for size in range(0, k + 1, 2):
        for s in combinations(range(k), size):
            chosen = set(s)
            clauses.append(make_clause(a[i] if i in chosen else b[i] for i in range(k)))
    clauses.extend(make_clause((a[i], b[i])) for i in range(k))
    return clauses


@dataclass
class CfiInstance:
    base: BaseGraph
    twisted_edge: Edge | None
    formula: CnfFormula
    literal_map: dict[Edge, tuple[int, int]]
    expected_sat: bool | None = None

    def a(self, v: int, w: int) -> int:
        return self.literal_map[(v, w)][0]

    def b(self, v: int, w: int) -> int:
        return self.literal_map[(v, w)][1]


def _edge_vars(base: BaseGraph) -> dict[Edge, tuple[int, int]]:
    return {e: (2 * i + 1, 2 * i + 2) for i, e in enumerate(base.edges)}


def build_cfi(base: BaseGraph, twist: Edge | None = None, cap: int = GADGET_CAP) -> CfiInstance:
    if not base.is_connected():
        raise ValueError("CFI base graph must be connected")
    evars = _edge_vars(base)
    if twist is not None:
        twist = (min(twist), max(twist))
        if twist not in evars:
            raise ValueError(f"twist edge {twist} not in base graph")
    lmap: dict[Edge, tuple[int, int]] = {}
    for (u, v), (x, y) in evars.items():
        lmap[(u, v)] = (x, y)
        lmap[(v, u)] = (-y, -x) if (u, v) == twist else (-x, -y)
    clauses = []
    for v in base.nodes:
        nbrs = base.adjacency[v]
        if not nbrs:
            continue
        clauses.extend(build_xk_gadget(len(nbrs), [lmap[(v, w)][0] for w in nbrs],
                                       [lmap[(v, w)][1] for w in nbrs], cap))
    f = CnfFormula(2 * base.num_edges, tuple(clauses))
    return CfiInstance(base, twist, f, lmap)


def build_cfi_pair(base: BaseGraph, require_odd: bool = False,
                   cap: int = GADGET_CAP) -> tuple[CfiInstance, CfiInstance]:
    """Untwisted and twisted formulas; the twist sits on the lowest edge.

    When every degree is odd, exactly one of the pair is satisfiable:
    the plain one iff the edge count is even. That verdict is stored in
    ``expected_sat`` and in the formula metadata.
    """
    if not base.edges:
        raise ValueError("CFI base graph needs at least one edge")
    odd = all(d % 2 == 1 for d in base.degrees().values())
    if require_odd and not odd:
        raise ValueError("ground truth requires every base degree to be odd")
    plain = build_cfi(base, None, cap)
    twisted = build_cfi(base, base.edges[0], cap)
    if odd:
        even_m = base.num_edges % 2 == 0
        plain.expected_sat, twisted.expected_sat = even_m, not even_m
    for inst, name in ((plain, "cfi"), (twisted, "cfi-twisted")):
        meta = {"family": name, "base_edges": base.to_text()}
        if inst.expected_sat is not None:
            meta["expected"] = "SAT" if inst.expected_sat else "UNSAT"
        inst.formula = replace(inst.formula, meta=meta)
    return plain, twisted


@dataclass
class Orientation:
    """Direction of every base edge, stored as edge -> (tail, head)."""

    arcs: dict[Edge, tuple[int, int]]
    outdegree: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.outdegree:
            out: dict[int, int] = {}
            for tail, head in self.arcs.values():
                out[tail] = out.get(tail, 0) + 1
                out.setdefault(head, 0)
            self.outdegree = out

    def is_even(self) -> bool:
        return all(d % 2 == 0 for d in self.outdegree.values())


def _path(g: BaseGraph, src: int, dst: int) -> list[int]:
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for w in g.adjacency[u]:
            if w not in prev:
                prev[w] = u
                queue.append(w)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def even_orientation(g: BaseGraph) -> Orientation | None:
    """Orientation with all outdegrees even, or None when the edge count is odd.

    Orients every edge low -> high, then repeatedly reverses a shortest path
    between two odd-outdegree vertices; each reversal fixes both endpoints
    and leaves interior parities alone.
    """
    if not g.is_connected():
        raise ValueError("even_orientation needs a connected graph")
    if g.num_edges % 2:
        return None
    arcs = {e: e for e in g.edges}
    out = {v: 0 for v in g.nodes}
    for u, _ in g.edges:
        out[u] += 1
    odd = sorted(v for v in g.nodes if out[v] % 2)
    while odd:
        s, t = odd.pop(0), odd.pop(0)
        p = _path(g, s, t)
        for x, y in zip(p, p[1:]):
            e = (min(x, y), max(x, y))
            tail, head = arcs[e]
            arcs[e] = (head, tail)
            out[tail] -= 1
            out[head] += 1
    o = Orientation(arcs, out)
    assert o.is_even()
    return o


def cfi_model_from_orientation(inst: CfiInstance, o: Orientation) -> dict[int, bool]:
    """Model of an untwisted CFI formula: a(v,w) true exactly on out-arcs of v."""
    if inst.twisted_edge is not None:
        raise ValueError("orientation models exist only for the untwisted formula")
    if set(o.arcs) != set(inst.base.edges):
        raise ValueError("orientation does not cover the base edges")
    if not o.is_even():
        raise ValueError("orientation has an odd outdegree")
    # an even-degree gadget wants an odd number of true a-literals instead
    if any(d % 2 == 0 for d in inst.base.degrees().values()):
        raise ValueError("orientation models need every base degree to be odd")
    model = {}
    for (u, v), (tail, _) in o.arcs.items():
        x, y = inst.literal_map[(u, v)]
        model[x] = tail == u
        model[y] = tail != u
    if not inst.formula.is_satisfied_by(model):
        raise AssertionError("orientation model does not satisfy the CFI formula")
    return model


def build_tseitin(g: BaseGraph, charge: dict[int, int], cap: int = TSEITIN_DEGREE_CAP) -> CnfFormula:
    """Parity constraints sum of x_e over edges at v == charge[v] (mod 2), one variable per edge.

    The recorded expectation (SAT iff the charge sum is even) assumes g is connected.
    """
    if set(charge) != set(g.nodes) or any(c not in (0, 1) for c in charge.values()):
        raise ValueError("charge must map every node to 0 or 1")
    evar = {e: i + 1 for i, e in enumerate(g.edges)}
    clauses = []
    for v in g.nodes:
        xs = [evar[e] for e in g.incident_edges(v)]
        d = len(xs)
        if d > cap:
            raise ValueError(f"degree {d} at node {v} exceeds cap {cap}")
        if d == 0:
            if charge[v]:
                raise ValueError(f"isolated node {v} carries charge 1; the constraint is unsatisfiable as 0 = 1")
            continue
        # forbid every assignment of v's edges with the wrong parity
        for bits in product((0, 1), repeat=d):
            if sum(bits) % 2 != charge[v]:
                clauses.append(make_clause(-x if bit else x for x, bit in zip(xs, bits)))
    total = sum(charge.values())
    meta = {"family": "tseitin", "charge_sum": total, "expected": "SAT" if total % 2 == 0 else "UNSAT"}
    return CnfFormula(g.num_edges, tuple(clauses), meta=meta)
