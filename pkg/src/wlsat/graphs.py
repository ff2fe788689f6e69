"""Graph representations of CNF formulas (LCN, LCG, VCG, LIG) and edge-list I/O.

Node ids are dense integers. In literal-based graphs the literal of variable
``v`` sits at node ``2(v-1)`` and its negation at ``2(v-1)+1``; clause nodes
follow in clause order.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .cnf import CnfFormula, make_clause


class NodeKind(enum.IntEnum):
    LITERAL = 0
    CLAUSE = 1
    PLAIN = 2
    VARIABLE = 3


class EdgeColor(enum.IntEnum):
    LITERAL_CLAUSE = 0
    LITERAL_LITERAL = 1
    PLAIN = 2
    POSITIVE = 3
    NEGATIVE = 4


NodeLabeling = Mapping[int, str]

TRUE_MARK = "T"
FALSE_MARK = "F"


def lit_node(lit: int) -> int:
    return 2 * (abs(lit) - 1) + (lit < 0)


def node_lit(node: int) -> int:
    v = node // 2 + 1
    return -v if node % 2 else v


@dataclass(frozen=True)
class SatGraph:
    """Undirected node- and edge-colored graph.

    ``node_lits`` optionally records which literal each node stands for
    (0 for non-literal nodes); builders set it, relabeling keeps it aligned.
    """

    kinds: tuple[NodeKind, ...]
    edges: tuple[tuple[int, int, EdgeColor], ...]
    node_lits: tuple[int, ...] | None = None

    def __post_init__(self):
        n = len(self.kinds)
        seen = set()
        canon = []
        for u, v, c in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references unknown node")
            key = (min(u, v), max(u, v), EdgeColor(c))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "kinds", tuple(NodeKind(k) for k in self.kinds))
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def num_nodes(self) -> int:
        return len(self.kinds)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def colors(self) -> tuple[EdgeColor, ...]:
        return tuple(sorted({c for _, _, c in self.edges}))

    @cached_property
    def adjacency(self) -> dict[EdgeColor, list[list[int]]]:
        """N_c(v) for every edge color present in the graph."""
        adj = {c: [[] for _ in self.kinds] for c in self.colors}
        for u, v, c in self.edges:
            adj[c][u].append(v)
            adj[c][v].append(u)
        return adj

    def neighbors(self, v: int, color: EdgeColor | None = None) -> list[int]:
        if color is not None:
            return list(self.adjacency.get(color, [[]] * self.num_nodes)[v])
        return [w for c in self.colors for w in self.adjacency[c][v]]

    def degree(self, v: int, color: EdgeColor | None = None) -> int:
        return len(self.neighbors(v, color))

    def nodes_of(self, kind: NodeKind) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == kind]

    def edge_counts(self) -> Counter:
        return Counter(c for _, _, c in self.edges)

    def edge_set(self) -> set[tuple[int, int, EdgeColor]]:
        return set(self.edges)

    def without(self, color: EdgeColor) -> "SatGraph":
        return SatGraph(self.kinds, tuple(e for e in self.edges if e[2] != color), self.node_lits)

    def relabel(self, perm: list[int]) -> "SatGraph":
        """Graph with node ``v`` renamed to ``perm[v]``."""
        n = self.num_nodes
        kinds = [None] * n
        lits = [0] * n if self.node_lits is not None else None
        for v, p in enumerate(perm):
            kinds[p] = self.kinds[v]
            if lits is not None:
                lits[p] = self.node_lits[v]
        edges = tuple((perm[u], perm[v], c) for u, v, c in self.edges)
        return SatGraph(tuple(kinds), edges, tuple(lits) if lits is not None else None)

    def literal_node(self, lit: int) -> int:
        if self.node_lits is None:
            raise ValueError("graph carries no literal bookkeeping")
        try:
            return self._lit_index[lit]
        except KeyError:
            raise ValueError(f"literal {lit} not in graph") from None

    @cached_property
    def _lit_index(self) -> dict[int, int]:
        return {l: i for i, l in enumerate(self.node_lits or ()) if l}


def disjoint_union(g: SatGraph, h: SatGraph) -> SatGraph:
    off = g.num_nodes
    return SatGraph(g.kinds + h.kinds,
                    g.edges + tuple((u + off, v + off, c) for u, v, c in h.edges))


# ---------------------------------------------------------------- builders

def _literal_nodes(n: int) -> tuple[list[NodeKind], list[int]]:
    kinds = [NodeKind.LITERAL] * (2 * n)
    lits = [node_lit(i) for i in range(2 * n)]
    return kinds, lits


def build_lcg(f: CnfFormula) -> SatGraph:
    """Literal-clause graph: literal nodes for both polarities, one node per clause."""
    kinds, lits = _literal_nodes(f.num_vars)
    edges = []
    base = len(kinds)
    for j, c in enumerate(f.clauses):
        kinds.append(NodeKind.CLAUSE)
        lits.append(0)
        for l in c:
            edges.append((lit_node(l), base + j, EdgeColor.LITERAL_CLAUSE))
    return SatGraph(tuple(kinds), tuple(edges), tuple(lits))


def build_lcn(f: CnfFormula) -> SatGraph:
    """Literal-clause graph plus a negation edge between ``x`` and ``-x``."""
    g = build_lcg(f)
    neg_edges = tuple((2 * i, 2 * i + 1, EdgeColor.LITERAL_LITERAL) for i in range(f.num_vars))
    return SatGraph(g.kinds, g.edges + neg_edges, g.node_lits)


def build_vcg(f: CnfFormula) -> SatGraph:
    """Variable-clause graph with edges colored by the sign of the occurrence."""
    kinds = [NodeKind.VARIABLE] * f.num_vars
    edges = []
    for j, c in enumerate(f.clauses):
        kinds.append(NodeKind.CLAUSE)
        for l in c:
            color = EdgeColor.POSITIVE if l > 0 else EdgeColor.NEGATIVE
            edges.append((abs(l) - 1, f.num_vars + j, color))
    return SatGraph(tuple(kinds), tuple(edges))


def build_lig(f: CnfFormula) -> SatGraph:
    """Literal-incidence graph: literals adjacent iff they share a clause."""
    kinds, lits = _literal_nodes(f.num_vars)
    pairs = set()
    for c in f.clauses:
        nodes = sorted(lit_node(l) for l in c)
        for i, u in enumerate(nodes):
            for v in nodes[i + 1:]:
                pairs.add((u, v))
    edges = tuple((u, v, EdgeColor.PLAIN) for u, v in sorted(pairs))
    return SatGraph(tuple(kinds), edges, tuple(lits))


def lcn_to_formula(g: SatGraph) -> CnfFormula:
    """Read a formula back from an unlabeled LCN.

    Literal nodes are paired by the negation edges; pair ``i`` (ordered by its
    smallest node id) becomes variable ``i+1`` with the smaller node positive.
    """
    lit_nodes = g.nodes_of(NodeKind.LITERAL)
    clause_nodes = g.nodes_of(NodeKind.CLAUSE)
    if len(lit_nodes) + len(clause_nodes) != g.num_nodes:
        raise ValueError("LCN may only contain literal and clause nodes")
    mate: dict[int, int] = {}
    for u, v, c in g.edges:
        kinds = {g.kinds[u], g.kinds[v]}
        if c == EdgeColor.LITERAL_LITERAL:
            if kinds != {NodeKind.LITERAL}:
                raise ValueError("negation edge must join two literal nodes")
            if u in mate or v in mate:
                raise ValueError("negation edges do not form a matching")
            mate[u], mate[v] = v, u
        elif c == EdgeColor.LITERAL_CLAUSE:
            if kinds != {NodeKind.LITERAL, NodeKind.CLAUSE}:
                raise ValueError("literal-clause edge must join a literal and a clause")
        else:
            raise ValueError(f"unexpected edge color {c!r} in an LCN")
    if len(mate) != len(lit_nodes):
        raise ValueError("negation edges are not a perfect matching on literal nodes")
    lit_of: dict[int, int] = {}
    for u in sorted(lit_nodes):
        if u in lit_of:
            continue
        v = len(lit_of) // 2 + 1
        lit_of[u], lit_of[mate[u]] = v, -v
    clauses = []
    for c in clause_nodes:
        members = [lit_of[w] for w in g.neighbors(c, EdgeColor.LITERAL_CLAUSE)]
        if not members:
            raise ValueError(f"clause node {c} has no literals")
        clauses.append(make_clause(members))
    return CnfFormula(len(lit_nodes) // 2, tuple(clauses))


def label_assignment(g: SatGraph, sigma: Mapping[int, bool]) -> tuple[SatGraph, dict[int, str]]:
    """Mark literal nodes of bound variables with T (true under sigma) or F."""
    labels: dict[int, str] = {}
    for v, val in sigma.items():
        try:
            pos, negn = g.literal_node(v), g.literal_node(-v)
        except ValueError:
            raise ValueError(f"variable {v} is not in the graph") from None
        labels[pos] = TRUE_MARK if val else FALSE_MARK
        labels[negn] = FALSE_MARK if val else TRUE_MARK
    return g, labels


def lig_from_edges(num_literals: int, pairs: Iterable[tuple[int, int]]) -> SatGraph:
    """Plain LIG over ``num_literals`` nodes (must be even; node 2i+1 negates 2i)."""
    if num_literals % 2:
        raise ValueError("a LIG needs an even number of literal nodes")
    kinds, lits = _literal_nodes(num_literals // 2)
    edges = {(min(u, v), max(u, v)) for u, v in pairs}
    return SatGraph(tuple(kinds), tuple((u, v, EdgeColor.PLAIN) for u, v in sorted(edges)), tuple(lits))


# ---------------------------------------------------------------- edge-list format

REPRESENTATIONS = {"lcn": build_lcn, "lcg": build_lcg, "vcg": build_vcg, "lig": build_lig}


def write_edge_list(g: SatGraph, name: str = "graph") -> str:
    """Plain text: ``p satgraph <name> <nodes> <edges>``, then ``n``/``e`` lines."""
    lines = [f"p satgraph {name} {g.num_nodes} {g.num_edges}"]
    for i, k in enumerate(g.kinds):
        lines.append(f"n {i} {k.name.lower()}")
    for u, v, c in sorted(g.edges):
        lines.append(f"e {u} {v} {c.name.lower()}")
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> SatGraph:
    header = None
    kinds: dict[int, NodeKind] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "p":
                header = (int(parts[3]), int(parts[4]))
            elif parts[0] == "n":
                kinds[int(parts[1])] = NodeKind[parts[2].upper()]
            elif parts[0] == "e":
                edges.append((int(parts[1]), int(parts[2]), EdgeColor[parts[3].upper()]))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if header is None:
        raise ValueError("missing 'p satgraph' header")
    n, m = header
    if sorted(kinds) != list(range(n)) or len(edges) != m:
        raise ValueError("edge list does not match its header")
    node_kinds = tuple(kinds[i] for i in range(n))
    lits = None
    nl = node_kinds.count(NodeKind.LITERAL)
    if nl % 2 == 0 and all(k == NodeKind.LITERAL for k in node_kinds[:nl]):
        lits = tuple(node_lit(i) if i < nl else 0 for i in range(n))
    return SatGraph(node_kinds, tuple(edges), lits)
