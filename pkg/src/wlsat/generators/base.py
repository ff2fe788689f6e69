"""Simple undirected base graphs used by the CFI, Tseitin and encoding families."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import networkx as nx


@dataclass(frozen=True)
class BaseGraph:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        nodes = tuple(sorted(set(self.nodes)))
        node_set = set(nodes)
        edges = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge ({u}, {v}) has an unknown endpoint")
            e = (min(u, v), max(u, v))
            if e in edges:
                raise ValueError(f"multi-edge {e}")
            edges.add(e)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    @classmethod
    def from_edges(cls, edges, nodes=None) -> "BaseGraph":
        edges = [tuple(e) for e in edges]
        if nodes is None:
            nodes = {x for e in edges for x in e}
        return cls(tuple(nodes), tuple(edges))

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "BaseGraph":
        mapping = {v: i for i, v in enumerate(sorted(g.nodes, key=repr))}
        return cls(tuple(mapping.values()), tuple((mapping[u], mapping[v]) for u, v in g.edges))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> dict[int, list[int]]:
        adj = {v: [] for v in self.nodes}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for v in adj:
            adj[v].sort()
        return adj

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> dict[int, int]:
        return {v: len(ns) for v, ns in self.adjacency.items()}

    def incident_edges(self, v: int) -> list[tuple[int, int]]:
        return [(min(v, w), max(v, w)) for w in self.adjacency[v]]

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {self.nodes[0]}
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.nodes)

    def to_text(self) -> str:
        return " ".join(f"{u}-{v}" for u, v in self.edges)


def complete_graph(n: int) -> BaseGraph:
    return BaseGraph.from_networkx(nx.complete_graph(n))


def cycle_graph(n: int) -> BaseGraph:
    return BaseGraph.from_networkx(nx.cycle_graph(n))


def petersen_graph() -> BaseGraph:
    return BaseGraph.from_networkx(nx.petersen_graph())


def complete_bipartite(a: int, b: int) -> BaseGraph:
    return BaseGraph.from_networkx(nx.complete_bipartite_graph(a, b))


def random_regular_graph(n: int, d: int, seed: int, max_tries: int = 1000) -> BaseGraph:
    """Connected random d-regular simple graph (pairing model, retried until connected)."""
    if (n * d) % 2 or d >= n or d < 0:
        raise ValueError(f"no {d}-regular simple graph on {n} nodes")
    for attempt in range(max_tries):
        g = nx.random_regular_graph(d, n, seed=seed * 7919 + attempt)
        if nx.is_connected(g):
            return BaseGraph.from_networkx(g)
    raise RuntimeError(f"no connected {d}-regular graph on {n} nodes after {max_tries} draws")


def named_graph(spec: str, seed: int = 0) -> BaseGraph:
    """Resolve a base-graph name.

    Accepted: ``k4``/``kN``, ``cN``, ``petersen``, ``k33``/``kA,B``,
    ``regular:N:D`` (random, seeded), or a path to a file of ``u v`` edge lines.
    """
    s = spec.strip().lower()
    if s == "petersen":
        return petersen_graph()
    if s.startswith("regular:"):
        _, n, d = s.split(":")
        return random_regular_graph(int(n), int(d), seed)
    if s == "k33":
        return complete_bipartite(3, 3)
    if s.startswith("k") and "," in s:
        a, b = s[1:].split(",")
        return complete_bipartite(int(a), int(b))
    if s.startswith("k") and s[1:].isdigit():
        return complete_graph(int(s[1:]))
    if s.startswith("c") and s[1:].isdigit():
        return cycle_graph(int(s[1:]))
    with open(spec) as fh:
        edges = []
        for line in fh:
            parts = line.replace("-", " ").split()
            if len(parts) >= 2 and not line.startswith("#"):
                edges.append((int(parts[0]), int(parts[1])))
    return BaseGraph.from_edges(edges)


def connected_graphs(max_edges: int) -> list[BaseGraph]:
    """All connected simple graphs with 1..max_edges edges, one per isomorphism class.

    Grown edge by edge from a single edge; every connected graph arises by
    adding an edge (inside, or to one new node) to a connected graph with
    one edge fewer. Duplicates are removed with a WL hash bucket plus an
    exact isomorphism check.
    """
    level = [nx.Graph([(0, 1)])]
    out = list(level)
    for _ in range(max_edges - 1):
        buckets: dict[str, list[nx.Graph]] = {}
        for g in level:
            n = g.number_of_nodes()
            grown = []
            for u in range(n):
                for v in range(u + 1, n):
                    if not g.has_edge(u, v):
                        grown.append((u, v))
                grown.append((u, n))
            for u, v in grown:
                h = g.copy()
                h.add_edge(u, v)
                key = nx.weisfeiler_lehman_graph_hash(h)
                bucket = buckets.setdefault(key, [])
                if not any(nx.is_isomorphic(h, x) for x in bucket):
                    bucket.append(h)
        level = [g for b in buckets.values() for g in b]
        out.extend(level)
    return [BaseGraph.from_networkx(g) for g in out]
