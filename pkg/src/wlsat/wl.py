"""Color refinement (1-WL) and tuple-based k-WL on node/edge-colored graphs.

Color ids are assigned through an exact signature dictionary: the distinct
signatures of a round are sorted and numbered in that order, so two nodes
share an id iff their signatures are equal. No hashing is involved.

k-WL follows the machine-learning numbering: tuples range over all of V^k
(repeats included), start from their atomic type, and are refined by the
multiset of colors obtained by substituting every node at each position.
Under that numbering k-WL matches the classical (k-1)-dimensional test.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graphs import NodeKind, SatGraph, disjoint_union

DEFAULT_TUPLE_BUDGET = 5_000_000


class TupleBudgetExceeded(ValueError):
    pass


@dataclass
class WlRun:
    """Round-by-round colorings of one refinement run.

    ``colorings[r]`` is the coloring after r rounds. ``converged_round`` is the
    first r whose partition equals that of round r+1 (None if ``max_rounds``
    stopped the run earlier).
    """

    colorings: list[tuple[int, ...]]
    converged_round: int | None
    class_sizes: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def stable(self) -> tuple[int, ...]:
        return self.colorings[-1]

    @property
    def rounds(self) -> int:
        return len(self.colorings) - 1

    def num_classes(self, r: int) -> int:
        return len(set(self.colorings[r]))


def _initial_keys(g: SatGraph, labels: Mapping[int, str] | None):
    labels = labels or {}
    return [(int(k), labels.get(v, "")) for v, k in enumerate(g.kinds)]


def _number(sigs: Sequence) -> tuple[int, ...]:
    index = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return tuple(index[s] for s in sigs)


def _refine_step(adj_lists, colors: tuple[int, ...]) -> tuple[int, ...]:
    sigs = []
    for v, c in enumerate(colors):
        sigs.append((c,) + tuple(tuple(sorted([colors[w] for w in adj[v]])) for adj in adj_lists))
    return _number(sigs)


def wl_refine(g: SatGraph, labels: Mapping[int, str] | None = None,
              max_rounds: int | None = None) -> WlRun:
    """Run color refinement until the node partition stops changing."""
    adj_lists = [g.adjacency[c] for c in g.colors]
    colors = _number(_initial_keys(g, labels))
    history = [colors]
    sizes = [tuple(sorted(Counter(colors).values()))]
    converged = None
    r = 0
    while max_rounds is None or r < max_rounds:
        new = _refine_step(adj_lists, colors)
        n_old, n_new = len(set(colors)), len(set(new))
        # each new class lies inside one old class: the old color leads the signature
        assert len(set(zip(new, colors))) == n_new >= n_old
        if n_new == n_old:
            converged = r
            break
        colors = new
        history.append(colors)
        sizes.append(tuple(sorted(Counter(colors).values())))
        r += 1
    return WlRun(history, converged, sizes)


@dataclass
class WlVerdict:
    distinguished: bool
    round: int | None
    histograms: tuple[Counter, Counter]
    rounds_run: int

    def __bool__(self):
        return self.distinguished


def wl_distinguish(g1: SatGraph, g2: SatGraph, labels1: Mapping[int, str] | None = None,
                   labels2: Mapping[int, str] | None = None) -> WlVerdict:
    """WL test on the disjoint union; reports the first round whose per-graph
    color histograms differ."""
    n1 = g1.num_nodes
    union = disjoint_union(g1, g2)
    labels = dict(labels1 or {})
    labels.update({v + n1: s for v, s in (labels2 or {}).items()})
    adj_lists = [union.adjacency[c] for c in union.colors]
    colors = _number(_initial_keys(union, labels))
    r = 0
    while True:
        h1, h2 = Counter(colors[:n1]), Counter(colors[n1:])
        if h1 != h2:
            return WlVerdict(True, r, (h1, h2), r)
        new = _refine_step(adj_lists, colors)
        if len(set(new)) == len(set(colors)):
            return WlVerdict(False, None, (h1, h2), r)
        colors = new
        r += 1


def literal_partition(run: WlRun, g: SatGraph, round: int) -> list[list[int]]:
    """Classes of literal nodes under the round-r coloring, ordered by smallest member."""
    if not 0 <= round < len(run.colorings):
        raise ValueError(f"round {round} outside 0..{len(run.colorings) - 1}")
    coloring = run.colorings[round]
    classes: dict[int, list[int]] = {}
    for v in g.nodes_of(NodeKind.LITERAL):
        classes.setdefault(coloring[v], []).append(v)
    return sorted(classes.values(), key=lambda c: c[0])


def format_trace(run: WlRun) -> str:
    lines = []
    for r, sizes in enumerate(run.class_sizes):
        lines.append(f"round {r}: {len(sizes)} classes, sizes {' '.join(map(str, sorted(sizes, reverse=True)))}")
    lines.append(f"converged at round {run.converged_round}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- k-WL

@dataclass
class TupleColoring:
    """Stable k-WL coloring; ``colors[v1, ..., vk]`` is the tuple's color id."""

    k: int
    colors: np.ndarray
    round: int

    def diagonal(self) -> np.ndarray:
        n = self.colors.shape[0]
        idx = np.arange(n)
        return self.colors[(idx,) * self.k]


def _check_k(k: int, sizes: Sequence[int], budget: int):
    if k not in (2, 3, 4):
        raise ValueError("k-WL supports k in {2, 3, 4}")
    total = sum(n ** k for n in sizes)
    if total > budget:
        raise TupleBudgetExceeded(
            f"{k}-WL needs {total} tuples, over the budget of {budget}")


def _joint_ids(blocks: list[np.ndarray]) -> list[np.ndarray]:
    """Number the rows of several integer matrices through one dictionary."""
    stacked = np.concatenate(blocks, axis=0)
    _, inv = np.unique(stacked, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    out, start = [], 0
    for b in blocks:
        out.append(inv[start:start + len(b)])
        start += len(b)
    return out


def _atomic_features(g: SatGraph, k: int, node_color: np.ndarray) -> np.ndarray:
    n = g.num_nodes
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v, c in g.edges:
        adj[u, v] |= 1 << int(c)
        adj[v, u] |= 1 << int(c)
    idx = np.indices((n,) * k).reshape(k, -1)
    cols = [node_color[idx[i]] for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            cols.append((idx[i] == idx[j]).astype(np.int64))
            cols.append(adj[idx[i], idx[j]])
    return np.stack(cols, axis=1)


def _kwl_rounds(graphs: Sequence[SatGraph], k: int, labels: Sequence[Mapping[int, str] | None],
                budget: int, max_rounds: int | None):
    """Yield (round, per-graph color arrays) until the joint partition is stable."""
    sizes = [g.num_nodes for g in graphs]
    _check_k(k, sizes, budget)
    keys = [_initial_keys(g, lab) for g, lab in zip(graphs, labels)]
    index = {key: i for i, key in enumerate(sorted({x for ks in keys for x in ks}))}
    node_colors = [np.array([index[x] for x in ks], dtype=np.int64) for ks in keys]
    feats = [_atomic_features(g, k, nc) for g, nc in zip(graphs, node_colors)]
    colors = [ids.reshape((n,) * k) for ids, n in zip(_joint_ids(feats), sizes)]
    total = len(np.unique(np.concatenate([c.ravel() for c in colors])))
    r = 0
    while True:
        yield r, colors, False
        if max_rounds is not None and r >= max_rounds:
            return
        cols = [[c.reshape(-1, 1)] for c in colors]
        for i in range(k):
            fibers = []
            for c, n in zip(colors, sizes):
                s = np.moveaxis(np.sort(c, axis=i), i, -1)
                fibers.append(s.reshape(-1, n))
            fids = _joint_ids(fibers) if len(set(sizes)) == 1 else _separate_ids(fibers)
            for j, (fid, n) in enumerate(zip(fids, sizes)):
                f = np.expand_dims(fid.reshape((n,) * (k - 1)), axis=i)
                cols[j].append(np.broadcast_to(f, (n,) * k).reshape(-1, 1))
        sig = [np.concatenate(c, axis=1) for c in cols]
        new = [ids.reshape((n,) * k) for ids, n in zip(_joint_ids(sig), sizes)]
        new_total = len(np.unique(np.concatenate([c.ravel() for c in new])))
        if new_total == total:
            yield r, colors, True
            return
        colors, total = new, new_total
        r += 1


def _separate_ids(fibers: list[np.ndarray]) -> list[np.ndarray]:
    # fibers of different lengths can never coincide; offset ids per graph
    out, off = [], 0
    for f in fibers:
        ids = _joint_ids([f])[0] + off
        off = int(ids.max()) + 1 if ids.size else off
        out.append(ids)
    return out


def kwl_refine(g: SatGraph, k: int, labels: Mapping[int, str] | None = None,
               tuple_budget: int = DEFAULT_TUPLE_BUDGET, max_rounds: int | None = None) -> TupleColoring:
    last = None
    for r, colors, _ in _kwl_rounds([g], k, [labels], tuple_budget, max_rounds):
        last = (r, colors[0])
    return TupleColoring(k, last[1], last[0])


def kwl_distinguish(g1: SatGraph, g2: SatGraph, k: int,
                    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
                    labels1: Mapping[int, str] | None = None,
                    labels2: Mapping[int, str] | None = None) -> WlVerdict:
    """k-WL test: tuples of each graph refined under one shared dictionary."""
    if g1.num_nodes != g2.num_nodes:
        _check_k(k, [g1.num_nodes, g2.num_nodes], tuple_budget)
        return WlVerdict(True, 0, (Counter({"tuples": g1.num_nodes ** k}),
                                   Counter({"tuples": g2.num_nodes ** k})), 0)
    h1 = h2 = Counter()
    r = 0
    for r, (c1, c2), _ in _kwl_rounds([g1, g2], k, [labels1, labels2], tuple_budget, None):
        h1 = Counter(c1.ravel().tolist())
        h2 = Counter(c2.ravel().tolist())
        if h1 != h2:
            return WlVerdict(True, r, (h1, h2), r)
    return WlVerdict(False, None, (h1, h2), r)
