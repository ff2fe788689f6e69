import random
from collections import Counter
from itertools import product

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wlsat.cnf import CnfFormula, formulas_isomorphic
from wlsat.generators.base import named_graph
from wlsat.generators.cfi import build_cfi_pair
from wlsat.generators.random3sat import random_3sat
from wlsat.generators.regular import regularize_to_3
from wlsat.graphs import EdgeColor, NodeKind, SatGraph, build_lcn
from wlsat.wl import (TupleBudgetExceeded, format_trace, kwl_distinguish, kwl_refine, literal_partition,
                      wl_distinguish, wl_refine)

from conftest import XOR_CHAIN, cnf_formulas


def plain(n, pairs):
    return SatGraph((NodeKind.PLAIN,) * n, tuple((u, v, EdgeColor.PLAIN) for u, v in pairs))


def from_nx(h):
    nodes = sorted(h.nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    return plain(len(nodes), [(pos[u], pos[v]) for u, v in h.edges])


C6 = plain(6, [(i, (i + 1) % 6) for i in range(6)])
TWO_C3 = plain(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def shrikhande():
    h = nx.Graph()
    gens = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)]
    for a, b in product(range(4), repeat=2):
        for da, db in gens:
            h.add_edge((a, b), ((a + da) % 4, (b + db) % 4))
    return from_nx(h)


def rook_4x4():
    return from_nx(nx.cartesian_product(nx.complete_graph(4), nx.complete_graph(4)))


# ---- independent oracles

def naive_kwl_distinguish(g1, g2, k):
    """Dictionary-based k-WL over explicit tuple lists, no numpy."""
    graphs = [g1, g2]
    tuples = [list(product(range(g.num_nodes), repeat=k)) for g in graphs]
    adjs = []
    for g in graphs:
        a = {}
        for u, v, c in g.edges:
            a.setdefault((u, v), set()).add(int(c))
            a.setdefault((v, u), set()).add(int(c))
        adjs.append(a)

    def atomic(g, a, t):
        return (tuple(int(g.kinds[x]) for x in t),
                tuple((t[i] == t[j], tuple(sorted(a.get((t[i], t[j]), ())))) for i in range(k)
                      for j in range(i + 1, k)))

    sigs = [{t: atomic(g, a, t) for t in ts} for g, a, ts in zip(graphs, adjs, tuples)]
    classes = None
    while True:
        index = {s: i for i, s in enumerate(sorted({s for d in sigs for s in d.values()}))}
        cols = [{t: index[s] for t, s in d.items()} for d in sigs]
        if Counter(cols[0].values()) != Counter(cols[1].values()):
            return True
        if classes is not None and len(index) == classes:
            return False
        classes = len(index)
        sigs = []
        for g, col in zip(graphs, cols):
            n = g.num_nodes
            sigs.append({t: (col[t],) + tuple(tuple(sorted(col[t[:i] + (u,) + t[i + 1:]] for u in range(n)))
                                              for i in range(k))
                         for t in col})


def nx_wl_equal(g1, g2):
    def conv(g):
        h = nx.Graph()
        for v, kd in enumerate(g.kinds):
            h.add_node(v, label=str(int(kd)))
        for u, v, c in g.edges:
            h.add_edge(u, v, label=str(int(c)))
        return h
    it = g1.num_nodes + g2.num_nodes + 1
    hash1 = nx.weisfeiler_lehman_graph_hash(conv(g1), node_attr="label", edge_attr="label", iterations=it)
    hash2 = nx.weisfeiler_lehman_graph_hash(conv(g2), node_attr="label", edge_attr="label", iterations=it)
    return hash1 == hash2


def random_plain(rng, n, p):
    return plain(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


# ---- 1-WL

def test_c6_vs_two_triangles():
    assert not wl_distinguish(C6, TWO_C3)
    assert not kwl_distinguish(C6, TWO_C3, 2)
    v = kwl_distinguish(C6, TWO_C3, 3)
    assert v.distinguished and v.round is not None


def test_isolated_node_converges_immediately():
    run = wl_refine(plain(1, []))
    assert run.converged_round == 0
    assert run.rounds == 0 and run.num_classes(0) == 1


def test_path_refines_once():
    run = wl_refine(plain(3, [(0, 1), (1, 2)]))
    assert run.colorings[1][0] == run.colorings[1][2] != run.colorings[1][1]
    assert run.converged_round == 1


def test_different_sizes_distinguished_at_round_zero():
    v = wl_distinguish(plain(2, []), plain(3, []))
    assert v.distinguished and v.round == 0


def test_three_regular_formula_has_one_literal_color():
    rng = random.Random(3)
    f = CnfFormula(6, tuple(tuple(rng.choice((1, -1)) * v for v in rng.sample(range(1, 7), 3)) for _ in range(8)))
    g3 = regularize_to_3(f)
    g = build_lcn(g3)
    run = wl_refine(g)
    assert len(literal_partition(run, g, run.rounds)) == 1


def test_xor_chain_literal_classes():
    g = build_lcn(XOR_CHAIN)
    run = wl_refine(g)
    assert run.converged_round == 0
    assert literal_partition(run, g, 0) == [[0, 1, 2, 3, 4, 5]]


def test_literal_partition_round_range():
    g = build_lcn(XOR_CHAIN)
    run = wl_refine(g)
    with pytest.raises(ValueError):
        literal_partition(run, g, run.rounds + 1)
    with pytest.raises(ValueError):
        literal_partition(run, g, -1)


def test_labels_split_classes():
    g = build_lcn(XOR_CHAIN)
    run = wl_refine(g, labels={0: "T", 1: "F"})
    assert run.num_classes(0) > wl_refine(g).num_classes(0)


def test_random_3sat_converges_at_round_four():
    f = random_3sat(250, seed=0)
    run = wl_refine(build_lcn(f))
    assert run.converged_round == 4


def test_max_rounds_stops_early():
    f = random_3sat(60, seed=1)
    run = wl_refine(build_lcn(f), max_rounds=1)
    assert run.rounds <= 1 and run.converged_round in (None, 0)


def test_format_trace():
    text = format_trace(wl_refine(plain(3, [(0, 1), (1, 2)])))
    assert text == "round 0: 1 classes, sizes 3\nround 1: 2 classes, sizes 2 1\nconverged at round 1\n"


@settings(max_examples=60, deadline=None)
@given(cnf_formulas(), st.integers(0, 10_000))
def test_permutation_invariance(f, seed):
    g = build_lcn(f)
    perm = list(range(g.num_nodes))
    random.Random(seed).shuffle(perm)
    a, b = wl_refine(g), wl_refine(g.relabel(perm))
    assert a.class_sizes == b.class_sizes
    assert a.converged_round == b.converged_round
    assert not wl_distinguish(g, g.relabel(perm))


@settings(max_examples=60, deadline=None)
@given(cnf_formulas())
def test_refinement_is_monotone(f):
    run = wl_refine(build_lcn(f))
    for r in range(run.rounds):
        pairs = set(zip(run.colorings[r + 1], run.colorings[r]))
        assert len(pairs) == len(set(run.colorings[r + 1]))
        assert run.num_classes(r + 1) > run.num_classes(r)


@settings(max_examples=60, deadline=None)
@given(cnf_formulas(max_vars=5, max_clauses=8), cnf_formulas(max_vars=5, max_clauses=8))
def test_wl_distinguished_implies_non_isomorphic(f, g):
    if f.num_vars == g.num_vars and wl_distinguish(build_lcn(f), build_lcn(g)):
        assert not formulas_isomorphic(f, g)


@settings(max_examples=60, deadline=None)
@given(cnf_formulas(max_vars=4, max_clauses=6), cnf_formulas(max_vars=4, max_clauses=6))
def test_agrees_with_networkx_wl_hash(f, g):
    a, b = build_lcn(f), build_lcn(g)
    assert (not wl_distinguish(a, b)) == nx_wl_equal(a, b)


def test_deterministic():
    f = random_3sat(80, seed=5)
    assert wl_refine(build_lcn(f)).colorings == wl_refine(build_lcn(f)).colorings


# ---- k-WL

@pytest.mark.parametrize("k", [2, 3])
def test_kwl_matches_naive_oracle(k):
    rng = random.Random(11 + k)
    for _ in range(25 if k == 2 else 10):
        n = rng.randint(3, 6)
        g, h = random_plain(rng, n, 0.5), random_plain(rng, n, 0.5)
        assert bool(kwl_distinguish(g, h, k)) == naive_kwl_distinguish(g, h, k)


def test_kwl_matches_oracle_on_lcns():
    a, b = build_lcn(XOR_CHAIN), build_lcn(CnfFormula(3, ((1, 2), (2, 3), (1, 3), (-1, -2), (-2, -3), (-1, -3))))
    for k in (2, 3):
        assert bool(kwl_distinguish(a, b, k)) == naive_kwl_distinguish(a, b, k)


def test_two_wl_equals_color_refinement():
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(4, 8)
        g, h = random_plain(rng, n, 0.4), random_plain(rng, n, 0.4)
        assert bool(kwl_distinguish(g, h, 2)) == bool(wl_distinguish(g, h))


def test_strongly_regular_pair():
    # both are srg(16, 6, 2, 2); only the rook's graph contains a 4-clique
    s, r = shrikhande(), rook_4x4()
    assert not wl_distinguish(s, r)
    assert not kwl_distinguish(s, r, 3)
    assert kwl_distinguish(s, r, 4)


def test_diagonal_refines_color_refinement():
    f = random_3sat(12, seed=2, num_clauses=40)
    g = build_lcn(f)
    diag = kwl_refine(g, 2).diagonal()
    stable = wl_refine(g).stable
    assert len(set(zip(diag.tolist(), stable))) == len(set(diag.tolist()))


@pytest.mark.parametrize("name", ["k4", "c3", "c4"])
def test_cfi_pairs_need_three_wl(name):
    plain_inst, twisted = build_cfi_pair(named_graph(name))
    a, b = build_lcn(plain_inst.formula), build_lcn(twisted.formula)
    assert not wl_distinguish(a, b)
    assert not kwl_distinguish(a, b, 2)
    if name != "k4":
        assert kwl_distinguish(a, b, 3)


@pytest.mark.parametrize("name", ["k1,3", "k1,5"])
def test_cfi_pairs_over_stars_are_separated(name):
    # a leaf gadget is a unit clause plus one binary clause; the twist moves the unit
    # onto the other literal of the edge, which color refinement already sees
    plain_inst, twisted = build_cfi_pair(named_graph(name))
    assert wl_distinguish(build_lcn(plain_inst.formula), build_lcn(twisted.formula))


def test_kwl_budget_refusal():
    g = plain(30, [])
    with pytest.raises(TupleBudgetExceeded):
        kwl_distinguish(g, g, 4, tuple_budget=10_000)
    with pytest.raises(TupleBudgetExceeded):
        kwl_refine(g, 3, tuple_budget=1000)


def test_kwl_rejects_unsupported_k():
    with pytest.raises(ValueError):
        kwl_refine(C6, 5)
    with pytest.raises(ValueError):
        kwl_refine(C6, 1)


def test_kwl_different_sizes():
    v = kwl_distinguish(plain(3, []), plain(4, []), 2)
    assert v.distinguished and v.round == 0


def test_kwl_deterministic():
    g = build_lcn(XOR_CHAIN)
    assert (kwl_refine(g, 3).colors == kwl_refine(g, 3).colors).all()
