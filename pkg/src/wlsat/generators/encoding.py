"""Graph-to-formula encoding: one variable per node, (x_v | x_w) per edge, unit x_v per node."""
from __future__ import annotations

from ..cnf import CnfFormula, make_clause
from .base import BaseGraph


def encode_graph_as_cnf(g: BaseGraph) -> CnfFormula:
    index = {v: i + 1 for i, v in enumerate(g.nodes)}
    clauses = [make_clause((index[u], index[v])) for u, v in g.edges]
    clauses += [(index[v],) for v in g.nodes]
    return CnfFormula(len(index), tuple(clauses), meta={"family": "graph-encoding"})
