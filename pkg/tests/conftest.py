import random

import pytest
from hypothesis import strategies as st

from wlsat.cnf import CnfFormula

# x1 = x3, x1 xor x2, x2 xor x3: satisfied by (1,0,1) and (0,1,0)
XOR_CHAIN = CnfFormula(3, ((1, -3), (1, 2), (2, 3), (3, -1), (-1, -2), (-2, -3)))
# same literal degrees, unsatisfiable, and the literal-clause graphs are isomorphic
XOR_CHAIN_BROKEN = CnfFormula(3, ((1, -3), (1, 2), (2, 3), (3, -2), (-2, -1), (-1, -3)))


def random_cnf(rng: random.Random, max_vars=8, max_clauses=20, max_len=4) -> CnfFormula:
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_clauses)
    clauses = []
    for _ in range(m):
        k = rng.randint(1, min(max_len, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), k)))
    return CnfFormula(n, tuple(clauses))


@st.composite
def cnf_formulas(draw, max_vars=6, max_clauses=12, max_len=3, min_clauses=0):
    n = draw(st.integers(1, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from((v, -v)))
    clause = st.lists(lit, min_size=1, max_size=max_len)
    clauses = draw(st.lists(clause, min_size=min_clauses, max_size=max_clauses))
    return CnfFormula(n, tuple(tuple(c) for c in clauses))


@pytest.fixture
def rng():
    return random.Random(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
