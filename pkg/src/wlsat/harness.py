"""Expressivity experiment: WL-equality-augmented formulas, r_crit and batch reports.

For a satisfiable formula f and a WL round r, f_r adds to f an implication
cycle per class of the round-r literal partition of LCN(f), forcing all
literals of a class to take one value. r_crit is the smallest r >= 1 with
f_r satisfiable. Partitions refine with r, so the constraints only weaken
and satisfiability is upward closed; that is what makes binary search valid.
"""
from __future__ import annotations

import csv
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence

from .cnf import CnfFormula, lit_key, make_clause, read_dimacs
from .graphs import build_lcn, label_assignment
from .solver import SolveResult, SolverConfig, Verdict
from .wl import literal_partition, wl_distinguish, wl_refine

log = logging.getLogger(__name__)

STATUSES = ("solved", "wl_insufficient", "incomplete", "precheck_unsat")
MATCH_CAP = 200_000


@dataclass
class AugmentedFormula:
    base: CnfFormula
    round: int
    classes: list[list[int]]
    added: list[list[tuple[int, ...]]]

    @property
    def formula(self) -> CnfFormula:
        return self.base.with_clauses(c for block in self.added for c in block)

    @property
    def num_added(self) -> int:
        return sum(len(b) for b in self.added)


def equality_cycle(members: Sequence[int]) -> list[tuple[int, ...]]:
    """(-l_n | l_1) and (-l_i | l_{i+1}): all of ``members`` take one value. Singletons add nothing."""
    if len(members) < 2:
        return []
    out = [make_clause((-members[-1], members[0]))]
    out += [make_clause((-a, b)) for a, b in zip(members, members[1:])]
    return out


def augment(f: CnfFormula, partition: Iterable[Iterable[int]], round: int = 0) -> AugmentedFormula:
    """f_r for a partition of the literals of f (all 2n of them, given as signed ids)."""
    classes = [sorted(c, key=lit_key) for c in partition]
    seen = [l for c in classes for l in c]
    expected = {s * v for v in range(1, f.num_vars + 1) for s in (1, -1)}
    unknown = set(seen) - expected
    if unknown:
        raise ValueError(f"partition references unknown literals {sorted(unknown)[:5]}")
    if len(seen) != len(set(seen)) or set(seen) != expected:
        raise ValueError("partition must cover every literal exactly once")
    classes.sort(key=lambda c: lit_key(c[0]))
    return AugmentedFormula(f, round, classes, [equality_cycle(c) for c in classes])


def wl_literal_classes(f: CnfFormula, max_rounds: int | None = None):
    """WL run on LCN(f) and a function round -> literal classes (signed ids)."""
    g = build_lcn(f)
    run = wl_refine(g, max_rounds=max_rounds)

    def classes(r: int) -> list[list[int]]:
        r = min(r, run.rounds)
        return [[g.node_lits[v] for v in c] for c in literal_partition(run, g, r)]

    return run, classes


@dataclass
class ExpressivityReport:
    instance: str
    family: str
    difficulty: str
    n_vars: int
    n_clauses: int
    r_converged: int | None = None
    r_crit: int | None = None
    status: str = "incomplete"
    verdicts: dict[int, str] = field(default_factory=dict)
    solver_stats: dict[str, float] = field(default_factory=dict)
    wall_ms: float = 0.0
    reason: str = ""

    def row(self) -> dict:
        return {"instance": self.instance, "family": self.family, "difficulty": self.difficulty,
                "n_vars": self.n_vars, "n_clauses": self.n_clauses,
                "r_converged": "" if self.r_converged is None else self.r_converged,
                "r_crit": "" if self.r_crit is None else self.r_crit,
                "status": self.status, "wall_ms": round(self.wall_ms, 1)}


class _RoundSolver:
    """Solves f_r with caching, tallies solver statistics and checks each SAT model."""

    def __init__(self, f, classes, solve, report, base_result=None):
        self.f, self.classes, self.solve, self.report = f, classes, solve, report
        self.base_result = base_result
        self.cache: dict[int, Verdict] = {}

    def __call__(self, r: int) -> Verdict:
        if r in self.cache:
            return self.cache[r]
        aug = augment(self.f, self.classes(r), r)
        if aug.num_added == 0 and self.base_result is not None:
            # f_r is f itself; reuse the precheck verdict
            res = self.base_result
        else:
            res = self.solve(aug.formula)
            for k, v in res.stats.items():
                if isinstance(v, (int, float)):
                    self.report.solver_stats[k] = self.report.solver_stats.get(k, 0) + v
            self.report.solver_stats["solves"] = self.report.solver_stats.get("solves", 0) + 1
        if res.sat:
            for c in aug.classes:
                vals = {res.model[abs(l)] == (l > 0) for l in c}
                assert len(vals) == 1, f"round {r}: model splits literal class {c}"
        self.cache[r] = res.verdict
        self.report.verdicts[r] = res.verdict.value
        return res.verdict


def compute_rcrit(f: CnfFormula, solver=None, strategy: str = "linear", precheck: bool = True,
                  instance: str = "", family: str = "", difficulty: str = "",
                  all_rounds: bool = False) -> ExpressivityReport:
    """r_converged and r_crit of a satisfiable formula.

    ``strategy`` is ``linear`` (r = 1, 2, ... until the first SAT round) or
    ``binary``. ``all_rounds`` solves every round 1..r_converged and asserts
    monotonicity. An UNKNOWN verdict on a round the answer depends on marks
    the report incomplete.
    """
    if strategy not in ("linear", "binary"):
        raise ValueError(f"unknown strategy {strategy!r}")
    solve = solver.solve if isinstance(solver, SolverConfig) else (solver or SolverConfig().solve)
    t0 = time.monotonic()
    rep = ExpressivityReport(instance, family, difficulty, f.num_vars, f.num_clauses)

    def done(status: str, reason: str = "") -> ExpressivityReport:
        rep.status, rep.reason = status, reason
        rep.wall_ms = (time.monotonic() - t0) * 1000
        return rep

    base: SolveResult | None = None
    if precheck:
        base = solve(f)
        rep.verdicts[0] = base.verdict.value
        if base.unsat:
            return done("precheck_unsat")
        if not base.sat:
            return done("incomplete", "precheck unknown")
    run, classes = wl_literal_classes(f)
    rep.r_converged = run.converged_round
    # f_r is constant from the converged round on; solve at least round 1
    top = max(run.converged_round, 1)
    at = _RoundSolver(f, classes, solve, rep, base)

    if all_rounds:
        results = [at(r) for r in range(1, top + 1)]
        for r in range(1, top):
            if results[r - 1] is Verdict.SAT and results[r] is Verdict.UNSAT:
                raise AssertionError(f"f_{r} SAT but f_{r + 1} UNSAT: monotonicity violated")

    if strategy == "linear":
        for r in range(1, top + 1):
            v = at(r)
            if v is Verdict.SAT:
                rep.r_crit = r
                return done("solved")
            if v is Verdict.UNKNOWN:
                return done("incomplete", f"round {r} unknown")
        return done("wl_insufficient")

    v = at(top)
    if v is Verdict.UNKNOWN:
        return done("incomplete", f"round {top} unknown")
    if v is Verdict.UNSAT:
        return done("wl_insufficient")
    lo, hi = 1, top  # hi is SAT
    while lo < hi:
        mid = (lo + hi) // 2
        v = at(mid)
        if v is Verdict.UNKNOWN:
            return done("incomplete", f"round {mid} unknown")
        if v is Verdict.SAT:
            hi = mid
        else:
            lo = mid + 1
    rep.r_crit = hi
    return done("solved")


# ---------------------------------------------------------------- batches

@dataclass
class BatchConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    strategy: str = "linear"
    workers: int = 1
    precheck: bool = True


@dataclass
class Instance:
    name: str
    family: str = ""
    difficulty: str = ""
    formula: CnfFormula | None = None
    path: str | None = None

    def load(self) -> CnfFormula:
        return self.formula if self.formula is not None else read_dimacs(self.path)


def _run_one(args):
    inst, cfg = args
    try:
        f = inst.load()
    except (OSError, ValueError) as exc:
        return inst.name, None, f"unreadable: {exc}"
    rep = compute_rcrit(f, cfg.solver, cfg.strategy, cfg.precheck, inst.name, inst.family, inst.difficulty)
    return inst.name, rep, ""


def run_batch(instances: Iterable[Instance], config: BatchConfig | None = None) -> list[ExpressivityReport]:
    """One report per readable instance, in input order. Unreadable ones are logged and skipped."""
    cfg = config or BatchConfig()
    jobs = [(inst, cfg) for inst in instances]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    reports = []
    for name, rep, why in results:
        if rep is None:
            log.warning("skipping %s: %s", name, why)
        else:
            reports.append(rep)
    return reports


def _mean_std(xs) -> str:
    xs = list(xs)
    if not xs:
        return ""
    return f"{statistics.fmean(xs):.2f} ± {statistics.pstdev(xs):.2f}"


def aggregate(reports: Sequence[ExpressivityReport]) -> list[dict]:
    """Rows per (family, difficulty): solved instances with mean ± std (population),
    then one row each for WL-insufficient ("unsat"), incomplete and precheck-rejected instances."""
    groups: dict[tuple[str, str], list[ExpressivityReport]] = {}
    for r in reports:
        groups.setdefault((r.family, r.difficulty), []).append(r)
    rows = []
    for (fam, diff), reps in groups.items():
        for status, label in (("solved", None), ("wl_insufficient", "unsat"),
                              ("incomplete", "incomplete"), ("precheck_unsat", "precheck_unsat")):
            sel = [r for r in reps if r.status == status]
            if not sel:
                continue
            rows.append({
                "family": fam, "difficulty": diff,
                "r_crit": _mean_std(r.r_crit for r in sel) if label is None else label,
                "r_converged": _mean_std(r.r_converged for r in sel if r.r_converged is not None),
                "n_vars": _mean_std(r.n_vars for r in sel),
                "n_clauses": _mean_std(r.n_clauses for r in sel),
                "count": len(sel),
            })
    return rows


REPORT_COLUMNS = ["instance", "family", "difficulty", "n_vars", "n_clauses", "r_converged", "r_crit", "status", "wall_ms"]
AGGREGATE_COLUMNS = ["family", "difficulty", "r_crit", "r_converged", "n_vars", "n_clauses", "count"]


def write_reports(reports: Sequence[ExpressivityReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerow(r.row())


def write_aggregate(reports: Sequence[ExpressivityReport], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=AGGREGATE_COLUMNS)
        w.writeheader()
        w.writerows(aggregate(reports))


# ---------------------------------------------------------------- matched assignments

def _formula_of(x) -> CnfFormula:
    return x.formula if hasattr(x, "formula") else x


def find_matched_assignment(pair, sigma: dict[int, bool], cap: int = MATCH_CAP) -> dict[int, bool] | None:
    """Search assignments of |sigma| variables of the second formula whose T/F-labelled
    LCN is WL-indistinguishable from the first formula's LCN labelled by sigma.

    Exhaustive over C(n~, t) * 2^t candidates in a fixed order; returns the
    first match or None. Labels always give a literal and its negation
    opposite marks, so no candidate puts equal marks on both.
    """
    f, ft = (_formula_of(x) for x in pair)
    t = len(sigma)
    total = comb(ft.num_vars, t) * 2 ** t
    if total > cap:
        raise ValueError(f"{total} candidate assignments exceed the cap of {cap}")
    g, labels = label_assignment(build_lcn(f), sigma)
    gt = build_lcn(ft)
    for vs in combinations(range(1, ft.num_vars + 1), t):
        for vals in product((True, False), repeat=t):
            cand = dict(zip(vs, vals))
            _, lt = label_assignment(gt, cand)
            if not wl_distinguish(g, gt, labels, lt):
                return cand
    return None
