"""Satisfiability backends: an embedded CDCL solver and an external DIMACS bridge.

Every SAT verdict leaving this module carries a model that has been checked
against all clauses of the input formula.
"""
from __future__ import annotations

import enum
import heapq
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable

from .cnf import CnfFormula, is_tautology, write_dimacs


class Verdict(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


class SolverError(RuntimeError):
    pass


@dataclass
class SolveResult:
    verdict: Verdict
    model: dict[int, bool] | None = None
    stats: dict[str, float] = field(default_factory=dict)
    engine: str = "embedded"
    diagnostics: str = ""

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT

    @property
    def unsat(self) -> bool:
        return self.verdict is Verdict.UNSAT


def _verified(f: CnfFormula, res: SolveResult) -> SolveResult:
    if res.verdict is Verdict.SAT:
        if res.model is None or not f.is_satisfied_by(res.model):
            raise SolverError(f"{res.engine} returned a model that does not satisfy the formula")
    return res


def _luby(i: int) -> int:
    # i >= 1
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class _Cdcl:
    """Minimal CDCL core. Literal codes: 2*(v-1) for v, 2*(v-1)+1 for -v."""

    def __init__(self, f: CnfFormula, branching: str = "vsids"):
        n = f.num_vars
        self.n = n
        self.branching = branching
        self.val = [0] * (2 * n)          # 1 true, -1 false, 0 unassigned
        self.level = [0] * n
        self.reason: list[int] = [-1] * n
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int] | None] = []
        self.learnt: list[int] = []
        self.lbd: dict[int, int] = {}
        self.watches: list[list[int]] = [[] for _ in range(2 * n)]
        self.activity = [0.0] * n
        self.var_inc = 1.0
        self.phase = [1] * n              # 1 -> try the negated code first (false)
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(n)]
        self.seen = [False] * n
        self.ok = True
        self.stats = {"decisions": 0, "propagations": 0, "conflicts": 0, "restarts": 0, "learnt": 0}
        for v in range(n):
            # positive polarity first, as in the fixed-order branching rule
            self.phase[v] = 0
        for c in f.clauses:
            if is_tautology(c):
                continue
            codes = [2 * (abs(l) - 1) + (l < 0) for l in c]
            if len(codes) == 1:
                if not self._enqueue_root(codes[0]):
                    self.ok = False
                    return
            else:
                self._attach(codes)
        if f.empty_clause:
            self.ok = False

    def _enqueue_root(self, lit: int) -> bool:
        v = self.val[lit]
        if v == 1:
            return True
        if v == -1:
            return False
        self._assign(lit, -1)
        return True

    def _attach(self, codes: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(codes)
        self.watches[codes[0]].append(ci)
        self.watches[codes[1]].append(ci)
        return ci

    def _assign(self, lit: int, reason: int):
        val = self.val
        val[lit] = 1
        val[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        val, clauses, watches, trail = self.val, self.clauses, self.watches, self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            keep = []
            i, nws = 0, len(ws)
            while i < nws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if val[first] == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1], c[k] = lk, false_lit
                        watches[lk].append(ci)
                        break
                else:
                    keep.append(ci)
                    if val[first] == -1:
                        keep.extend(ws[i:])
                        watches[false_lit] = keep
                        self.stats["propagations"] += props
                        return ci
                    # inline _assign
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    self.level[v] = len(self.trail_lim)
                    self.reason[v] = ci
                    trail.append(first)
            watches[false_lit] = keep
        self.stats["propagations"] += props
        return -1

    def _bump(self, v: int):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(self.n):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(self.n) if self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def analyze(self, confl: int) -> tuple[list[int], int, int]:
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        to_clear = []
        while True:
            c = self.clauses[confl]
            for q in (c if p == -1 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    to_clear.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            counter -= 1
            if counter == 0:
                break
            # reason clauses keep their implied literal at position 0
        learnt[0] = p ^ 1
        # cheap minimisation: drop literals whose reason is subsumed by the clause
        in_clause = {q >> 1 for q in learnt}
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r == -1:
                kept.append(q)
                continue
            if all((x >> 1) in in_clause or level[x >> 1] == 0 for x in self.clauses[r][1:]):
                continue
            kept.append(q)
        learnt = kept
        for v in to_clear:
            seen[v] = False
        if len(learnt) == 1:
            bt = 0
        else:
            best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        self.var_inc /= 0.95
        return learnt, bt, lbd

    def cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        val, trail, phase = self.val, self.trail, self.phase
        start = self.trail_lim[lvl]
        act = self.activity
        for i in range(len(trail) - 1, start - 1, -1):
            lit = trail[i]
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            phase[v] = lit & 1
            self.reason[v] = -1
            heapq.heappush(self.heap, (-act[v], v))
        del trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(trail)
        if len(self.heap) > 8 * self.n + 1024:
            # stale entries only ever sink; rebuild before they pile up
            self.heap = [(-act[u], u) for u in range(self.n) if val[2 * u] == 0]
            heapq.heapify(self.heap)

    def pick(self) -> int:
        val = self.val
        if self.branching == "lowest":
            for v in range(self.n):
                if val[2 * v] == 0:
                    return 2 * v
            return -1
        heap, act = self.heap, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -a == act[v]:
                return 2 * v + self.phase[v]
        for v in range(self.n):  # stale heap; fall back to a scan
            if val[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    def reduce_db(self):
        locked = {self.reason[self.clauses[ci][0] >> 1] for ci in self.learnt
                  if self.clauses[ci] is not None}
        cands = sorted(self.learnt, key=lambda ci: (self.lbd[ci], len(self.clauses[ci])))
        keep_n = len(cands) // 2
        survivors = []
        for rank, ci in enumerate(cands):
            if rank < keep_n or ci in locked or self.lbd[ci] <= 2:
                survivors.append(ci)
            else:
                self.clauses[ci] = None
                del self.lbd[ci]
        self.learnt = survivors

    def solve(self, max_conflicts=None, max_decisions=None, deadline=None) -> bool | None:
        if not self.ok:
            return False
        if self.propagate() != -1:
            return False
        restart_idx = 1
        budget = 100 * _luby(restart_idx)
        since_restart = 0
        max_learnts = max(len(self.clauses) // 3, 2000)
        stats = self.stats
        while True:
            confl = self.propagate()
            if confl != -1:
                stats["conflicts"] += 1
                since_restart += 1
                if not self.trail_lim:
                    return False
                learnt, bt, lbd = self.analyze(confl)
                self.cancel_until(bt)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self.learnt.append(ci)
                    self.lbd[ci] = lbd
                    stats["learnt"] += 1
                    self._assign(learnt[0], ci)
                if max_conflicts is not None and stats["conflicts"] >= max_conflicts:
                    return None
                if deadline is not None and stats["conflicts"] % 64 == 0 and time.monotonic() > deadline:
                    return None
                continue
            if since_restart >= budget and self.branching != "lowest":
                stats["restarts"] += 1
                restart_idx += 1
                budget = 100 * _luby(restart_idx)
                since_restart = 0
                self.cancel_until(0)
                continue
            if len(self.learnt) - len(self.trail) > max_learnts:
                self.reduce_db()
                max_learnts = int(max_learnts * 1.1)
            lit = self.pick()
            if lit == -1:
                return True
            stats["decisions"] += 1
            if max_decisions is not None and stats["decisions"] > max_decisions:
                return None
            if deadline is not None and stats["decisions"] % 1024 == 0 and time.monotonic() > deadline:
                return None
            self.trail_lim.append(len(self.trail))
            self._assign(lit, -1)

    def model(self) -> dict[int, bool]:
        return {v + 1: self.val[2 * v] == 1 for v in range(self.n)}


def solve_embedded(f: CnfFormula, max_decisions: int | None = None, max_conflicts: int | None = None,
                   max_seconds: float | None = None, branching: str = "vsids") -> SolveResult:
    """Complete CDCL search. Budget exhaustion yields UNKNOWN, never a guess.

    ``branching="vsids"`` (default) uses deterministic activity ordering with
    ties broken by lowest variable; ``"lowest"`` always branches on the lowest
    unassigned variable, positive first, and disables restarts.
    """
    if branching not in ("vsids", "lowest"):
        raise ValueError(f"unknown branching rule {branching!r}")
    t0 = time.monotonic()
    core = _Cdcl(f, branching)
    deadline = t0 + max_seconds if max_seconds is not None else None
    out = core.solve(max_conflicts, max_decisions, deadline)
    stats = dict(core.stats)
    stats["wall_ms"] = (time.monotonic() - t0) * 1000
    if out is None:
        return SolveResult(Verdict.UNKNOWN, None, stats, "embedded", "budget exhausted")
    if out:
        return _verified(f, SolveResult(Verdict.SAT, core.model(), stats, "embedded"))
    return SolveResult(Verdict.UNSAT, None, stats, "embedded")


# ---------------------------------------------------------------- external bridge

def parse_competition_output(text: str, num_vars: int) -> tuple[Verdict, dict[int, bool] | None, str]:
    """Parse ``s``/``v`` lines in SAT-competition format."""
    status = None
    values: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = Verdict.SAT
            elif word == "UNSATISFIABLE":
                status = Verdict.UNSAT
            else:
                status = Verdict.UNKNOWN
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                try:
                    values.append(int(tok))
                except ValueError:
                    return Verdict.UNKNOWN, None, f"bad model token {tok!r}"
    if status is None:
        return Verdict.UNKNOWN, None, "no status line"
    if status is not Verdict.SAT:
        return status, None, ""
    model = {v: False for v in range(1, num_vars + 1)}
    for lit in values:
        if lit == 0:
            continue
        if abs(lit) <= num_vars:
            model[abs(lit)] = lit > 0
    return status, model, ""


def solve_external(f: CnfFormula, command: str, timeout: float | None = None) -> SolveResult:
    """Run an external solver; ``{input}`` in the command is replaced by the
    DIMACS file path (appended when the placeholder is absent).

    Exit codes 0, 10 and 20 are accepted; anything else, a timeout or an
    unparseable transcript gives UNKNOWN with diagnostics attached.
    """
    fd, path = tempfile.mkstemp(suffix=".cnf")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(write_dimacs(f))
        if "{input}" in command:
            argv = shlex.split(command.replace("{input}", shlex.quote(path)))
        else:
            argv = shlex.split(command) + [path]
        t0 = time.monotonic()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except FileNotFoundError as exc:
            raise SolverError(f"solver executable not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired:
            return SolveResult(Verdict.UNKNOWN, None, {"wall_ms": (time.monotonic() - t0) * 1000},
                               "external", f"timeout after {timeout}s")
        stats = {"wall_ms": (time.monotonic() - t0) * 1000, "exit_code": proc.returncode}
        if proc.returncode not in (0, 10, 20):
            return SolveResult(Verdict.UNKNOWN, None, stats, "external",
                               f"exit code {proc.returncode}: {proc.stderr.strip()[-500:]}")
        verdict, model, diag = parse_competition_output(proc.stdout, f.num_vars)
        return _verified(f, SolveResult(verdict, model, stats, "external", diag))
    finally:
        os.unlink(path)


@dataclass
class SolverConfig:
    engine: str = "embedded"
    command: str = ""
    timeout: float | None = None
    branching: str = "vsids"

    def solve(self, f: CnfFormula) -> SolveResult:
        if self.engine == "embedded":
            return solve_embedded(f, max_seconds=self.timeout, branching=self.branching)
        if self.engine == "external":
            if not self.command:
                raise SolverError("external engine needs a solver command")
            return solve_external(f, self.command, self.timeout)
        raise ValueError(f"unknown solver engine {self.engine!r}")


Solver = Callable[[CnfFormula], SolveResult]
