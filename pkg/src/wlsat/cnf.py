"""CNF data model, DIMACS I/O, partial assignments and small brute-force oracles.

Literals are DIMACS-style signed integers: ``v`` is the positive literal of
variable ``v`` and ``-v`` its negation. A clause is a tuple of distinct
literals kept in canonical order (by variable, positive before negative), so
structural equality of formulas is plain tuple equality.
"""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

BRUTE_FORCE_CAP = 26
ISOMORPHISM_CAP = 8

Clause = tuple[int, ...]
Assignment = dict[int, bool]


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CapExceeded(ValueError):
    pass


def neg(lit: int) -> int:
    return -lit


def var(lit: int) -> int:
    return abs(lit)


def lit_key(lit: int) -> tuple[int, bool]:
    return abs(lit), lit < 0


def make_clause(lits: Iterable[int]) -> Clause:
    """Canonical clause: duplicates collapsed, sorted by (variable, sign)."""
    out = tuple(sorted(set(lits), key=lit_key))
    if not out:
        raise ValueError("clauses must be nonempty")
    if 0 in out:
        raise ValueError("0 is not a literal")
    return out


def is_tautology(clause: Clause) -> bool:
    s = set(clause)
    return any(-l in s for l in clause)


@dataclass(frozen=True)
class CnfFormula:
    """Ordered collection of canonical clauses over variables ``1..num_vars``.

    ``empty_clause`` marks the residual of an assignment that falsified some
    clause; such a formula is unsatisfiable and cannot be written as DIMACS.
    ``meta`` is free-form bookkeeping and does not take part in equality.
    """

    num_vars: int
    clauses: tuple[Clause, ...] = ()
    empty_clause: bool = False
    meta: Mapping[str, object] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be >= 0")
        canon = tuple(make_clause(c) for c in self.clauses)
        for c in canon:
            if abs(c[-1]) > self.num_vars:
                raise ValueError(f"literal {c[-1]} exceeds num_vars={self.num_vars}")
        object.__setattr__(self, "clauses", canon)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def literals(self) -> set[int]:
        """L(f): the set of literals occurring in some clause."""
        return {l for c in self.clauses for l in c}

    def literal_degrees(self) -> Counter:
        return Counter(l for c in self.clauses for l in c)

    def tautological_clauses(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.clauses) if is_tautology(c))

    def max_clause_size(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def is_satisfied_by(self, model: Mapping[int, bool]) -> bool:
        if self.empty_clause:
            return False
        return all(any(model.get(abs(l)) == (l > 0) for l in c) for c in self.clauses)

    def with_clauses(self, extra: Iterable[Iterable[int]], num_vars: int | None = None) -> "CnfFormula":
        return CnfFormula(self.num_vars if num_vars is None else num_vars,
                          self.clauses + tuple(make_clause(c) for c in extra))

    def __len__(self):
        return len(self.clauses)


# ---------------------------------------------------------------- DIMACS

_HEADER = re.compile(r"^p\s+cnf\s+(\S+)\s+(\S+)\s*$")


def parse_dimacs(data: str | bytes) -> CnfFormula:
    """Parse DIMACS CNF text.

    Comment lines, blank lines and a ``%`` trailer (everything after a line
    holding a lone ``%``) are ignored. Duplicate literals in a clause collapse;
    tautological clauses are kept and their indices recorded in
    ``meta["tautological"]``.
    """
    if isinstance(data, bytes):
        data = data.decode("ascii", errors="replace")
    header = None
    clauses: list[Clause] = []
    current: list[int] = []
    current_start = None
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            m = _HEADER.match(line)
            if not m:
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                nv, nc = int(m.group(1)), int(m.group(2))
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if nv < 0 or nc < 0:
                raise DimacsError("negative counts in header", lineno)
            header = (nv, nc, lineno)
            continue
        if header is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsError("empty clause", lineno)
                clauses.append(make_clause(current))
                current = []
                current_start = None
                continue
            if abs(lit) > header[0]:
                raise DimacsError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
            if current_start is None:
                current_start = lineno
            current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("clause missing terminating 0", current_start)
    nv, nc, hline = header
    if len(clauses) != nc:
        raise DimacsError(f"header declares {nc} clauses, found {len(clauses)}", hline)
    f = CnfFormula(nv, tuple(clauses))
    taut = f.tautological_clauses()
    if taut:
        object.__setattr__(f, "meta", {"tautological": taut})
    return f


def read_dimacs(path) -> CnfFormula:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def write_dimacs(f: CnfFormula, comments: Iterable[str] = ()) -> bytes:
    """Canonical DIMACS bytes; identical formulas give identical output."""
    if f.empty_clause:
        raise ValueError("cannot write a residual that contains the empty clause")
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.num_vars} {f.num_clauses}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return ("\n".join(lines) + "\n").encode("ascii")


def write_metadata(meta: Mapping[str, object]) -> str:
    """key=value sidecar, keys sorted for byte-stable output."""
    out = []
    for k in sorted(meta):
        v = meta[k]
        if isinstance(v, bool):
            v = str(v).lower()
        out.append(f"{k}={v}")
    return "\n".join(out) + "\n"


def read_metadata(text: str) -> dict[str, str]:
    meta = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        meta[key.strip()] = value.strip()
    return meta


# ---------------------------------------------------------------- assignments

def check_assignment(f: CnfFormula, sigma: Mapping[int, bool]) -> None:
    for v in sigma:
        if not 1 <= v <= f.num_vars:
            raise ValueError(f"assignment binds variable {v} outside 1..{f.num_vars}")


def apply_assignment(f: CnfFormula, sigma: Mapping[int, bool]) -> CnfFormula:
    """Residual formula under a partial assignment.

    Satisfied clauses are dropped and false literals removed. If some clause
    loses all its literals the result has ``empty_clause=True``.
    """
    check_assignment(f, sigma)
    out = []
    emptied = f.empty_clause
    for c in f.clauses:
        rest = []
        sat = False
        for l in c:
            val = sigma.get(abs(l))
            if val is None:
                rest.append(l)
            elif val == (l > 0):
                sat = True
                break
        if sat:
            continue
        if rest:
            out.append(tuple(rest))
        else:
            emptied = True
    return CnfFormula(f.num_vars, tuple(out), empty_clause=emptied)


# ---------------------------------------------------------------- oracles

_CHUNK_BITS = 16


def brute_force_sat(f: CnfFormula, cap: int = BRUTE_FORCE_CAP) -> Assignment | None:
    """Exhaustive satisfiability check over all 2^n assignments.

    Returns the lexicographically first model (variable 1 is the most
    significant bit, false before true) or None when unsatisfiable.
    """
    n = f.num_vars
    if n > cap:
        raise CapExceeded(f"{n} variables exceeds brute-force cap {cap}")
    if f.empty_clause:
        return None
    if not f.clauses:
        return {v: False for v in range(1, n + 1)}
    chunk = 1 << min(n, _CHUNK_BITS)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)  # variable v <- bit n-v
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, start + chunk, dtype=np.uint64)
        bits = ((idx[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)
        alive = np.ones(chunk, dtype=bool)
        for c in f.clauses:
            sat = np.zeros(chunk, dtype=bool)
            for l in c:
                col = bits[:, abs(l) - 1]
                sat |= col if l > 0 else ~col
            alive &= sat
            if not alive.any():
                break
        hits = np.flatnonzero(alive)
        if hits.size:
            row = bits[hits[0]]
            return {v: bool(row[v - 1]) for v in range(1, n + 1)}
    return None


def all_models(f: CnfFormula, cap: int = 20) -> list[tuple[bool, ...]]:
    """Every model as a tuple indexed by variable-1 (small formulas only)."""
    n = f.num_vars
    if n > cap:
        raise CapExceeded(f"{n} variables exceeds enumeration cap {cap}")
    models = []
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses) and not f.empty_clause:
            models.append(bits)
    return models


def formulas_isomorphic(f: CnfFormula, g: CnfFormula, cap: int = ISOMORPHISM_CAP) -> bool:
    """Decide formula isomorphism by backtracking over signed variable maps.

    Only occurring variables take part. A candidate maps each variable ``x``
    of ``f`` to ``s * y`` for a variable ``y`` of ``g`` and sign ``s``; it is an
    isomorphism iff the image of ``f``'s clause multiset equals ``g``'s.
    """
    fv = sorted({abs(l) for c in f.clauses for l in c})
    gv = sorted({abs(l) for c in g.clauses for l in c})
    if max(len(fv), len(gv)) > cap:
        raise CapExceeded(f"isomorphism check limited to {cap} variables")
    if f.empty_clause != g.empty_clause or len(fv) != len(gv) or f.num_clauses != g.num_clauses:
        return False
    if sorted(map(len, f.clauses)) != sorted(map(len, g.clauses)):
        return False

    def signatures(h: CnfFormula):
        deg = h.literal_degrees()
        sizes: dict[int, list[int]] = {}
        for c in h.clauses:
            for l in c:
                sizes.setdefault(l, []).append(len(c))
        for v in sizes.values():
            v.sort()
        return {l: (deg[l], tuple(sizes.get(l, ())))
                for v in range(1, h.num_vars + 1) for l in (v, -v)}

    fsig, gsig = signatures(f), signatures(g)
    if Counter(tuple(sorted((fsig[v], fsig[-v]))) for v in fv) != \
            Counter(tuple(sorted((gsig[v], gsig[-v]))) for v in gv):
        return False

    target = Counter(g.clauses)
    # variables with many occurrences first: they prune hardest
    deg = f.literal_degrees()
    order = sorted(fv, key=lambda v: -(deg[v] + deg[-v]))
    clauses_by_last: dict[int, list[Clause]] = {v: [] for v in fv}
    pos = {v: i for i, v in enumerate(order)}
    for c in f.clauses:
        last = max((abs(l) for l in c), key=pos.__getitem__)
        clauses_by_last[last].append(c)

    mapping: dict[int, int] = {}
    used: set[int] = set()
    image_count: Counter = Counter()

    def image(c: Clause) -> Clause:
        return make_clause(mapping[abs(l)] if l > 0 else -mapping[abs(l)] for l in c)

    def search(i: int) -> bool:
        if i == len(order):
            return image_count == target
        x = order[i]
        for y in gv:
            if y in used:
                continue
            for s in (1, -1):
                if fsig[x] != gsig[s * y] or fsig[-x] != gsig[-s * y]:
                    continue
                mapping[x] = s * y
                used.add(y)
                added = []
                ok = True
                for c in clauses_by_last[x]:
                    im = image(c)
                    image_count[im] += 1
                    added.append(im)
                    if image_count[im] > target.get(im, 0):
                        ok = False
                        break
                if ok and search(i + 1):
                    return True
                for im in added:
                    image_count[im] -= 1
                    if not image_count[im]:
                        del image_count[im]
                used.discard(y)
                del mapping[x]
        return False

    return search(0)
