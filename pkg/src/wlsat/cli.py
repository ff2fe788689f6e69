"""wlsat command line: generate instances, export graphs, run WL tests, measure r_crit."""
from __future__ import annotations

import argparse
import dataclasses
import glob
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .cnf import CnfFormula, read_dimacs, read_metadata, write_dimacs, write_metadata
from .generators.base import named_graph
from .generators.cfi import build_cfi_pair, build_tseitin
from .generators.encoding import encode_graph_as_cnf
from .generators.lig import extract_from_lig, random_lig
from .generators.random3sat import THRESHOLD_MULTIPLIER, random_3sat
from .generators.regular import regularize_to_3
from .graphs import REPRESENTATIONS, build_lcn, read_edge_list, write_edge_list
from .harness import BatchConfig, Instance, aggregate, run_batch, write_aggregate, write_reports
from .solver import SolverConfig, SolverError
from .wl import DEFAULT_TUPLE_BUDGET, TupleBudgetExceeded, format_trace, kwl_distinguish, wl_distinguish, wl_refine

log = logging.getLogger("wlsat")

EXIT_DISTINGUISHED = 0
EXIT_INDISTINGUISHABLE = 1
EXIT_ERROR = 2

FAMILIES = ("cfi", "tseitin", "random3sat", "regular3", "lig-extract", "graph-encode")


@dataclass
class RunConfig:
    command: str = ""
    seed: int = 0
    solver: str = "embedded"
    solver_cmd: str = ""
    timeout_secs: float | None = None
    workers: int = 1
    k: int = 1
    tuple_budget: int = DEFAULT_TUPLE_BUDGET
    out: str | None = None
    params: dict = field(default_factory=dict)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.solver, self.solver_cmd, self.timeout_secs)

    def dump(self) -> str:
        flat = {k: v for k, v in dataclasses.asdict(self).items() if k != "params" and v is not None}
        flat.update({f"param.{k}": v for k, v in self.params.items() if v is not None})
        return write_metadata(flat)


_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(key: str, value: str):
    kind = _TYPES.get(key, "str")
    if "int" in kind:
        return int(value)
    if "float" in kind:
        return float(value)
    return value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the key=value config file, then explicit flags."""
    cfg = RunConfig(command=args.command)
    if args.config:
        for key, value in read_metadata(Path(args.config).read_text()).items():
            key = key.replace("-", "_")
            if key.startswith("param."):
                cfg.params[key[6:]] = value
            elif key in _TYPES and key not in ("params", "command"):
                setattr(cfg, key, _coerce(key, value))
            else:
                raise ValueError(f"unknown config key {key!r}")
    for name in ("seed", "solver", "solver_cmd", "timeout_secs", "workers", "k", "tuple_budget", "out"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    for name, value in vars(args).items():
        if name.startswith("p_") and value is not None:
            cfg.params[name[2:]] = value
    return cfg


def _open_run_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfg.dump())
    handler = logging.FileHandler(out / "run.log", mode="w")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    logging.getLogger("wlsat").addHandler(handler)
    return out


def _write_instance(out: Path, name: str, f: CnfFormula, meta: dict) -> Path:
    path = out / f"{name}.cnf"
    path.write_bytes(write_dimacs(f, comments=[f"{name}"]))
    (out / f"{name}.meta").write_text(write_metadata({**f.meta, **meta}))
    log.info("wrote %s (%d vars, %d clauses)", path, f.num_vars, f.num_clauses)
    return path


def _param(cfg: RunConfig, key: str, default=None, kind=str):
    v = cfg.params.get(key, default)
    return None if v is None else kind(v)


# ---------------------------------------------------------------- subcommands

def cmd_generate(cfg: RunConfig) -> int:
    family = cfg.params["family"]
    out = _open_run_dir(cfg)
    seed = cfg.seed
    written = []
    if family == "cfi":
        base_name = _param(cfg, "base", "k4")
        base = named_graph(base_name, seed)
        plain, twisted = build_cfi_pair(base)
        stem = Path(base_name).stem.replace(":", "-")
        written.append(_write_instance(out, f"cfi_{stem}", plain.formula, {}))
        written.append(_write_instance(out, f"cfi_{stem}_twisted", twisted.formula, {}))
    elif family == "tseitin":
        base_name = _param(cfg, "base", "k4")
        base = named_graph(base_name, seed)
        spec = _param(cfg, "charges", "zero")
        if spec == "zero":
            charge = {v: 0 for v in base.nodes}
        elif spec == "random":
            rng = random.Random(seed)
            charge = {v: rng.randint(0, 1) for v in base.nodes}
        else:
            bits = [int(x) for x in spec.split(",")]
            if len(bits) != len(base.nodes):
                raise ValueError(f"need {len(base.nodes)} charges, got {len(bits)}")
            charge = dict(zip(base.nodes, bits))
        f = build_tseitin(base, charge)
        written.append(_write_instance(out, f"tseitin_{Path(base_name).stem.replace(':', '-')}_{seed}", f,
                                       {"charges": ",".join(str(charge[v]) for v in base.nodes)}))
    elif family == "random3sat":
        n = _param(cfg, "n", 100, int)
        mult = _param(cfg, "multiplier", THRESHOLD_MULTIPLIER, float)
        for i in range(_param(cfg, "count", 1, int)):
            f = random_3sat(n, seed + i, mult)
            written.append(_write_instance(out, f"random3sat_n{n}_s{seed + i}", f,
                                           {"difficulty": _param(cfg, "difficulty", "")}))
    elif family == "regular3":
        src = _param(cfg, "input")
        if src:
            f0, name = read_dimacs(src), Path(src).stem
        else:
            n = _param(cfg, "n", 10, int)
            f0, name = random_3sat(n, seed, num_clauses=_param(cfg, "m", 2 * n, int)), f"n{n}_s{seed}"
        f = regularize_to_3(f0)
        written.append(_write_instance(out, f"regular3_{name}", f, {"family": "regular3", "source_vars": f0.num_vars}))
    elif family == "lig-extract":
        src = _param(cfg, "input")
        if src:
            g, name = read_edge_list(Path(src).read_text()), Path(src).stem
        else:
            n = _param(cfg, "literals", 100, int)
            g, name = random_lig(n, seed, _param(cfg, "p", 0.5, float)), f"n{n}_s{seed}"
        f = extract_from_lig(g, seed)
        written.append(_write_instance(out, f"lig_{name}", f, {}))
    elif family == "graph-encode":
        base_name = _param(cfg, "base", "k4")
        f = encode_graph_as_cnf(named_graph(base_name, seed))
        written.append(_write_instance(out, f"encode_{Path(base_name).stem.replace(':', '-')}", f, {}))
    else:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    for p in written:
        print(p)
    return 0


def cmd_wl(cfg: RunConfig) -> int:
    a, b = read_dimacs(cfg.params["file_a"]), read_dimacs(cfg.params["file_b"])
    ga, gb = build_lcn(a), build_lcn(b)
    if cfg.out:
        _open_run_dir(cfg)
    if cfg.params.get("trace"):
        sys.stderr.write(format_trace(wl_refine(ga)))
    if cfg.k == 1:
        verdict = wl_distinguish(ga, gb)
    else:
        verdict = kwl_distinguish(ga, gb, cfg.k, cfg.tuple_budget)
    if verdict.distinguished:
        print(f"distinguished at round {verdict.round} (k={cfg.k})")
        return EXIT_DISTINGUISHED
    print(f"indistinguishable (k={cfg.k}, stable after {verdict.rounds_run} rounds)")
    return EXIT_INDISTINGUISHABLE


def cmd_rcrit(cfg: RunConfig) -> int:
    paths = []
    for pattern in cfg.params["inputs"]:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits or [pattern])
    out = _open_run_dir(cfg)
    instances = []
    for p in paths:
        meta_path = Path(p).with_suffix(".meta")
        meta = read_metadata(meta_path.read_text()) if meta_path.exists() else {}
        instances.append(Instance(Path(p).stem, _param(cfg, "family") or meta.get("family", ""),
                                  _param(cfg, "difficulty") or meta.get("difficulty", ""), path=p))
    batch = BatchConfig(cfg.solver_config(), _param(cfg, "strategy", "linear"), cfg.workers)
    reports = run_batch(instances, batch)
    done = {r.instance for r in reports}
    for inst in instances:
        if inst.name not in done:
            log.warning("instance %s skipped (unreadable)", inst.path)
            print(f"skipped {inst.path}", file=sys.stderr)
    write_reports(reports, out / "report.csv")
    write_aggregate(reports, out / "aggregate.csv")
    sys.stdout.write((out / "report.csv").read_text())
    for row in aggregate(reports):
        print(f"# {row['family']} {row['difficulty']}: r_crit {row['r_crit']}, "
              f"r_converged {row['r_converged']}, count {row['count']}", file=sys.stderr)
    return 0


def cmd_export_graph(cfg: RunConfig) -> int:
    src = cfg.params["input"]
    rep = cfg.params.get("representation", "lcn")
    g = REPRESENTATIONS[rep](read_dimacs(src))
    text = write_edge_list(g, Path(src).stem)
    if cfg.out:
        out = _open_run_dir(cfg)
        path = out / f"{Path(src).stem}.{rep}.edges"
        path.write_text(text)
        print(path)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"generate": cmd_generate, "wl": cmd_wl, "rcrit": cmd_rcrit, "export-graph": cmd_export_graph}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--solver", choices=("embedded", "external"))
    common.add_argument("--solver-cmd", help="external solver command; {input} is replaced by the DIMACS path")
    common.add_argument("--timeout-secs", type=float)
    common.add_argument("--workers", type=int)
    common.add_argument("--k", type=int, help="WL dimension (1 = color refinement)")
    common.add_argument("--tuple-budget", type=int)
    common.add_argument("--out", help="run directory")
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="wlsat", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write instances of one family")
    g.add_argument("p_family", metavar="family", choices=FAMILIES)
    g.add_argument("--base", dest="p_base", help="k4, petersen, k33, cN, kN, regular:N:D or an edge file")
    g.add_argument("--n", dest="p_n", type=int)
    g.add_argument("--m", dest="p_m", type=int)
    g.add_argument("--multiplier", dest="p_multiplier", type=float)
    g.add_argument("--count", dest="p_count", type=int)
    g.add_argument("--difficulty", dest="p_difficulty")
    g.add_argument("--charges", dest="p_charges", help="zero, random, or comma-separated bits in node order")
    g.add_argument("--input", dest="p_input", help="source DIMACS (regular3) or LIG edge list (lig-extract)")
    g.add_argument("--literals", dest="p_literals", type=int)
    g.add_argument("--p", dest="p_p", type=float)

    w = sub.add_parser("wl", parents=[common], help="WL test on the LCNs of two formulas")
    w.add_argument("p_file_a", metavar="file_a")
    w.add_argument("p_file_b", metavar="file_b")
    w.add_argument("--trace", dest="p_trace", action="store_true", default=None,
                   help="per-round class counts of the first formula on stderr")

    r = sub.add_parser("rcrit", parents=[common], help="r_crit / r_converged over a batch")
    r.add_argument("p_inputs", metavar="input", nargs="*", help="DIMACS files or glob patterns")
    r.add_argument("--strategy", dest="p_strategy", choices=("linear", "binary"))
    r.add_argument("--family", dest="p_family")
    r.add_argument("--difficulty", dest="p_difficulty")

    e = sub.add_parser("export-graph", parents=[common], help="write a graph representation as an edge list")
    e.add_argument("p_input", metavar="input")
    e.add_argument("p_representation", metavar="representation", choices=sorted(REPRESENTATIONS))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.INFO if args.verbose else logging.WARNING)
    console.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(console)
    log.setLevel(logging.INFO)  # the run log always gets INFO
    try:
        cfg = resolve_config(args)
        if cfg.out is None and args.command in ("generate", "rcrit"):
            cfg.out = os.path.join("wlsat-out", args.command)
        return COMMANDS[args.command](cfg)
    except (OSError, ValueError, TupleBudgetExceeded, SolverError) as exc:
        print(f"wlsat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        for h in list(log.handlers):
            h.close()
            log.removeHandler(h)


if __name__ == "__main__":
    sys.exit(main())
