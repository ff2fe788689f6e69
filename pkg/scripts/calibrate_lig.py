#!/usr/bin/env python3
"""Sample random LIGs, extract formulas and count how often WL on the LCN
gives every literal its own color. Used once to fix the acceptance threshold."""
import argparse
import time

from wlsat.generators.lig import extract_from_lig, random_lig
from wlsat.graphs import NodeKind, build_lcn
from wlsat.wl import wl_refine


def literals_unique(f) -> bool:
    g = build_lcn(f)
    run = wl_refine(g)
    cols = [run.stable[v] for v in g.nodes_of(NodeKind.LITERAL)]
    return len(set(cols)) == len(cols)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--literals", type=int, default=500)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--first-seed", type=int, default=10_000)
    ap.add_argument("--p", type=float, default=0.5)
    args = ap.parse_args(argv)

    t0 = time.time()
    hits = 0
    for i in range(args.samples):
        seed = args.first_seed + i
        f = extract_from_lig(random_lig(args.literals, seed, args.p), seed)
        hits += literals_unique(f)
    n = args.samples
    print(f"literals={args.literals} p={args.p} samples={n} unique={hits} "
          f"fraction={hits / n:.3f} bound={1 - args.literals ** (-1 / 7):.3f} secs={time.time() - t0:.0f}")


if __name__ == "__main__":
    main()
