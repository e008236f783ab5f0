"""Product pushdown sizes against the analytic bound, per process count."""
from __future__ import annotations

import argparse
import math
import random
import statistics
import time
from collections import defaultdict

from rqcp.eager import build_product, product_size_bound
from rqcp.random_systems import random_system, random_target


def base_formula(system) -> int:
    procs = system.topology.processes
    gamma = {(p, g) for p in procs for g in system.processes[p].stack_alphabet}
    states = math.prod(len(system.processes[p].states) for p in procs)
    return len(procs) * states * 2 ** len(procs) * 2 ** len(system.topology.channels) * (1 + len(gamma))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=200)
    args = ap.parse_args(argv)
    by_procs = defaultdict(list)
    for seed in range(args.seeds):
        rng = random.Random(seed)
        s = random_system(rng)
        start = time.perf_counter()
        prod = build_product(s, random_target(rng, s))
        elapsed = time.perf_counter() - start
        n = len(prod.states)
        assert n <= product_size_bound(s)
        by_procs[len(s.topology.processes)].append((n, n / base_formula(s), n / product_size_bound(s), elapsed))
    print(f"{'|P|':>4}{'count':>7}{'max states':>12}{'max/base':>10}{'max/bound':>11}{'mean ms':>9}")
    for k in sorted(by_procs):
        rows = by_procs[k]
        print(
            f"{k:>4}{len(rows):>7}{max(r[0] for r in rows):>12}{max(r[1] for r in rows):>10.2f}"
            f"{max(r[2] for r in rows):>11.3f}{statistics.mean(r[3] for r in rows) * 1000:>9.1f}"
        )


if __name__ == "__main__":
    main()
