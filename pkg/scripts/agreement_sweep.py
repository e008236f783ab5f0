"""Cross-check each decision procedure against its brute-force oracle.

Prints one row per procedure: instances generated, oracle-conclusive
instances, disagreements and wall time.  Use --seeds to widen the sweep.
"""
from __future__ import annotations

import argparse
import random
import time

from rqcp.bounded import bounded_state_reach, check_md_satisfiability
from rqcp.eager import eager_state_reach, finite_eager_reach
from rqcp.mutex import check_mutex, is_mutex_config
from rqcp.oracle import (
    Bounds,
    eager_reach_bruteforce,
    explore_bounded,
    kphase_reach_bruteforce,
    md_satisfiable_bruteforce,
)
from rqcp.random_systems import (
    random_bounded_system,
    random_cyclic_system,
    random_md_sequence,
    random_system,
    random_target,
)


def eager_row(seed):
    rng = random.Random(seed)
    s = random_system(rng)
    t = random_target(rng, s)
    res = eager_reach_bruteforce(s, Bounds(4, 4, 14))
    if not res.conclusive_for(t):
        return None
    return eager_state_reach(s, t) == (t in res.vectors)


def finite_row(seed):
    rng = random.Random(seed)
    s = random_system(rng, finite=True, non_converging=False)
    t = random_target(rng, s)
    res = eager_reach_bruteforce(s, Bounds(4, 4, 14))
    if not res.conclusive_for(t):
        return None
    return finite_eager_reach(s, t) == (t in res.vectors)


def mutex_row(seed):
    s = random_cyclic_system(random.Random(seed))
    ex = explore_bounded(s, Bounds(3, 0, 12))
    if any(not is_mutex_config(s.topology, c) for c in ex.parents):
        expected = False
    elif ex.truncated:
        return None
    else:
        expected = True
    return check_mutex(s).mutex == expected


def md_row(seed):
    seq = random_md_sequence(random.Random(seed))
    if all(ph.is_local for ph in seq.phases):
        return None
    expected = md_satisfiable_bruteforce(seq, Bounds(3, 3, 10))
    if expected is None:
        return None
    return check_md_satisfiability(seq) == expected


def bounded_row(seed, k):
    rng = random.Random(seed)
    s = random_bounded_system(rng)
    t = random_target(rng, s)
    found, cut = kphase_reach_bruteforce(s, t, k, Bounds(3, 3, 12))
    if cut and not found:
        return None
    return bounded_state_reach(s, t, k).reachable == found


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=300)
    ap.add_argument("--offset", type=int, default=0)
    args = ap.parse_args(argv)
    rows = [
        ("eager product", eager_row),
        ("finite eager", finite_row),
        ("mutex", mutex_row),
        ("md satisfiability", md_row),
        ("bounded k=1", lambda s: bounded_row(s, 1)),
        ("bounded k=2", lambda s: bounded_row(s, 2)),
        ("bounded k=3", lambda s: bounded_row(s, 3)),
    ]
    print(f"{'procedure':<20}{'seeds':>7}{'conclusive':>12}{'disagree':>10}{'time s':>9}")
    for name, fn in rows:
        start = time.perf_counter()
        results = [fn(seed) for seed in range(args.offset, args.offset + args.seeds)]
        done = [r for r in results if r is not None]
        bad = sum(not r for r in done)
        print(f"{name:<20}{args.seeds:>7}{len(done):>12}{bad:>10}{time.perf_counter() - start:>9.1f}")


if __name__ == "__main__":
    main()
