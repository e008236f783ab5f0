"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Seeds are fixed so every run sees the same instances.  Counters report how
many instances were conclusive for the oracle; the required minimum is
asserted, not assumed.
"""
import itertools
import math
import random
import time
from collections import Counter
from contextlib import contextmanager

from rqcp import fixtures
from rqcp.bounded import bounded_state_reach, check_md_satisfiability, reduce_md_sequence
from rqcp.eager import build_product, eager_state_reach, finite_eager_reach, finite_eager_reachable_vectors
from rqcp.model import Recv, matching_pairs, replay
from rqcp.mutex import check_mutex, is_mutex_config
from rqcp.oracle import (
    Bounds,
    eager_reach_bruteforce,
    explore_bounded,
    is_eager_run,
    is_mutex_run,
    kphase_reach_bruteforce,
    md_satisfiable_bruteforce,
    projections_equal,
    pushdown_bfs,
    reorder_mutex_to_eager,
)
from rqcp.pushdown import empty_pairs, saturate
from rqcp.random_systems import (
    random_bounded_system,
    random_cyclic_system,
    random_local_pushdown,
    random_md_sequence,
    random_system,
    random_target,
)
from rqcp.topology import converging_witness, is_converging

from conftest import ACCEPTANCE

EAGER_BOUNDS = Bounds(channel_len=4, stack_depth=4, steps=14)
MUTEX_BOUNDS = Bounds(channel_len=3, stack_depth=0, steps=12)
MD_BOUNDS = Bounds(channel_len=3, stack_depth=3, steps=10)
KPHASE_BOUNDS = Bounds(channel_len=3, stack_depth=3, steps=12)


@contextmanager
def criterion(n: int):
    info = {"detail": ""}
    ok = False
    try:
        yield info
        ok = True
    finally:
        ACCEPTANCE[n] = (ok, info["detail"])
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {info['detail']}")


def spec_size_formula(system) -> int:
    procs = system.topology.processes
    gamma = {(p, g) for p in procs for g in system.processes[p].stack_alphabet}
    states = math.prod(len(system.processes[p].states) for p in procs)
    return len(procs) * states * 2 ** len(procs) * 2 ** len(system.topology.channels) * (1 + len(gamma))


def test_c01_topology_fixtures():
    with criterion(1) as info:
        start = time.perf_counter()
        for topo in (fixtures.star(2), fixtures.star(5), fixtures.double_ring(), fixtures.master_worker()):
            assert converging_witness(topo) is None
        conv, path = is_converging(fixtures.single_channel())
        assert conv and path.as_list() == ["p", "c", "q"]
        elapsed = time.perf_counter() - start
        info["detail"] = f"4 non-converging fixtures, 1 converging, {elapsed * 1000:.1f} ms"
        assert elapsed < 1.0


def test_c02_eager_product_vs_oracle():
    with criterion(2) as info:
        start = time.perf_counter()
        conclusive = disagree = positives = 0
        seed = 0
        while conclusive < 200 and seed < 1000:
            rng = random.Random(seed)
            seed += 1
            s = random_system(rng)
            target = random_target(rng, s)
            res = eager_reach_bruteforce(s, EAGER_BOUNDS)
            if not res.conclusive_for(target):
                continue
            conclusive += 1
            expected = target in res.vectors
            positives += expected
            disagree += eager_state_reach(s, target) != expected
        elapsed = time.perf_counter() - start
        info["detail"] = (f"{conclusive} conclusive of {seed} generated ({positives} reachable), "
                          f"{disagree} disagreements, {elapsed:.1f} s")
        assert conclusive >= 200
        assert disagree == 0
        assert elapsed <= 120


def test_c03_finite_eager_vs_oracle():
    with criterion(3) as info:
        conclusive = disagree = positives = 0
        seed = 0
        while conclusive < 200 and seed < 1000:
            rng = random.Random(10_000 + seed)
            seed += 1
            s = random_system(rng, finite=True, non_converging=False)
            target = random_target(rng, s)
            res = eager_reach_bruteforce(s, EAGER_BOUNDS)
            if not res.conclusive_for(target):
                continue
            conclusive += 1
            expected = target in res.vectors
            positives += expected
            disagree += finite_eager_reach(s, target) != expected
        info["detail"] = f"{conclusive} conclusive ({positives} reachable), {disagree} disagreements"
        assert conclusive >= 200
        assert disagree == 0


def _mutex_oracle(s):
    ex = explore_bounded(s, MUTEX_BOUNDS)
    if any(not is_mutex_config(s.topology, c) for c in ex.parents):
        return False, ex
    return (None if ex.truncated else True), ex


def _mutex_instances():
    """Conclusive cyclic finite systems with their oracle verdict and exploration."""
    seed = 0
    while seed < 3000:
        rng = random.Random(20_000 + seed)
        seed += 1
        s = random_cyclic_system(rng)
        verdict, ex = _mutex_oracle(s)
        if verdict is not None:
            yield s, verdict, ex


def test_c04_mutex_vs_oracle():
    with criterion(4) as info:
        conclusive = disagree = 0
        kinds = Counter()
        for s, verdict, _ in _mutex_instances():
            conclusive += 1
            kinds[verdict] += 1
            disagree += check_mutex(s).mutex != verdict
            if conclusive >= 200:
                break
        p0p1 = check_mutex(fixtures.eagerness_counterexample())
        shorted = 0
        for seed in range(50):
            s = random_system(random.Random(30_000 + seed), finite=True, non_converging=False)
            v = check_mutex(s)
            if v.short_circuit:
                assert v.mutex and v.states_explored == 0
                shorted += 1
        info["detail"] = (f"{conclusive} conclusive cyclic ({kinds[True]} mutex, {kinds[False]} not), "
                          f"{disagree} disagreements; P0/P1 fixture "
                          f"{'mutex' if p0p1.mutex else 'not-mutex'}; {shorted} polyforests short-circuited")
        assert conclusive >= 200
        assert disagree == 0
        assert not p0p1.mutex
        assert shorted > 0


def test_c05_mutex_implies_eager():
    with criterion(5) as info:
        checked = vectors = bad = 0
        for n, (s, _, ex) in enumerate(_mutex_instances()):
            if n >= 200:
                break
            if not check_mutex(s).mutex:
                continue
            checked += 1
            eager = finite_eager_reachable_vectors(s)
            reached = {c.control for c in ex.parents}
            vectors += len(reached)
            bad += len(reached - eager)
        info["detail"] = f"{checked} mutex instances, {vectors} oracle vectors, {bad} not eager-reachable"
        assert checked > 0
        assert bad == 0


def _per_channel(run, topology):
    counts = Counter()
    for i, _ in matching_pairs(run, topology):
        counts[run.steps[i - 1].action.channel] += 1
    return counts


def test_c06_reordering():
    with criterion(6) as info:
        runs = bad = reordered = 0
        seed = 0
        while runs < 100 and seed < 2000:
            rng = random.Random(40_000 + seed)
            seed += 1
            s = random_cyclic_system(rng)
            ex = explore_bounded(s, MUTEX_BOUNDS)
            # the deepest configurations give the longest runs
            for c in list(ex.parents)[-3:]:
                run = replay(s, s.initial_configuration(), ex.path(c))
                if not is_mutex_run(run, s.topology) or not any(isinstance(st.action, Recv) for st in run.steps):
                    continue
                out = reorder_mutex_to_eager(s, run)
                runs += 1
                reordered += out.steps != run.steps
                ok = (
                    is_eager_run(out, s.topology)
                    and projections_equal(run, out, s.topology)
                    and _per_channel(run, s.topology) == _per_channel(out, s.topology)
                    and out.final == run.final
                )
                bad += not ok
        info["detail"] = f"{runs} mutex runs with receives ({reordered} changed order), {bad} failures"
        assert runs >= 100
        assert bad == 0


def test_c07_reduction_soundness():
    with criterion(7) as info:
        conclusive = disagree = structural = total = positives = 0
        seed = 0
        while conclusive < 100 and seed < 2000:
            rng = random.Random(50_000 + seed)
            seed += 1
            seq = random_md_sequence(rng, max_phases=3)
            if all(ph.is_local for ph in seq.phases):
                continue
            total += 1
            family = reduce_md_sequence(seq)
            n, k = seq.size, len(seq)
            structural += len(family) > n ** k
            structural += sum(psi.size > 2 * n * n for psi in family)
            phi = md_satisfiable_bruteforce(seq, MD_BOUNDS)
            psis = [md_satisfiable_bruteforce(psi, MD_BOUNDS) for psi in family]
            if phi is None or (not any(x is True for x in psis) and None in psis):
                continue
            conclusive += 1
            positives += phi
            disagree += phi != any(x is True for x in psis)
            disagree += check_md_satisfiability(seq) != phi
        info["detail"] = (f"{conclusive} conclusive of {total} sequences ({positives} satisfiable), "
                          f"{disagree} disagreements, {structural} size-bound violations")
        assert conclusive >= 100
        assert disagree == 0
        assert structural == 0


def test_c08_bounded_vs_kphase():
    with criterion(8) as info:
        start = time.perf_counter()
        systems = conclusive = disagree = nonmono = positives = sensitive = 0
        seed = 0
        while systems < 100 and seed < 1000:
            rng = random.Random(60_000 + seed)
            seed += 1
            s = random_bounded_system(rng)
            target = random_target(rng, s)
            any_conclusive = False
            prev = False
            answers = set()
            for k in (1, 2, 3):
                got = bounded_state_reach(s, target, k).reachable
                answers.add(got)
                nonmono += prev and not got
                prev = got
                found, cut = kphase_reach_bruteforce(s, target, k, KPHASE_BOUNDS)
                if not found and cut:
                    continue
                any_conclusive = True
                conclusive += 1
                positives += found
                disagree += got != found
            systems += any_conclusive
            sensitive += len(answers) > 1
        # random systems rarely depend on k; restricted ping-pong needs one phase per message
        fixed = fixed_sensitive = 0
        for rounds in (1, 2):
            s = fixtures.ping_pong_restricted(rounds)
            states = [sorted(s.processes[p].states) for p in s.topology.processes]
            for target in itertools.product(*states):
                answers = []
                for k in (1, 2, 3):
                    got = bounded_state_reach(s, target, k).reachable
                    found, cut = kphase_reach_bruteforce(s, target, k, KPHASE_BOUNDS)
                    assert found or not cut, (rounds, target, k)
                    fixed += 1
                    disagree += got != found
                    nonmono += bool(answers) and answers[-1] and not got
                    answers.append(got)
                fixed_sensitive += len(set(answers)) > 1
        elapsed = time.perf_counter() - start
        info["detail"] = (f"{systems} systems, {conclusive} conclusive (system, k) pairs ({positives} reachable), "
                          f"{sensitive} k-sensitive; ping-pong: {fixed} pairs, {fixed_sensitive} k-sensitive targets; "
                          f"{disagree} disagreements, {nonmono} monotonicity violations, {elapsed:.1f} s")
        assert systems >= 100
        assert disagree == 0
        assert nonmono == 0
        assert elapsed <= 300


def test_c09_saturation_vs_bfs():
    with criterion(9) as info:
        n = bad = unverified = 0
        for seed in range(200):
            pd = random_local_pushdown(random.Random(70_000 + seed), states=5, symbols=2)
            n += 1
            aut = saturate(pd)
            confs, cut = pushdown_bfs(pd, max_height=6, max_steps=10**6)
            bad += sum(not aut.accepts(z, u) for z, u in confs)
            claimed = {(z, u) for z in pd.states for u in aut.language_sample(z, 4)}
            missing = claimed - confs
            if missing and cut:
                # a taller search settles configurations that needed a higher stack on the way
                confs, cut = pushdown_bfs(pd, max_height=10, max_steps=10**6)
                missing -= confs
                if cut:
                    unverified += len(missing)
                    missing = set()
            bad += len(missing)
            rel = empty_pairs(pd)
            for z in pd.states:
                confs, cut = pushdown_bfs(pd, z, (), max_height=6, max_steps=10**6)
                if cut:
                    confs, cut = pushdown_bfs(pd, z, (), max_height=10, max_steps=10**6)
                found = {z2 for z2, u in confs if u == ()}
                mine = {z2 for z1, z2 in rel if z1 == z}
                bad += len(found - mine)
                if not cut:
                    bad += len(mine - found)
        info["detail"] = f"{n} pushdowns, {bad} mismatches, {unverified} claims beyond the search bound"
        assert n >= 200
        assert bad == 0


def test_c10_product_size():
    with criterion(10) as info:
        worst = 0.0
        over = 0
        for seed in range(200):
            rng = random.Random(seed)
            s = random_system(rng)
            prod = build_product(s, random_target(rng, s))
            base = spec_size_formula(s)
            # drain markers add two states per process, bottom tags double Gamma, plus ACCEPTING
            gadget = 2 * 3 ** len(s.topology.processes)
            over += len(prod.states) > base * gadget + 1
            worst = max(worst, len(prod.states) / base)
        info["detail"] = f"200 products, worst ratio to the base formula {worst:.2f}, {over} over the gadget bound"
        assert over == 0
