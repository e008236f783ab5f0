"""Random instance generators for property tests and experiments."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .bounded import (
    LOCAL_ONLY,
    MdSequence,
    Phase,
    allows,
    process_kinds,
)
from .model import Channel, Local, Pop, PushdownProcess, Push, Recv, Rqcp, Send, Topology
from .topology import converging_witness, is_polyforest


@dataclass(frozen=True)
class GenConfig:
    processes: int = 3
    channels: int = 3
    states: int = 4
    symbols: int = 2
    messages: int = 2
    transitions: int = 6
    forward_bias: float = 0.75
    stack_bias: float = 0.3
    comm_bias: float = 0.45
    guard_bias: float = 0.2


def random_topology(rng: random.Random, n_procs: int, n_chans: int, cyclic: bool = False, restrict: float = 0.3) -> Topology:
    procs = tuple(f"p{i}" for i in range(n_procs))
    chans = []
    if n_procs >= 2:
        for i in range(n_chans):
            src, dst = rng.sample(procs, 2)
            chans.append(Channel(f"c{i}", src, dst))
    restricted = {(end, c.id) for c in chans for end in (c.src, c.dst) if rng.random() < restrict}
    topo = Topology(procs, tuple(chans), frozenset(restricted))
    if cyclic and chans and is_polyforest(topo):
        # close a cycle by doubling an existing channel backwards
        c = rng.choice(chans)
        topo = Topology(procs, topo.channels + (Channel(f"c{len(chans)}", c.dst, c.src),), topo.restricted)
    return topo


def make_non_converging(rng: random.Random, topo: Topology) -> Topology:
    """Restrict path endpoints until no converging witness remains."""
    restricted = set(topo.restricted)
    while True:
        t = Topology(topo.processes, topo.channels, frozenset(restricted))
        w = converging_witness(t)
        if w is None:
            return t
        ends = [(w.processes[0], w.channels[0]), (w.processes[-1], w.channels[-1])]
        restricted.add(rng.choice(ends))


def one_side_restricted(rng: random.Random, topo: Topology) -> Topology:
    """Every channel restricted at exactly one randomly chosen end."""
    restricted = {(rng.choice((c.src, c.dst)), c.id) for c in topo.channels}
    return Topology(topo.processes, topo.channels, frozenset(restricted))


def random_pushdown(
    rng: random.Random,
    p: str,
    topo: Topology | None,
    messages: list,
    cfg: GenConfig,
    finite: bool = False,
    n_trans: int | None = None,
) -> PushdownProcess:
    n = rng.randint(1, cfg.states)
    states = list(range(n))
    symbols = [] if finite else [f"g{i}" for i in range(rng.randint(1, cfg.symbols))]
    outs = topo.outgoing(p) if topo else []
    ins = topo.incoming(p) if topo else []
    ts = []
    eps = set()
    for _ in range(rng.randint(0, cfg.transitions if n_trans is None else n_trans)):
        z = rng.randrange(n)
        if rng.random() < cfg.forward_bias and z + 1 < n:
            z2 = rng.randrange(z + 1, n)
        else:
            z2 = rng.randrange(n)
        r = rng.random()
        if symbols and r < cfg.stack_bias:
            g = rng.choice(symbols)
            a = Push(g) if rng.random() < 0.5 else Pop(g)
        elif (outs or ins) and messages and r < cfg.stack_bias + cfg.comm_bias:
            m = rng.choice(messages)
            pool = [("s", c) for c in outs] + [("r", c) for c in ins]
            k, c = rng.choice(pool)
            a = Send(c.id, m) if k == "s" else Recv(c.id, m)
            if topo.is_restricted(p, c.id) or rng.random() < cfg.guard_bias:
                eps.add(a)
        else:
            a = Local(f"l{rng.randrange(3)}")
            if rng.random() < cfg.guard_bias:
                eps.add(a)
        ts.append((z, a, z2))
    # restricted actions must be guarded everywhere they occur
    return PushdownProcess(frozenset(states), 0, frozenset(symbols), tuple(dict.fromkeys(ts)), frozenset(eps))


def random_system(
    rng: random.Random,
    cfg: GenConfig = GenConfig(),
    finite: bool = False,
    non_converging: bool = True,
    cyclic: bool = False,
    topo: Topology | None = None,
) -> Rqcp:
    if topo is None:
        n_procs = rng.randint(1, cfg.processes)
        n_chans = rng.randint(0, cfg.channels) if n_procs > 1 else 0
        topo = random_topology(rng, n_procs, n_chans, cyclic=cyclic)
        if non_converging:
            topo = make_non_converging(rng, topo)
    messages = [f"m{i}" for i in range(rng.randint(1, cfg.messages))]
    pds = {p: random_pushdown(rng, p, topo, messages, cfg, finite) for p in topo.processes}
    return Rqcp(topo, frozenset(messages), pds)


def random_target(rng: random.Random, system: Rqcp) -> tuple:
    return tuple(rng.choice(sorted(system.processes[p].states, key=repr)) for p in system.topology.processes)


def random_local_pushdown(rng: random.Random, states: int = 5, symbols: int = 2, transitions: int = 8) -> PushdownProcess:
    cfg = GenConfig(states=states, symbols=symbols, transitions=transitions, stack_bias=0.7, forward_bias=0.4, guard_bias=0.25)
    return random_pushdown(rng, "p", None, [], cfg)


def random_md_sequence(rng: random.Random, max_phases: int = 3, max_states: int = 3) -> MdSequence:
    """Small md-sequence over a two-process topology where every channel is
    restricted at exactly one end."""
    procs = ("p", "q")
    chans = [Channel("c", "p", "q"), Channel("d", "q", "p")][: rng.randint(1, 2)]
    topo = one_side_restricted(rng, Topology(procs, tuple(chans)))
    messages = ["m0", "m1"][: rng.randint(1, 2)]
    kinds = {p: process_kinds(topo, p) for p in procs}
    phases = []
    for _ in range(rng.randint(1, max_phases)):
        p = rng.choice([x for x in procs if kinds[x]] or list(procs))
        kind = rng.choice(kinds[p]) if kinds[p] else LOCAL_ONLY
        cfg = GenConfig(states=max_states, symbols=1, transitions=4, stack_bias=0.25, comm_bias=0.6, forward_bias=0.8)
        pd = random_pushdown(rng, p, topo, messages, cfg)
        keep = tuple(t for t in pd.transitions if not isinstance(t[1], (Send, Recv)) or allows(topo, p, kind, t[1]))
        pd = PushdownProcess(pd.states, pd.init, pd.stack_alphabet, keep, pd.eps_actions)
        final = rng.choice(sorted(pd.states))
        phases.append(Phase(p, pd, final, kind))
    return MdSequence(topo, frozenset(messages), tuple(phases))


def random_cyclic_system(rng: random.Random, cfg: GenConfig = GenConfig(), finite: bool = True) -> Rqcp:
    """Random system whose topology has at least one undirected cycle."""
    while True:
        n_procs = rng.randint(2, max(2, cfg.processes))
        topo = random_topology(rng, n_procs, rng.randint(1, max(1, cfg.channels)), cyclic=True)
        if not is_polyforest(topo):
            return random_system(rng, cfg, finite=finite, topo=topo)


TINY = GenConfig(processes=2, channels=2, states=3, symbols=2, messages=2, transitions=6)


def random_bounded_system(rng: random.Random, cfg: GenConfig = TINY) -> Rqcp:
    """Small system where every channel is restricted at exactly one end."""
    n = rng.randint(1, cfg.processes)
    topo = random_topology(rng, n, rng.randint(0, cfg.channels) if n > 1 else 0)
    return random_system(rng, cfg, topo=one_side_restricted(rng, topo))
