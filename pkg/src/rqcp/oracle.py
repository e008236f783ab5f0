"""Explicit-state reference implementations.

Everything here enumerates concrete configurations breadth first under
explicit bounds.  Results carry a ``truncated`` flag: when it is False the
enumeration covered the whole reachable space and a negative answer is
conclusive.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import (
    Configuration,
    Pop,
    Push,
    PushdownProcess,
    Recv,
    Rqcp,
    Run,
    Send,
    Topology,
    apply_transition,
    enabled_moves,
    local_step,
    matching_pairs,
    moves_of,
    replay,
)
from .topology import co_cycle_relation


@dataclass(frozen=True)
class Bounds:
    channel_len: int = 4
    stack_depth: int = 4
    steps: int = 14


@dataclass
class Exploration:
    """Outcome of a bounded BFS.  ``parents`` maps a node to (parent, move)."""

    parents: dict
    truncated: bool

    @property
    def states(self) -> list:
        return list(self.parents)

    def path(self, node) -> list:
        moves = []
        while self.parents[node] is not None:
            node, move = self.parents[node]
            moves.append(move)
        return moves[::-1]


def _fits(config: Configuration, bounds: Bounds) -> bool:
    return all(len(w) <= bounds.channel_len for w in config.channels) and all(
        len(u) <= bounds.stack_depth for u in config.stacks
    )


def _bfs(start, successors, bounds: Bounds, fits) -> Exploration:
    """Generic bounded BFS; successors yield (move, node, cost)."""
    parents = {start: None}
    depth = {start: 0}
    truncated = False
    todo = deque([start])
    while todo:
        node = todo.popleft()
        d = depth[node]
        for move, nxt, cost in successors(node):
            if nxt in parents:
                continue
            if d + cost > bounds.steps or not fits(nxt):
                truncated = True
                continue
            parents[nxt] = (node, move)
            depth[nxt] = d + cost
            todo.append(nxt)
    return Exploration(parents, truncated)


def explore_bounded(system: Rqcp, bounds: Bounds = Bounds(), initial: Configuration | None = None) -> Exploration:
    """All configurations reachable within the bounds, with BFS parent links.

    Moves are (process, action, target local state) triples, suitable for
    :func:`rqcp.model.replay`.
    """
    idx = system.topology.process_index

    def succ(config):
        for p, a, nxt in enabled_moves(system, config, check=False):
            yield (p, a, nxt.control[idx[p]]), nxt, 1

    start = initial if initial is not None else system.initial_configuration()
    return _bfs(start, succ, bounds, lambda c: _fits(c, bounds))


def eager_successors(system: Rqcp, config: Configuration):
    """Eager steps: any non-receive move, or a send into an empty channel
    immediately followed by the receive of that message (cost 2)."""
    topo = system.topology
    idx = topo.process_index
    for i, p in enumerate(topo.processes):
        for t in system.processes[p].out(config.control[i]):
            a = t[1]
            if isinstance(a, Recv):
                continue
            nxt = apply_transition(system, config, p, t)
            if nxt is None:
                continue
            yield ((p, a, t[2]),), nxt, 1
            if not isinstance(a, Send) or config.channels[topo.channel_index[a.channel]]:
                continue
            q = topo.channel(a.channel).dst
            j = idx[q]
            for t2 in system.processes[q].out(nxt.control[j]):
                if t2[1] == Recv(a.channel, a.message):
                    nxt2 = apply_transition(system, nxt, q, t2)
                    if nxt2 is not None:
                        yield ((p, a, t[2]), (q, t2[1], t2[2])), nxt2, 2


def explore_eager(system: Rqcp, bounds: Bounds = Bounds()) -> Exploration:
    """Bounded BFS over eager runs from the initial configuration.

    Each recorded move is a tuple of one or two replayable moves.
    """
    return _bfs(
        system.initial_configuration(),
        lambda c: eager_successors(system, c),
        bounds,
        lambda c: _fits(c, bounds),
    )


@dataclass
class OracleResult:
    vectors: set
    truncated: bool
    states: int

    def conclusive_for(self, vector) -> bool:
        return vector in self.vectors or not self.truncated


def eager_reach_bruteforce(system: Rqcp, bounds: Bounds = Bounds()) -> OracleResult:
    ex = explore_eager(system, bounds)
    return OracleResult({c.control for c in ex.parents}, ex.truncated, len(ex.parents))


def reach_bruteforce(system: Rqcp, bounds: Bounds = Bounds()) -> OracleResult:
    ex = explore_bounded(system, bounds)
    return OracleResult({c.control for c in ex.parents}, ex.truncated, len(ex.parents))


def eager_witness(system: Rqcp, target, bounds: Bounds = Bounds()) -> Run | None:
    vec = system.vector(target)
    ex = explore_eager(system, bounds)
    for c in ex.parents:
        if c.control == vec:
            moves = [m for group in ex.path(c) for m in group]
            return replay(system, system.initial_configuration(), moves)
    return None


# --------------------------------------------------------------------------
# run predicates
# --------------------------------------------------------------------------


def is_eager_run(run: Run, topology: Topology) -> bool:
    pairs = matching_pairs(run, topology)
    recv_of = {j: i for i, j in pairs}
    for n, s in enumerate(run.steps, start=1):
        if isinstance(s.action, Recv) and recv_of.get(n) != n - 1:
            return False
    return True


def stack_pairs(run: Run, p: str) -> tuple[list[tuple[int, int]], bool]:
    """Matching (push, pop) step indices of ``p`` and whether the projection is a Dyck word."""
    open_: list = []
    pairs = []
    dyck = True
    for n, s in enumerate(run.steps, start=1):
        if s.process != p:
            continue
        if isinstance(s.action, Push):
            open_.append((n, s.action.symbol))
        elif isinstance(s.action, Pop):
            if not open_ or open_[-1][1] != s.action.symbol:
                dyck = False
                open_ = []
                continue
            pairs.append((open_.pop()[0], n))
    return pairs, dyck and not open_


def _dyck(actions) -> bool:
    st = []
    for a in actions:
        if isinstance(a, Push):
            st.append(a.symbol)
        elif isinstance(a, Pop):
            if not st or st.pop() != a.symbol:
                return False
    return not st


def is_well_formed(run: Run, p: str) -> bool:
    """Is the stack projection of ``p`` a Dyck word?"""
    return _dyck(s.action for s in run.steps if s.process == p)


def is_well_bracketed(run: Run, topology: Topology) -> bool:
    """Well-formed for everyone, and between each matched push/pop of a
    process every other process performs a Dyck word."""
    procs = topology.processes
    if not all(is_well_formed(run, p) for p in procs):
        return False
    for p in procs:
        pairs, _ = stack_pairs(run, p)
        for i, j in pairs:
            inner = run.steps[i:j - 1]
            for q in procs:
                if q != p and not _dyck(s.action for s in inner if s.process == q):
                    return False
    return True


def is_mutex_run(run: Run, topology: Topology, relation=None) -> bool:
    if relation is None:
        relation = co_cycle_relation(topology)
    for c in run.configurations():
        ne = c.nonempty_channels(topology)
        if any(x in ne and y in ne for x, y in relation):
            return False
    return True


def projections_equal(a: Run, b: Run, topology: Topology) -> bool:
    return all(a.projection(p, topology) == b.projection(p, topology) for p in topology.processes)


class NotMutexError(ValueError):
    pass


def reorder_mutex_to_eager(system: Rqcp, run: Run) -> Run:
    """Order-equivalent eager run for a mutex run starting with empty channels.

    Events are peeled off from the end: a process whose last remaining event
    is not part of a remaining send/receive pair goes last; otherwise a
    matched pair whose send and receive are both last in their processes is
    scheduled as an adjacent rendezvous.  Ties go to the earliest process.
    """
    topo = system.topology
    if any(run.initial.channels):
        raise ValueError("run must start with empty channels")
    if not is_mutex_run(run, topo):
        raise NotMutexError("run visits a non-mutex configuration")
    moves = moves_of(system, run)
    partner = {}
    for i, j in matching_pairs(run, topo):
        partner[i - 1] = j - 1
        partner[j - 1] = i - 1
    per_proc = {p: [n for n, m in enumerate(moves) if m[0] == p] for p in topo.processes}
    removed: set = set()
    tail: list = []
    while any(per_proc.values()):
        chosen = None
        for p in topo.processes:
            if not per_proc[p]:
                continue
            n = per_proc[p][-1]
            mate = partner.get(n)
            if mate is None or mate in removed:
                chosen = [n]
                break
        if chosen is None:
            for p in topo.processes:
                if not per_proc[p]:
                    continue
                e0 = per_proc[p][-1]
                if not isinstance(moves[e0][1], Recv):
                    continue
                e1 = partner[e0]
                if per_proc[moves[e1][0]][-1] == e1:
                    chosen = [e1, e0]
                    break
        if chosen is None:
            raise NotMutexError("no schedulable last event; run is not reorderable")
        for n in chosen:
            per_proc[moves[n][0]].pop()
            removed.add(n)
        tail[:0] = chosen
    return replay(system, run.initial, [moves[n] for n in tail])


# --------------------------------------------------------------------------
# bounded phases
# --------------------------------------------------------------------------


LOCAL = "local"


def process_kinds(topology: Topology, p: str) -> frozenset:
    out = set()
    for c in topology.channels:
        if c.src == p and topology.is_restricted(p, c.id):
            out.add(("mux", c.id))
        if c.dst == p and topology.is_restricted(p, c.id):
            out.add(("demux", c.id))
    return frozenset(out)


def compatible_kinds(topology: Topology, p: str, a) -> frozenset:
    """Kinds of phases of ``p`` that may contain communication action ``a``."""
    c = topology.channel(a.channel)
    out = set()
    if isinstance(a, Send):
        if topology.is_restricted(p, c.id):
            out.add(("mux", c.id))
        if topology.is_restricted(c.dst, c.id):
            out |= {k for k in process_kinds(topology, p) if k[0] == "demux"}
    elif isinstance(a, Recv):
        if topology.is_restricted(p, c.id):
            out.add(("demux", c.id))
        if topology.is_restricted(c.src, c.id):
            out |= {k for k in process_kinds(topology, p) if k[0] == "mux"}
    return frozenset(out)


def kphase_reach_bruteforce(system: Rqcp, target, k: int, bounds: Bounds = Bounds()) -> tuple[bool, bool]:
    """Search for a run into ``target`` made of at most ``k`` mux/demux/local phases.

    Returns (found, truncated).  A phase is tracked by its process and the set
    of kinds still consistent with its communication so far (LOCAL while it
    has none).
    """
    topo = system.topology
    vec = system.vector(target)
    kinds = {p: process_kinds(topo, p) | {LOCAL} for p in topo.processes}

    def succ(node):
        config, used, p, allowed = node
        for q, a, nxt in enabled_moves(system, config, check=False):
            if isinstance(a, (Send, Recv)):
                compat = compatible_kinds(topo, q, a)
            else:
                compat = None
            if q == p:
                keep = allowed if compat is None else allowed & compat
                if keep:
                    yield (q, a), (nxt, used, q, keep), 1
            if used < k:
                fresh = kinds[q] if compat is None else kinds[q] & compat
                if fresh:
                    yield (q, a), (nxt, used + 1, q, fresh), 1

    start = (system.initial_configuration(), 0, None, frozenset())
    ex = _bfs(start, succ, bounds, lambda n: _fits(n[0], bounds))
    found = any(n[0].control == vec for n in ex.parents)
    return found, ex.truncated


def pushdown_bfs(pd: PushdownProcess, start=None, stack: tuple = (), max_height: int = 6, max_steps: int = 50) -> tuple[set, bool]:
    """Configurations (state, stack) of a communication-free pushdown, bounded."""
    if start is None:
        start = pd.init
    origin = (start, tuple(stack))
    seen = {origin}
    depth = {origin: 0}
    todo = deque([origin])
    truncated = False
    while todo:
        z, u = node = todo.popleft()
        for _, a, z2 in pd.out(z):
            u2 = local_step(pd, u, a)
            if u2 is None:
                continue
            nxt = (z2, u2)
            if nxt in seen:
                continue
            if len(u2) > max_height or depth[node] + 1 > max_steps:
                truncated = True
                continue
            seen.add(nxt)
            depth[nxt] = depth[node] + 1
            todo.append(nxt)
    return seen, truncated


def phase_relation_oracle(phase, topology: Topology, messages, start: tuple, bounds: Bounds = Bounds()) -> tuple[set, bool]:
    """End points (stacks, channels) of the phase relation from ``start``.

    Only the phase process moves; every other process is inert.  ``start``
    is (stacks, channels) aligned with the topology.
    """
    p = phase.process
    i = topology.process_index[p]
    pd = phase.pushdown
    sys1 = Rqcp(topology, messages, {q: (pd if q == p else _inert()) for q in topology.processes})
    stacks, channels = start
    control = tuple(pd.init if q == p else 0 for q in topology.processes)
    config = Configuration(control, tuple(stacks), tuple(channels))
    ex = explore_bounded(sys1, bounds, initial=config)
    ends = {(c.stacks, c.channels) for c in ex.parents if c.control[i] == phase.final}
    return ends, ex.truncated


def _inert() -> PushdownProcess:
    return PushdownProcess(frozenset({0}), 0)


def md_satisfiable_bruteforce(seq, bounds: Bounds = Bounds()) -> bool | None:
    """Compose phase relations from all-empty to all-empty.

    Returns None when the answer is negative but some exploration was cut.
    """
    topo = seq.topology
    n, m = len(topo.processes), len(topo.channels)
    empty = (((),) * n, ((),) * m)
    frontier = {empty}
    truncated = False
    for phase in seq.phases:
        nxt = set()
        for start in frontier:
            ends, cut = phase_relation_oracle(phase, topo, seq.messages, start, bounds)
            truncated |= cut
            nxt |= ends
        frontier = nxt
        if not frontier:
            break
    if empty in frontier:
        return True
    return None if truncated else False
