"""Bounded-phase reachability.

A phase is a stretch of a run in which a single process moves.  Mux phases
send into one channel restricted at its source and may receive from
channels restricted at their source; demux phases are the mirror image.
Satisfiability of a sequence of phases (empty stacks and channels at both
ends) is decided by turning non-local phases into local ones one at a time
(:func:`reduce_md_sequence`) and finally checking each process separately
with pushdown saturation.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Hashable

from .eager import InvalidSystemError
from .model import (
    Local,
    Pop,
    PushdownProcess,
    Push,
    Recv,
    Rqcp,
    Send,
    Topology,
    is_comm,
    validate_system,
)
from .pushdown import empty_pairs, saturate


# --------------------------------------------------------------------------
# phases
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Mux:
    channel: str


@dataclass(frozen=True)
class Demux:
    channel: str


@dataclass(frozen=True)
class LocalOnly:
    pass


LOCAL_ONLY = LocalOnly()
Kind = Mux | Demux | LocalOnly


@dataclass(frozen=True)
class Phase:
    process: str
    pushdown: PushdownProcess
    final: Hashable
    kind: Kind = LOCAL_ONLY

    @property
    def init(self):
        return self.pushdown.init

    @property
    def size(self) -> int:
        return len(self.pushdown.states)

    @property
    def is_local(self) -> bool:
        return not self.pushdown.has_comm()


def allows(topology: Topology, p: str, kind: Kind, a) -> bool:
    """May a phase of ``p`` with ``kind`` perform communication action ``a``?"""
    if isinstance(kind, LocalOnly):
        return False
    c = topology.channel(a.channel)
    if isinstance(kind, Mux):
        if isinstance(a, Send):
            return c.id == kind.channel
        return c.dst == p and topology.is_restricted(c.src, c.id)
    if isinstance(a, Recv):
        return c.id == kind.channel
    return c.src == p and topology.is_restricted(c.dst, c.id)


def kind_violations(topology: Topology, p: str, kind: Kind) -> list[str]:
    if isinstance(kind, LocalOnly):
        return []
    if not topology.has_channel(kind.channel):
        return [f"unknown channel {kind.channel!r}"]
    c = topology.channel(kind.channel)
    end = c.src if isinstance(kind, Mux) else c.dst
    name = type(kind).__name__.lower()
    out = []
    if end != p:
        out.append(f"{name} phase of {p!r} on {c.id!r}: wrong endpoint")
    if not topology.is_restricted(p, c.id):
        out.append(f"{name} phase of {p!r} on {c.id!r}: {p!r} is not restricted on it")
    return out


def phase_violations(topology: Topology, phase: Phase) -> list[str]:
    out = kind_violations(topology, phase.process, phase.kind)
    if phase.final not in phase.pushdown.states:
        out.append(f"phase of {phase.process!r}: final state {phase.final!r} undeclared")
    for _, a, _ in phase.pushdown.transitions:
        if is_comm(a) and not allows(topology, phase.process, phase.kind, a):
            out.append(f"phase of {phase.process!r}: action {a} not allowed by {phase.kind}")
    return out


@dataclass(frozen=True)
class MdSequence:
    topology: Topology
    messages: frozenset
    phases: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "messages", frozenset(self.messages))
        object.__setattr__(self, "phases", tuple(self.phases))

    @property
    def size(self) -> int:
        return sum(ph.size for ph in self.phases)

    def __len__(self):
        return len(self.phases)

    def violations(self) -> list[str]:
        out = []
        for n, ph in enumerate(self.phases):
            out.extend(f"phase {n}: {v}" for v in phase_violations(self.topology, ph))
        return out

    def replace(self, n: int, phase: Phase) -> "MdSequence":
        return MdSequence(self.topology, self.messages, self.phases[:n] + (phase,) + self.phases[n + 1:])


def is_below(psi: MdSequence, phi: MdSequence) -> bool:
    """Same phase processes and communication actions included phase-wise."""
    if len(psi) != len(phi):
        return False
    for a, b in zip(psi.phases, phi.phases):
        if a.process != b.process:
            return False
        ca = {x for _, x, _ in a.pushdown.transitions if is_comm(x)}
        cb = {x for _, x, _ in b.pushdown.transitions if is_comm(x)}
        if not ca <= cb:
            return False
    return True


# --------------------------------------------------------------------------
# reversal
# --------------------------------------------------------------------------


def reverse_action(a):
    if isinstance(a, Push):
        return Pop(a.symbol)
    if isinstance(a, Pop):
        return Push(a.symbol)
    if isinstance(a, Send):
        return Recv(a.channel, a.message)
    if isinstance(a, Recv):
        return Send(a.channel, a.message)
    return a


def reverse_kind(kind: Kind) -> Kind:
    if isinstance(kind, Mux):
        return Demux(kind.channel)
    if isinstance(kind, Demux):
        return Mux(kind.channel)
    return kind


def reverse_phase(phase: Phase) -> Phase:
    """Run the phase backwards over the reversed topology."""
    pd = phase.pushdown
    ts = tuple((z2, reverse_action(a), z) for z, a, z2 in pd.transitions)
    eps = frozenset(reverse_action(a) for a in pd.eps_actions)
    rpd = PushdownProcess(pd.states, phase.final, pd.stack_alphabet, ts, eps)
    return Phase(phase.process, rpd, pd.init, reverse_kind(phase.kind))


def reverse_sequence(seq: MdSequence) -> MdSequence:
    return MdSequence(
        seq.topology.reversed(),
        seq.messages,
        tuple(reverse_phase(ph) for ph in reversed(seq.phases)),
    )


# --------------------------------------------------------------------------
# reduction to local phases
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Copy:
    """State t of some phase paired with a simulated state z of the receiving phase."""

    t: Hashable
    z: Hashable


@dataclass(frozen=True)
class Tilde:
    z: Hashable


def _strip_comm(phase: Phase) -> Phase:
    return Phase(phase.process, phase.pushdown.without_comm(), phase.final, phase.kind)


def trim_phase(phase: Phase) -> Phase:
    """Drop states that lie on no control path from init to final.

    Any run of the phase stays on such paths, so satisfiability is unchanged;
    the copies built by the reduction shrink a lot.
    """
    pd = phase.pushdown
    fwd: dict = {}
    bwd: dict = {}
    for z, _, z2 in pd.transitions:
        fwd.setdefault(z, set()).add(z2)
        bwd.setdefault(z2, set()).add(z)
    ahead, behind = _reach(fwd, pd.init), _reach(bwd, phase.final)
    ts = tuple(t for t in pd.transitions if t[0] in ahead and t[2] in behind)
    if len(ts) == len(pd.transitions):
        return phase
    keep = (ahead & behind) | {pd.init, phase.final}
    eps = pd.eps_actions & {a for _, a, _ in ts}
    return Phase(phase.process, PushdownProcess(frozenset(keep), pd.init, pd.stack_alphabet, ts, eps), phase.final, phase.kind)


def _trimmed(seq: MdSequence) -> MdSequence:
    return MdSequence(seq.topology, seq.messages, tuple(trim_phase(ph) for ph in seq.phases))


def _link_graph(pd: PushdownProcess, channel: str, rel: set) -> dict:
    """Edges of the simulated receiver: empty-stack jumps and receives on ``channel``."""
    adj: dict = {z: set() for z in pd.states}
    for z, z2 in rel:
        adj[z].add(z2)
    for z, a, z2 in pd.transitions:
        if isinstance(a, Recv) and a.channel == channel:
            adj[z].add(z2)
    return adj


def _reach(adj: dict, z) -> set:
    seen = {z}
    todo = [z]
    while todo:
        x = todo.pop()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _copies(phase: Phase, recv: PushdownProcess, channel: str, rel: set) -> tuple[set, list, set]:
    """States, transitions and guarded actions of the product |Z| copies."""
    pd = phase.pushdown
    receives: dict = {}
    for z, a, z2 in recv.transitions:
        if isinstance(a, Recv) and a.channel == channel:
            receives.setdefault(a.message, []).append((z, z2))
    states = {Copy(t, z) for t in pd.states for z in recv.states}
    ts = []
    eps = set()
    for t, a, t2 in pd.transitions:
        if isinstance(a, Send) and a.channel == channel:
            guarded = a in pd.eps_actions
            for z, z2 in receives.get(a.message, ()):
                lab = Local(("match", a, Recv(channel, a.message)))
                ts.append((Copy(t, z), lab, Copy(t2, z2)))
                if guarded:
                    eps.add(lab)
            continue
        for z in recv.states:
            ts.append((Copy(t, z), a, Copy(t2, z)))
    eps |= {a for a in pd.eps_actions if not (isinstance(a, Send) and a.channel == channel)}
    for z, z2 in rel:
        if z == z2:
            continue
        for t in pd.states:
            ts.append((Copy(t, z), Local(("jump", z, z2)), Copy(t, z2)))
    return states, ts, eps


def _pd(states, init, alphabet, ts, eps) -> PushdownProcess:
    return PushdownProcess(frozenset(states), init, frozenset(alphabet), tuple(dict.fromkeys(ts)), frozenset(eps))


@functools.lru_cache(maxsize=4096)
def _empty_pairs(pd: PushdownProcess) -> frozenset:
    # the same receiving phase recurs across many checkpoint sequences
    return frozenset(empty_pairs(pd))


@functools.lru_cache(maxsize=4096)
def _link_reach(P: PushdownProcess, channel: str) -> dict:
    adj = _link_graph(P, channel, _empty_pairs(P.without_comm()))
    return {z: _reach(adj, z) for z in P.states}


def _demux_index(seq: MdSequence) -> int | None:
    for n in range(len(seq.phases) - 1, -1, -1):
        ph = seq.phases[n]
        if isinstance(ph.kind, Demux) and not ph.is_local:
            return n
    return None


class ReductionError(ValueError):
    pass


def reduce_md_sequence(seq: MdSequence, prune: bool = True) -> list[MdSequence]:
    """Finite set of sequences, each with one more local phase, jointly
    equisatisfiable with ``seq``.

    With ``prune`` the checkpoint sequences are restricted to those whose
    consecutive states are linked in the receiver's jump/receive graph;
    the dropped sequences cannot be satisfiable.
    """
    if all(ph.is_local for ph in seq.phases):
        raise ReductionError("all phases are local; use check_local_satisfiability")
    j = _demux_index(seq)
    if j is None:
        out = reduce_md_sequence(reverse_sequence(seq), prune)
        return [reverse_sequence(psi) for psi in out]

    phases = seq.phases
    phj = phases[j]
    c = phj.kind.channel
    sender = seq.topology.channel(c).src
    P = phj.pushdown
    Z = sorted(P.states, key=repr)
    rel = _empty_pairs(P.without_comm())

    out = [seq.replace(j, trim_phase(_strip_comm(phj)))]

    base = P.without_comm()
    for s in range(j):
        phs = phases[s]
        if phs.process != sender or not any(
            isinstance(a, Send) and a.channel == c for _, a, _ in phs.pushdown.transitions
        ):
            continue
        for pi in _checkpoints(Z, j - s + 1, _link_reach(P, c) if prune else None):
            new = list(phases)
            for r in range(s, j):
                phr = phases[r]
                pdr = phr.pushdown
                cs, cts, ceps = _copies(phr, P, c, rel)
                z_r, z_next = pi[r - s], pi[r - s + 1]
                if r == s:
                    states = set(pdr.states) | cs
                    ts = list(pdr.transitions) + cts
                    ts += [(t, Local(("switch", z_r)), Copy(t, z_r)) for t in pdr.states]
                    eps = set(pdr.eps_actions) | ceps
                    init = pdr.init
                else:
                    states, ts, eps = cs, cts, ceps
                    init = Copy(pdr.init, z_r)
                new[r] = trim_phase(
                    Phase(phr.process, _pd(states, init, pdr.stack_alphabet, ts, eps), Copy(phr.final, z_next), phr.kind)
                )
            z_s, z_j = pi[0], pi[-1]
            tilde = [(Tilde(z), a, Tilde(z2)) for z, a, z2 in base.transitions]
            jump = Local(("resume", z_s, z_j))
            ts = list(base.transitions) + tilde + [(z_s, jump, Tilde(z_j))]
            eps = set(base.eps_actions) | {jump}
            states = set(P.states) | {Tilde(z) for z in P.states}
            new[j] = trim_phase(Phase(phj.process, _pd(states, P.init, P.stack_alphabet, ts, eps), Tilde(phj.final), phj.kind))
            out.append(MdSequence(seq.topology, seq.messages, tuple(new)))

    k, n = len(seq), seq.size
    assert len(out) <= max(1, n ** k), (len(out), n, k)
    for psi in out:
        assert psi.size <= 2 * n * n, (psi.size, n)
    return out


def _checkpoints(Z: list, length: int, reach: dict | None):
    if reach is None:
        yield from itertools.product(Z, repeat=length)
        return

    def extend(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        last = prefix[-1]
        for z in Z:
            if z in reach[last]:
                yield from extend(prefix + [z])

    for z in Z:
        yield from extend([z])


# --------------------------------------------------------------------------
# satisfiability
# --------------------------------------------------------------------------


class BudgetExhausted(RuntimeError):
    pass


def chain_process(seq: MdSequence, p: str) -> tuple[PushdownProcess, Hashable, Hashable] | None:
    """Concatenate the phases of ``p`` into one pushdown with link moves.

    Returns (pushdown, start, end) or None if ``p`` has no phase.
    """
    idx = [n for n, ph in enumerate(seq.phases) if ph.process == p]
    if not idx:
        return None
    states, ts, eps, alphabet = set(), [], set(), set()
    for n in idx:
        pd = seq.phases[n].pushdown
        if pd.has_comm():
            raise ValueError(f"phase {n} is not local")
        alphabet |= pd.stack_alphabet
        states |= {(n, z) for z in pd.states}
        for z, a, z2 in pd.transitions:
            b = Local((n, a.label)) if isinstance(a, Local) else a
            ts.append(((n, z), b, (n, z2)))
            if a in pd.eps_actions:
                eps.add(b)
    for a, b in zip(idx, idx[1:]):
        ts.append(((a, seq.phases[a].final), Local(("link", a, b)), (b, seq.phases[b].init)))
    start = (idx[0], seq.phases[idx[0]].init)
    end = (idx[-1], seq.phases[idx[-1]].final)
    return _pd(states, start, alphabet, ts, eps), start, end


def check_local_satisfiability(seq: MdSequence) -> bool:
    for ph in seq.phases:
        if not ph.is_local:
            raise ValueError("sequence has a non-local phase")
    for p in seq.topology.processes:
        chained = chain_process(seq, p)
        if chained is None:
            continue
        pd, _, end = chained
        if not saturate(pd).accepts_empty(end):
            return False
    return True


@dataclass
class SatStats:
    reductions: int = 0
    leaves: int = 0
    budget: int | None = None
    memo: dict = field(default_factory=dict)

    def tick(self):
        self.reductions += 1
        if self.budget is not None and self.reductions > self.budget:
            raise BudgetExhausted(f"more than {self.budget} reduction steps")


def check_md_satisfiability(seq: MdSequence, budget: int | None = None, stats: SatStats | None = None) -> bool:
    """Is ``seq`` satisfiable?  Raises BudgetExhausted when ``budget``
    reduction steps do not suffice."""
    if stats is None:
        stats = SatStats(budget=budget)
    k, n = len(seq), max(1, seq.size)
    return _sat(_trimmed(seq), stats, 2 ** k * n ** (2 ** k))


def _sat(seq: MdSequence, stats: SatStats, leaf_bound: int) -> bool:
    if seq in stats.memo:
        return stats.memo[seq]
    if all(ph.is_local for ph in seq.phases):
        assert seq.size <= leaf_bound
        stats.leaves += 1
        res = check_local_satisfiability(seq)
    else:
        stats.tick()
        res = any(_sat(psi, stats, leaf_bound) for psi in reduce_md_sequence(seq))
    stats.memo[seq] = res
    return res


# --------------------------------------------------------------------------
# the driver
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Dead:
    """Local replacement of a send whose message is never received."""

    kind: str
    channel: str
    message: Hashable


DRAIN = "__drain__"
DONE = "__done__"


def end_gadget(system: Rqcp, p: str) -> PushdownProcess:
    """Pushdown of ``p`` over states (z, dead channels).

    A send on a live channel may instead kill the channel (the message and
    everything after it on that channel is never received); sends on dead
    channels become local no-ops.  Guards are inherited.
    """
    pd = system.processes[p]
    outs = sorted({a.channel for _, a, _ in pd.transitions if isinstance(a, Send)})
    deads = [frozenset(x) for r in range(len(outs) + 1) for x in itertools.combinations(outs, r)]
    states = {(z, d) for z in pd.states for d in deads}
    ts, eps = [], set()
    for d in deads:
        for z, a, z2 in pd.transitions:
            g = a in pd.eps_actions
            if isinstance(a, Send):
                if a.channel in d:
                    b = Local(Dead("dead", a.channel, a.message))
                    ts.append(((z, d), b, (z2, d)))
                else:
                    ts.append(((z, d), a, (z2, d)))
                    b = Local(Dead("kill", a.channel, a.message))
                    ts.append(((z, d), b, (z2, d | {a.channel})))
                if g:
                    eps.add(b)
            else:
                ts.append(((z, d), a, (z2, d)))
    eps |= set(pd.eps_actions)
    return _pd(states, (pd.init, frozenset()), pd.stack_alphabet, ts, eps)


def _kind_filter(topology: Topology, p: str, pd: PushdownProcess, kind: Kind, init) -> PushdownProcess:
    keep = []
    for t in pd.transitions:
        a = t[1]
        if is_comm(a):
            if not allows(topology, p, kind, a):
                continue
        elif isinstance(a, Local) and isinstance(a.label, Dead):
            if not allows(topology, p, kind, Send(a.label.channel, a.label.message)):
                continue
        keep.append(t)
    return PushdownProcess(pd.states, init, pd.stack_alphabet, tuple(keep), pd.eps_actions)


def _tail(p: str, pd: PushdownProcess, start, targets: set) -> Phase:
    """Local moves from ``start`` to a target state, then pop everything."""
    ts = [t for t in pd.transitions if not is_comm(t[1]) and not (isinstance(t[1], Local) and isinstance(t[1].label, Dead))]
    for z in sorted(targets, key=repr):
        ts.append((z, Local("drain"), DRAIN))
    for g in sorted(pd.stack_alphabet, key=repr):
        ts.append((DRAIN, Pop(g), DRAIN))
    fin = Local("done")
    ts.append((DRAIN, fin, DONE))
    eps = {a for a in pd.eps_actions if not is_comm(a)} | {fin}
    return Phase(p, _pd(set(pd.states) | {DRAIN, DONE}, start, pd.stack_alphabet, ts, eps), DONE, LOCAL_ONLY)


def process_kinds(topology: Topology, p: str) -> list[Kind]:
    out: list[Kind] = []
    for c in topology.channels:
        if c.src == p and topology.is_restricted(p, c.id):
            out.append(Mux(c.id))
        if c.dst == p and topology.is_restricted(p, c.id):
            out.append(Demux(c.id))
    return out


def _graph_reach(pd: PushdownProcess, start) -> set:
    adj: dict = {}
    for z, _, z2 in pd.transitions:
        adj.setdefault(z, set()).add(z2)
    return _reach(adj, start)


@dataclass
class BoundedResult:
    reachable: bool
    skeletons: int = 0
    reductions: int = 0
    witness: list | None = None


def check_bounded_topology(topology: Topology) -> None:
    bad = [c.id for c in topology.channels if not topology.is_restricted(c.src, c.id) and not topology.is_restricted(c.dst, c.id)]
    if bad:
        raise ValueError(f"channel {bad[0]!r} is unrestricted at both ends")


def bounded_state_reach(system: Rqcp, target, k: int, budget: int | None = None) -> BoundedResult:
    """Is ``target`` reachable by a run made of at most ``k`` phases?

    Skeletons of mux/demux slots are enumerated with boundary states and
    checked for satisfiability after appending one draining tail phase per
    process.  Processes with no slot but a target different from their
    initial state pay one phase for a purely local segment.
    """
    bad = validate_system(system)
    if bad:
        raise InvalidSystemError(bad)
    if k < 1:
        raise ValueError("k must be at least 1")
    topo = system.topology
    check_bounded_topology(topo)
    vec = dict(zip(topo.processes, system.vector(target)))
    gadgets = {p: end_gadget(system, p) for p in topo.processes}
    targets = {p: {z for z in gadgets[p].states if z[0] == vec[p]} for p in topo.processes}
    kinds = {p: process_kinds(topo, p) for p in topo.processes}
    stats = SatStats(budget=budget)
    result = BoundedResult(False)

    slot_choices = [(p, kd) for p in topo.processes for kd in kinds[p]]
    for m in range(k + 1):
        for slots in itertools.product(slot_choices, repeat=m):
            if any(slots[i] == slots[i + 1] for i in range(m - 1)):
                continue
            used = {p for p, _ in slots}
            extra = sum(1 for p in topo.processes if p not in used and vec[p] != system.processes[p].init)
            if m + extra > k:
                continue
            result.skeletons += 1
            if _try_skeleton(system, slots, gadgets, targets, stats, result):
                result.reachable = True
                result.reductions = stats.reductions
                return result
    result.reductions = stats.reductions
    return result


def _try_skeleton(system, slots, gadgets, targets, stats, result) -> bool:
    topo = system.topology
    procs = topo.processes

    def go(n: int, bounds: dict, phases: list) -> bool:
        if n == len(slots):
            tails = []
            for p in procs:
                if not (_graph_reach(_tail(p, gadgets[p], bounds[p], targets[p]).pushdown, bounds[p]) & {DONE}):
                    return False
                tails.append(_tail(p, gadgets[p], bounds[p], targets[p]))
            seq = MdSequence(topo, system.messages, tuple(phases + tails))
            if check_md_satisfiability(seq, stats=stats):
                result.witness = [(ph.process, _kind_str(ph.kind), ph.final[0], sorted(ph.final[1])) for ph in phases]
                return True
            return False
        p, kind = slots[n]
        pd = _kind_filter(topo, p, gadgets[p], kind, bounds[p])
        for end in sorted(_graph_reach(pd, bounds[p]), key=repr):
            ph = Phase(p, pd, end, kind)
            if go(n + 1, {**bounds, p: end}, phases + [ph]):
                return True
        return False

    return go(0, {p: gadgets[p].init for p in procs}, [])


def _kind_str(kind: Kind) -> str:
    if isinstance(kind, Mux):
        return f"mux({kind.channel})"
    if isinstance(kind, Demux):
        return f"demux({kind.channel})"
    return "local"
