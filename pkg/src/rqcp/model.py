"""Domain types for recursive communicating processes.

A system is a typed topology (processes, point-to-point FIFO channels and
the set of restricted (process, channel) pairs) together with one pushdown
process per topology node.  Finite systems are the special case where every
stack alphabet is empty.

Conventions used throughout the package:

* stack words are tuples with the top of stack as the *last* element;
* channel words are tuples with the head of the queue as the *first* element;
* configurations store control states, stacks and channel contents as tuples
  aligned with ``topology.processes`` / ``topology.channels``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

State = Hashable
Symbol = Hashable
Message = Hashable


# --------------------------------------------------------------------------
# topology
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Channel:
    id: str
    src: str
    dst: str

    def other(self, p: str) -> str:
        return self.dst if p == self.src else self.src


@dataclass(frozen=True)
class Topology:
    """Directed multigraph of processes and channels plus the restriction set."""

    processes: tuple[str, ...]
    channels: tuple[Channel, ...] = ()
    restricted: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "processes", tuple(self.processes))
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "restricted", frozenset(self.restricted))

    @cached_property
    def _channel_map(self) -> dict[str, Channel]:
        return {c.id: c for c in self.channels}

    @cached_property
    def process_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.processes)}

    @cached_property
    def channel_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.channels)}

    def channel(self, cid: str) -> Channel:
        return self._channel_map[cid]

    def has_channel(self, cid: str) -> bool:
        return cid in self._channel_map

    def is_restricted(self, p: str, cid: str) -> bool:
        return (p, cid) in self.restricted

    def incident(self, p: str) -> list[Channel]:
        return [c for c in self.channels if p in (c.src, c.dst)]

    def outgoing(self, p: str) -> list[Channel]:
        return [c for c in self.channels if c.src == p]

    def incoming(self, p: str) -> list[Channel]:
        return [c for c in self.channels if c.dst == p]

    def reversed(self) -> "Topology":
        """Same processes and restrictions, every channel pointing the other way."""
        return Topology(
            self.processes,
            tuple(Channel(c.id, c.dst, c.src) for c in self.channels),
            self.restricted,
        )

    def violations(self) -> list[str]:
        out = []
        seen = set()
        for p in self.processes:
            if p in seen:
                out.append(f"duplicate process {p!r}")
            seen.add(p)
        seen_c = set()
        for c in self.channels:
            if c.id in seen_c:
                out.append(f"duplicate channel {c.id!r}")
            seen_c.add(c.id)
            for end in (c.src, c.dst):
                if end not in seen:
                    out.append(f"channel {c.id!r}: unknown process {end!r}")
            if c.src == c.dst:
                out.append(f"channel {c.id!r}: self-loop channel")
        for p, cid in sorted(self.restricted, key=repr):
            if cid not in self._channel_map:
                out.append(f"restriction ({p!r}, {cid!r}): unknown channel")
                continue
            c = self._channel_map[cid]
            if p not in (c.src, c.dst):
                out.append(f"restriction ({p!r}, {cid!r}): process is not an endpoint")
        return out


# --------------------------------------------------------------------------
# actions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Send:
    channel: str
    message: Message

    def __str__(self):
        return f"{self.channel}!{self.message}"


@dataclass(frozen=True)
class Recv:
    channel: str
    message: Message

    def __str__(self):
        return f"{self.channel}?{self.message}"


@dataclass(frozen=True)
class Push:
    symbol: Symbol

    def __str__(self):
        return f"push({self.symbol})"


@dataclass(frozen=True)
class Pop:
    symbol: Symbol

    def __str__(self):
        return f"pop({self.symbol})"


@dataclass(frozen=True)
class Local:
    label: Hashable

    def __str__(self):
        return f"{self.label}"


Action = Union[Send, Recv, Push, Pop, Local]


def is_stack(a: Action) -> bool:
    return isinstance(a, (Push, Pop))


def is_comm(a: Action) -> bool:
    return isinstance(a, (Send, Recv))


# --------------------------------------------------------------------------
# pushdown processes and systems
# --------------------------------------------------------------------------

Transition = tuple  # (state, Action, state)


@dataclass(frozen=True)
class PushdownProcess:
    """A pushdown system whose ``eps_actions`` may only fire on an empty stack."""

    states: frozenset
    init: State
    stack_alphabet: frozenset = frozenset()
    transitions: tuple = ()
    eps_actions: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "stack_alphabet", frozenset(self.stack_alphabet))
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        object.__setattr__(self, "eps_actions", frozenset(self.eps_actions))

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        # reduced phases are large and get hashed on every memo lookup
        return hash((self.states, self.init, self.stack_alphabet, self.transitions, self.eps_actions))

    @cached_property
    def _out(self) -> dict:
        out: dict = {z: [] for z in self.states}
        for t in self.transitions:
            out.setdefault(t[0], []).append(t)
        return out

    def out(self, z: State) -> list:
        return self._out.get(z, [])

    def guarded(self, a: Action) -> bool:
        return a in self.eps_actions

    @property
    def is_finite(self) -> bool:
        return not self.stack_alphabet

    def has_comm(self) -> bool:
        return any(is_comm(a) for _, a, _ in self.transitions)

    def with_init(self, z: State) -> "PushdownProcess":
        return PushdownProcess(self.states, z, self.stack_alphabet, self.transitions, self.eps_actions)

    def without_comm(self) -> "PushdownProcess":
        """Drop every send/receive transition."""
        ts = tuple(t for t in self.transitions if not is_comm(t[1]))
        eps = frozenset(a for a in self.eps_actions if not is_comm(a))
        return PushdownProcess(self.states, self.init, self.stack_alphabet, ts, eps)

    def violations(self, name: str = "") -> list[str]:
        pre = f"process {name!r}: " if name else ""
        out = []
        if self.init not in self.states:
            out.append(f"{pre}initial state {self.init!r} undeclared")
        for i, (z, a, z2) in enumerate(self.transitions):
            for s in (z, z2):
                if s not in self.states:
                    out.append(f"{pre}transition {i}: unknown state {s!r}")
            if is_stack(a) and a.symbol not in self.stack_alphabet:
                out.append(f"{pre}transition {i}: stack symbol {a.symbol!r} not in alphabet")
        for a in self.eps_actions:
            if is_stack(a):
                out.append(f"{pre}stack action {a} cannot be empty-stack guarded")
        return out


@dataclass(frozen=True)
class Rqcp:
    topology: Topology
    messages: frozenset
    processes: Mapping[str, PushdownProcess] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "messages", frozenset(self.messages))
        object.__setattr__(self, "processes", dict(self.processes))

    def pushdown(self, p: str) -> PushdownProcess:
        return self.processes[p]

    @property
    def is_finite(self) -> bool:
        return all(pd.is_finite for pd in self.processes.values())

    @property
    def initial_vector(self) -> tuple:
        return tuple(self.processes[p].init for p in self.topology.processes)

    def initial_configuration(self) -> "Configuration":
        n, m = len(self.topology.processes), len(self.topology.channels)
        return Configuration(self.initial_vector, ((),) * n, ((),) * m)

    def vector(self, target: Mapping[str, State] | Sequence[State]) -> tuple:
        """Normalise a global control vector given as mapping or sequence."""
        procs = self.topology.processes
        if isinstance(target, Mapping):
            missing = [p for p in procs if p not in target]
            if missing:
                raise ValueError(f"target misses processes {missing}")
            vec = tuple(target[p] for p in procs)
        else:
            vec = tuple(target)
            if len(vec) != len(procs):
                raise ValueError(f"target has {len(vec)} components, expected {len(procs)}")
        for p, z in zip(procs, vec):
            if z not in self.processes[p].states:
                raise ValueError(f"target state {z!r} unknown for process {p!r}")
        return vec


def validate_system(system: Rqcp) -> list[str]:
    """Every broken structural invariant of ``system``, as readable strings."""
    topo = system.topology
    out = topo.violations()
    declared = set(topo.processes)
    for p in topo.processes:
        if p not in system.processes:
            out.append(f"process {p!r}: no pushdown given")
    for p in system.processes:
        if p not in declared:
            out.append(f"pushdown for undeclared process {p!r}")
    for p in topo.processes:
        pd = system.processes.get(p)
        if pd is None:
            continue
        out.extend(pd.violations(p))
        for i, (_, a, _) in enumerate(pd.transitions):
            if not is_comm(a):
                continue
            if not topo.has_channel(a.channel):
                out.append(f"process {p!r}: transition {i}: unknown channel {a.channel!r}")
                continue
            c = topo.channel(a.channel)
            if isinstance(a, Send) and c.src != p:
                out.append(f"process {p!r}: transition {i}: sends on {c.id!r} but is not its source")
            if isinstance(a, Recv) and c.dst != p:
                out.append(f"process {p!r}: transition {i}: receives on {c.id!r} but is not its destination")
            if a.message not in system.messages:
                out.append(f"process {p!r}: transition {i}: unknown message {a.message!r}")
            if topo.is_restricted(p, c.id) and a not in pd.eps_actions:
                kind = "send" if isinstance(a, Send) else "receive"
                out.append(f"process {p!r}: restricted {kind} {a} not ε-guarded")
    return out


# --------------------------------------------------------------------------
# configurations and runs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    control: tuple
    stacks: tuple
    channels: tuple

    def as_dict(self, topology: Topology) -> dict:
        return {
            "control": {p: self.control[i] for i, p in enumerate(topology.processes)},
            "stacks": {p: list(self.stacks[i]) for i, p in enumerate(topology.processes)},
            "channels": {c.id: list(self.channels[i]) for i, c in enumerate(topology.channels)},
        }

    def nonempty_channels(self, topology: Topology) -> frozenset:
        return frozenset(c.id for c, w in zip(topology.channels, self.channels) if w)


@dataclass(frozen=True)
class Step:
    process: str
    action: Action
    config: Configuration


@dataclass(frozen=True)
class Run:
    initial: Configuration
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> Configuration:
        return self.steps[-1].config if self.steps else self.initial

    def configurations(self) -> Iterator[Configuration]:
        yield self.initial
        for s in self.steps:
            yield s.config

    def trace(self) -> list[tuple[str, Action]]:
        return [(s.process, s.action) for s in self.steps]

    def projection(self, p: str, topology: Topology) -> list[tuple[Action, State]]:
        """Actions of ``p`` paired with the local control state each one leads to."""
        i = topology.process_index[p]
        return [(s.action, s.config.control[i]) for s in self.steps if s.process == p]


class MalformedConfiguration(ValueError):
    pass


def check_configuration(system: Rqcp, config: Configuration) -> None:
    topo = system.topology
    if len(config.control) != len(topo.processes) or len(config.stacks) != len(topo.processes):
        raise MalformedConfiguration("configuration does not match the process list")
    if len(config.channels) != len(topo.channels):
        raise MalformedConfiguration("configuration does not match the channel list")
    for p, z, u in zip(topo.processes, config.control, config.stacks):
        pd = system.processes[p]
        if z not in pd.states:
            raise MalformedConfiguration(f"state {z!r} unknown for process {p!r}")
        if any(g not in pd.stack_alphabet for g in u):
            raise MalformedConfiguration(f"stack of {p!r} uses undeclared symbols")
    for w in config.channels:
        if any(m not in system.messages for m in w):
            raise MalformedConfiguration("channel content uses undeclared messages")


def local_step(pd: PushdownProcess, stack: tuple, action: Action):
    """New stack after ``action`` or None when blocked (comm effects excluded)."""
    if isinstance(action, Push):
        return stack + (action.symbol,)
    if isinstance(action, Pop):
        if stack and stack[-1] == action.symbol:
            return stack[:-1]
        return None
    if stack and action in pd.eps_actions:
        return None
    return stack


def apply_transition(system: Rqcp, config: Configuration, p: str, transition) -> Configuration | None:
    """Fire one local transition of ``p`` from ``config`` or return None if blocked."""
    topo = system.topology
    i = topo.process_index[p]
    z, a, z2 = transition
    if config.control[i] != z:
        return None
    pd = system.processes[p]
    stack = local_step(pd, config.stacks[i], a)
    if stack is None:
        return None
    channels = config.channels
    if isinstance(a, Send):
        k = topo.channel_index[a.channel]
        channels = channels[:k] + (channels[k] + (a.message,),) + channels[k + 1:]
    elif isinstance(a, Recv):
        k = topo.channel_index[a.channel]
        w = channels[k]
        if not w or w[0] != a.message:
            return None
        channels = channels[:k] + (w[1:],) + channels[k + 1:]
    control = config.control[:i] + (z2,) + config.control[i + 1:]
    stacks = config.stacks
    if stack is not stacks[i]:
        stacks = stacks[:i] + (stack,) + stacks[i + 1:]
    return Configuration(control, stacks, channels)


def enabled_moves(system: Rqcp, config: Configuration, check: bool = True) -> list[tuple[str, Action, Configuration]]:
    """All one-step successors of ``config`` in the global transition system."""
    if check:
        check_configuration(system, config)
    out = []
    for i, p in enumerate(system.topology.processes):
        pd = system.processes[p]
        for t in pd.out(config.control[i]):
            nxt = apply_transition(system, config, p, t)
            if nxt is not None:
                out.append((p, t[1], nxt))
    return out


def replay(system: Rqcp, initial: Configuration, moves: Iterable[tuple[str, Action, State]]) -> Run:
    """Rebuild a run from (process, action, target local state) triples.

    Raises ValueError if some move is not enabled.
    """
    config = initial
    steps = []
    for n, (p, a, z2) in enumerate(moves):
        i = system.topology.process_index[p]
        nxt = apply_transition(system, config, p, (config.control[i], a, z2))
        if nxt is None or (config.control[i], a, z2) not in system.processes[p].transitions:
            raise ValueError(f"move {n} ({p}, {a}) is not enabled")
        steps.append(Step(p, a, nxt))
        config = nxt
    return Run(initial, tuple(steps))


def moves_of(system: Rqcp, run: Run) -> list[tuple[str, Action, State]]:
    idx = system.topology.process_index
    return [(s.process, s.action, s.config.control[idx[s.process]]) for s in run.steps]


def is_valid_run(system: Rqcp, run: Run) -> bool:
    try:
        rebuilt = replay(system, run.initial, moves_of(system, run))
    except ValueError:
        return False
    return rebuilt == run


def matching_pairs(run: Run, topology: Topology) -> set[tuple[int, int]]:
    """FIFO pairing of sends and receives, 1-based step indices.

    Receives that consume content already present in the initial configuration
    stay unpaired, as do sends that are never received.
    """
    pending: dict[str, list] = {}
    skip = {c.id: len(w) for c, w in zip(topology.channels, run.initial.channels)}
    pairs = set()
    for n, s in enumerate(run.steps, start=1):
        a = s.action
        if isinstance(a, Send):
            pending.setdefault(a.channel, []).append(n)
        elif isinstance(a, Recv):
            if skip[a.channel] > 0:
                skip[a.channel] -= 1
                continue
            pairs.add((pending[a.channel].pop(0), n))
    return pairs
