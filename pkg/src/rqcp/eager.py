"""Eager reachability.

Two procedures live here:

* ``build_product`` / ``eager_state_reach`` for recursive systems over
  non-converging topologies.  All processes share one stack; a control state
  of the product records the active process, the control vector, the set E of
  processes whose own stack is empty and the set G of channels that received
  an unmatched message (no receive on them can follow in an eager run).
* ``finite_eager_reach`` for finite systems, a plain search over
  (control vector, G).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterator

from .model import (
    Local,
    Pop,
    PushdownProcess,
    Push,
    Recv,
    Rqcp,
    Send,
    validate_system,
)
from .pushdown import control_reachable
from .topology import UndirectedPath, converging_witness


class InvalidSystemError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class ConvergingTopologyError(ValueError):
    """The topology has a path with unrestricted ends; eager reachability is not decided."""

    def __init__(self, witness: UndirectedPath):
        super().__init__(f"converging topology, witness path: {witness}")
        self.witness = witness


def _require_valid(system: Rqcp) -> None:
    bad = validate_system(system)
    if bad:
        raise InvalidSystemError(bad)


def _require_non_converging(system: Rqcp) -> None:
    w = converging_witness(system.topology)
    if w is not None:
        raise ConvergingTopologyError(w)


# --------------------------------------------------------------------------
# product pushdown
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Drain:
    """Control marker: the process reached its target and is emptying its stack."""

    process: str


@dataclass(frozen=True)
class Done:
    process: str


@dataclass(frozen=True)
class ProductState:
    active: str | None
    control: tuple
    empty: frozenset
    growing: frozenset
    aux: Hashable = None


ACCEPTING = ProductState(None, (), frozenset(), frozenset(), "accept")


@dataclass(frozen=True)
class StackSym:
    """Product stack symbol: owner, original symbol, and whether it is the owner's bottom."""

    owner: str
    symbol: Hashable
    bottom: bool


def _guard_ok(pd: PushdownProcess, a, p: str, empty: frozenset) -> bool:
    return p in empty or a not in pd.eps_actions


def _set(vec: tuple, i: int, z) -> tuple:
    return vec[:i] + (z,) + vec[i + 1:]


def _product_moves(system: Rqcp, target: tuple, s: ProductState) -> Iterator[tuple]:
    """Outgoing product transitions (action, successor) from ``s``."""
    topo = system.topology
    procs = topo.processes
    idx = topo.process_index

    if s == ACCEPTING:
        return
    if s.aux is not None:
        # second half of the peek gadget: put the symbol back and switch
        _, q, sym = s.aux
        yield Push(sym), ProductState(q, s.control, s.empty, s.growing)
        return

    if all(isinstance(z, Done) for z in s.control):
        yield Local("accept"), ACCEPTING
        return

    for i, p in enumerate(procs):
        z = s.control[i]
        pd = system.processes[p]
        if isinstance(z, Done):
            continue
        if isinstance(z, Drain):
            if p == s.active:
                for g in sorted(pd.stack_alphabet, key=repr):
                    yield Pop(StackSym(p, g, False)), s
                    yield Pop(StackSym(p, g, True)), ProductState(s.active, s.control, s.empty | {p}, s.growing)
            if p in s.empty:
                yield Local(("done", p)), ProductState(s.active, _set(s.control, i, Done(p)), s.empty, s.growing)
            continue
        if z == target[i]:
            yield Local(("drain", p)), ProductState(s.active, _set(s.control, i, Drain(p)), s.empty, s.growing)
        for _, a, z2 in pd.out(z):
            ctrl = _set(s.control, i, z2)
            if isinstance(a, Push):
                if p != s.active:
                    continue
                if p in s.empty:
                    yield Push(StackSym(p, a.symbol, True)), ProductState(p, ctrl, s.empty - {p}, s.growing)
                else:
                    yield Push(StackSym(p, a.symbol, False)), ProductState(p, ctrl, s.empty, s.growing)
            elif isinstance(a, Pop):
                if p != s.active:
                    continue
                yield Pop(StackSym(p, a.symbol, False)), ProductState(p, ctrl, s.empty, s.growing)
                yield Pop(StackSym(p, a.symbol, True)), ProductState(p, ctrl, s.empty | {p}, s.growing)
            elif isinstance(a, Recv):
                # receives only happen inside a rendezvous, generated from the send side
                continue
            elif not _guard_ok(pd, a, p, s.empty):
                continue
            elif isinstance(a, Local):
                yield Local(("loc", p, a.label)), ProductState(s.active, ctrl, s.empty, s.growing)
            elif isinstance(a, Send):
                yield Local(("unmatched", p, a)), ProductState(s.active, ctrl, s.empty, s.growing | {a.channel})
                if a.channel in s.growing:
                    continue
                q = topo.channel(a.channel).dst
                j = idx[q]
                zq = s.control[j]
                if isinstance(zq, (Drain, Done)):
                    continue
                qpd = system.processes[q]
                for _, b, y2 in qpd.out(zq):
                    if b == Recv(a.channel, a.message) and _guard_ok(qpd, b, q, s.empty):
                        yield Local(("rdv", p, a)), ProductState(s.active, _set(ctrl, j, y2), s.empty, s.growing)

    for q in procs:
        if q == s.active:
            continue
        if q in s.empty:
            yield Local(("switch", q)), ProductState(q, s.control, s.empty, s.growing)
            continue
        for g in sorted(system.processes[q].stack_alphabet, key=repr):
            for bottom in (False, True):
                sym = StackSym(q, g, bottom)
                yield Pop(sym), ProductState(s.active, s.control, s.empty, s.growing, ("peek", q, sym))


def build_product(system: Rqcp, target) -> PushdownProcess:
    """Single pushdown whose ACCEPTING control state is reachable iff ``target`` is eager-reachable.

    Only control states reachable in the stack-free graph are materialised.
    ε-guards are resolved in the control (E is exact), so the result has no
    guarded actions.
    """
    _require_valid(system)
    _require_non_converging(system)
    vec = system.vector(target)
    procs = system.topology.processes
    init = ProductState(
        procs[0] if procs else None,
        system.initial_vector,
        frozenset(procs),
        frozenset(),
    )
    states = {init}
    transitions = []
    todo = deque([init])
    while todo:
        s = todo.popleft()
        for a, s2 in _product_moves(system, vec, s):
            transitions.append((s, a, s2))
            if s2 not in states:
                states.add(s2)
                todo.append(s2)
    alphabet = {
        StackSym(p, g, b)
        for p in procs
        for g in system.processes[p].stack_alphabet
        for b in (False, True)
    }
    states.add(ACCEPTING)
    return PushdownProcess(frozenset(states), init, frozenset(alphabet), tuple(transitions), frozenset())


def product_size_bound(system: Rqcp) -> int:
    """Upper bound on the number of product control states.

    |P| * prod(|Z^p| + 2) * 2^|P| * 2^|C| * (1 + 2|Gamma|) + 1, where the
    "+2" accounts for the drain markers, the factor 2 on Gamma for bottom
    tags in the peek gadget and the final +1 for ACCEPTING.
    """
    procs = system.topology.processes
    gamma = set()
    for p in procs:
        gamma |= {(p, g) for g in system.processes[p].stack_alphabet}
    prod = 1
    for p in procs:
        prod *= len(system.processes[p].states) + 2
    n = max(1, len(procs))
    return n * prod * 2 ** len(procs) * 2 ** len(system.topology.channels) * (1 + 2 * len(gamma)) + 1


def eager_state_reach(system: Rqcp, target) -> bool:
    """Is some configuration with control vector ``target`` eager-reachable?"""
    product = build_product(system, target)
    return ACCEPTING in control_reachable(product)


# --------------------------------------------------------------------------
# finite systems
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AbstractState:
    control: tuple
    growing: frozenset


def abstract_moves(system: Rqcp, s: AbstractState) -> Iterator[tuple]:
    """Eager moves of a finite system on (control vector, G).

    Yields (label, successor) where label is ("local", p, a),
    ("send", p, a) for an unmatched send, or ("rdv", p, a, q, b).
    """
    topo = system.topology
    idx = topo.process_index
    for i, p in enumerate(topo.processes):
        for _, a, z2 in system.processes[p].out(s.control[i]):
            ctrl = _set(s.control, i, z2)
            if isinstance(a, Recv):
                continue
            if isinstance(a, Send):
                yield ("send", p, a), AbstractState(ctrl, s.growing | {a.channel})
                if a.channel in s.growing:
                    continue
                q = topo.channel(a.channel).dst
                j = idx[q]
                for _, b, y2 in system.processes[q].out(s.control[j]):
                    if b == Recv(a.channel, a.message):
                        yield ("rdv", p, a, q, b), AbstractState(_set(ctrl, j, y2), s.growing)
            else:
                yield ("local", p, a), AbstractState(ctrl, s.growing)


def explore_abstract(system: Rqcp) -> dict:
    """BFS over eager abstract states; maps each state to (parent, label)."""
    init = AbstractState(system.initial_vector, frozenset())
    parents = {init: None}
    todo = deque([init])
    while todo:
        s = todo.popleft()
        for label, s2 in abstract_moves(system, s):
            if s2 not in parents:
                parents[s2] = (s, label)
                todo.append(s2)
    return parents


def abstract_path(parents: dict, s: AbstractState) -> list:
    labels = []
    while parents[s] is not None:
        s, label = parents[s]
        labels.append(label)
    return labels[::-1]


def _require_finite(system: Rqcp) -> None:
    if not system.is_finite:
        raise ValueError("system has stack alphabets; use eager_state_reach")


def finite_eager_reachable_vectors(system: Rqcp) -> set:
    _require_valid(system)
    _require_finite(system)
    return {s.control for s in explore_abstract(system)}


def finite_eager_reach(system: Rqcp, target) -> bool:
    _require_valid(system)
    _require_finite(system)
    vec = system.vector(target)
    return any(s.control == vec for s in explore_abstract(system))


def finite_eager_witness(system: Rqcp, target) -> list | None:
    """Sequence of abstract move labels reaching ``target``, or None."""
    _require_valid(system)
    _require_finite(system)
    vec = system.vector(target)
    parents = explore_abstract(system)
    for s in parents:
        if s.control == vec:
            return abstract_path(parents, s)
    return None
