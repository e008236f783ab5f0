"""Reachability for a single pushdown system by saturation.

The reachable set is kept as a P-automaton whose entry nodes are the control
states.  A configuration (z, u) is represented when the automaton reads ``u``
from the top of stack downwards, starting in node ``z``, and ends in an
accepting node.  Edges are labelled by a stack symbol or by ``None`` (an
epsilon edge).

Because a push here never inspects the top of stack, the saturation rules
need no mid-push nodes:

* push(g) from z to z'    adds  z' --g--> z
* local   from z to z'    adds  z' --eps--> z
* guarded local z -> z'   adds  z' --eps--> ACCEPT  once eps is accepted from z
* pop(g)  from z to z'    adds  z' --eps--> w  for each path z --eps*--> y --g--> w
"""
from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable

from .model import PushdownProcess, Pop, Push, is_comm


class _Accept:
    __slots__ = ()

    def __repr__(self):
        return "ACCEPT"

    def __reduce__(self):
        return "ACCEPT"


ACCEPT = _Accept()
_SEED = object()


class PAutomaton:
    """Finite automaton over stack symbols with control states as entry nodes."""

    def __init__(self, control: Iterable[Hashable], transitions: Iterable[tuple] = (), accepting: Iterable[Hashable] = ()):
        self.control = frozenset(control)
        self.accepting = set(accepting)
        self.transitions: set[tuple] = set()
        self._out: dict = {}
        self._in: dict = {}
        for t in transitions:
            self.add(*t)

    @classmethod
    def single(cls, control: Iterable[Hashable], state: Hashable, stack: tuple = ()) -> "PAutomaton":
        """Automaton representing exactly the configuration (state, stack)."""
        aut = cls(control, accepting=[ACCEPT])
        node = state
        # read from the top (last element) downwards
        for n, g in enumerate(reversed(stack)):
            nxt = (_SEED, n) if n < len(stack) - 1 else ACCEPT
            aut.add(node, g, nxt)
            node = nxt
        if not stack:
            aut.add(state, None, ACCEPT)
        return aut

    def copy(self) -> "PAutomaton":
        return PAutomaton(self.control, self.transitions, self.accepting)

    @property
    def nodes(self) -> set:
        out = set(self.control) | set(self.accepting)
        for a, _, b in self.transitions:
            out.add(a)
            out.add(b)
        return out

    def add(self, a, label, b) -> bool:
        t = (a, label, b)
        if t in self.transitions:
            return False
        self.transitions.add(t)
        self._out.setdefault(a, []).append((label, b))
        self._in.setdefault(b, []).append((label, a))
        return True

    def out(self, node) -> list:
        return self._out.get(node, [])

    def eps_closure(self, node) -> set:
        seen = {node}
        todo = [node]
        while todo:
            n = todo.pop()
            for label, m in self.out(n):
                if label is None and m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen

    def accepts_empty(self, state) -> bool:
        return any(n in self.accepting for n in self.eps_closure(state))

    def accepts(self, state, stack: tuple) -> bool:
        """Membership of (state, stack); stack top is the last element."""
        current = self.eps_closure(state)
        for g in reversed(stack):
            nxt = set()
            for n in current:
                for label, m in self.out(n):
                    if label == g:
                        nxt |= self.eps_closure(m)
            current = nxt
            if not current:
                return False
        return any(n in self.accepting for n in current)

    def nonempty_nodes(self) -> set:
        """Nodes from which some accepting node is reachable."""
        seen = set(self.accepting)
        todo = list(seen)
        while todo:
            n = todo.pop()
            for _, m in self._in.get(n, []):
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen

    def language_sample(self, state, max_height: int) -> set[tuple]:
        """All represented stacks at ``state`` of height <= max_height."""
        out = set()
        todo = deque([(state, ())])
        seen = {(state, ())}
        while todo:
            n, word = todo.popleft()
            if n in self.accepting:
                out.add(tuple(reversed(word)))
            for label, m in self.out(n):
                w2 = word if label is None else word + (label,)
                if len(w2) > max_height or (m, w2) in seen:
                    continue
                seen.add((m, w2))
                todo.append((m, w2))
        return out


def _check_no_comm(pd: PushdownProcess) -> None:
    bad = [a for _, a, _ in pd.transitions if is_comm(a)]
    if bad:
        raise ValueError(f"saturation needs stack and local actions only, got {bad[0]}")


def saturate(pd: PushdownProcess, initial: PAutomaton | None = None) -> PAutomaton:
    """Post* of ``initial`` (default: the configuration (pd.init, empty stack)).

    Worklist version.  Symbol edges are pulled back over epsilon edges, so
    "z --eps*--> y --g--> w" always yields a direct edge z --g--> w, and the
    set of nodes accepting the empty word is maintained alongside.
    """
    _check_no_comm(pd)
    if initial is None:
        seed = PAutomaton.single(pd.states, pd.init)
    else:
        seed = initial
        for _, _, b in seed.transitions:
            if b in pd.states:
                raise ValueError("initial P-automaton must not have edges into control states")
    aut = PAutomaton(pd.states, accepting=seed.accepting | {ACCEPT})

    pops: dict = {}
    guarded: dict = {}
    # push and local rules contribute edges once their source is reached
    rules: dict = {}
    for z, a, z2 in pd.transitions:
        if isinstance(a, Push):
            rules.setdefault(z, []).append((z2, a.symbol, z))
        elif isinstance(a, Pop):
            pops.setdefault((z, a.symbol), []).append(z2)
        elif a in pd.eps_actions:
            guarded.setdefault(z, []).append(z2)
        else:
            rules.setdefault(z, []).append((z2, None, z))

    eps_in: dict = {}
    sym_out: dict = {}
    acc: set = set()
    reached: set = set()
    work = deque(seed.transitions)

    def reach(node):
        if node not in reached:
            reached.add(node)
            work.extend(rules.get(node, ()))

    def mark(node):
        todo = [node]
        while todo:
            x = todo.pop()
            if x in acc:
                continue
            acc.add(x)
            reach(x)
            for z2 in guarded.get(x, ()):
                work.append((z2, None, ACCEPT))
            todo.extend(eps_in.get(x, ()))

    for n in list(aut.accepting):
        mark(n)

    while work:
        a, label, b = work.popleft()
        if not aut.add(a, label, b):
            continue
        reach(a)
        if label is not None:
            sym_out.setdefault(a, []).append((label, b))
            for z2 in pops.get((a, label), ()):
                work.append((z2, None, b))
            for x in eps_in.get(a, ()):
                work.append((x, label, b))
            continue
        eps_in.setdefault(b, []).append(a)
        for g, c in sym_out.get(b, ()):
            work.append((a, g, c))
        if b in acc:
            mark(a)

    n = len(aut.nodes)
    assert len(aut.transitions) <= n * n * (len(pd.stack_alphabet | _symbols(seed)) + 1)
    return aut


def _symbols(aut: PAutomaton) -> set:
    return {label for _, label, _ in aut.transitions if label is not None}


def control_reachable(pd: PushdownProcess, start=None) -> set:
    """Control states reachable from (start, empty stack)."""
    if start is None:
        start = pd.init
    aut = saturate(pd.with_init(start))
    live = aut.nonempty_nodes()
    return {z for z in pd.states if z in live}


def empty_pairs(pd: PushdownProcess) -> set[tuple]:
    """Pairs (z, z') with an empty-stack-to-empty-stack execution from z to z'.

    Summary-edge fixpoint instead of one saturation per state.  A summary
    y => z2 stands for push(g) y -> a, a nested run a ~> b, pop(g) b -> z2.
    Nested runs never see an empty stack, so guarded locals only count at
    the top level.
    """
    _check_no_comm(pd)
    free: dict = {}
    guarded: dict = {}
    pushes: dict = {}
    pops: dict = {}
    for z, a, z2 in pd.transitions:
        if isinstance(a, Push):
            pushes.setdefault(z2, []).append((z, a.symbol))
        elif isinstance(a, Pop):
            pops.setdefault((z, a.symbol), []).append(z2)
        elif a in pd.eps_actions:
            guarded.setdefault(z, []).append(z2)
        else:
            free.setdefault(z, []).append(z2)

    # nested[x] = states y with a run (x, g) ~> (y, g) that never pops below g
    nested: dict = {z: {z} for z in pd.states}
    into: dict = {z: {z} for z in pd.states}  # reverse of nested
    summary: dict = {}
    work = deque((z, z) for z in pd.states)

    def add(x, y):
        if y not in nested[x]:
            nested[x].add(y)
            into[y].add(x)
            work.append((x, y))

    while work:
        x, y = work.popleft()
        for y2 in free.get(y, ()):
            add(x, y2)
        for y2 in summary.get(y, ()):
            add(x, y2)
        # (x, y) closes brackets opened by pushes into x
        for w, g in pushes.get(x, ()):
            for z2 in pops.get((y, g), ()):
                if z2 not in summary.setdefault(w, set()):
                    summary[w].add(z2)
                    for u in list(into[w]):
                        add(u, z2)

    rel = set()
    for z in pd.states:
        seen = {z}
        todo = [z]
        while todo:
            y = todo.pop()
            for y2 in (*free.get(y, ()), *guarded.get(y, ()), *summary.get(y, ())):
                if y2 not in seen:
                    seen.add(y2)
                    todo.append(y2)
        rel.update((z, y) for y in seen)
    return rel


def local_pushdown(states, init, transitions, eps=(), alphabet=None) -> PushdownProcess:
    """Convenience constructor used by tests and scripts."""
    ts = tuple(transitions)
    if alphabet is None:
        alphabet = {a.symbol for _, a, _ in ts if isinstance(a, (Push, Pop))}
    return PushdownProcess(frozenset(states), init, frozenset(alphabet), ts, frozenset(eps))


__all__ = [
    "ACCEPT",
    "PAutomaton",
    "control_reachable",
    "empty_pairs",
    "local_pushdown",
    "saturate",
]
