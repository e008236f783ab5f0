"""Mutex checking for finite systems.

A configuration is mutex when no two channels sharing a simple undirected
cycle are both nonempty.  Along eager runs of a finite system the nonempty
channels are exactly the growing set G, so exploring (control vector, G)
covers every mutex-reachable configuration up to channel contents.
"""
from __future__ import annotations

from dataclasses import dataclass

from .eager import (
    AbstractState,
    _require_finite,
    _require_valid,
    abstract_path,
    explore_abstract,
)
from .model import Configuration, Rqcp, Send, Topology
from .topology import co_cycle_relation, is_polyforest, weak_co_cycle_relation


def cycle_relation(topology: Topology, weak: bool = False) -> frozenset:
    return weak_co_cycle_relation(topology) if weak else co_cycle_relation(topology)


def is_mutex_channels(nonempty, relation) -> bool:
    ne = set(nonempty)
    return not any(c in ne and d in ne for c, d in relation)


def is_mutex_config(topology: Topology, config: Configuration, weak: bool = False, relation=None) -> bool:
    if relation is None:
        relation = cycle_relation(topology, weak)
    return is_mutex_channels(config.nonempty_channels(topology), relation)


@dataclass
class MutexVerdict:
    mutex: bool
    witness: dict | None = None
    states_explored: int = 0
    short_circuit: bool = False


def check_mutex(system: Rqcp, weak: bool = False) -> MutexVerdict:
    """Decide whether every reachable configuration of a finite system is mutex.

    A violation is reported at the first eager-reachable abstract state that
    is itself not mutex, or from which a send would make two related channels
    nonempty.
    """
    _require_valid(system)
    _require_finite(system)
    topo = system.topology
    if is_polyforest(topo):
        return MutexVerdict(True, short_circuit=True)
    rel = cycle_relation(topo, weak)
    partners: dict = {}
    for c, d in rel:
        partners.setdefault(c, set()).add(d)
    parents = explore_abstract(system)
    for s in parents:
        if not is_mutex_channels(s.growing, rel):
            return MutexVerdict(False, _witness(topo, parents, s, None), len(parents))
    for s in parents:
        for i, p in enumerate(topo.processes):
            for _, a, _ in system.processes[p].out(s.control[i]):
                if not isinstance(a, Send) or a.channel in s.growing:
                    continue
                if partners.get(a.channel, set()) & s.growing:
                    return MutexVerdict(False, _witness(topo, parents, s, (p, a)), len(parents))
    return MutexVerdict(True, states_explored=len(parents))


def _witness(topo: Topology, parents: dict, s: AbstractState, send) -> dict:
    path = abstract_path(parents, s)
    out = {
        "control": dict(zip(topo.processes, s.control)),
        "nonempty": sorted(s.growing, key=topo.channel_index.__getitem__),
        "path": [_label_str(lab) for lab in path],
    }
    if send is not None:
        p, a = send
        out["send"] = {"process": p, "action": str(a)}
    return out


def _label_str(label) -> str:
    kind, p, a = label[:3]
    if kind == "rdv":
        return f"{p}:{a} / {label[3]}:{label[4]}"
    return f"{p}:{a}"
