"""Structural analysis of typed topologies.

Convergence is what separates decidable from undecidable eager reachability;
the co-cycle relation (pairs of channels sharing a simple undirected cycle)
is what the mutex checker needs.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import Topology


@dataclass(frozen=True)
class UndirectedPath:
    """Alternating sequence p0, c1, p1, ..., cn, pn (channel direction ignored)."""

    processes: tuple
    channels: tuple

    def __len__(self):
        return len(self.channels)

    @property
    def is_cycle(self) -> bool:
        return len(self.channels) >= 2 and self.processes[0] == self.processes[-1]

    def as_list(self) -> list:
        out = [self.processes[0]]
        for c, p in zip(self.channels, self.processes[1:]):
            out += [c, p]
        return out

    def __str__(self):
        return " ".join(map(str, self.as_list()))


def _adjacency(topology: Topology) -> dict[str, list[tuple[str, str]]]:
    adj: dict[str, list[tuple[str, str]]] = {p: [] for p in topology.processes}
    for c in topology.channels:
        adj[c.src].append((c.dst, c.id))
        adj[c.dst].append((c.src, c.id))
    return adj


def is_path(topology: Topology, path: UndirectedPath) -> bool:
    if len(path.processes) != len(path.channels) + 1:
        return False
    for p, c, q in zip(path.processes, path.channels, path.processes[1:]):
        ch = topology.channel(c)
        if {p, q} != {ch.src, ch.dst}:
            return False
    return True


def converging_witness(topology: Topology) -> UndirectedPath | None:
    """A simple path whose two end processes are unrestricted on their end channels."""
    adj = _adjacency(topology)
    for p0 in topology.processes:
        for p1, c1 in adj[p0]:
            if topology.is_restricted(p0, c1):
                continue
            # depth-first over simple extensions of (p0, c1, p1)
            stack = [((p0, p1), (c1,))]
            while stack:
                procs, chans = stack.pop()
                end = procs[-1]
                if not topology.is_restricted(end, chans[-1]):
                    return UndirectedPath(procs, chans)
                for q, c in reversed(adj[end]):
                    if q not in procs:
                        stack.append((procs + (q,), chans + (c,)))
    return None


def is_converging(topology: Topology) -> tuple[bool, UndirectedPath | None]:
    w = converging_witness(topology)
    return w is not None, w


def biconnected_edge_components(topology: Topology) -> list[list[str]]:
    """Edge partition of the undirected multigraph into biconnected components.

    Iterative Hopcroft-Tarjan keyed on channel ids, so parallel and
    antiparallel channels are distinct edges.
    """
    adj = _adjacency(topology)
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    comps: list[list[str]] = []
    edges: list[str] = []
    clock = 0
    for root in topology.processes:
        if root in disc:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            descended = False
            for w, cid in it:
                if cid == via:
                    continue
                if w not in disc:
                    edges.append(cid)
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, cid, iter(adj[w])))
                    descended = True
                    break
                if disc[w] < disc[v]:
                    low[v] = min(low[v], disc[w])
                    edges.append(cid)
            if descended:
                continue
            stack.pop()
            if not stack:
                continue
            u = stack[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= disc[u]:
                comp = []
                while True:
                    e = edges.pop()
                    comp.append(e)
                    if e == via:
                        break
                comps.append(comp)
    return comps


def co_cycle_relation(topology: Topology) -> frozenset[tuple[str, str]]:
    """Ordered pairs (c, d), c != d, of channels lying on a common simple cycle."""
    rel = set()
    for comp in biconnected_edge_components(topology):
        if len(comp) < 2:
            continue
        for c in comp:
            for d in comp:
                if c != d:
                    rel.add((c, d))
    return frozenset(rel)


def is_polyforest(topology: Topology) -> bool:
    return all(len(comp) < 2 for comp in biconnected_edge_components(topology))


def _canonical_cycle(topology: Topology, procs: tuple, chans: tuple) -> UndirectedPath:
    # rotate to start at the smallest process, pick the orientation with the
    # smaller channel sequence
    pidx = topology.process_index
    cidx = topology.channel_index
    n = len(chans)
    ring = procs[:-1]
    start = min(range(n), key=lambda i: pidx[ring[i]])
    fwd_p = ring[start:] + ring[:start]
    fwd_c = chans[start:] + chans[:start]
    # reversed orientation from the same start process
    bwd_p = (fwd_p[0],) + tuple(reversed(fwd_p[1:]))
    bwd_c = tuple(reversed(fwd_c))
    if [cidx[c] for c in bwd_c] < [cidx[c] for c in fwd_c]:
        fwd_p, fwd_c = bwd_p, bwd_c
    return UndirectedPath(fwd_p + (fwd_p[0],), fwd_c)


def enumerate_simple_cycles(topology: Topology, max_len: int | None = None) -> list[UndirectedPath]:
    """All simple undirected cycles of length <= max_len, canonicalised.

    Brute force; intended as an oracle and for small topologies.
    """
    if max_len is None:
        max_len = len(topology.channels)
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    adj = _adjacency(topology)
    pidx = topology.process_index
    seen: dict[frozenset, UndirectedPath] = {}
    for s in topology.processes:
        stack = [((s,), ())]
        while stack:
            procs, chans = stack.pop()
            end = procs[-1]
            for q, c in adj[end]:
                if c in chans:
                    continue
                if q == s and len(chans) + 1 >= 2:
                    key = frozenset(chans + (c,))
                    if key not in seen:
                        seen[key] = _canonical_cycle(topology, procs + (s,), chans + (c,))
                elif q != s and q not in procs and pidx[q] > pidx[s] and len(chans) + 1 < max_len:
                    stack.append((procs + (q,), chans + (c,)))
    cidx = topology.channel_index
    return sorted(seen.values(), key=lambda cy: (len(cy), [cidx[c] for c in cy.channels]))


def co_cycle_relation_bruteforce(topology: Topology) -> frozenset[tuple[str, str]]:
    rel = set()
    for cy in enumerate_simple_cycles(topology, max(2, len(topology.channels))):
        for c in cy.channels:
            for d in cy.channels:
                if c != d:
                    rel.add((c, d))
    return frozenset(rel)


def weak_co_cycle_relation(topology: Topology) -> frozenset[tuple[str, str]]:
    """Pairs of channels that are consecutive on some simple cycle.

    A cycle may be written from any starting point in either direction, so
    "its first two channels" ranges over every consecutive pair.
    """
    rel = set()
    for cy in enumerate_simple_cycles(topology, max(2, len(topology.channels))):
        cs = cy.channels
        for i in range(len(cs)):
            c, d = cs[i], cs[(i + 1) % len(cs)]
            if c != d:
                rel.add((c, d))
                rel.add((d, c))
    return frozenset(rel)


def to_dot(topology: Topology) -> str:
    """Graphviz rendering; restricted ends drawn as hollow dots."""
    lines = ["digraph topology {"]
    for p in topology.processes:
        lines.append(f'  "{p}";')
    for c in topology.channels:
        tail = "odot" if topology.is_restricted(c.src, c.id) else "dot"
        head = "odot" if topology.is_restricted(c.dst, c.id) else "dot"
        lines.append(
            f'  "{c.src}" -> "{c.dst}" [label="{c.id}", dir=both, arrowtail={tail}, arrowhead="normal{head}"];'
        )
    lines.append("}")
    return "\n".join(lines)
