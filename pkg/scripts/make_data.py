"""Write the example systems in data/ from the named fixtures."""
from __future__ import annotations

import argparse
from pathlib import Path

from rqcp import fixtures
from rqcp.io import write_system
from rqcp.model import PushdownProcess, Rqcp


def idle(topology) -> Rqcp:
    pds = {p: PushdownProcess(frozenset({"z0"}), "z0") for p in topology.processes}
    return Rqcp(topology, frozenset({"m"}), pds)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data", type=Path)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    items = {
        "handshake.json": (fixtures.handshake(), ("z1", "y1")),
        "handshake_mux.json": (fixtures.handshake(sender_restricted=True), ("z1", "y1")),
        "guarded_sender.json": (fixtures.guarded_sender(), ("z2", "y0")),
        "ping_pong.json": (fixtures.ping_pong(2), ("a4", "b4")),
        "full_duplex.json": (fixtures.ping_pong(1, half_duplex=False), ("a2", "b2")),
        "ping_pong_restricted.json": (fixtures.ping_pong_restricted(2), ("a3", "b3")),
        "needs_buffering.json": (fixtures.needs_buffering(), ("z3", "y3")),
        "p0_p1.json": (fixtures.eagerness_counterexample(), ("2", "5", "r", "s")),
        "star.json": (idle(fixtures.star(3)), None),
        "double_ring.json": (idle(fixtures.double_ring()), None),
        "master_worker.json": (idle(fixtures.master_worker()), None),
        "converging.json": (idle(fixtures.single_channel()), None),
    }
    for name, (system, target) in items.items():
        write_system(args.out / name, system, target)
        print(args.out / name)


if __name__ == "__main__":
    main()
