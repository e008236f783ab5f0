"""Named topologies and small systems used by tests, scripts and the data files."""
from __future__ import annotations

from .model import Channel, Local, PushdownProcess, Push, Recv, Rqcp, Send, Topology


def _topology(processes, chans, restricted) -> Topology:
    return Topology(tuple(processes), tuple(Channel(*c) for c in chans), frozenset(restricted))


def single_channel(src_restricted: bool = False, dst_restricted: bool = False) -> Topology:
    r = set()
    if src_restricted:
        r.add(("p", "c"))
    if dst_restricted:
        r.add(("q", "c"))
    return _topology(["p", "q"], [("c", "p", "q")], r)


def star(n: int = 2) -> Topology:
    """Hub ``p`` sending to leaves q1..qn; each leaf is restricted on its channel."""
    leaves = [f"q{i}" for i in range(1, n + 1)]
    chans = [(f"c{i}", "p", q) for i, q in enumerate(leaves, start=1)]
    return _topology(["p", *leaves], chans, {(q, f"c{i}") for i, q in enumerate(leaves, start=1)})


def double_ring() -> Topology:
    """Four processes on a ring with channels in both directions.

    Clockwise channels are restricted at their destination only.  Of the
    counter-clockwise ones, two are restricted at both ends and two only at
    their source.
    """
    procs = ["p1", "p2", "p3", "p4"]
    chans = [
        ("a12", "p1", "p2"),
        ("a23", "p2", "p3"),
        ("a34", "p3", "p4"),
        ("a41", "p4", "p1"),
        ("b21", "p2", "p1"),
        ("b32", "p3", "p2"),
        ("b43", "p4", "p3"),
        ("b14", "p1", "p4"),
    ]
    restricted = {
        ("p2", "a12"), ("p3", "a23"), ("p4", "a34"), ("p1", "a41"),
        ("p2", "b21"), ("p1", "b21"),
        ("p3", "b32"),
        ("p4", "b43"),
        ("p1", "b14"), ("p4", "b14"),
    }
    return _topology(procs, chans, restricted)


def master_worker() -> Topology:
    """Two-level master/worker hierarchy with eight processes."""
    procs = [f"p{i}" for i in range(1, 9)]
    # (src, dst, src restricted, dst restricted)
    edges = [
        (2, 4, False, True),
        (4, 7, False, True),
        (4, 8, True, True),
        (1, 3, False, True),
        (2, 1, False, True),
        (3, 5, False, True),
        (3, 6, True, True),
        (5, 6, True, True),
        (4, 2, True, False),
        (7, 4, True, False),
        (8, 4, True, True),
        (3, 1, True, True),
        (1, 2, False, True),
        (5, 3, True, False),
        (6, 3, True, False),
        (6, 5, True, True),
    ]
    chans, restricted = [], set()
    for s, d, rs, rd in edges:
        cid = f"c{s}{d}"
        chans.append((cid, f"p{s}", f"p{d}"))
        if rs:
            restricted.add((f"p{s}", cid))
        if rd:
            restricted.add((f"p{d}", cid))
    return _topology(procs, chans, restricted)


def ring(n: int = 4, pendant: bool = False) -> Topology:
    procs = [f"p{i}" for i in range(n)]
    chans = [(f"c{i + 1}", procs[i], procs[(i + 1) % n]) for i in range(n)]
    if pendant:
        procs.append("x")
        chans.append(("e", procs[0], "x"))
    return _topology(procs, chans, set())


def antiparallel() -> Topology:
    return _topology(["p", "q"], [("c", "p", "q"), ("d", "q", "p")], set())


def _pd(states, init, ts, eps=(), alphabet=()) -> PushdownProcess:
    return PushdownProcess(frozenset(states), init, frozenset(alphabet), tuple(ts), frozenset(eps))


def handshake(sender_restricted: bool = False) -> Rqcp:
    """Sender z0 -c!m-> z1 and receiver y0 -c?m-> y1, receiver restricted on c.

    With ``sender_restricted`` the sender is restricted too, which gives it
    a mux phase on c.
    """
    restricted = {("q", "c")}
    send, recv = Send("c", "m"), Recv("c", "m")
    if sender_restricted:
        restricted.add(("p", "c"))
    topo = _topology(["p", "q"], [("c", "p", "q")], restricted)
    return Rqcp(
        topo,
        {"m"},
        {
            "p": _pd({"z0", "z1"}, "z0", [("z0", send, "z1")], eps={send} if sender_restricted else ()),
            "q": _pd({"y0", "y1"}, "y0", [("y0", recv, "y1")], eps={recv}),
        },
    )


def receiver_only() -> Rqcp:
    topo = _topology(["p", "q"], [("c", "p", "q")], {("q", "c")})
    recv = Recv("c", "m")
    return Rqcp(
        topo,
        {"m"},
        {
            "p": _pd({"z0"}, "z0", []),
            "q": _pd({"y0", "y1"}, "y0", [("y0", recv, "y1")], eps={recv}),
        },
    )


def guarded_sender() -> Rqcp:
    """The sender pushes and may only send with an empty stack.

    From z0 it either sends directly (z0 -> z3) or pushes first and then is
    stuck at z1 before the guarded send; z2 is only reachable after a send
    from the pushed branch and thus unreachable.
    """
    topo = _topology(["p", "q"], [("c", "p", "q")], {("p", "c"), ("q", "c")})
    send = Send("c", "m")
    recv = Recv("c", "m")
    return Rqcp(
        topo,
        {"m"},
        {
            "p": _pd(
                {"z0", "z1", "z2", "z3"},
                "z0",
                [("z0", Push("a"), "z1"), ("z1", send, "z2"), ("z0", send, "z3")],
                eps={send},
                alphabet={"a"},
            ),
            "q": _pd({"y0", "y1"}, "y0", [("y0", recv, "y1")], eps={recv}),
        },
    )


def ping_pong(rounds: int = 2, half_duplex: bool = True) -> Rqcp:
    """``p`` sends ping on c, ``q`` answers pong on d, ``rounds`` times.

    With ``half_duplex=False`` both start by sending, which fills both
    directions at once.
    """
    topo = antiparallel()
    pts, qts = [], []
    for r in range(rounds):
        pts += [(f"a{2 * r}", Send("c", "ping"), f"a{2 * r + 1}"), (f"a{2 * r + 1}", Recv("d", "pong"), f"a{2 * r + 2}")]
        if half_duplex:
            qts += [(f"b{2 * r}", Recv("c", "ping"), f"b{2 * r + 1}"), (f"b{2 * r + 1}", Send("d", "pong"), f"b{2 * r + 2}")]
        else:
            qts += [(f"b{2 * r}", Send("d", "pong"), f"b{2 * r + 1}"), (f"b{2 * r + 1}", Recv("c", "ping"), f"b{2 * r + 2}")]
    n = 2 * rounds + 1
    return Rqcp(
        topo,
        {"ping", "pong"},
        {
            "p": _pd({f"a{i}" for i in range(n)}, "a0", pts),
            "q": _pd({f"b{i}" for i in range(n)}, "b0", qts),
        },
    )


def ping_pong_restricted(rounds: int = 2) -> Rqcp:
    """Ping-pong where each channel is restricted at its sender.

    Every message needs its own phase, so ``(a{2r}, b{2r})`` takes 2r + 1
    phases.
    """
    base = ping_pong(rounds)
    topo = Topology(base.topology.processes, base.topology.channels, frozenset({("p", "c"), ("q", "d")}))
    procs = {}
    for name, pd in base.processes.items():
        sends = frozenset(a for _, a, _ in pd.transitions if isinstance(a, Send))
        procs[name] = PushdownProcess(pd.states, pd.init, pd.stack_alphabet, pd.transitions, sends)
    return Rqcp(topo, base.messages, procs)


def needs_buffering() -> Rqcp:
    """Both messages on c must be buffered before the receiver starts.

    ``p`` sends m1, m2 on c and only then "go" on d; ``q`` waits for "go"
    before reading c.  The final vector is reachable, but not eagerly.
    """
    topo = _topology(["p", "q"], [("c", "p", "q"), ("d", "p", "q")], set())
    return Rqcp(
        topo,
        {"m1", "m2", "go"},
        {
            "p": _pd(
                {"z0", "z1", "z2", "z3"},
                "z0",
                [("z0", Send("c", "m1"), "z1"), ("z1", Send("c", "m2"), "z2"), ("z2", Send("d", "go"), "z3")],
            ),
            "q": _pd(
                {"y0", "y1", "y2", "y3"},
                "y0",
                [("y0", Recv("d", "go"), "y1"), ("y1", Recv("c", "m1"), "y2"), ("y2", Recv("c", "m2"), "y3")],
            ),
        },
    )


def eagerness_counterexample() -> Rqcp:
    """Four finite processes p0..p3 that both start with a $ exchange.

    p0 either sends $ to p1 and then waits for p1's $, or skips ahead
    emitting one a/b pair to p2/p3; p1 either sends $ and then waits for
    p0's $, or skips.  Both $ sends together fill c01 and c10 at once.
    """
    topo = _topology(
        ["p0", "p1", "p2", "p3"],
        [("c01", "p0", "p1"), ("c10", "p1", "p0"), ("c02", "p0", "p2"), ("c03", "p0", "p3")],
        set(),
    )
    p0 = _pd(
        {"0", "1", "2", "k0", "k1", "k2"},
        "0",
        [
            ("0", Send("c01", "$"), "1"),
            ("0", Local("skip"), "k0"),
            ("k0", Send("c02", "a"), "k1"),
            ("k1", Send("c03", "b"), "k2"),
            ("k2", Local("join"), "2"),
            ("1", Recv("c10", "$"), "2"),
            ("1", Send("c02", "a"), "1"),
            ("1", Send("c03", "b"), "1"),
        ],
    )
    p1 = _pd(
        {"3", "4", "5"},
        "3",
        [("3", Send("c10", "$"), "4"), ("3", Local("skip"), "5"), ("4", Recv("c01", "$"), "5")],
    )
    idle2 = _pd({"r"}, "r", [])
    idle3 = _pd({"s"}, "s", [])
    return Rqcp(topo, {"$", "a", "b"}, {"p0": p0, "p1": p1, "p2": idle2, "p3": idle3})
