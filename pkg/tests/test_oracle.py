"""The explicit-state reference implementations, checked on hand-built systems."""
import pytest
from hypothesis import given, settings

from rqcp import fixtures
from rqcp.bounded import LOCAL_ONLY, Demux, MdSequence, Mux, Phase
from rqcp.model import Local, Pop, Push, PushdownProcess, Recv, Send, replay
from rqcp.oracle import (
    Bounds,
    NotMutexError,
    eager_reach_bruteforce,
    eager_witness,
    explore_bounded,
    is_eager_run,
    is_mutex_run,
    is_well_bracketed,
    is_well_formed,
    kphase_reach_bruteforce,
    md_satisfiable_bruteforce,
    projections_equal,
    pushdown_bfs,
    reach_bruteforce,
    reorder_mutex_to_eager,
    stack_pairs,
)
from rqcp.random_systems import random_cyclic_system, random_local_pushdown

from conftest import rng_for, seeds


def run_of(system, moves):
    return replay(system, system.initial_configuration(), moves)


def test_explore_handshake_is_complete():
    s = fixtures.handshake()
    res = reach_bruteforce(s)
    assert not res.truncated
    assert res.vectors == {("z0", "y0"), ("z1", "y0"), ("z1", "y1")}


def test_needs_buffering_separates_eager_from_general():
    s = fixtures.needs_buffering()
    full = reach_bruteforce(s)
    eager = eager_reach_bruteforce(s)
    assert ("z3", "y3") in full.vectors
    assert ("z3", "y3") not in eager.vectors
    assert eager.conclusive_for(("z3", "y3"))


def test_truncation_is_reported():
    # an unbounded sender overflows the channel bound
    s = fixtures.handshake()
    p = PushdownProcess(frozenset({"z0"}), "z0", transitions=(("z0", Send("c", "m"), "z0"),))
    s = type(s)(s.topology, s.messages, {"p": p, "q": s.processes["q"]})
    res = reach_bruteforce(s, Bounds(channel_len=2, steps=10))
    assert res.truncated
    assert not res.conclusive_for(("z0", "y9"))


def test_stack_bound_truncates():
    pd = PushdownProcess(frozenset({0}), 0, frozenset({"a"}), ((0, Push("a"), 0),))
    confs, cut = pushdown_bfs(pd, max_height=3)
    assert cut
    assert {u for _, u in confs} == {(), ("a",), ("a", "a"), ("a", "a", "a")}


def test_guarded_action_blocked_on_nonempty_stack():
    pd = PushdownProcess(
        frozenset({0, 1, 2}), 0, frozenset({"a"}),
        ((0, Push("a"), 1), (1, Local("x"), 2), (0, Local("x"), 2)),
        frozenset({Local("x")}),
    )
    confs, cut = pushdown_bfs(pd)
    assert not cut
    assert confs == {(0, ()), (1, ("a",)), (2, ())}


def test_eager_witness_is_eager():
    s = fixtures.ping_pong(2)
    run = eager_witness(s, ("a4", "b4"))
    assert run is not None
    assert is_eager_run(run, s.topology)
    assert run.final.control == ("a4", "b4")


def test_is_eager_run_rejects_buffered_run():
    s = fixtures.needs_buffering()
    run = run_of(s, [
        ("p", Send("c", "m1"), "z1"), ("p", Send("c", "m2"), "z2"), ("p", Send("d", "go"), "z3"),
        ("q", Recv("d", "go"), "y1"), ("q", Recv("c", "m1"), "y2"), ("q", Recv("c", "m2"), "y3"),
    ])
    assert not is_eager_run(run, s.topology)


def test_trailing_unmatched_send_is_eager():
    s = fixtures.handshake()
    run = run_of(s, [("p", Send("c", "m"), "z1")])
    assert is_eager_run(run, s.topology)


def test_well_formed_and_bracketed():
    pd = PushdownProcess(frozenset({0, 1, 2}), 0, frozenset({"a"}), ((0, Push("a"), 1), (1, Pop("a"), 2)))
    s = fixtures.handshake()
    s = type(s)(s.topology, s.messages, {"p": pd, "q": pd})
    crossing = run_of(s, [("p", Push("a"), 1), ("q", Push("a"), 1), ("p", Pop("a"), 2), ("q", Pop("a"), 2)])
    nested = run_of(s, [("p", Push("a"), 1), ("q", Push("a"), 1), ("q", Pop("a"), 2), ("p", Pop("a"), 2)])
    assert is_well_formed(crossing, "p") and is_well_formed(crossing, "q")
    assert not is_well_bracketed(crossing, s.topology)
    assert is_well_bracketed(nested, s.topology)
    pairs, balanced = stack_pairs(nested, "p")
    assert balanced and pairs == [(1, 4)]
    half = run_of(s, [("p", Push("a"), 1)])
    assert not is_well_formed(half, "p")


def test_reorder_full_duplex_rejected():
    s = fixtures.ping_pong(1, half_duplex=False)
    run = run_of(s, [("p", Send("c", "ping"), "a1"), ("q", Send("d", "pong"), "b1")])
    assert not is_mutex_run(run, s.topology)
    with pytest.raises(NotMutexError):
        reorder_mutex_to_eager(s, run)


def test_reorder_simple_run():
    s = fixtures.ping_pong(2)
    # p's first ping is sent early but received late
    moves = [
        ("p", Send("c", "ping"), "a1"), ("q", Recv("c", "ping"), "b1"),
        ("q", Send("d", "pong"), "b2"), ("p", Recv("d", "pong"), "a2"),
        ("p", Send("c", "ping"), "a3"), ("q", Recv("c", "ping"), "b3"),
    ]
    run = run_of(s, moves)
    out = reorder_mutex_to_eager(s, run)
    assert is_eager_run(out, s.topology)
    assert projections_equal(run, out, s.topology)
    assert out.final == run.final


@settings(max_examples=40)
@given(seeds)
def test_reorder_on_random_mutex_runs(seed):
    rng = rng_for(seed)
    s = random_cyclic_system(rng)
    ex = explore_bounded(s, Bounds(3, 0, 10))
    for c in list(ex.parents)[-4:]:
        run = run_of(s, ex.path(c))
        if not is_mutex_run(run, s.topology):
            continue
        out = reorder_mutex_to_eager(s, run)
        assert is_eager_run(out, s.topology)
        assert projections_equal(run, out, s.topology)
        assert out.final == run.final


def test_kphase_handshake():
    s = fixtures.handshake(sender_restricted=True)
    assert kphase_reach_bruteforce(s, ("z1", "y1"), 1) == (False, False)
    assert kphase_reach_bruteforce(s, ("z1", "y1"), 2)[0]
    # a receiver restricted at the destination only cannot be served by a mux phase
    s = fixtures.handshake()
    assert kphase_reach_bruteforce(s, ("z1", "y1"), 3) == (False, False)


def test_kphase_local_moves_need_a_phase():
    s = fixtures.handshake(sender_restricted=True)
    p = PushdownProcess(frozenset({"z0", "z1"}), "z0", transitions=(("z0", Local("t"), "z1"),))
    s = type(s)(s.topology, s.messages, {"p": p, "q": s.processes["q"]})
    assert kphase_reach_bruteforce(s, ("z0", "y0"), 1) == (True, False)
    assert kphase_reach_bruteforce(s, ("z1", "y0"), 1) == (True, False)


def _phase(p, ts, final, kind, eps=(), alphabet=()):
    states = {z for t in ts for z in (t[0], t[2])} | {0, final}
    return Phase(p, PushdownProcess(frozenset(states), 0, frozenset(alphabet), tuple(ts), frozenset(eps)), final, kind)


def test_md_bruteforce_send_then_receive():
    topo = fixtures.handshake(sender_restricted=True).topology
    send, recv = Send("c", "m"), Recv("c", "m")
    mux = _phase("p", [(0, send, 1)], 1, Mux("c"), eps={send})
    demux = _phase("q", [(0, recv, 1)], 1, Demux("c"), eps={recv})
    assert md_satisfiable_bruteforce(MdSequence(topo, frozenset({"m"}), (mux, demux))) is True
    assert md_satisfiable_bruteforce(MdSequence(topo, frozenset({"m"}), (demux, mux))) is False
    # message left in the channel
    assert md_satisfiable_bruteforce(MdSequence(topo, frozenset({"m"}), (mux,))) is False


def test_md_bruteforce_local_needs_empty_stack():
    topo = fixtures.handshake(sender_restricted=True).topology
    push = _phase("p", [(0, Push("a"), 1)], 1, LOCAL_ONLY, alphabet={"a"})
    pop = _phase("p", [(0, Pop("a"), 1)], 1, LOCAL_ONLY, alphabet={"a"})
    assert md_satisfiable_bruteforce(MdSequence(topo, frozenset({"m"}), (push,))) is False
    assert md_satisfiable_bruteforce(MdSequence(topo, frozenset({"m"}), (push, pop))) is True


@settings(max_examples=30)
@given(seeds)
def test_pushdown_bfs_steps_are_sound(seed):
    pd = random_local_pushdown(rng_for(seed))
    confs, _ = pushdown_bfs(pd, max_height=4, max_steps=20)
    assert (pd.init, ()) in confs
    for z, u in confs:
        assert z in pd.states
        assert len(u) <= 4
        assert all(g in pd.stack_alphabet for g in u)
