"""Mutex classification of configurations and finite systems."""
import pytest
from hypothesis import given, settings

from rqcp import fixtures
from rqcp.eager import finite_eager_reachable_vectors
from rqcp.model import Configuration, Local, PushdownProcess, Rqcp, Send
from rqcp.mutex import check_mutex, is_mutex_config
from rqcp.oracle import Bounds, explore_bounded
from rqcp.random_systems import random_cyclic_system, random_system
from rqcp.topology import co_cycle_relation

from conftest import rng_for, seeds


def oracle_mutex(system, bounds=Bounds(3, 0, 12), weak=False):
    """True / False, or None when the exploration was cut without a violation."""
    ex = explore_bounded(system, bounds)
    if any(not is_mutex_config(system.topology, c, weak) for c in ex.parents):
        return False
    return None if ex.truncated else True


def test_config_classification():
    topo = fixtures.antiparallel()
    empty = Configuration(("a", "b"), ((), ()), ((), ()))
    assert is_mutex_config(topo, empty)
    both = Configuration(("a", "b"), ((), ()), (("m",), ("m",)))
    assert not is_mutex_config(topo, both)
    one = Configuration(("a", "b"), ((), ()), (("m", "m"), ()))
    assert is_mutex_config(topo, one)
    star = fixtures.star(3)
    full = Configuration(("a",) * 4, ((),) * 4, (("m",),) * 3)
    assert is_mutex_config(star, full)


def test_half_duplex_ping_pong_is_mutex():
    v = check_mutex(fixtures.ping_pong(2))
    assert v.mutex and not v.short_circuit
    assert oracle_mutex(fixtures.ping_pong(2)) is True


def test_full_duplex_is_not_mutex():
    v = check_mutex(fixtures.ping_pong(1, half_duplex=False))
    assert not v.mutex
    assert v.witness["nonempty"] == ["c", "d"]
    assert len(v.witness["path"]) == 2


def test_p0_p1_system_not_mutex():
    s = fixtures.eagerness_counterexample()
    v = check_mutex(s)
    assert not v.mutex
    assert set(v.witness["nonempty"]) == {"c01", "c10"}
    assert oracle_mutex(s) is False


def test_polyforest_short_circuits():
    v = check_mutex(fixtures.handshake())
    assert v.mutex and v.short_circuit and v.states_explored == 0


def test_violation_reported_through_send():
    # the second send would fill the partner of a nonempty channel
    topo = fixtures.antiparallel()
    p = PushdownProcess(frozenset({0, 1}), 0, transitions=((0, Send("c", "m"), 1),))
    q = PushdownProcess(frozenset({0, 1, 2}), 0, transitions=((0, Local("wait"), 1), (1, Send("d", "m"), 2)))
    v = check_mutex(Rqcp(topo, {"m"}, {"p": p, "q": q}))
    assert not v.mutex


def test_rejects_recursive_systems():
    with pytest.raises(ValueError):
        check_mutex(fixtures.guarded_sender())


def test_weak_variant_on_triangle():
    # three channels on a ring: c1 and c3 are consecutive, so weak and strong agree
    topo = fixtures.ring(3)
    procs = {
        "p0": PushdownProcess(frozenset({0, 1}), 0, transitions=((0, Send("c1", "m"), 1),)),
        "p1": PushdownProcess(frozenset({0}), 0),
        "p2": PushdownProcess(frozenset({0, 1}), 0, transitions=((0, Send("c3", "m"), 1),)),
    }
    s = Rqcp(topo, {"m"}, procs)
    assert not check_mutex(s).mutex
    assert not check_mutex(s, weak=True).mutex


def test_weak_variant_on_square():
    # opposite channels of a 4-ring are never consecutive
    topo = fixtures.ring(4)
    procs = {p: PushdownProcess(frozenset({0}), 0) for p in topo.processes}
    procs["p0"] = PushdownProcess(frozenset({0, 1}), 0, transitions=((0, Send("c1", "m"), 1),))
    procs["p2"] = PushdownProcess(frozenset({0, 1}), 0, transitions=((0, Send("c3", "m"), 1),))
    s = Rqcp(topo, {"m"}, procs)
    assert not check_mutex(s).mutex
    assert check_mutex(s, weak=True).mutex


@settings(max_examples=100)
@given(seeds)
def test_agrees_with_oracle(seed):
    s = random_cyclic_system(rng_for(seed))
    expected = oracle_mutex(s)
    if expected is not None:
        assert check_mutex(s).mutex == expected


@settings(max_examples=100)
@given(seeds)
def test_mutex_implies_eager(seed):
    s = random_cyclic_system(rng_for(seed))
    if not check_mutex(s).mutex:
        return
    eager = finite_eager_reachable_vectors(s)
    ex = explore_bounded(s, Bounds(3, 0, 12))
    assert {c.control for c in ex.parents} <= eager


@settings(max_examples=60)
@given(seeds)
def test_polyforests_always_mutex(seed):
    s = random_system(rng_for(seed), finite=True, non_converging=False)
    v = check_mutex(s)
    if v.short_circuit:
        assert v.mutex
        assert not co_cycle_relation(s.topology)
