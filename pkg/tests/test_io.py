"""JSON system files."""
import json

import pytest
from hypothesis import given, settings

from rqcp import fixtures
from rqcp.io import SystemFormatError, parse_system_file, parse_system_text, serialize_system, system_from_json, system_to_json
from rqcp.random_systems import random_system, random_target

from conftest import rng_for, seeds


def test_round_trip_fixture(tmp_path):
    s = fixtures.guarded_sender()
    path = tmp_path / "g.json"
    path.write_text(serialize_system(s, ("z2", "y0")))
    back, target = parse_system_file(path)
    assert back == s
    assert target == {"p": "z2", "q": "y0"}


@settings(max_examples=60)
@given(seeds)
def test_round_trip_random(seed):
    rng = rng_for(seed)
    s = random_system(rng)
    t = random_target(rng, s)
    back, target = parse_system_text(serialize_system(s, t))
    assert back == s
    assert back.vector(target) == t


def test_syntax_error_has_position():
    with pytest.raises(SystemFormatError, match="line 1 column"):
        parse_system_text("{ nope")


def test_missing_field_names_path():
    data = system_to_json(fixtures.handshake())
    del data["pushdowns"]["q"]["transitions"][0]["to"]
    with pytest.raises(SystemFormatError, match=r"\$\.pushdowns\.q\.transitions\[0\].*'to'"):
        system_from_json(data)


def test_unknown_action_kind():
    data = system_to_json(fixtures.handshake())
    data["pushdowns"]["p"]["transitions"][0]["action"]["kind"] = "teleport"
    with pytest.raises(SystemFormatError, match="unknown action kind"):
        system_from_json(data)


def test_bad_restriction_end():
    data = system_to_json(fixtures.handshake())
    data["channels"][0]["restricted"] = ["middle"]
    with pytest.raises(SystemFormatError, match="restricted"):
        system_from_json(data)


def test_semantic_errors_are_reported():
    data = system_to_json(fixtures.handshake())
    data["pushdowns"]["q"]["eps_actions"] = []
    with pytest.raises(SystemFormatError, match="not ε-guarded"):
        system_from_json(data)
    # validation can be skipped
    s, _ = system_from_json(data, validate=False)
    assert s.topology.processes == ("p", "q")


def test_integer_states_survive():
    s = random_system(rng_for(3))
    text = serialize_system(s)
    assert all(isinstance(z, int) for z in json.loads(text)["pushdowns"]["p0"]["states"])
