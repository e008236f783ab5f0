"""JSON system descriptions.

Layout::

    {
      "processes": ["p", "q"],
      "channels": [{"id": "c", "src": "p", "dst": "q", "restricted": ["dst"]}],
      "messages": ["m"],
      "pushdowns": {
        "p": {"states": ["z0", "z1"], "init": "z0", "stack_alphabet": [],
              "eps_actions": [],
              "transitions": [{"from": "z0", "to": "z1",
                               "action": {"kind": "send", "channel": "c", "msg": "m"}}]},
        ...
      },
      "target": {"p": "z1", "q": "y1"}
    }
"""
from __future__ import annotations

import json
from pathlib import Path

from .model import (
    Channel,
    Local,
    Pop,
    PushdownProcess,
    Push,
    Recv,
    Rqcp,
    Send,
    Topology,
    validate_system,
)


class SystemFormatError(ValueError):
    pass


def _need(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise SystemFormatError(f"{path}: expected an object")
    if key not in obj:
        raise SystemFormatError(f"{path}: missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SystemFormatError(f"{path}.{key}: expected {kind.__name__}")
    return val


def _state(v, path):
    if isinstance(v, (str, int)) and not isinstance(v, bool):
        return v
    raise SystemFormatError(f"{path}: states must be strings or integers")


def parse_action(obj, path: str):
    kind = _need(obj, "kind", path, str)
    if kind in ("send", "recv"):
        ch = _need(obj, "channel", path, str)
        msg = _need(obj, "msg", path)
        return (Send if kind == "send" else Recv)(ch, msg)
    if kind in ("push", "pop"):
        sym = _need(obj, "symbol", path)
        return (Push if kind == "push" else Pop)(sym)
    if kind == "local":
        return Local(_need(obj, "label", path))
    raise SystemFormatError(f"{path}.kind: unknown action kind {kind!r}")


def action_to_json(a) -> dict:
    if isinstance(a, Send):
        return {"kind": "send", "channel": a.channel, "msg": a.message}
    if isinstance(a, Recv):
        return {"kind": "recv", "channel": a.channel, "msg": a.message}
    if isinstance(a, Push):
        return {"kind": "push", "symbol": a.symbol}
    if isinstance(a, Pop):
        return {"kind": "pop", "symbol": a.symbol}
    return {"kind": "local", "label": a.label}


def system_from_json(data, validate: bool = True) -> tuple[Rqcp, dict | None]:
    """Build a system (and the optional target mapping) from parsed JSON."""
    procs = _need(data, "processes", "$", list)
    chans = []
    restricted = set()
    for i, c in enumerate(_need(data, "channels", "$", list)):
        path = f"$.channels[{i}]"
        cid = _need(c, "id", path, str)
        src = _need(c, "src", path, str)
        dst = _need(c, "dst", path, str)
        chans.append(Channel(cid, src, dst))
        for end in c.get("restricted", []):
            if end not in ("src", "dst"):
                raise SystemFormatError(f"{path}.restricted: expected 'src' or 'dst', got {end!r}")
            restricted.add((src if end == "src" else dst, cid))
    messages = _need(data, "messages", "$", list)
    pds = _need(data, "pushdowns", "$", dict)
    known = set(procs)
    processes = {}
    for p, entry in pds.items():
        path = f"$.pushdowns.{p}"
        if p not in known:
            raise SystemFormatError(f"{path}: pushdown for undeclared process {p!r}")
        states = [_state(z, f"{path}.states") for z in _need(entry, "states", path, list)]
        init = _state(_need(entry, "init", path), f"{path}.init")
        alphabet = entry.get("stack_alphabet", [])
        eps = [parse_action(a, f"{path}.eps_actions[{n}]") for n, a in enumerate(entry.get("eps_actions", []))]
        ts = []
        for n, t in enumerate(_need(entry, "transitions", path, list)):
            tp = f"{path}.transitions[{n}]"
            z = _state(_need(t, "from", tp), f"{tp}.from")
            z2 = _state(_need(t, "to", tp), f"{tp}.to")
            ts.append((z, parse_action(_need(t, "action", tp), f"{tp}.action"), z2))
        processes[p] = PushdownProcess(frozenset(states), init, frozenset(alphabet), tuple(ts), frozenset(eps))
    system = Rqcp(Topology(tuple(procs), tuple(chans), frozenset(restricted)), frozenset(messages), processes)
    if validate:
        bad = validate_system(system)
        if bad:
            raise SystemFormatError("; ".join(bad))
    target = data.get("target")
    if target is not None and not isinstance(target, dict):
        raise SystemFormatError("$.target: expected an object")
    return system, target


def parse_system_text(text: str, validate: bool = True) -> tuple[Rqcp, dict | None]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SystemFormatError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return system_from_json(data, validate)


def parse_system_file(path, validate: bool = True) -> tuple[Rqcp, dict | None]:
    text = Path(path).read_text()
    try:
        return parse_system_text(text, validate)
    except SystemFormatError as e:
        raise SystemFormatError(f"{path}: {e}") from None


def _sorted(xs):
    return sorted(xs, key=lambda x: (type(x).__name__, x))


def system_to_json(system: Rqcp, target=None) -> dict:
    topo = system.topology
    chans = []
    for c in topo.channels:
        ends = [e for e, q in (("src", c.src), ("dst", c.dst)) if topo.is_restricted(q, c.id)]
        chans.append({"id": c.id, "src": c.src, "dst": c.dst, "restricted": ends})
    pds = {}
    for p in topo.processes:
        pd = system.processes[p]
        pds[p] = {
            "states": _sorted(pd.states),
            "init": pd.init,
            "stack_alphabet": _sorted(pd.stack_alphabet),
            "eps_actions": sorted((action_to_json(a) for a in pd.eps_actions), key=json.dumps),
            "transitions": [{"from": z, "to": z2, "action": action_to_json(a)} for z, a, z2 in pd.transitions],
        }
    out = {
        "processes": list(topo.processes),
        "channels": chans,
        "messages": _sorted(system.messages),
        "pushdowns": pds,
    }
    if target is not None:
        out["target"] = dict(zip(topo.processes, system.vector(target)))
    return out


def serialize_system(system: Rqcp, target=None) -> str:
    return json.dumps(system_to_json(system, target), indent=2)


def write_system(path, system: Rqcp, target=None) -> None:
    Path(path).write_text(serialize_system(system, target) + "\n")
