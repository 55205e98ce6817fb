"""Domain types shared across the package.

Slots are 1-based (``1..gamma``).  A packet's deadline is kept unwrapped
(``arrival + max_delay - 1``) so a window crossing the hypercycle boundary
stays ordered; it is wrapped only when a TECG vertex is addressed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from pathlib import Path
from typing import Iterable, NamedTuple, Union

Node = str
Link = tuple  # (u, v)


class ModelError(ValueError):
    pass


def wrap(i: int, gamma: int) -> int:
    """Map any integer slot index into ``[1, gamma]``."""
    return (i - 1) % gamma + 1


@dataclass(frozen=True)
class Topology:
    """Directed-link network.  A full-duplex cable is two directed links."""

    nodes: tuple
    links: tuple

    def __init__(self, nodes: Iterable[Node], links: Iterable[tuple]):
        nodes = tuple(sorted({str(n) for n in nodes}))
        seen = set()
        out = []
        for u, v in links:
            u, v = str(u), str(v)
            if u == v:
                raise ModelError(f"self-link on node {u!r}")
            if (u, v) in seen:
                raise ModelError(f"duplicate directed link ({u}, {v})")
            seen.add((u, v))
            out.append((u, v))
        known = set(nodes)
        for u, v in out:
            if u not in known or v not in known:
                raise ModelError(f"link ({u}, {v}) references an unknown node")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "links", tuple(sorted(out)))

    @classmethod
    def duplex(cls, nodes: Iterable[Node], cables: Iterable[tuple]) -> "Topology":
        links = []
        for u, v in cables:
            links += [(u, v), (v, u)]
        return cls(nodes, links)

    @cached_property
    def link_set(self) -> frozenset:
        return frozenset(self.links)

    @cached_property
    def successors(self) -> dict:
        out = {n: [] for n in self.nodes}
        for u, v in self.links:
            out[u].append(v)
        return {n: tuple(sorted(vs)) for n, vs in out.items()}

    @cached_property
    def predecessors(self) -> dict:
        inc = {n: [] for n in self.nodes}
        for u, v in self.links:
            inc[v].append(u)
        return {n: tuple(sorted(us)) for n, us in inc.items()}

    def is_duplex(self) -> bool:
        return all((v, u) in self.link_set for u, v in self.links)

    def to_json(self) -> str:
        return json.dumps({"nodes": list(self.nodes), "links": [list(l) for l in self.links]})

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        data = json.loads(text)
        return cls(data["nodes"], [tuple(l) for l in data["links"]])


@dataclass(frozen=True)
class FlowSpec:
    id: int
    source: Node
    destination: Node
    arrival: int
    cycle: int
    max_delay: int

    def __post_init__(self):
        if self.source == self.destination:
            raise ModelError(f"flow {self.id}: source equals destination")
        if self.cycle < 1:
            raise ModelError(f"flow {self.id}: cycle must be >= 1")
        if self.max_delay < 1:
            raise ModelError(f"flow {self.id}: max_delay must be >= 1")
        if self.arrival < 1:
            raise ModelError(f"flow {self.id}: arrival slot must be >= 1")


@dataclass(frozen=True)
class Hypercycle:
    gamma: int
    slot_duration_us: float = 15.0

    def __post_init__(self):
        if self.gamma < 1:
            raise ModelError("hypercycle length must be >= 1")

    def wrap(self, i: int) -> int:
        return wrap(i, self.gamma)


class PacketId(NamedTuple):
    flow: int
    seq: int

    def __str__(self):
        return f"{self.flow}:{self.seq}"

    @classmethod
    def parse(cls, text: str) -> "PacketId":
        k, i = text.split(":")
        return cls(int(k), int(i))


class Comm(NamedTuple):
    """Transmission over ``link`` during ``slot``: u_slot -> v_{slot+1}."""

    link: tuple
    slot: int

    @property
    def tail(self) -> Node:
        return self.link[0]

    @property
    def head(self) -> Node:
        return self.link[1]


class Store(NamedTuple):
    """Buffering at ``node`` during ``slot``: u_slot -> u_{slot+1}."""

    node: Node
    slot: int

    @property
    def tail(self) -> Node:
        return self.node

    @property
    def head(self) -> Node:
        return self.node


Hop = Union[Comm, Store]


def hop_to_json(hop: Hop) -> list:
    if isinstance(hop, Comm):
        return ["c", hop.link[0], hop.link[1], hop.slot]
    return ["s", hop.node, hop.slot]


def hop_from_json(rec: list) -> Hop:
    if rec[0] == "c":
        return Comm((str(rec[1]), str(rec[2])), int(rec[3]))
    if rec[0] == "s":
        return Store(str(rec[1]), int(rec[2]))
    raise ModelError(f"unknown hop record {rec!r}")


@dataclass(frozen=True)
class SchedulePath:
    packet: PacketId
    hops: tuple

    @property
    def comm_hops(self) -> tuple:
        return tuple(h for h in self.hops if isinstance(h, Comm))

    def shifted(self, offset: int, gamma: int, packet: PacketId) -> "SchedulePath":
        hops = tuple(
            Comm(h.link, wrap(h.slot + offset, gamma)) if isinstance(h, Comm)
            else Store(h.node, wrap(h.slot + offset, gamma))
            for h in self.hops
        )
        return SchedulePath(packet, hops)


@dataclass(frozen=True)
class Schedule:
    admitted: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)

    @property
    def admitted_ids(self) -> list:
        return sorted(k for k, ok in self.admitted.items() if ok)

    def packets_admitted(self) -> int:
        ids = set(self.admitted_ids)
        return sum(1 for p in self.paths if p.flow in ids)

    def to_dict(self) -> dict:
        return {
            "admitted": self.admitted_ids,
            "rejected": sorted(k for k, ok in self.admitted.items() if not ok),
            "paths": {
                str(pid): [hop_to_json(h) for h in path.hops]
                for pid, path in sorted(self.paths.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        admitted = {int(k): True for k in data.get("admitted", [])}
        admitted.update({int(k): False for k in data.get("rejected", [])})
        paths = {}
        for key, hops in data.get("paths", {}).items():
            pid = PacketId.parse(key)
            paths[pid] = SchedulePath(pid, tuple(hop_from_json(h) for h in hops))
        return cls(admitted, paths)


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def hypercycle_of(flows: Iterable[FlowSpec], slot_duration_us: float = 15.0) -> Hypercycle:
    cycles = [f.cycle for f in flows]
    if not cycles:
        raise ModelError("no flows")
    return Hypercycle(lcm(cycles), slot_duration_us)


def check_hypercycle(flow: FlowSpec, hc: Hypercycle) -> None:
    if hc.gamma % flow.cycle:
        raise ModelError(
            f"cycle/hypercycle mismatch: flow {flow.id} cycle {flow.cycle} "
            f"does not divide {hc.gamma}"
        )


def packet_count(flow: FlowSpec, hc: Hypercycle) -> int:
    check_hypercycle(flow, hc)
    return hc.gamma // flow.cycle


def packet_windows(flow: FlowSpec, hc: Hypercycle) -> list:
    """(arrival slot, unwrapped deadline slot) for each packet in one hypercycle."""
    out = []
    for i in range(1, packet_count(flow, hc) + 1):
        arrival = wrap(flow.arrival + (i - 1) * flow.cycle, hc.gamma)
        out.append((arrival, arrival + flow.max_delay - 1))
    return out


def packets_of(flow: FlowSpec, hc: Hypercycle) -> list:
    return [PacketId(flow.id, i) for i in range(1, packet_count(flow, hc) + 1)]


# -- file formats -------------------------------------------------------------

FLOW_FIELDS = ("id", "src", "dst", "arrival", "cycle", "max_delay")


def flows_to_csv(flows: Iterable[FlowSpec]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FLOW_FIELDS)
    for f in flows:
        w.writerow([f.id, f.source, f.destination, f.arrival, f.cycle, f.max_delay])
    return buf.getvalue()


def flows_from_csv(text: str) -> list:
    rows = csv.DictReader(io.StringIO(text))
    missing = set(FLOW_FIELDS) - set(rows.fieldnames or ())
    if missing:
        raise ModelError(f"flow CSV lacks columns {sorted(missing)}")
    return [
        FlowSpec(int(r["id"]), r["src"], r["dst"], int(r["arrival"]),
                 int(r["cycle"]), int(r["max_delay"]))
        for r in rows
    ]


def load_flows(path) -> list:
    return flows_from_csv(Path(path).read_text())


def load_topology(path) -> Topology:
    return Topology.from_json(Path(path).read_text())
