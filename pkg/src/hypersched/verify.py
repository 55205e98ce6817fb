"""Independent schedule checker and destination-side jitter masking.

The checker re-derives every packet window from the flow tuple and walks
the hop lists directly; it does not reuse the scheduler's graph views.

Rules:

``capacity``      a comm timed edge carries at most one packet and must be
                  a free (or self-owned) link-slot of the TECG
``conservation``  hops chain source -> destination one slot at a time
``no_loop``       no node other than the destination transmits twice
``deadline``      every packet of an admitted flow has a path that starts
                  no earlier than its arrival and reaches the destination
                  by vertex ``deadline + 1``
``periodicity``   (FCS only) packet i repeats packet 1 shifted by
                  ``(i-1) * cycle`` slots
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import Comm, FlowSpec, Hypercycle, PacketId, Schedule, Store

RULES = ("capacity", "conservation", "no_loop", "deadline", "periodicity")


@dataclass
class Violation:
    rule: str
    entity: str
    detail: str


@dataclass
class VerifyReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule, entity, detail):
        self.violations.append(Violation(rule, str(entity), detail))

    def by_rule(self, rule: str) -> list:
        return [v for v in self.violations if v.rule == rule]

    def to_json(self) -> str:
        return json.dumps({
            "ok": self.ok,
            "violations": [v.__dict__ for v in self.violations],
        }, indent=2)


def _w(i: int, gamma: int) -> int:
    return (i - 1) % gamma + 1


def _window(flow: FlowSpec, seq: int, gamma: int) -> tuple:
    arrival = _w(flow.arrival + (seq - 1) * flow.cycle, gamma)
    return arrival, min(flow.max_delay, gamma)


def _offset(path_hops, arrival: int, gamma: int) -> Optional[int]:
    if not path_hops:
        return None
    return (path_hops[0].slot - arrival) % gamma


def verify_schedule(tecg, flows: Iterable[FlowSpec], schedule: Schedule, mode: str = "hfs") -> VerifyReport:
    """Check ``schedule`` against ``tecg`` (background occupancy + topology).

    Edges occupied in ``tecg`` are acceptable only when owned by the same
    packet, so the TECG may be checked before or after committing.
    """
    if mode not in ("hfs", "fcs"):
        raise ValueError(f"unknown mode {mode!r}")
    gamma = tecg.hc.gamma
    links = set(tecg.topology.links)
    nodes = set(tecg.topology.nodes)
    report = VerifyReport()
    users: dict = {}
    by_id = {f.id: f for f in flows}

    for k in sorted(schedule.admitted):
        if not schedule.admitted[k]:
            continue
        flow = by_id.get(k)
        if flow is None:
            report.add("deadline", f"flow {k}", "admitted flow is not in the flow set")
            continue
        if gamma % flow.cycle:
            report.add("deadline", f"flow {k}", f"cycle {flow.cycle} does not divide {gamma}")
            continue
        n = gamma // flow.cycle
        first = None
        for seq in range(1, n + 1):
            pid = PacketId(k, seq)
            path = schedule.paths.get(pid)
            if path is None or not path.hops:
                report.add("deadline", pid, "admitted flow has a packet without a schedule-path")
                continue
            hops = path.hops
            arrival, length = _window(flow, seq, gamma)

            # conservation: chain of hops, one slot each, source to destination
            if hops[0].tail != flow.source:
                report.add("conservation", pid, f"path starts at {hops[0].tail}, not {flow.source}")
            if hops[-1].head != flow.destination:
                report.add("conservation", pid, f"path ends at {hops[-1].head}, not {flow.destination}")
            for a, b in zip(hops, hops[1:]):
                if a.head != b.tail or b.slot != _w(a.slot + 1, gamma):
                    report.add("conservation", pid, f"hop {b} does not continue {a}")
            for h in hops:
                if not 1 <= h.slot <= gamma:
                    report.add("conservation", pid, f"hop {h} has slot outside the hypercycle")
                if isinstance(h, Store) and h.node not in nodes:
                    report.add("conservation", pid, f"storage at unknown node {h.node}")

            # deadline: inside the window [arrival, arrival + length)
            off = _offset(hops, arrival, gamma)
            if off + len(hops) > length:
                report.add("deadline", pid,
                           f"reaches vertex offset {off + len(hops)} beyond allowed {length}")

            # single transmission per non-destination node
            sends: dict = {}
            for h in hops:
                if isinstance(h, Comm) and h.tail != flow.destination:
                    sends[h.tail] = sends.get(h.tail, 0) + 1
            for node, c in sorted(sends.items()):
                if c > 1:
                    report.add("no_loop", pid, f"node {node} transmits {c} times")

            for h in hops:
                if isinstance(h, Comm):
                    if h.link not in links:
                        report.add("capacity", f"{h.link}@{h.slot}", f"{pid} uses a link absent from the topology")
                        continue
                    users.setdefault((h.link, h.slot), []).append(pid)

            if mode == "fcs":
                if first is None and seq == 1:
                    first = hops
                elif first is not None:
                    shift = (seq - 1) * flow.cycle
                    expected = tuple(type(h)(h[0], _w(h.slot + shift, gamma)) for h in first)
                    if tuple(hops) != expected:
                        report.add("periodicity", pid,
                                   f"path is not packet 1 shifted by {shift} slots")

    for (link, slot), pids in sorted(users.items()):
        if len(pids) > 1:
            report.add("capacity", f"{link}@{slot}",
                       "shared by " + ", ".join(str(p) for p in pids))
        if not tecg.is_free(link, slot):
            owner = tecg.owner(link, slot)
            if owner not in pids:
                report.add("capacity", f"{link}@{slot}",
                           f"edge already reserved by {owner if owner is not None else 'background'}")
    return report


# -- jitter masking -----------------------------------------------------------

@dataclass(frozen=True)
class DeliveryPlan:
    flow: int
    d_max: int
    deliveries: tuple
    delays: tuple = ()


def mask_jitter(flow_id: int, handovers, receptions) -> DeliveryPlan:
    """Buffer every packet up to the largest observed handover-to-reception delay.

    A packet handed over at time point ``t`` and received at time point
    ``r`` (end of its last transmission slot) has experienced ``r - t``
    slots.
    """
    handovers, receptions = list(handovers), list(receptions)
    if len(handovers) != len(receptions) or not handovers:
        raise ValueError("need one reception per handover")
    delays = tuple(r - h for h, r in zip(handovers, receptions))
    d_max = max(delays)
    return DeliveryPlan(flow_id, d_max, tuple(h + d_max for h in handovers), delays)


def reach_offset(hops, destination, arrival: int, gamma: int) -> int:
    """Vertex offset (from arrival) right after the last transmission into ``destination``."""
    off = _offset(hops, arrival, gamma)
    reach = None
    for j, h in enumerate(hops):
        if isinstance(h, Comm) and h.head == destination:
            reach = off + j + 1
    if reach is None:
        raise ValueError("path never transmits into its destination")
    return reach


def jitter_mask(flows: Iterable[FlowSpec], schedule: Schedule, hc: Hypercycle) -> dict:
    """Per admitted flow, the buffering plan that makes deliveries periodic."""
    gamma = hc.gamma
    plans = {}
    for flow in flows:
        if not schedule.admitted.get(flow.id):
            continue
        first = _w(flow.arrival, gamma)
        handovers, receptions = [], []
        for seq in range(1, gamma // flow.cycle + 1):
            path = schedule.paths[PacketId(flow.id, seq)]
            arrival = _w(flow.arrival + (seq - 1) * flow.cycle, gamma)
            handover = first + (seq - 1) * flow.cycle
            handovers.append(handover)
            receptions.append(handover + reach_offset(path.hops, flow.destination, arrival, gamma))
        plans[flow.id] = mask_jitter(flow.id, handovers, receptions)
    return plans
