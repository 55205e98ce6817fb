"""Lightest-load-first hypercycle-level flexible scheduling (HFS-LLF).

Each packet of a flow gets its own lightest schedule-path under the
synthesized load weight ``xi = alpha + beta``:

* ``alpha`` is a link's occupied fraction over the hypercycle, refreshed
  once per flow;
* ``beta`` is the link's occupied fraction over the packet's lifespan,
  refreshed per packet (it equals ``alpha`` when the lifespan covers the
  hypercycle).

Weights are handled as exact integers scaled by ``gamma * max_delay`` so
ties break deterministically.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .model import Comm, FlowSpec, ModelError, PacketId, Schedule, SchedulePath, hop_to_json
from .search import SearchStats, lightest_path
from .tecg import SchedulePathGraph, Tecg


def alpha(tecg: Tecg, link: tuple) -> Fraction:
    return Fraction(len(tecg.occupied_slots(link)), tecg.gamma)


def beta(tecg: Tecg, edge: Comm, packet: PacketId, flow: FlowSpec) -> Fraction:
    view = SchedulePathGraph(tecg, flow, packet)
    if edge.link not in tecg.topology.link_set:
        raise ModelError(f"unknown link {edge.link}")
    if view.position(edge.slot) is None:
        raise ModelError(f"edge {edge.link}@{edge.slot} lies outside the lifespan of {packet}")
    if flow.max_delay >= tecg.gamma:
        return alpha(tecg, edge.link)
    busy = tecg.occupied_slots(edge.link)
    return Fraction(sum(1 for s in view.span if s in busy), flow.max_delay)


def xi(alpha_value, beta_value, kind: str = "comm"):
    if kind == "storage":
        return 0.0
    if kind != "comm":
        raise ValueError(f"unknown edge kind {kind!r}")
    return alpha_value + beta_value


def _packet_weight(tecg: Tecg, view: SchedulePathGraph, hc_occupied: dict):
    """Return ``(weight_fn, scale)``; ``weight / scale`` is xi."""
    gamma, rho = tecg.gamma, view.flow.max_delay
    span_count: dict = {}
    if rho >= gamma:
        def weight(link, pos):
            return hc_occupied[link] + tecg.occupied_count(link)
        return weight, gamma

    span = view.span

    def weight(link, pos):
        n = span_count.get(link)
        if n is None:
            busy = tecg._busy[link]
            n = span_count[link] = sum(1 for s in span if s in busy)
        return hc_occupied[link] * rho + n * gamma
    return weight, gamma * rho


def schedule_flow_llf(
    tecg: Tecg,
    flow: FlowSpec,
    stats: Optional[SearchStats] = None,
    costs: Optional[dict] = None,
) -> list:
    """Schedule every packet of ``flow`` or none of them.

    On success the comm edges of all returned paths are occupied in ``tecg``
    (owned by their packet).  On failure the occupancy is restored exactly
    and an empty list is returned.
    """
    n = tecg.gamma // flow.cycle
    if tecg.gamma % flow.cycle:
        raise ModelError(f"cycle/hypercycle mismatch for flow {flow.id}")
    hc_occupied = {link: tecg.occupied_count(link) for link in tecg.topology.links}
    committed: list = []
    for seq in range(1, n + 1):
        view = SchedulePathGraph(tecg, flow, PacketId(flow.id, seq))
        weight, scale = _packet_weight(tecg, view, hc_occupied)
        path = lightest_path(view, weight, stats)
        if path is None:
            for done in committed:
                tecg.release(done.comm_hops)
            return []
        if costs is not None:
            pos = {s: p for p, s in enumerate(view.span)}
            costs[path.packet] = Fraction(
                sum(weight(h.link, pos[h.slot]) for h in path.comm_hops), scale)
        tecg.occupy(path.comm_hops, owner=path.packet)
        committed.append(path)
    return committed


FlowScheduler = Callable[..., list]


def admit_sequence(
    tecg: Tecg,
    flows: Iterable[FlowSpec],
    scheduler: Optional[FlowScheduler] = None,
    trace: Optional[list] = None,
    scheme: str = "hfs_llf",
) -> Schedule:
    """Offer flows to ``scheduler`` one at a time in the given order."""
    scheduler = scheduler or schedule_flow_llf
    admitted: dict = {}
    paths: dict = {}
    for flow in flows:
        costs: dict = {}
        result = scheduler(tecg, flow, costs=costs)
        admitted[flow.id] = bool(result)
        for p in result:
            paths[p.packet] = p
        if trace is not None:
            trace.append(trace_record(scheme, flow, result, costs))
    return Schedule(admitted, paths)


def trace_record(scheme: str, flow: FlowSpec, paths: list, costs: dict) -> dict:
    return {
        "scheme": scheme,
        "flow": flow.id,
        "admitted": bool(paths),
        "paths": {str(p.packet): [hop_to_json(h) for h in p.hops] for p in paths},
        "cost": {str(k): float(v) for k, v in sorted(costs.items())},
    }


def trace_to_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
