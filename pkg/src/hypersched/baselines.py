"""Comparison schemes rebuilt on the TECG substrate.

These are reconstructions from short descriptions (fidelity: approximate);
only ordering trends against HFS-LLF are meaningful.

* ``bfs_s``     fixed cyclic: fewest-hop packet-1 path found without regard
                to the other packets, kept only if all its cycle-shifted
                copies happen to be free; storage allowed
* ``iras``      no-wait: no storage anywhere, the packet leaves at its
                arrival slot; candidate routes sorted by (hops, flows already
                on their links); one route shape serves every packet
* ``jras_tseg`` fixed cyclic: one packet-1 schedule-path whose
                cycle-shifted copies are all free, storage allowed
"""
from __future__ import annotations

from typing import Iterator, Optional

from .model import Comm, FlowSpec, PacketId, SchedulePath, wrap
from .search import SearchStats, lightest_path
from .tecg import PeriodicView, SchedulePathGraph, Tecg

FIDELITY = "approximate"
IRAS_PATH_LIMIT = 10_000


def _zero(link, pos):
    return 0


def schedule_flow_bfs_s(tecg: Tecg, flow: FlowSpec, stats: Optional[SearchStats] = None,
                        costs: Optional[dict] = None) -> list:
    """Fewest-hop path for packet 1, reused cyclically; rejected if any copy collides."""
    view = SchedulePathGraph(tecg, flow, PacketId(flow.id, 1))
    path = lightest_path(view, _zero, stats)
    if path is None:
        return []
    paths = PeriodicView(tecg, flow).expand(path)
    if not all(tecg.is_free(h.link, h.slot) for p in paths for h in p.comm_hops):
        return []
    for p in paths:
        tecg.occupy(p.comm_hops, owner=p.packet)
        if costs is not None:
            costs[p.packet] = len(p.comm_hops)
    return paths


def _routes_by_length(topology, source, dest, max_hops: int) -> Iterator[list]:
    """Simple node routes from ``source`` to ``dest``, shortest first."""
    succ = topology.successors
    for h in range(1, max_hops + 1):
        batch = []
        route = [source]
        on_route = {source}

        def rec(node, left):
            if left == 0:
                if node == dest:
                    batch.append(list(route))
                return
            for v in succ[node]:
                if v in on_route or (v == dest and left > 1):
                    continue
                route.append(v)
                on_route.add(v)
                rec(v, left - 1)
                route.pop()
                on_route.discard(v)

        rec(source, h)
        yield from batch


def schedule_flow_iras(tecg: Tecg, flow: FlowSpec, stats=None, costs: Optional[dict] = None) -> list:
    gamma = tecg.gamma
    n = gamma // flow.cycle
    length = min(flow.max_delay, gamma)
    arrivals = [wrap(flow.arrival + (i - 1) * flow.cycle, gamma) for i in range(1, n + 1)]

    def load(route):
        return sum(tecg.flows_on_link((a, b)) for a, b in zip(route, route[1:]))

    enumerated = 0
    # group by hop count so sorting only ever looks at one length class
    by_len: dict = {}
    exhausted = False
    for route in _routes_by_length(tecg.topology, flow.source, flow.destination, length):
        enumerated += 1
        by_len.setdefault(len(route), []).append(route)
        if enumerated >= IRAS_PATH_LIMIT:
            exhausted = True
            break
    for h in sorted(by_len):
        routes = by_len[h]
        if not exhausted:
            routes = sorted(routes, key=lambda r: (load(r), r))
        for route in routes:
            links = list(zip(route, route[1:]))
            if all(tecg.is_free(l, wrap(a + j, gamma)) for a in arrivals for j, l in enumerate(links)):
                paths = []
                for i, a in enumerate(arrivals, start=1):
                    pid = PacketId(flow.id, i)
                    hops = tuple(Comm(l, wrap(a + j, gamma)) for j, l in enumerate(links))
                    paths.append(SchedulePath(pid, hops))
                for p in paths:
                    tecg.occupy(p.comm_hops, owner=p.packet)
                    if costs is not None:
                        costs[p.packet] = len(links)
                return paths
    return []


def schedule_flow_jras_tseg(tecg: Tecg, flow: FlowSpec, stats: Optional[SearchStats] = None,
                            costs: Optional[dict] = None) -> list:
    view = PeriodicView(tecg, flow)
    path = lightest_path(view, _zero, stats)
    if path is None:
        return []
    paths = view.expand(path)
    for p in paths:
        tecg.occupy(p.comm_hops, owner=p.packet)
        if costs is not None:
            costs[p.packet] = len(p.comm_hops)
    return paths


SCHEMES = {
    "bfs_s": schedule_flow_bfs_s,
    "iras": schedule_flow_iras,
    "jras_tseg": schedule_flow_jras_tseg,
}
