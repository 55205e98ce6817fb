"""Time-expanded cyclic graph (TECG) and per-packet schedule-path graphs.

Vertices are ``(node, slot)`` pairs and are never materialised; edges are
generated from the topology plus the occupancy table.  A communication edge
``(u, v)@i`` goes from ``u_i`` to ``v_{wrap(i+1)}``, so slot ``gamma`` wraps
to slot 1.  Storage edges are uncapacitated and always present.

A :class:`SchedulePathGraph` is a live, filtered view over one packet's
lifespan.  Positions ``0..length`` index its vertex layers; position ``p``
sits at TECG slot ``wrap(arrival + p)``.  Unrolling by position keeps the
view acyclic even when the lifespan covers the whole hypercycle.
"""
from __future__ import annotations

import json
from typing import Iterable, Iterator, Optional

from .model import (
    Comm,
    FlowSpec,
    Hypercycle,
    ModelError,
    PacketId,
    SchedulePath,
    Store,
    Topology,
    check_hypercycle,
    wrap,
)


class OccupancyError(ModelError):
    pass


def _as_comm(edge) -> Comm:
    if isinstance(edge, Comm):
        return edge
    link, slot = edge
    return Comm((str(link[0]), str(link[1])), int(slot))


class Tecg:
    """One hypercycle of link-slot resources with an occupancy table.

    Single-writer: a scheduling run mutates it in place; concurrent runs
    must work on :meth:`copy`.
    """

    def __init__(self, topology: Topology, hc: Hypercycle):
        self.topology = topology
        self.hc = hc
        self._owner: dict = {}
        self._busy: dict = {link: set() for link in topology.links}

    # -- queries ----------------------------------------------------------------

    @property
    def gamma(self) -> int:
        return self.hc.gamma

    def _check(self, edge: Comm) -> None:
        if edge.link not in self._busy:
            raise OccupancyError(f"unknown link {edge.link}")
        if not 1 <= edge.slot <= self.gamma:
            raise OccupancyError(f"slot {edge.slot} outside [1, {self.gamma}]")

    def is_free(self, link: tuple, slot: int) -> bool:
        return slot not in self._busy[link]

    def owner(self, link: tuple, slot: int):
        """Owner recorded at occupy time; ``None`` for background reservations.

        Raises ``KeyError`` when the edge is free.
        """
        return self._owner[(link, slot)]

    def occupied_slots(self, link: tuple) -> frozenset:
        if link not in self._busy:
            raise OccupancyError(f"unknown link {link}")
        return frozenset(self._busy[link])

    def occupied_count(self, link: tuple) -> int:
        return len(self._busy[link])

    def occupied(self) -> list:
        return sorted(Comm(link, slot) for link, slot in self._owner)

    def flows_on_link(self, link: tuple) -> int:
        """Number of distinct flows holding at least one slot of ``link``."""
        flows = set()
        for slot in self._busy[link]:
            owner = self._owner[(link, slot)]
            if owner is not None:
                flows.add(owner.flow)
        return len(flows)

    @property
    def vertex_count(self) -> int:
        return len(self.topology.nodes) * self.gamma

    @property
    def comm_edge_count(self) -> int:
        return len(self.topology.links) * self.gamma - len(self._owner)

    @property
    def storage_edge_count(self) -> int:
        return len(self.topology.nodes) * self.gamma

    def comm_edges(self) -> Iterator[tuple]:
        """Free communication edges as ``((u, i), (v, wrap(i+1)))``."""
        for link in self.topology.links:
            busy = self._busy[link]
            for i in range(1, self.gamma + 1):
                if i not in busy:
                    yield (link[0], i), (link[1], wrap(i + 1, self.gamma))

    def storage_edges(self) -> Iterator[tuple]:
        for node in self.topology.nodes:
            for i in range(1, self.gamma + 1):
                yield (node, i), (node, wrap(i + 1, self.gamma))

    # -- mutation ---------------------------------------------------------------

    def occupy(self, edges: Iterable, owner: Optional[PacketId] = None) -> None:
        """Mark every edge occupied, or none of them on error."""
        edges = [_as_comm(e) for e in edges]
        seen = set()
        for e in edges:
            self._check(e)
            if e.slot in self._busy[e.link] or e in seen:
                raise OccupancyError(f"edge {e.link}@{e.slot} is already occupied")
            seen.add(e)
        for e in edges:
            self._busy[e.link].add(e.slot)
            self._owner[(e.link, e.slot)] = owner

    def release(self, edges: Iterable) -> None:
        edges = [_as_comm(e) for e in edges]
        seen = set()
        for e in edges:
            self._check(e)
            if e.slot not in self._busy[e.link] or e in seen:
                raise OccupancyError(f"edge {e.link}@{e.slot} is not occupied")
            seen.add(e)
        for e in edges:
            self._busy[e.link].discard(e.slot)
            del self._owner[(e.link, e.slot)]

    def copy(self) -> "Tecg":
        other = Tecg(self.topology, self.hc)
        other._owner = dict(self._owner)
        other._busy = {link: set(s) for link, s in self._busy.items()}
        return other

    def snapshot(self) -> dict:
        return dict(self._owner)

    # -- persistence ------------------------------------------------------------

    def dump(self) -> list:
        out = []
        for e in self.occupied():
            rec = {"link": list(e.link), "slot": e.slot}
            owner = self._owner[(e.link, e.slot)]
            if owner is not None:
                rec["owner"] = str(owner)
            out.append(rec)
        return out

    def dumps(self) -> str:
        return json.dumps(self.dump())

    def restore(self, records: Iterable[dict]) -> None:
        grouped: dict = {}
        for rec in records:
            owner = PacketId.parse(rec["owner"]) if rec.get("owner") else None
            grouped.setdefault(owner, []).append(Comm(tuple(rec["link"]), int(rec["slot"])))
        self.release(self.occupied())
        for owner, edges in grouped.items():
            self.occupy(edges, owner)

    def view(self, flow: FlowSpec, seq: int) -> "SchedulePathGraph":
        return SchedulePathGraph(self, flow, PacketId(flow.id, seq))


def build_tecg(topology: Topology, hc: Hypercycle, occupied: Iterable = ()) -> Tecg:
    tecg = Tecg(topology, hc)
    tecg.occupy(occupied)
    return tecg


class SchedulePathGraph:
    """Filtered view of the TECG over one packet's lifespan."""

    def __init__(self, tecg: Tecg, flow: FlowSpec, packet: PacketId):
        check_hypercycle(flow, tecg.hc)
        if packet.flow != flow.id or not 1 <= packet.seq <= tecg.gamma // flow.cycle:
            raise ModelError(f"packet {packet} does not belong to flow {flow.id}")
        gamma = tecg.gamma
        self.tecg = tecg
        self.flow = flow
        self.packet = packet
        self.arrival = wrap(flow.arrival + (packet.seq - 1) * flow.cycle, gamma)
        self.deadline = self.arrival + flow.max_delay - 1
        # a lifespan longer than the hypercycle already reaches every vertex
        self.length = min(flow.max_delay, gamma)
        self.span = tuple(wrap(self.arrival + p, gamma) for p in range(self.length))
        self._pos = {slot: p for p, slot in enumerate(self.span)}
        self.start_vertex = (flow.source, self.arrival)
        self.target_vertex = (flow.destination, wrap(self.arrival + self.length, gamma))

    @property
    def source(self):
        return self.flow.source

    @property
    def destination(self):
        return self.flow.destination

    def slot(self, pos: int) -> int:
        return self.span[pos]

    def vertex_slot(self, pos: int) -> int:
        return wrap(self.arrival + pos, self.tecg.gamma)

    def position(self, slot: int) -> Optional[int]:
        return self._pos.get(slot)

    def vertices(self) -> list:
        nodes = self.tecg.topology.nodes
        return [(n, self.vertex_slot(p)) for p in range(self.length + 1) for n in nodes]

    def is_free(self, link: tuple, pos: int) -> bool:
        return self.tecg.is_free(link, self.span[pos])

    def contains(self, hop) -> bool:
        pos = self._pos.get(hop.slot)
        if pos is None:
            return False
        if isinstance(hop, Store):
            return hop.node in self.tecg.topology.successors
        return hop.link in self.tecg.topology.link_set and self.is_free(hop.link, pos)

    def comm_edges(self) -> list:
        out = []
        for p, slot in enumerate(self.span):
            for link in self.tecg.topology.links:
                if self.is_free(link, p):
                    out.append(Comm(link, slot))
        return out

    def storage_edges(self) -> list:
        return [Store(n, slot) for slot in self.span for n in self.tecg.topology.nodes]

    def out_hops(self, node, pos: int) -> list:
        slot = self.span[pos]
        hops = [Store(node, slot)]
        for v in self.tecg.topology.successors[node]:
            if self.is_free((node, v), pos):
                hops.append(Comm((node, v), slot))
        return hops

    def backward_reachable(self) -> list:
        """``reach[p]`` is the set of nodes at position p that can still reach the target."""
        topo = self.tecg.topology
        reach = [set() for _ in range(self.length + 1)]
        reach[self.length] = {self.destination}
        for p in range(self.length - 1, -1, -1):
            nxt = reach[p + 1]
            cur = set(nxt)
            for v in nxt:
                for u in topo.predecessors[v]:
                    if u not in cur and self.is_free((u, v), p):
                        cur.add(u)
            reach[p] = cur
        return reach

    def paths(self, limit: Optional[int] = None) -> Iterator[SchedulePath]:
        """All feasible schedule-paths, full lifespan, no node sending twice.

        The destination is exempt from the single-send rule.  Raises
        :class:`PathLimitError` once more than ``limit`` paths are produced.
        """
        reach = self.backward_reachable()
        if self.source not in reach[0]:
            return
        dest = self.destination
        count = 0
        hops: list = []
        senders: set = set()

        def rec(node, pos):
            nonlocal count
            if pos == self.length:
                count += 1
                if limit is not None and count > limit:
                    raise PathLimitError(f"more than {limit} paths for packet {self.packet}")
                yield SchedulePath(self.packet, tuple(hops))
                return
            nxt = reach[pos + 1]
            for hop in self.out_hops(node, pos):
                v = hop.head
                if v not in nxt:
                    continue
                if isinstance(hop, Comm):
                    if node in senders:
                        continue
                    if node != dest:
                        senders.add(node)
                hops.append(hop)
                yield from rec(v, pos + 1)
                hops.pop()
                if isinstance(hop, Comm) and node != dest:
                    senders.discard(node)

        yield from rec(self.source, 0)

    def count_paths(self, cap: Optional[int] = None) -> int:
        """Number of paths :meth:`paths` would yield, via memoised counting."""
        reach = self.backward_reachable()
        if self.source not in reach[0]:
            return 0
        dest = self.destination
        memo: dict = {}

        def rec(node, pos, senders):
            if pos == self.length:
                return 1
            key = (node, pos, senders)
            if key in memo:
                return memo[key]
            total = 0
            nxt = reach[pos + 1]
            for hop in self.out_hops(node, pos):
                v = hop.head
                if v not in nxt:
                    continue
                if isinstance(hop, Comm):
                    if node in senders:
                        continue
                    total += rec(v, pos + 1, senders | {node} if node != dest else senders)
                else:
                    total += rec(v, pos + 1, senders)
                if cap is not None and total > cap:
                    raise PathLimitError(f"path count above {cap} for packet {self.packet}")
            memo[key] = total
            return total

        return rec(self.source, 0, frozenset())


class PeriodicView(SchedulePathGraph):
    """Packet-1 view where a comm edge is usable only if every
    ``cycle``-shifted copy of it is free as well (fixed cyclic scheduling)."""

    def __init__(self, tecg: Tecg, flow: FlowSpec):
        super().__init__(tecg, flow, PacketId(flow.id, 1))
        self.shifts = tuple(c * flow.cycle for c in range(tecg.gamma // flow.cycle))

    def is_free(self, link: tuple, pos: int) -> bool:
        busy = self.tecg._busy[link]
        slot, gamma = self.span[pos], self.tecg.gamma
        return all(wrap(slot + c, gamma) not in busy for c in self.shifts)

    def expand(self, path: SchedulePath) -> list:
        """Packet-1 path and its shifted copies, one per packet."""
        return [path.shifted(c, self.tecg.gamma, PacketId(self.flow.id, i + 1))
                for i, c in enumerate(self.shifts)]


class PathLimitError(RuntimeError):
    pass


def schedule_path_graph(tecg: Tecg, packet: PacketId, flow: FlowSpec) -> SchedulePathGraph:
    return SchedulePathGraph(tecg, flow, packet)
