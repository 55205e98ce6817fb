"""Integer-programming model of HFS and FCS over per-packet span views.

Variables: one binary ``x`` per (packet, edge of its schedule-path graph)
and one binary ``chi`` per flow.  Rows:

capacity      sum of all x on one comm timed edge <= 1
conservation  in - out = 0 at every vertex except the packet's start/target
no_loop       comm sends of one node (not the destination) per packet <= 1
indicator     chi_k <= outflow of the packet's start vertex
periodicity   (FCS) x(k,1) on an edge = x(k,i) on the edge shifted by
              (i-1)*cycle slots; a missing partner pins the other to 0

Objective: maximise the number of admitted flows.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..model import Comm, FlowSpec, PacketId, Store, check_hypercycle, wrap
from ..tecg import SchedulePathGraph, Tecg


@dataclass(frozen=True)
class Var:
    name: str
    kind: str  # "x" | "chi"
    flow: int
    seq: int = 0
    pos: int = -1
    hop: object = None


@dataclass(frozen=True)
class Row:
    name: str
    kind: str
    coeffs: tuple  # ((var index, coefficient), ...)
    sense: str  # "<=" | "="
    rhs: int


@dataclass
class IlpModel:
    mode: str
    tecg: Tecg
    flows: list
    variables: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    views: dict = field(default_factory=dict)
    chi: dict = field(default_factory=dict)
    # pid -> {(pos, hop): var index}
    x: dict = field(default_factory=dict)

    @property
    def objective(self) -> list:
        return [self.chi[f.id] for f in self.flows]

    def row_counts(self) -> Counter:
        return Counter(r.kind for r in self.rows)

    def packet_count(self) -> int:
        return len(self.views)

    def _add_var(self, var: Var) -> int:
        self.variables.append(var)
        return len(self.variables) - 1


def x_name(pid: PacketId, hop, gamma: int) -> str:
    if isinstance(hop, Comm):
        u, v = hop.link
    else:
        u = v = hop.node
    return f"x_{pid.flow}_{pid.seq}_{u}_{hop.slot}_{v}_{wrap(hop.slot + 1, gamma)}"


def _packet_vars(model: IlpModel, view: SchedulePathGraph) -> None:
    topo = model.tecg.topology
    gamma = model.tecg.gamma
    pid = view.packet
    table = model.x[pid] = {}
    for pos in range(view.length):
        slot = view.slot(pos)
        for node in topo.nodes:
            hop = Store(node, slot)
            table[(pos, hop)] = model._add_var(Var(x_name(pid, hop, gamma), "x", pid.flow, pid.seq, pos, hop))
        for link in topo.links:
            if view.is_free(link, pos):
                hop = Comm(link, slot)
                table[(pos, hop)] = model._add_var(Var(x_name(pid, hop, gamma), "x", pid.flow, pid.seq, pos, hop))


def _packet_rows(model: IlpModel, view: SchedulePathGraph) -> None:
    pid = view.packet
    table = model.x[pid]
    k, i = pid
    inflow: dict = {}
    outflow: dict = {}
    sends: dict = {}
    for (pos, hop), idx in table.items():
        outflow.setdefault((hop.tail, pos), []).append(idx)
        inflow.setdefault((hop.head, pos + 1), []).append(idx)
        if isinstance(hop, Comm):
            sends.setdefault(hop.tail, []).append(idx)
    start = (view.source, 0)
    target = (view.destination, view.length)
    for pos in range(view.length + 1):
        for node in model.tecg.topology.nodes:
            if (node, pos) in (start, target):
                continue
            coeffs = [(j, 1) for j in inflow.get((node, pos), [])]
            coeffs += [(j, -1) for j in outflow.get((node, pos), [])]
            model.rows.append(Row(f"cons_{k}_{i}_{node}_{pos}", "conservation", tuple(coeffs), "=", 0))
    for node in model.tecg.topology.nodes:
        if node == view.destination:
            continue
        coeffs = tuple((j, 1) for j in sends.get(node, []))
        model.rows.append(Row(f"loop_{k}_{i}_{node}", "no_loop", coeffs, "<=", 1))
    coeffs = [(model.chi[k], 1)] + [(j, -1) for j in outflow.get(start, [])]
    model.rows.append(Row(f"ind_{k}_{i}", "indicator", tuple(coeffs), "<=", 0))


def build_hfs_model(tecg: Tecg, flows: Iterable[FlowSpec]) -> IlpModel:
    flows = sorted(flows, key=lambda f: f.id)
    for f in flows:
        check_hypercycle(f, tecg.hc)
    model = IlpModel("hfs", tecg.copy(), flows)
    for f in flows:
        model.chi[f.id] = model._add_var(Var(f"chi_{f.id}", "chi", f.id))
    for f in flows:
        for seq in range(1, tecg.gamma // f.cycle + 1):
            view = SchedulePathGraph(model.tecg, f, PacketId(f.id, seq))
            model.views[view.packet] = view
            _packet_vars(model, view)
            _packet_rows(model, view)
    competing: dict = {}
    for table in model.x.values():
        for (pos, hop), idx in table.items():
            if isinstance(hop, Comm):
                competing.setdefault(hop, []).append(idx)
    for hop in sorted(competing):
        (u, v), slot = hop
        model.rows.append(Row(f"cap_{u}_{v}_{slot}", "capacity",
                              tuple((j, 1) for j in competing[hop]), "<=", 1))
    return model


def build_fcs_model(tecg: Tecg, flows: Iterable[FlowSpec]) -> IlpModel:
    model = build_hfs_model(tecg, flows)
    model.mode = "fcs"
    topo = model.tecg.topology
    for f in model.flows:
        n = tecg.gamma // f.cycle
        first = model.views[PacketId(f.id, 1)]
        t1 = model.x[PacketId(f.id, 1)]
        for seq in range(2, n + 1):
            pid = PacketId(f.id, seq)
            view, ti = model.views[pid], model.x[pid]
            for pos in range(first.length):
                s1, si = first.slot(pos), view.slot(pos)
                pairs = [(Store(n_, s1), Store(n_, si)) for n_ in topo.nodes]
                pairs += [(Comm(l, s1), Comm(l, si)) for l in topo.links]
                for h1, hi in pairs:
                    a, b = t1.get((pos, h1)), ti.get((pos, hi))
                    if a is None and b is None:
                        continue
                    name = f"per_{f.id}_{seq}_{pos}_{h1.tail}_{h1.head}"
                    if a is not None and b is not None:
                        coeffs = ((a, 1), (b, -1))
                    else:
                        coeffs = (((a if a is not None else b), 1),)
                    model.rows.append(Row(name, "periodicity", coeffs, "=", 0))
    return model
