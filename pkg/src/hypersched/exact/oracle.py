"""Brute-force admission oracle for tiny instances.

Deliberately shares no search code with the scheduler or the exact solver:
every packet gets its own networkx graph over its unrolled lifespan, all
simple paths are enumerated, and flow subsets are tried largest first with
plain backtracking.  Only meant for a handful of flows.
"""
from __future__ import annotations

from itertools import combinations

import networkx as nx

ORACLE_MAX_FLOWS = 4
ORACLE_PATH_LIMIT = 10_000


class OracleScaleError(RuntimeError):
    pass


def _packet_paths(tecg, flow, seq: int, limit: int) -> list:
    """Every feasible path of one packet as a tuple of (kind, name, position)."""
    gamma = tecg.hc.gamma
    first = (flow.arrival - 1) % gamma
    start = (first + (seq - 1) * flow.cycle) % gamma  # 0-based arrival slot
    length = min(flow.max_delay, gamma)
    g = nx.DiGraph()
    for p in range(length):
        slot = (start + p) % gamma + 1
        for n in tecg.topology.nodes:
            g.add_edge((n, p), (n, p + 1), hop=("s", n, p))
        for u, v in tecg.topology.links:
            if tecg.is_free((u, v), slot):
                g.add_edge((u, p), (v, p + 1), hop=("c", (u, v), p))
    src, dst = (flow.source, 0), (flow.destination, length)
    if src not in g or dst not in g:
        return []
    out = []
    for nodes in nx.all_simple_paths(g, src, dst):
        hops = tuple(g.edges[a, b]["hop"] for a, b in zip(nodes, nodes[1:]))
        senders = [h[1][0] for h in hops if h[0] == "c" and h[1][0] != flow.destination]
        if len(senders) != len(set(senders)):
            continue
        out.append(hops)
        if len(out) > limit:
            raise OracleScaleError("oracle scale exceeded: too many paths")
    return out


def _edges(hops, start: int, gamma: int) -> frozenset:
    return frozenset((h[1], (start + h[2]) % gamma + 1) for h in hops if h[0] == "c")


def _flow_units(tecg, flow, mode: str, limit: int) -> list:
    gamma = tecg.hc.gamma
    n = gamma // flow.cycle
    first = (flow.arrival - 1) % gamma
    starts = [(first + i * flow.cycle) % gamma for i in range(n)]
    per_packet = [_packet_paths(tecg, flow, i + 1, limit) for i in range(n)]
    if mode == "hfs":
        return [[_edges(h, s, gamma) for h in paths] for paths, s in zip(per_packet, starts)]
    # fcs: identical position-indexed shape for every packet
    common = set(per_packet[0])
    for paths in per_packet[1:]:
        common &= set(paths)
    alts = []
    for hops in sorted(common):
        edges = frozenset().union(*(_edges(hops, s, gamma) for s in starts))
        alts.append(edges)
    return [alts]


def _jointly_feasible(units: list) -> bool:
    used: set = set()

    def rec(i: int) -> bool:
        if i == len(units):
            return True
        for edges in units[i]:
            if used.isdisjoint(edges):
                used.update(edges)
                if rec(i + 1):
                    return True
                used.difference_update(edges)
        return False

    return rec(0)


def brute_force_oracle(tecg, flows, mode: str = "hfs",
                       max_flows: int = ORACLE_MAX_FLOWS,
                       path_limit: int = ORACLE_PATH_LIMIT) -> int:
    """Largest number of flows that can be admitted together."""
    flows = list(flows)
    if mode not in ("hfs", "fcs"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(flows) > max_flows:
        raise OracleScaleError(f"oracle scale exceeded: {len(flows)} flows > {max_flows}")
    units = {f.id: _flow_units(tecg, f, mode, path_limit) for f in flows}
    ids = [f.id for f in flows]
    for size in range(len(ids), 0, -1):
        for subset in combinations(ids, size):
            if _jointly_feasible([u for k in subset for u in units[k]]):
                return size
    return 0
