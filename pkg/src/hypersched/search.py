"""Shortest schedule-path search over a schedule-path graph.

The view is a DAG layered by lifespan position, so a single forward sweep
in position order is an exact shortest-path algorithm.  Labels compare
lexicographically on ``(weight, comm hops, delivery position)``; remaining
ties keep the first label found when tails are scanned in node-id order.
"""
from __future__ import annotations

from typing import Callable, Optional

from .model import Comm, SchedulePath
from .tecg import SchedulePathGraph


class SearchStats:
    __slots__ = ("relaxations", "searches")

    def __init__(self):
        self.relaxations = 0
        self.searches = 0


def lightest_path(
    view: SchedulePathGraph,
    comm_weight: Callable[[tuple, int], int],
    stats: Optional[SearchStats] = None,
) -> Optional[SchedulePath]:
    """Lightest path from the start vertex to the target vertex, or None.

    ``comm_weight(link, pos)`` must be non-negative; storage edges weigh 0.
    With non-negative weights a path where some node sends twice is always
    beaten by buffering at that node instead (fewer comm hops), so the
    result obeys the single-send rule without tracking it.
    """
    reach = view.backward_reachable()
    src, dest, length = view.source, view.destination, view.length
    if src not in reach[0]:
        return None
    # label: node -> (key, predecessor node, hop)
    layers = [dict() for _ in range(length + 1)]
    layers[0][src] = ((0, 0, 0), None, None)
    relax = 0
    for pos in range(length):
        nxt = reach[pos + 1]
        out = layers[pos + 1]
        for node in sorted(layers[pos]):
            (w, h, dpos), _, _ = layers[pos][node]
            for hop in view.out_hops(node, pos):
                v = hop.head
                if v not in nxt:
                    continue
                relax += 1
                if isinstance(hop, Comm):
                    key = (w + comm_weight(hop.link, pos), h + 1,
                           pos + 1 if v == dest else dpos)
                else:
                    key = (w, h, dpos)
                cur = out.get(v)
                if cur is None or key < cur[0]:
                    out[v] = (key, node, hop)
    if stats is not None:
        stats.relaxations += relax
        stats.searches += 1
    if dest not in layers[length]:
        return None
    hops = []
    node = dest
    for pos in range(length, 0, -1):
        _, prev, hop = layers[pos][node]
        hops.append(hop)
        node = prev
    hops.reverse()
    return SchedulePath(view.packet, tuple(hops))
