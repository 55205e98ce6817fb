"""gcd-based schedulability predicates and feasible-solution counting.

An index set ``{origin + c * cycle | c >= 0}`` describes the slots a fixed
cyclic flow occupies on one link.  Two such sets intersect exactly when
``gcd(cycle_a, cycle_b)`` divides ``origin_a - origin_b``; co-prime cycles
therefore always collide.

``count_solutions`` gives the product-method count: per-packet path
counts multiplied together for HFS (capacity interactions between packets
are ignored), packet 1's count alone for FCS.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable

from .model import FlowSpec, ModelError, PacketId
from .tecg import PathLimitError, SchedulePathGraph, Tecg

COUNT_GUARD = 10 ** 12


@dataclass(frozen=True)
class IndexSet:
    origin: int
    cycle: int

    def __post_init__(self):
        if self.cycle < 1:
            raise ValueError("cycle must be >= 1")
        if self.origin < 1:
            raise ValueError("origin must be a slot >= 1")

    def members(self, horizon: int) -> set:
        """Members within ``[1, horizon]``."""
        return set(range(self.origin, horizon + 1, self.cycle))


def collides(a: IndexSet, b: IndexSet) -> bool:
    return (a.origin - b.origin) % math.gcd(a.cycle, b.cycle) == 0


def blocked_slots(a: IndexSet, other_cycle: int, horizon: int) -> set:
    """Slots of ``a``'s link that a flow with ``other_cycle`` can no longer start from."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if other_cycle < 1:
        raise ValueError("cycle must be >= 1")
    step = math.gcd(a.cycle, other_cycle)
    return IndexSet(a.origin, step).members(horizon)


def count_solutions(tecg: Tecg, flow: FlowSpec, mode: str = "hfs", guard: int = COUNT_GUARD) -> int:
    if mode not in ("hfs", "fcs"):
        raise ValueError(f"unknown mode {mode!r}")
    if flow.max_delay > flow.cycle:
        raise ModelError("counting is undefined when lifespans of one flow overlap (max_delay > cycle)")
    n = tecg.gamma // flow.cycle
    seqs = [1] if mode == "fcs" else range(1, n + 1)
    total = 1
    for seq in seqs:
        try:
            c = SchedulePathGraph(tecg, flow, PacketId(flow.id, seq)).count_paths(cap=guard)
        except PathLimitError:
            raise OverflowError("count overflow guard") from None
        total *= c
        if total > guard:
            raise OverflowError("count overflow guard")
    return total


def count_report(tecg: Tecg, flows: Iterable[FlowSpec], guard: int = COUNT_GUARD) -> str:
    """CSV ``flow_id,fcs_count,hfs_count`` (product-method counts)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["flow_id", "fcs_count", "hfs_count"])
    for f in flows:
        w.writerow([f.id, count_solutions(tecg, f, "fcs", guard), count_solutions(tecg, f, "hfs", guard)])
    return buf.getvalue()
