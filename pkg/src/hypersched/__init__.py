"""Hypercycle-level flexible scheduling for Time-Triggered Ethernet.

Builds a time-expanded cyclic graph (TECG) over one hypercycle and admits
periodic flows with an exact optimiser (HFS or FCS) or the lightest-load-first
heuristic, with an independent verifier and gcd-based analysis.
"""
from .model import (
    Comm,
    FlowSpec,
    Hypercycle,
    ModelError,
    PacketId,
    Schedule,
    SchedulePath,
    Store,
    Topology,
    hypercycle_of,
    packet_windows,
    wrap,
)
from .tecg import OccupancyError, PeriodicView, SchedulePathGraph, Tecg, build_tecg
from .llf import admit_sequence, schedule_flow_llf
from .verify import jitter_mask, mask_jitter, verify_schedule

__version__ = "0.1.0"
