import json

import pytest
from hypothesis import given, settings, strategies as st

from hypersched.model import Comm, FlowSpec, Hypercycle, ModelError, PacketId, Store
from hypersched.tecg import OccupancyError, PathLimitError, PeriodicView, SchedulePathGraph, build_tecg
from hypersched.harness import fig1b_diamond, fig1_line


def test_counts_on_diamond(diamond):
    assert diamond.vertex_count == 16
    assert diamond.comm_edge_count == 32
    assert diamond.storage_edge_count == 16
    diamond.occupy([Comm(("s", "a"), i) for i in range(1, 5)])
    assert diamond.comm_edge_count == 28
    assert len(list(diamond.comm_edges())) == 28
    assert len(list(diamond.storage_edges())) == 16


def test_comm_edges_wrap(diamond):
    edges = set(diamond.comm_edges())
    assert (("s", 4), ("a", 1)) in edges


def test_occupy_is_atomic(diamond):
    diamond.occupy([Comm(("s", "a"), 1)])
    before = diamond.snapshot()
    with pytest.raises(OccupancyError):
        diamond.occupy([Comm(("s", "a"), 2), Comm(("s", "a"), 1)])
    assert diamond.snapshot() == before
    with pytest.raises(OccupancyError):
        diamond.occupy([Comm(("s", "d"), 1)])
    with pytest.raises(OccupancyError):
        diamond.occupy([Comm(("s", "a"), 9)])
    with pytest.raises(OccupancyError):
        diamond.release([Comm(("s", "a"), 3)])


def test_dump_restore_roundtrip(diamond):
    diamond.occupy([Comm(("s", "a"), 1)], owner=PacketId(3, 1))
    diamond.occupy([Comm(("b", "d"), 2)])
    text = diamond.dumps()
    other = build_tecg(diamond.topology, diamond.hc)
    other.restore(json.loads(text))
    assert other.snapshot() == diamond.snapshot()
    assert other.owner(("s", "a"), 1) == PacketId(3, 1)
    assert other.owner(("b", "d"), 2) is None


@settings(max_examples=50, deadline=None)
@given(st.sets(st.tuples(st.sampled_from(fig1b_diamond().links), st.integers(1, 4)), max_size=12))
def test_occupy_release_identity(edges):
    t = build_tecg(fig1b_diamond(), Hypercycle(4))
    t.occupy([Comm(("s", "a"), 1)])
    before = t.snapshot()
    edges = [Comm(l, s) for l, s in edges if not (l == ("s", "a") and s == 1)]
    t.occupy(edges)
    t.release(edges)
    assert t.snapshot() == before


def test_view_positions_and_target(fig1):
    tecg, (f1, f2) = fig1
    v = SchedulePathGraph(tecg, f2, PacketId(2, 2))
    assert v.arrival == 5 and v.deadline == 7
    assert v.span == (5, 6, 1)
    assert v.start_vertex == ("s", 5)
    assert v.target_vertex == ("d", 2)
    assert v.position(1) == 2 and v.position(3) is None
    assert len(v.vertices()) == 3 * 4
    assert v.contains(Comm(("a", "d"), 1))
    assert not v.contains(Comm(("a", "d"), 2))
    assert v.contains(Store("a", 6))


def test_view_rejects_foreign_packet(fig1):
    tecg, (f1, _) = fig1
    with pytest.raises(ModelError):
        SchedulePathGraph(tecg, f1, PacketId(1, 4))
    with pytest.raises(ModelError):
        SchedulePathGraph(tecg, f1, PacketId(2, 1))


def test_view_filters_occupied_edges(fig1):
    tecg, (f1, _) = fig1
    tecg.occupy([Comm(("s", "a"), 1)])
    v = SchedulePathGraph(tecg, f1, PacketId(1, 1))
    assert Comm(("s", "a"), 1) not in v.comm_edges()
    assert list(v.paths()) == []
    assert v.count_paths() == 0


def test_paths_match_count_and_respect_no_loop(diamond):
    f = FlowSpec(1, "s", "d", 1, 4, 4)
    v = SchedulePathGraph(diamond, f, PacketId(1, 1))
    paths = list(v.paths())
    assert len(paths) == v.count_paths()
    for p in paths:
        assert len(p.hops) == 4
        senders = [h.tail for h in p.comm_hops if h.tail != "d"]
        assert len(senders) == len(set(senders))
    with pytest.raises(PathLimitError):
        list(v.paths(limit=1))


def test_periodic_view_requires_all_shifts_free():
    tecg = build_tecg(fig1_line(), Hypercycle(6))
    f = FlowSpec(1, "s", "d", 1, 2, 2)
    tecg.occupy([Comm(("a", "d"), 4)])
    v = PeriodicView(tecg, f)
    # slot 2 of (a, d) is free, but its shift to slot 4 is not
    assert not v.is_free(("a", "d"), 1)
    assert list(v.paths()) == []
