import pytest
from hypothesis import given, strategies as st

from hypersched.model import (
    Comm,
    FlowSpec,
    Hypercycle,
    ModelError,
    PacketId,
    Schedule,
    SchedulePath,
    Store,
    Topology,
    flows_from_csv,
    flows_to_csv,
    hypercycle_of,
    packet_count,
    packet_windows,
    wrap,
)


def test_wrap_examples():
    assert wrap(1, 6) == 1
    assert wrap(6, 6) == 6
    assert wrap(7, 6) == 1
    assert wrap(0, 6) == 6


@given(st.integers(-1000, 1000), st.integers(1, 200))
def test_wrap_range_and_periodicity(i, gamma):
    w = wrap(i, gamma)
    assert 1 <= w <= gamma
    assert wrap(i + gamma, gamma) == w
    assert (w - i) % gamma == 0


def test_packet_windows():
    hc = Hypercycle(6)
    assert packet_windows(FlowSpec(1, "s", "d", 1, 2, 2), hc) == [(1, 2), (3, 4), (5, 6)]
    # the last packet's window wraps past the hypercycle boundary
    assert packet_windows(FlowSpec(2, "s", "d", 2, 3, 3), hc) == [(2, 4), (5, 7)]
    assert packet_count(FlowSpec(3, "s", "d", 1, 6, 6), hc) == 1


def test_hypercycle_of_and_mismatch():
    flows = [FlowSpec(1, "a", "b", 1, 2, 2), FlowSpec(2, "a", "b", 1, 3, 3)]
    assert hypercycle_of(flows).gamma == 6
    with pytest.raises(ModelError, match="no flows"):
        hypercycle_of([])
    with pytest.raises(ModelError, match="cycle/hypercycle mismatch"):
        packet_count(FlowSpec(1, "a", "b", 1, 4, 4), Hypercycle(6))


def test_flow_validation():
    with pytest.raises(ModelError):
        FlowSpec(1, "a", "a", 1, 2, 2)
    with pytest.raises(ModelError):
        FlowSpec(1, "a", "b", 1, 0, 2)
    with pytest.raises(ModelError):
        FlowSpec(1, "a", "b", 0, 2, 2)


def test_topology_validation():
    with pytest.raises(ModelError, match="self-link"):
        Topology(["a"], [("a", "a")])
    with pytest.raises(ModelError, match="duplicate"):
        Topology(["a", "b"], [("a", "b"), ("a", "b")])
    with pytest.raises(ModelError, match="unknown node"):
        Topology(["a"], [("a", "b")])
    t = Topology.duplex(["a", "b"], [("a", "b")])
    assert t.is_duplex() and t.links == (("a", "b"), ("b", "a"))
    assert Topology.from_json(t.to_json()) == t


def test_flow_csv_roundtrip():
    flows = [FlowSpec(1, "s", "d", 1, 2, 2), FlowSpec(7, "x", "y", 5, 3, 4)]
    text = flows_to_csv(flows)
    assert text.splitlines()[0] == "id,src,dst,arrival,cycle,max_delay"
    assert flows_from_csv(text) == flows
    with pytest.raises(ModelError, match="lacks columns"):
        flows_from_csv("id,src\n1,a\n")


def test_schedule_dict_roundtrip():
    pid = PacketId(1, 2)
    path = SchedulePath(pid, (Store("s", 3), Comm(("s", "d"), 4)))
    sched = Schedule({1: True, 2: False}, {pid: path})
    data = sched.to_dict()
    assert data["admitted"] == [1] and data["rejected"] == [2]
    assert Schedule.from_dict(data) == sched
    assert PacketId.parse(str(pid)) == pid


def test_shifted_path_wraps():
    p = SchedulePath(PacketId(1, 1), (Comm(("s", "a"), 5), Comm(("a", "d"), 6)))
    q = p.shifted(3, 6, PacketId(1, 2))
    assert q.hops == (Comm(("s", "a"), 2), Comm(("a", "d"), 3))
