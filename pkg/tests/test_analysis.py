import pytest
from hypothesis import given, strategies as st

from hypersched.analysis import IndexSet, blocked_slots, collides, count_report, count_solutions
from hypersched.harness import single_link
from hypersched.model import Comm, FlowSpec, Hypercycle, ModelError, Topology
from hypersched.tecg import build_tecg

index_sets = st.builds(IndexSet, st.integers(1, 40), st.integers(1, 20))


def test_collides_examples():
    assert collides(IndexSet(1, 2), IndexSet(2, 3))
    assert not collides(IndexSet(1, 4), IndexSet(2, 6))
    assert collides(IndexSet(1, 4), IndexSet(3, 6))


@given(index_sets, index_sets)
def test_collides_symmetric(a, b):
    assert collides(a, b) == collides(b, a)


def test_blocked_examples():
    assert blocked_slots(IndexSet(1, 4), 6, 12) == {1, 3, 5, 7, 9, 11}
    assert blocked_slots(IndexSet(3, 4), 7, 10) == set(range(3, 11))
    assert blocked_slots(IndexSet(2, 3), 9, 20) == IndexSet(2, 3).members(20)
    with pytest.raises(ValueError):
        blocked_slots(IndexSet(1, 2), 3, 0)


@given(index_sets, st.integers(1, 20), st.integers(1, 100))
def test_blocked_covers_own_slots(a, other, horizon):
    assert blocked_slots(a, other, horizon) >= a.members(horizon)


def test_count_examples(diamond):
    f = FlowSpec(1, "s", "d", 1, 2, 2)
    assert count_solutions(diamond, f, "fcs") == 2
    assert count_solutions(diamond, f, "hfs") == 4
    one = FlowSpec(2, "s", "d", 1, 4, 4)
    assert count_solutions(diamond, one, "fcs") == count_solutions(diamond, one, "hfs")
    back = build_tecg(single_link(), Hypercycle(2))
    assert count_solutions(back, FlowSpec(3, "d", "s", 1, 2, 2), "hfs") == 0


def test_count_rejects_overlapping_lifespans(diamond):
    with pytest.raises(ModelError):
        count_solutions(diamond, FlowSpec(1, "s", "d", 1, 2, 3))


def test_count_overflow_guard(diamond):
    with pytest.raises(OverflowError, match="count overflow guard"):
        count_solutions(diamond, FlowSpec(1, "s", "d", 1, 2, 2), "hfs", guard=3)


def test_count_sees_occupancy(diamond):
    f = FlowSpec(1, "s", "d", 1, 2, 2)
    diamond.occupy([Comm(("s", "a"), 3)])
    assert count_solutions(diamond, f, "fcs") == 2
    assert count_solutions(diamond, f, "hfs") == 2


def test_count_report(diamond):
    text = count_report(diamond, [FlowSpec(1, "s", "d", 1, 2, 2)])
    assert text == "flow_id,fcs_count,hfs_count\n1,2,4\n"
