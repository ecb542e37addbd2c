import random

import pytest
from hypothesis import given, strategies as st

from _builders import NULL, deq, enq, history, inv, mem, res, seq, take
from kserial.harness import random_history
from kserial.histories import (
    Action,
    ActionKind,
    MalformedHistory,
    MalformedReason,
    NotSequential,
    ThreadedHistory,
    derive_actions,
    precedes,
    project_thread,
    remove_thread,
    to_behavior,
    validate_history,
)
from kserial.semantics import DataStructureKind


def test_derive_actions():
    assert derive_actions(enq(3, 7)) == (
        Action(3, ActionKind.INV, "enq", 7),
        Action(3, ActionKind.RES, "enq", None),
    )
    assert derive_actions(take(5, NULL)) == (
        Action(5, ActionKind.INV, "take", None),
        Action(5, ActionKind.RES, "take", NULL),
    )
    assert derive_actions(mem(9, 2, 3)) == (
        Action(9, ActionKind.INV, "mem", 2),
        Action(9, ActionKind.RES, "mem", 3),
    )


def test_validate_ok():
    e = enq(1, 1)
    validate_history(history(inv(0, e), res(0, e)))


@pytest.mark.parametrize(
    "actions, reason, position",
    [
        ([res(0, enq(1, 1)), inv(0, enq(1, 1))], MalformedReason.WELL_FORMEDNESS, 0),
        ([inv(0, enq(1, 1)), inv(0, deq(2, 1)), res(0, enq(1, 1))], MalformedReason.THREAD_SEQUENTIALITY, 1),
        ([inv(0, enq(1, 1))], MalformedReason.COMPLETENESS, 0),
        ([inv(0, enq(1, 1)), res(1, enq(1, 1))], MalformedReason.THREAD_SEQUENTIALITY, 1),
        ([inv(0, enq(1, 1)), res(0, enq(1, 1)), inv(1, enq(1, 1))], MalformedReason.WELL_FORMEDNESS, 2),
    ],
)
def test_validate_rejections(actions, reason, position):
    with pytest.raises(MalformedHistory) as info:
        validate_history(history(*actions))
    assert info.value.reason is reason
    assert info.value.position == position


def _interleaved():
    a, b, c, d = enq(1, 1), deq(2, 1), enq(3, 2), deq(4, 2)
    return history(inv(0, a), inv(1, b), res(0, a), res(1, b), inv(0, c), res(0, c), inv(1, d), res(1, d))


def test_project_thread():
    h = _interleaved()
    assert [ta.thread for ta in project_thread(h, 0)] == [0, 0, 0, 0]
    assert project_thread(h, 7).actions == ()
    short = history(*_interleaved().actions[:4])
    assert [ta.action.event_id for ta in project_thread(short, 0)] == [1, 1]


def test_remove_thread():
    only = seq((0, enq(1, 1)))
    assert remove_thread(only, 0).actions == ()
    assert remove_thread(only, 3) == only
    h = seq((0, enq(1, 1)), (1, enq(2, 2)), (2, deq(3, 1)), (1, deq(4, 2)))
    rest = remove_thread(h, 1)
    assert [ta.thread for ta in rest] == [0, 0, 2, 2]


def test_precedes():
    a, b = enq(1, 1), deq(2, 1)
    sequential = seq((0, a), (1, b))
    assert precedes(sequential, 1, 2)
    assert not precedes(sequential, 2, 1)
    overlap = history(inv(0, a), inv(1, b), res(0, a), res(1, b))
    assert not precedes(overlap, 1, 2)
    assert not precedes(overlap, 2, 1)


def test_to_behavior():
    a, b = enq(1, 1), deq(2, 1)
    assert to_behavior(seq((0, a), (0, b))) == (a, b)
    with pytest.raises(NotSequential):
        to_behavior(history(inv(0, a), inv(1, b), res(0, a), res(1, b)))
    assert to_behavior(ThreadedHistory()) == ()


def test_to_behavior_inverts_sequential_construction():
    behavior = (enq(1, 3), deq(2, 3), deq(3, NULL), enq(4, 1))
    assert to_behavior(ThreadedHistory.from_behavior(behavior)) == behavior


def _corpus(n=200):
    rng = random.Random(11)
    return [random_history(kind, rng, 6) for kind in DataStructureKind for _ in range(n // 5)]


@pytest.mark.parametrize("h", _corpus())
def test_projection_and_complement_partition_history(h):
    validate_history(h)
    for t in h.threads:
        mine, others = project_thread(h, t), remove_thread(h, t)
        assert len(mine) + len(others) == len(h)
        positions = {id(ta): i for i, ta in enumerate(h.actions)}
        for part in (mine, others):
            idx = [positions[id(ta)] for ta in part.actions]
            assert idx == sorted(idx)
        assert to_behavior(mine) == h.events_of(t)


@pytest.mark.parametrize("h", _corpus(100))
def test_precedes_is_strict_partial_order(h):
    ids = [e.id for e in h.completed_events]
    for a in ids:
        assert not precedes(h, a, a)
        for b in ids:
            if precedes(h, a, b):
                assert not precedes(h, b, a)
                for c in ids:
                    if precedes(h, b, c):
                        assert precedes(h, a, c)


@given(st.lists(st.integers(0, 50), unique=True, max_size=10))
def test_sequential_roundtrip_property(values):
    behavior = tuple(enq(i + 1, v) for i, v in enumerate(values))
    assert to_behavior(ThreadedHistory.from_behavior(behavior, thread=4)) == behavior
