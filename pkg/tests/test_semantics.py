import itertools

import pytest
from hypothesis import given, strategies as st

from _builders import NULL, deq, enq, mem, pop, push, put, rd, take, wr
from kserial.semantics import (
    DataStructureKind,
    Event,
    InvalidBehavior,
    RegisterBank,
    initial_state,
    is_valid_behavior,
    run_behavior,
    step,
)

POOL, POOL_MEM, QUEUE, STACK, REGISTER = (
    DataStructureKind.POOL,
    DataStructureKind.POOL_MEM,
    DataStructureKind.QUEUE,
    DataStructureKind.STACK,
    DataStructureKind.REGISTER,
)


def test_initial_states():
    assert initial_state(POOL) == frozenset()
    assert initial_state(POOL_MEM) == frozenset()
    assert initial_state(QUEUE) == ()
    assert initial_state(STACK) == ()
    bank = initial_state(REGISTER)
    assert all(bank.get(i) == 0 for i in range(10))


@pytest.mark.parametrize(
    "kind, state, event, expected",
    [
        (POOL, frozenset(), put(1, 5), frozenset({5})),
        (QUEUE, (), deq(1, NULL), ()),
        (STACK, (1, 2), pop(1, 1), None),
        (POOL_MEM, frozenset({3}), mem(1, 4, 5), frozenset({3})),
        (POOL, frozenset({1}), take(1, 7), None),
        (POOL, frozenset({1}), take(1, NULL), None),
        (POOL_MEM, frozenset({3}), mem(1, 3, 3), frozenset({3})),
        (POOL_MEM, frozenset({3}), mem(1, 3, 4), None),
        (POOL_MEM, frozenset(), mem(1, 4, 4), None),
        (QUEUE, (1, 2), deq(1, 1), (2,)),
        (QUEUE, (1, 2), deq(1, 2), None),
        (STACK, (1, 2), pop(1, 2), (1,)),
        (STACK, (), pop(1, NULL), ()),
    ],
)
def test_step_examples(kind, state, event, expected):
    assert step(kind, state, event) == expected


def test_step_rejects_foreign_method():
    with pytest.raises(ValueError):
        step(QUEUE, (), push(1, 1))
    with pytest.raises(ValueError):
        step(REGISTER, RegisterBank(), Event(1, "wr", 1))


def test_put_of_present_element_keeps_set():
    assert step(POOL, frozenset({2}), put(1, 2)) == frozenset({2})


def test_null_inputs_are_not_enabled():
    assert step(POOL, frozenset(), put(1, NULL)) is None
    assert step(QUEUE, (), enq(1, NULL)) is None


def test_run_behavior_examples():
    assert run_behavior(QUEUE, (), [enq(1, 1), enq(2, 2), deq(3, 1)]) == (2,)
    with pytest.raises(InvalidBehavior) as info:
        run_behavior(POOL, frozenset(), [take(1, 7)])
    assert info.value.index == 0
    final = run_behavior(REGISTER, RegisterBank(), [wr(1, 1, 1), rd(2, 1, 1), rd(3, 2, 0)])
    assert final.items() == [(1, 1)]


def test_run_behavior_rejects_duplicate_ids():
    with pytest.raises(ValueError):
        run_behavior(QUEUE, (), [enq(1, 1), enq(1, 2)])


def test_validity_examples():
    assert is_valid_behavior(QUEUE, [enq(1, 1), deq(2, 1)])
    assert not is_valid_behavior(QUEUE, [enq(1, 1), enq(2, 2), deq(3, 2)])
    worked = [
        enq(1, 1), enq(2, 2), deq(3, 1), enq(4, 3), deq(5, 2),
        enq(6, 4), enq(7, 5), deq(8, 3), deq(9, 4),
    ]
    assert is_valid_behavior(QUEUE, worked)


def test_event_describe():
    assert enq(3, 7).describe() == "enq(7)"
    assert take(5, NULL).describe() == "take(NULL)"
    assert mem(9, 2, 3).describe() == "mem(2,3)"
    assert wr(1, 2, 4).describe() == "wr2(4)"


# -- properties -----------------------------------------------------------------


def _queue_oracle(events):
    items = []
    for e in events:
        if e.method == "enq":
            items.append(e.input)
        elif e.output is NULL:
            if items:
                return False
        else:
            if not items or items.pop(0) != e.output:
                return False
    return True


def _stack_oracle(events):
    items = []
    for e in events:
        if e.method == "push":
            items.append(e.input)
        elif e.output is NULL:
            if items:
                return False
        else:
            if not items or items.pop() != e.output:
                return False
    return True


def _alphabet(ins, outs, values=(1, 2, 3)):
    return [(ins, v, None) for v in values] + [(outs, None, v) for v in (*values, NULL)]


@pytest.mark.parametrize(
    "kind, ins, outs, oracle",
    [(QUEUE, "enq", "deq", _queue_oracle), (STACK, "push", "pop", _stack_oracle)],
)
def test_fifo_lifo_match_plain_simulation_exhaustively(kind, ins, outs, oracle):
    alphabet = _alphabet(ins, outs)
    checked = 0
    for n in range(7):
        for combo in itertools.product(alphabet, repeat=n):
            events = [Event(i, m, x, y) for i, (m, x, y) in enumerate(combo)]
            assert is_valid_behavior(kind, events) == oracle(events)
            checked += 1
    assert checked == sum(7**n for n in range(7))


def _register_events():
    return st.lists(
        st.tuples(st.sampled_from(["wr", "rd"]), st.integers(1, 2), st.integers(0, 3)),
        max_size=8,
    ).map(
        lambda ops: [
            Event(i, f"{m}{r}", v, None) if m == "wr" else Event(i, f"{m}{r}", None, v)
            for i, (m, r, v) in enumerate(ops)
        ]
    )


@given(_register_events())
def test_register_read_your_writes(events):
    latest: dict[int, int] = {}
    expected = True
    for e in events:
        index = int(e.method[2:])
        if e.method.startswith("wr"):
            latest[index] = e.input
        elif latest.get(index, 0) != e.output:
            expected = False
            break
    assert is_valid_behavior(REGISTER, events) == expected


def _any_events(kind):
    if kind is REGISTER:
        return _register_events()
    ins, outs = {POOL: ("put", "take"), POOL_MEM: ("put", "take"), QUEUE: ("enq", "deq"),
                 STACK: ("push", "pop")}[kind]
    atoms = [(ins, v, None) for v in (1, 2, 3)] + [(outs, None, v) for v in (1, 2, 3, NULL)]
    if kind is POOL_MEM:
        atoms += [("mem", v, v) for v in (1, 2, 3)] + [("mem", v, v + 1) for v in (1, 2, 3)]
    return st.lists(st.sampled_from(atoms), max_size=8).map(
        lambda ops: [Event(i, m, x, y) for i, (m, x, y) in enumerate(ops)]
    )


@pytest.mark.parametrize("kind", list(DataStructureKind))
@given(data=st.data())
def test_prefix_closure(kind, data):
    events = data.draw(_any_events(kind))
    if is_valid_behavior(kind, events):
        for cut in range(len(events)):
            assert is_valid_behavior(kind, events[:cut])


@given(st.frozensets(st.integers(0, 5)), st.integers(0, 5))
def test_pool_put_then_take_membership(state, x):
    after_put = step(POOL, state, put(1, x))
    assert x in after_put
    after_take = step(POOL, after_put, take(2, x))
    assert x not in after_take


@pytest.mark.parametrize("kind", list(DataStructureKind))
@given(data=st.data())
def test_step_is_deterministic(kind, data):
    events = data.draw(_any_events(kind))
    state = initial_state(kind)
    for e in events:
        first, second = step(kind, state, e), step(kind, state, e)
        assert first == second
        if first is None:
            break
        state = first
