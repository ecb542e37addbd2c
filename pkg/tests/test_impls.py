import pytest

from _builders import NULL, enq, pop, push
from kserial.analysis import is_robust
from kserial.impls import (
    ImplConfig,
    Isolated,
    KSc,
    LockBaseline,
    RobustnessViolated,
    SequentialObject,
    Singular,
    YieldPoint,
)
from kserial.semantics import DataStructureKind, Event

QUEUE, STACK, POOL, POOL_MEM, REGISTER = (
    DataStructureKind.QUEUE,
    DataStructureKind.STACK,
    DataStructureKind.POOL,
    DataStructureKind.POOL_MEM,
    DataStructureKind.REGISTER,
)


def test_sequential_object_outputs():
    pool = SequentialObject(POOL)
    assert pool.apply("take") is NULL
    pool.apply("put", 5)
    pool.apply("put", 2)
    assert pool.apply("take") == 2

    pm = SequentialObject(POOL_MEM)
    pm.apply("put", 3)
    assert pm.apply("mem", 3) == 3
    assert pm.apply("mem", 4) == 5

    q = SequentialObject(QUEUE)
    q.apply("enq", 1)
    q.apply("enq", 2)
    assert q.apply("deq") == 1

    s = SequentialObject(STACK)
    s.apply("push", 1)
    s.apply("push", 2)
    assert s.apply("pop") == 2

    r = SequentialObject(REGISTER)
    assert r.apply("rd3") == 0
    r.apply("wr3", 9)
    assert r.apply("rd3") == 9


def test_isolated_queue_never_sees_other_threads():
    impl = Isolated(QUEUE)
    impl.invoke(0, "enq", 1)
    impl.invoke(0, "enq", 2)
    assert impl.invoke(1, "deq") is NULL
    assert impl.invoke(0, "deq") == 1


def test_singular_defers_robust_prefix():
    impl = Singular(QUEUE, chosen=0)
    impl.invoke(0, "enq", 1)
    impl.invoke(0, "enq", 2)
    assert [e.describe() for e in impl.log.lseq] == ["enq(1)", "enq(2)"]
    assert impl.shared.state == ()
    assert impl.invoke(1, "deq") is NULL
    # the first dequeue is not robust: commit, then dequeue on the shared queue
    assert impl.invoke(0, "deq") == 1
    assert impl.log.lseq == [] and impl.log.cnt == 0
    assert impl.shared.state == (2,)


def test_non_chosen_threads_synchronize():
    impl = Singular(QUEUE, chosen=0)
    impl.invoke(1, "enq", 7)
    assert impl.shared.state == (7,)
    assert impl.invoke(2, "deq") == 7


def test_ksc_zero_commits_every_call():
    impl = KSc(QUEUE, chosen=0, k=0)
    impl.invoke(0, "enq", 1)
    assert impl.log.lseq == []
    assert impl.shared.state == (1,)
    assert impl.invoke(1, "deq") == 1


def test_ksc_bounds_deferred_events():
    impl = KSc(QUEUE, chosen=0, k=2)
    for v in (1, 2, 3, 4, 5):
        impl.invoke(0, "enq", v)
        assert impl.log.cnt == len(impl.log.lseq) <= 2
        assert is_robust(QUEUE, impl.log.lseq)
    assert impl.shared.state == (1, 2, 3)


def test_commit_replays_log():
    impl = Singular(QUEUE, chosen=0)
    impl.shared.state = (9,)
    impl.log.lseq = [enq(0, 1), enq(1, 2)]
    impl.log.cnt = 2
    impl.commit(0)
    assert impl.shared.state == (9, 1, 2)
    assert impl.log.lseq == [] and impl.log.cnt == 0
    impl.commit(0)
    assert impl.shared.state == (9, 1, 2)


@pytest.mark.parametrize("start", [(), (4,), (3, 1, 2)])
def test_commit_of_push_pop_leaves_stack_unchanged(start):
    impl = Singular(STACK, chosen=0)
    impl.shared.state = start
    impl.log.lseq = [push(0, 1), pop(1, 1)]
    impl.commit(0)
    assert impl.shared.state == start


def test_commit_detects_non_robust_log():
    impl = Singular(QUEUE, chosen=0)
    impl.shared.state = (9,)
    impl.log.lseq = [Event(0, "deq", None, 1)]
    with pytest.raises(RobustnessViolated):
        impl.commit(0)
    with pytest.raises(ValueError):
        impl.commit(1)


def _yields(impl, thread, method, inp=None):
    gen = impl.call(thread, method, inp)
    points = []
    try:
        while True:
            points.append(next(gen))
    except StopIteration:
        pass
    return points


def test_yield_points():
    P, Q = YieldPoint.PRE_ATOMIC, YieldPoint.POST_ATOMIC
    assert _yields(LockBaseline(QUEUE), 0, "enq", 1) == [YieldPoint.ENTER, P, Q]
    assert _yields(Isolated(QUEUE), 0, "enq", 1) == [YieldPoint.ENTER]
    sing = Singular(QUEUE, chosen=0)
    assert _yields(sing, 0, "enq", 1) == [YieldPoint.ENTER]
    assert _yields(sing, 0, "deq") == [YieldPoint.ENTER, P, Q, P, Q]


def test_impl_config():
    assert isinstance(ImplConfig("lock").build(QUEUE, 2), LockBaseline)
    built = ImplConfig("ksc", chosen=1, k=3).build(QUEUE, 2)
    assert isinstance(built, KSc) and built.chosen == 1 and built.k == 3
    seeded = [ImplConfig("singular").build(QUEUE, 4, seed=s).chosen for s in range(20)]
    assert seeded == [ImplConfig("singular").build(QUEUE, 4, seed=s).chosen for s in range(20)]
    assert set(seeded) <= {0, 1, 2, 3}
    with pytest.raises(ValueError):
        ImplConfig("ksc")
    with pytest.raises(ValueError):
        ImplConfig("lockfree")
