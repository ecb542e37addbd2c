"""Concurrent implementations driven by the harness.

Every implementation exposes :meth:`Implementation.call`, a generator that
yields :class:`YieldPoint` markers at the places a scheduler may switch
threads and returns the method's output. :meth:`Implementation.invoke` runs a
call straight through, for free-running threads.

Shared state is touched only while holding one global lock, and no generator
yields while holding it, so the cooperative scheduler can never deadlock.
"""

from __future__ import annotations

import enum
import random
import threading
from collections.abc import Generator
from dataclasses import dataclass, field
from typing import Optional

from kserial.analysis import not_robust
from kserial.semantics import (
    NULL,
    DataStructureKind,
    DsState,
    Event,
    Value,
    initial_state,
    method_family,
    register_index,
    step,
)

Call = Generator["YieldPoint", None, Value]


class YieldPoint(enum.Enum):
    ENTER = "enter"
    PRE_ATOMIC = "pre-atomic"
    POST_ATOMIC = "post-atomic"


class RobustnessViolated(AssertionError):
    pass


class SequentialObject:
    """A plain sequential instance of one data structure kind.

    ``take`` on a pool with several elements removes the least one.
    """

    def __init__(self, kind: DataStructureKind, state: Optional[DsState] = None):
        self.kind = kind
        self.state = initial_state(kind) if state is None else state

    def output_for(self, method: str, inp: Value) -> Value:
        family = method_family(method)
        q = self.state
        if family in ("put", "enq", "push", "wr"):
            return None
        if family == "take":
            return min(q) if q else NULL
        if family == "mem":
            return inp if inp in q else inp + 1
        if family == "deq":
            return q[0] if q else NULL
        if family == "pop":
            return q[-1] if q else NULL
        return q.get(register_index(method))

    def apply(self, method: str, inp: Value = None) -> Value:
        out = self.output_for(method, inp)
        nxt = step(self.kind, self.state, Event(0, method, inp, out))
        if nxt is None:
            raise ValueError(f"{method}({inp}) is not applicable to {self.kind}")
        self.state = nxt
        return out

    def replay(self, events) -> None:
        state = self.state
        for ev in events:
            state = step(self.kind, state, ev)
            if state is None:
                raise RobustnessViolated(f"{ev} not enabled at commit")
        self.state = state


@dataclass(frozen=True)
class ImplConfig:
    """Which implementation to build: ``lock``, ``isolated``, ``singular`` or ``ksc``.

    ``chosen`` is the thread allowed to defer synchronization (singular and
    ksc); ``None`` picks one at random from the run's seed.
    """

    variant: str
    chosen: Optional[int] = None
    k: Optional[int] = None

    VARIANTS = ("lock", "isolated", "singular", "ksc")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ValueError(f"unknown implementation {self.variant!r}")
        if self.variant == "ksc" and (self.k is None or self.k < 0):
            raise ValueError("ksc needs a bound k >= 0")

    def build(self, kind: DataStructureKind, threads: int, seed: int = 0) -> "Implementation":
        if self.variant == "lock":
            return LockBaseline(kind)
        if self.variant == "isolated":
            return Isolated(kind)
        chosen = self.chosen
        if chosen is None:
            chosen = random.Random(seed).randrange(max(threads, 1))
        if self.variant == "singular":
            return Singular(kind, chosen)
        return KSc(kind, chosen, self.k)

    def describe(self) -> str:
        if self.variant == "singular":
            return f"singular(chosen={self.chosen})"
        if self.variant == "ksc":
            return f"ksc(chosen={self.chosen}, k={self.k})"
        return self.variant


class Implementation:
    def __init__(self, kind: DataStructureKind):
        self.kind = kind
        self.lock = threading.Lock()

    def call(self, thread: int, method: str, inp: Value = None) -> Call:
        raise NotImplementedError

    def invoke(self, thread: int, method: str, inp: Value = None) -> Value:
        gen = self.call(thread, method, inp)
        try:
            while True:
                next(gen)
        except StopIteration as stop:
            return stop.value


class LockBaseline(Implementation):
    """One shared object behind a global lock."""

    def __init__(self, kind: DataStructureKind):
        super().__init__(kind)
        self.shared = SequentialObject(kind)

    def atomic(self, method: str, inp: Value) -> Call:
        yield YieldPoint.PRE_ATOMIC
        with self.lock:
            out = self.shared.apply(method, inp)
        yield YieldPoint.POST_ATOMIC
        return out

    def call(self, thread, method, inp=None):
        yield YieldPoint.ENTER
        return (yield from self.atomic(method, inp))


class Isolated(Implementation):
    """Each thread works on its own private copy; threads never communicate."""

    def __init__(self, kind: DataStructureKind):
        super().__init__(kind)
        self.local: dict[int, SequentialObject] = {}

    def call(self, thread, method, inp=None):
        yield YieldPoint.ENTER
        obj = self.local.setdefault(thread, SequentialObject(self.kind))
        return obj.apply(method, inp)


@dataclass
class LocalLog:
    lseq: list[Event] = field(default_factory=list)
    cnt: int = 0


class Singular(LockBaseline):
    """All threads synchronize except ``chosen``, which keeps a local log while
    the log stays robust and commits it before the first call that would
    break robustness.

    The chosen thread's private object always reflects ``lseq`` applied to
    the initial state, so each local output is computed as if ``lseq`` were
    the whole history.
    """

    def __init__(self, kind: DataStructureKind, chosen: int):
        super().__init__(kind)
        self.chosen = chosen
        self.private = SequentialObject(kind)
        self.log = LocalLog()

    def must_sync(self, newseq: list[Event]) -> bool:
        return not_robust(self.kind, newseq)

    def commit(self, thread: int) -> None:
        if thread != self.chosen:
            raise ValueError(f"thread {thread} has no local log")
        with self.lock:
            self.shared.replay(self.log.lseq)
        self.log = LocalLog()
        self.private = SequentialObject(self.kind)

    def call(self, thread, method, inp=None):
        yield YieldPoint.ENTER
        if thread != self.chosen:
            return (yield from self.atomic(method, inp))
        # local compute first; the sync path below overwrites the output
        probe = SequentialObject(self.kind, self.private.state)
        out = probe.apply(method, inp)
        newseq = self.log.lseq + [Event(len(self.log.lseq), method, inp, out)]
        if self.must_sync(newseq):
            yield YieldPoint.PRE_ATOMIC
            self.commit(thread)
            yield YieldPoint.POST_ATOMIC
            return (yield from self.atomic(method, inp))
        self.private = probe
        self.log.lseq = newseq
        self.log.cnt += 1
        return out


class KSc(Singular):
    """Singular, but the chosen thread also synchronizes once ``k`` local events
    have piled up."""

    def __init__(self, kind: DataStructureKind, chosen: int, k: int):
        super().__init__(kind, chosen)
        if k < 0:
            raise ValueError("k must be >= 0")
        self.k = k

    def must_sync(self, newseq):
        return super().must_sync(newseq) or self.log.cnt >= self.k
