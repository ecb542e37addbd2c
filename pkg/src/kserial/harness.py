"""Deterministic workload runner.

Threads are simulated cooperatively: at every step the scheduler picks one
runnable thread with a seeded RNG and advances it to its next yield point.
A thread with no call in flight starts its next scripted call, which records
the invocation; a call that runs to completion records the response. The
same (implementation, workload) pair therefore always yields the same
history.
"""

from __future__ import annotations

import random
import threading
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional

from kserial.histories import Action, ActionKind, ThreadedAction, ThreadedHistory
from kserial.impls import ImplConfig, Implementation, SequentialObject
from kserial.semantics import (
    MAX_VALUE,
    NULL,
    DataStructureKind,
    Event,
    Value,
    is_natural,
    step,
    takes_input,
)

CallSpec = tuple[str, Value]


@dataclass(frozen=True)
class Workload:
    kind: DataStructureKind
    scripts: tuple[tuple[CallSpec, ...], ...]
    seed: int = 0
    distinct_values: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scripts", tuple(tuple(s) for s in self.scripts))
        if not self.scripts or not any(self.scripts):
            raise ValueError("workload has no calls")
        inputs = []
        for script in self.scripts:
            for method, inp in script:
                if not self.kind.has_method(method):
                    raise ValueError(f"{method!r} is not a {self.kind} method")
                if takes_input(method):
                    if not is_natural(inp) or inp > MAX_VALUE:
                        raise ValueError(f"{method} input {inp!r} outside 0..{MAX_VALUE}")
                    inputs.append(inp)
                elif inp is not None:
                    raise ValueError(f"{method} takes no input")
        if self.distinct_values and len(set(inputs)) != len(inputs):
            raise ValueError("distinct_values workload repeats an input value")

    @property
    def threads(self) -> int:
        return len(self.scripts)

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.scripts)


@dataclass
class Schedule:
    """The seed plus the thread picked at every scheduling step."""

    seed: int
    decisions: list[int] = field(default_factory=list)


DEFAULT_MIX: Mapping[DataStructureKind, Mapping[str, float]] = {
    DataStructureKind.POOL: {"put": 1.0, "take": 1.0},
    DataStructureKind.POOL_MEM: {"put": 1.0, "take": 1.0, "mem": 1.0},
    DataStructureKind.QUEUE: {"enq": 1.0, "deq": 1.0},
    DataStructureKind.STACK: {"push": 1.0, "pop": 1.0},
    DataStructureKind.REGISTER: {"wr": 1.0, "rd": 1.0},
}


def generate_workload(
    kind: DataStructureKind,
    threads: int,
    ops_per_thread: int,
    seed: int,
    distinct_values: bool = False,
    mix: Optional[Mapping[str, float]] = None,
    max_value: int = 4,
    registers: int = 2,
) -> Workload:
    """Seeded random scripts over the kind's alphabet.

    Inputs are drawn from ``1..max_value``; with ``distinct_values`` they are
    fresh values ``1, 2, ...`` in shuffled order instead. Register methods
    address indices ``1..registers``.
    """
    if threads < 1 or ops_per_thread < 1:
        raise ValueError("threads and ops_per_thread must be >= 1")
    rng = random.Random(f"workload:{kind.value}:{threads}:{ops_per_thread}:{seed}")
    weights = dict(mix or DEFAULT_MIX[kind])
    families = list(weights)
    fresh = list(range(1, threads * ops_per_thread + 1))
    rng.shuffle(fresh)
    scripts = []
    for _ in range(threads):
        script = []
        for _ in range(ops_per_thread):
            family = rng.choices(families, weights=[weights[m] for m in families])[0]
            method = f"{family}{rng.randint(1, registers)}" if family in ("wr", "rd") else family
            inp = None
            if takes_input(method):
                inp = fresh.pop() if distinct_values else rng.randint(1, max_value)
            script.append((method, inp))
        scripts.append(tuple(script))
    return Workload(kind, tuple(scripts), seed, distinct_values)


def _record(actions: list, thread: int, kind: ActionKind, event_id: int, method: str, payload) -> None:
    actions.append(ThreadedAction(thread, Action(event_id, kind, method, payload)))


def record_run(
    impl: ImplConfig | Implementation, w: Workload
) -> tuple[ThreadedHistory, Schedule]:
    if isinstance(impl, ImplConfig):
        impl = impl.build(w.kind, w.threads, w.seed)
    rng = random.Random(f"schedule:{w.seed}")
    schedule = Schedule(w.seed)
    cursor = [0] * w.threads
    active: dict[int, tuple[int, str, object]] = {}
    actions: list[ThreadedAction] = []
    next_id = 1

    def runnable() -> list[int]:
        return [t for t in range(w.threads) if t in active or cursor[t] < len(w.scripts[t])]

    while True:
        ready = runnable()
        if not ready:
            break
        t = rng.choice(ready)
        schedule.decisions.append(t)
        if t not in active:
            method, inp = w.scripts[t][cursor[t]]
            cursor[t] += 1
            _record(actions, t, ActionKind.INV, next_id, method, inp)
            gen = impl.call(t, method, inp)
            next(gen)  # run to the entry yield point
            active[t] = (next_id, method, gen)
            next_id += 1
            continue
        event_id, method, gen = active[t]
        try:
            next(gen)
        except StopIteration as stop:
            _record(actions, t, ActionKind.RES, event_id, method, stop.value)
            del active[t]
    return ThreadedHistory(tuple(actions)), schedule


def run_workload(impl: ImplConfig | Implementation, w: Workload) -> ThreadedHistory:
    """Run ``w`` under the seeded cooperative scheduler and return the history."""
    return record_run(impl, w)[0]


def run_workload_threaded(impl: ImplConfig | Implementation, w: Workload) -> ThreadedHistory:
    """Smoke-test mode on real OS threads. Not reproducible."""
    if isinstance(impl, ImplConfig):
        impl = impl.build(w.kind, w.threads, w.seed)
    actions: list[ThreadedAction] = []
    recorder = threading.Lock()
    ids = iter(range(1, w.size + 1))

    def worker(t: int) -> None:
        for method, inp in w.scripts[t]:
            with recorder:
                eid = next(ids)
                _record(actions, t, ActionKind.INV, eid, method, inp)
            out = impl.invoke(t, method, inp)
            with recorder:
                _record(actions, t, ActionKind.RES, eid, method, out)

    workers = [threading.Thread(target=worker, args=(t,)) for t in range(w.threads)]
    for th in workers:
        th.start()
    for th in workers:
        th.join()
    return ThreadedHistory(tuple(actions))


# -- random histories for checker cross-validation ------------------------------


def random_behavior(
    kind: DataStructureKind,
    rng: random.Random,
    n: int,
    values: Sequence[int],
    first_id: int = 1,
) -> list[Event]:
    """A valid behavior of length ``n`` built by simulating the sequential object."""
    obj = SequentialObject(kind)
    families = list(DEFAULT_MIX[kind])
    events = []
    for i in range(n):
        family = rng.choice(families)
        method = f"{family}{rng.randint(1, 2)}" if family in ("wr", "rd") else family
        inp = rng.choice(values) if takes_input(method) else None
        if family == "take" and obj.state and rng.random() < 0.5:
            # any present element is a legal take, not only the least
            out = rng.choice(sorted(obj.state))
            obj.state = step(kind, obj.state, Event(0, method, None, out))
        else:
            out = obj.apply(method, inp)
        events.append(Event(first_id + i, method, inp, out))
    return events


def _mutate_output(kind, rng: random.Random, event: Event, values: Sequence[int]) -> Event:
    choices: list = list(values) + [NULL]
    if event.method == "mem":
        choices = [event.input, event.input + 1]
    elif event.method.startswith("rd"):
        choices = [0, *values]
    elif event.output is None:
        return event
    return Event(event.id, event.method, event.input, rng.choice(choices))


def random_history(
    kind: DataStructureKind,
    rng: random.Random,
    max_events: int = 6,
    max_threads: int = 3,
    values: Sequence[int] = (1, 2, 3),
) -> ThreadedHistory:
    """A random complete threaded history mixing linearizable, SC-only and bad cases.

    Events come from a valid behavior whose order is used as a linearization
    point schedule; intervals are stretched around those points, one thread
    may be shifted in time wholesale, and an output may be corrupted.
    """
    n = rng.randint(0, max_events)
    threads = rng.randint(1, max_threads)
    events = random_behavior(kind, rng, n, values)
    if events and rng.random() < 0.3:
        i = rng.randrange(len(events))
        events[i] = _mutate_output(kind, rng, events[i], values)
    owner = [rng.randrange(threads) for _ in events]
    shift = {t: 0.0 for t in range(threads)}
    if rng.random() < 0.4:
        shift[rng.randrange(threads)] = rng.uniform(-n, n)
    spans = []
    last_end: dict[int, float] = {}
    for i, (ev, t) in enumerate(zip(events, owner)):
        point = i + shift[t]
        start = point - rng.uniform(0, 1.5)
        end = point + rng.uniform(0, 1.5)
        start = max(start, last_end.get(t, float("-inf")) + 1e-6)
        end = max(end, start + 1e-6)
        last_end[t] = end
        spans.append((start, 0, t, ev))
        spans.append((end, 1, t, ev))
    spans.sort(key=lambda s: (s[0], s[1]))
    actions = []
    for _, phase, t, ev in spans:
        if phase == 0:
            actions.append(ThreadedAction(t, Action(ev.id, ActionKind.INV, ev.method, ev.input)))
        else:
            actions.append(ThreadedAction(t, Action(ev.id, ActionKind.RES, ev.method, ev.output)))
    return ThreadedHistory(tuple(actions))


def history_corpus(
    kinds: Iterable[DataStructureKind], per_kind: int, seed: int = 0, max_events: int = 6
) -> list[tuple[DataStructureKind, ThreadedHistory]]:
    rng = random.Random(seed)
    return [(kind, random_history(kind, rng, max_events)) for kind in kinds for _ in range(per_kind)]
