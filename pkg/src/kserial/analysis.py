"""Composability constructions and robustness.

Pool, stack and queue are composable: two valid behaviors can always be
interleaved into a valid one. The constructions here build that interleaving
explicitly. Pool-with-membership and registers are not, and
:func:`noncomposability_witness` returns fixed pairs with no valid
interleaving.

A behavior is robust when it runs from every state of the kind. Robustness is
decided by per-kind closed forms (:func:`is_robust`) and cross-checked by a
finite-state oracle (:func:`is_robust_sampled`).
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Optional

from kserial.semantics import (
    NULL,
    Behavior,
    DataStructureKind,
    DsState,
    Event,
    InvalidBehavior,
    check_distinct_ids,
    initial_state,
    is_valid_behavior,
    register_index,
    run_behavior,
    runs_from,
    step,
)

POOL = DataStructureKind.POOL
POOL_MEM = DataStructureKind.POOL_MEM
QUEUE = DataStructureKind.QUEUE
STACK = DataStructureKind.STACK
REGISTER = DataStructureKind.REGISTER


class InvalidInput(ValueError):
    pass


class UnsupportedKind(ValueError):
    pass


@dataclass(frozen=True)
class CompositionResult:
    interleaving: Behavior
    partition_e: tuple[Behavior, ...]
    partition_f: tuple[Behavior, ...]


@dataclass(frozen=True)
class EraDecomposition:
    """``prefix`` returns the queue to empty; ``eras[0]`` is the highest-indexed era.

    ``prefix + eras[0] + eras[1] + ...`` reconstructs the decomposed behavior.
    """

    prefix: Behavior
    eras: tuple[Behavior, ...]

    @property
    def max_index(self) -> int:
        return len(self.eras)

    def era(self, j: int) -> Behavior:
        """Era with index ``j`` (1 is the last segment); empty outside ``1..max_index``."""
        if 1 <= j <= len(self.eras):
            return self.eras[len(self.eras) - j]
        return ()


def _require_valid(kind: DataStructureKind, *behaviors: Sequence[Event]) -> None:
    for b in behaviors:
        try:
            run_behavior(kind, initial_state(kind), b)
        except (InvalidBehavior, ValueError) as exc:
            raise InvalidInput(f"not a valid {kind} behavior: {exc}") from exc


def _require_disjoint(e: Sequence[Event], f: Sequence[Event]) -> None:
    try:
        check_distinct_ids(list(e) + list(f))
    except ValueError as exc:
        raise InvalidInput(f"behaviors share event ids: {exc}") from exc


def _split_after_last(behavior: Sequence[Event], method: str) -> tuple[Behavior, Behavior]:
    cut = 0
    for i, ev in enumerate(behavior):
        if ev.method == method and ev.output is NULL:
            cut = i + 1
    return tuple(behavior[:cut]), tuple(behavior[cut:])


def _compose_at_empty_marker(kind, e, f, method) -> CompositionResult:
    _require_valid(kind, e, f)
    _require_disjoint(e, f)
    e1, e2 = _split_after_last(e, method)
    f1, f2 = _split_after_last(f, method)
    return CompositionResult(e1 + f1 + e2 + f2, (e1, e2), (f1, f2))


def compose_pool(e: Sequence[Event], f: Sequence[Event]) -> CompositionResult:
    """Split both behaviors after their last ``take(NULL)`` and interleave ``e1 f1 e2 f2``."""
    return _compose_at_empty_marker(POOL, e, f, "take")


def compose_stack(e: Sequence[Event], f: Sequence[Event]) -> CompositionResult:
    return _compose_at_empty_marker(STACK, e, f, "pop")


def _empty_prefix_length(behavior: Sequence[Event]) -> int:
    state: tuple = ()
    cut = 0
    for i, ev in enumerate(behavior):
        state = step(QUEUE, state, ev)
        if not state:
            cut = i + 1
    return cut


def era_decompose(e: Sequence[Event]) -> EraDecomposition:
    _require_valid(QUEUE, e)
    cut = _empty_prefix_length(e)
    prefix, rest = tuple(e[:cut]), tuple(e[cut:])

    # observer position of each enqueued value occurrence, FIFO-matched
    observer: dict[int, Optional[int]] = {}
    pending: list[int] = []
    for pos, ev in enumerate(rest):
        if ev.method == "enq":
            pending.append(pos)
            observer[pos] = None
        elif ev.output is not NULL:
            observer[pending.pop(0)] = pos

    eras: list[Behavior] = []
    # Era_0 is empty and conceptually sits past the end: unobserved enqueues start Era_1
    lo, hi = len(rest), len(rest)
    while lo > 0:
        starts = [
            p
            for p, obs in observer.items()
            if p < lo and (obs is None if not eras else lo <= obs < hi)
        ]
        if not starts:
            raise AssertionError(f"era decomposition stalled at position {lo}")
        start = min(starts)
        eras.append(rest[start:lo])
        lo, hi = start, lo
    eras.reverse()
    return EraDecomposition(prefix, tuple(eras))


def compose_queue(e: Sequence[Event], f: Sequence[Event]) -> CompositionResult:
    """``e1 f1 Era_J(e) Era_J(f) ... Era_1(e) Era_1(f)`` with ``J`` the larger era count."""
    _require_disjoint(e, f)
    de, df = era_decompose(e), era_decompose(f)
    top = max(de.max_index, df.max_index)
    part_e = (de.prefix,) + tuple(de.era(j) for j in range(top, 0, -1))
    part_f = (df.prefix,) + tuple(df.era(j) for j in range(top, 0, -1))
    interleaving = tuple(itertools.chain.from_iterable(a + b for a, b in zip(part_e, part_f)))
    return CompositionResult(interleaving, part_e, part_f)


def compose(kind: DataStructureKind, e: Sequence[Event], f: Sequence[Event]) -> CompositionResult:
    if kind is POOL:
        return compose_pool(e, f)
    if kind is STACK:
        return compose_stack(e, f)
    if kind is QUEUE:
        return compose_queue(e, f)
    raise UnsupportedKind(f"{kind} is not composable")


def interleavings(e: Sequence[Event], f: Sequence[Event]) -> Iterator[Behavior]:
    """All order-preserving merges of ``e`` and ``f``."""
    n, m = len(e), len(f)
    for slots in itertools.combinations(range(n + m), n):
        chosen = set(slots)
        ie, jf = iter(e), iter(f)
        yield tuple(next(ie) if p in chosen else next(jf) for p in range(n + m))


def valid_interleavings(kind: DataStructureKind, e: Sequence[Event], f: Sequence[Event]) -> list[Behavior]:
    return [b for b in interleavings(e, f) if is_valid_behavior(kind, b)]


def noncomposability_witness(kind: DataStructureKind) -> tuple[Behavior, Behavior]:
    if kind is POOL_MEM:
        e = (Event(1, "put", 1), Event(2, "mem", 2, 3))
        f = (Event(3, "put", 2), Event(4, "mem", 1, 2))
    elif kind is REGISTER:
        e = (Event(1, "wr1", 1), Event(2, "rd2", None, 0))
        f = (Event(3, "wr2", 1), Event(4, "rd1", None, 0))
    else:
        raise UnsupportedKind(f"{kind} is composable; no witness exists")
    return e, f


# -- robustness ---------------------------------------------------------------


def _runs_from_initial(kind: DataStructureKind, e: Sequence[Event]) -> bool:
    """Validity from the initial state; malformed input raises :class:`InvalidInput`."""
    try:
        run_behavior(kind, initial_state(kind), e)
    except InvalidBehavior:
        return False
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc
    return True


def is_robust(kind: DataStructureKind, e: Sequence[Event]) -> bool:
    """Whether ``e`` runs from every state of ``kind``.

    A sequence that fails from the initial state is not robust. Otherwise the
    closed forms are:

    * Queue: enqueues only.
    * Stack: no ``pop(NULL)`` (every pop then removes a locally pushed value).
    * Pool: no ``take(NULL)``.
    * PoolMem: as Pool, and an absent-form ``mem(x, x+1)`` only when the
      sequence itself took ``x`` after its last ``put(x)``.
    * Register: every ``rd_i`` comes after some ``wr_i``.
    """
    if not _runs_from_initial(kind, e):
        return False
    if kind is QUEUE:
        return all(ev.method == "enq" for ev in e)
    if kind is STACK:
        return not any(ev.method == "pop" and ev.output is NULL for ev in e)
    if kind in (POOL, POOL_MEM):
        # values known to be absent whatever the start state
        removed: set[int] = set()
        for ev in e:
            if ev.method == "put":
                removed.discard(ev.input)
            elif ev.method == "take":
                if ev.output is NULL:
                    return False
                removed.add(ev.output)
            elif ev.output != ev.input and ev.input not in removed:
                return False
        return True
    written: set[int] = set()
    for ev in e:
        index = register_index(ev.method)
        if ev.method.startswith("wr"):
            written.add(index)
        elif index not in written:
            return False
    return True


def not_robust(kind: DataStructureKind, e: Sequence[Event]) -> bool:
    return not is_robust(kind, e)


def event_alphabet(
    kind: DataStructureKind, values: Iterable[int], registers: Iterable[int] = (1, 2)
) -> list[Event]:
    """Every event of ``kind`` over ``values`` (ids are placeholders)."""
    values = list(values)
    out: list[Event] = []
    if kind is QUEUE:
        out += [Event(0, "enq", v) for v in values]
        out += [Event(0, "deq", None, v) for v in values] + [Event(0, "deq", None, NULL)]
    elif kind is STACK:
        out += [Event(0, "push", v) for v in values]
        out += [Event(0, "pop", None, v) for v in values] + [Event(0, "pop", None, NULL)]
    elif kind in (POOL, POOL_MEM):
        out += [Event(0, "put", v) for v in values]
        out += [Event(0, "take", None, v) for v in values] + [Event(0, "take", None, NULL)]
        if kind is POOL_MEM:
            out += [Event(0, "mem", v, v) for v in values]
            out += [Event(0, "mem", v, v + 1) for v in values]
    else:
        read_values = sorted(set(values) | {0})
        for i in registers:
            out += [Event(0, f"wr{i}", v) for v in values]
            out += [Event(0, f"rd{i}", None, v) for v in read_values]
    return out


def reachable_states(
    kind: DataStructureKind,
    values: Iterable[int] = (1, 2, 3, 4),
    depth: int = 4,
    registers: Iterable[int] = (1, 2),
) -> list[DsState]:
    """States reachable from the initial state in at most ``depth`` steps."""
    alphabet = event_alphabet(kind, values, registers)
    frontier = [initial_state(kind)]
    seen = {frontier[0]}
    for _ in range(depth):
        nxt = []
        for state in frontier:
            for ev in alphabet:
                succ = step(kind, state, ev)
                if succ is not None and succ not in seen:
                    seen.add(succ)
                    nxt.append(succ)
        frontier = nxt
    return list(seen)


def is_robust_sampled(
    kind: DataStructureKind, e: Sequence[Event], states: Optional[Iterable[DsState]] = None
) -> bool:
    """Oracle: ``e`` is executable from every state of a finite family."""
    _runs_from_initial(kind, e)
    if states is None:
        states = reachable_states(kind)
    return all(runs_from(kind, q, e) for q in states)


def valid_behaviors(
    kind: DataStructureKind,
    max_len: int,
    values: Iterable[int] = (1, 2, 3, 4),
    registers: Iterable[int] = (1, 2),
) -> Iterator[Behavior]:
    """Every valid behavior of length ``<= max_len`` over the alphabet, ids 1, 2, ..."""
    alphabet = event_alphabet(kind, values, registers)

    def grow(prefix: list[Event], state) -> Iterator[Behavior]:
        yield tuple(prefix)
        if len(prefix) == max_len:
            return
        for ev in alphabet:
            succ = step(kind, state, ev)
            if succ is not None:
                prefix.append(Event(len(prefix) + 1, ev.method, ev.input, ev.output))
                yield from grow(prefix, succ)
                prefix.pop()

    yield from grow([], initial_state(kind))


def worked_example_pair() -> tuple[Behavior, Behavior]:
    """Two queue behaviors whose composition exercises prefixes and four eras.

    ``e`` uses ids 1-9 and ``f`` ids 10-17.
    """
    e_ops = [("enq", 1), ("enq", 2), ("deq", 1), ("enq", 3), ("deq", 2),
             ("enq", 4), ("enq", 5), ("deq", 3), ("deq", 4)]
    f_ops = [("enq", 6), ("deq", 6), ("enq", 7), ("enq", 8), ("deq", 7),
             ("enq", 9), ("enq", 10), ("deq", 8)]

    def build(ops, first):
        return tuple(
            Event(first + i, m, v, None) if m == "enq" else Event(first + i, m, None, v)
            for i, (m, v) in enumerate(ops)
        )

    return build(e_ops, 1), build(f_ops, 10)
