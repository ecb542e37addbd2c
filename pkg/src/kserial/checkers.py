"""Linearizability, sequential consistency and k-serial checkers.

All three conditions ask for a serialization of the history's events that is
a valid behavior and respects some precedence constraints:

* linearizability: real-time order ``e ≺ e'`` (response before invocation);
* sequential consistency: program order of each thread only;
* k-serial: program order plus, whenever the i-th event of thread ``t``
  precedes ``e`` in real time, every event of ``t`` with index ``<= i - k``
  must be serialized before ``e``.

Each reduces to a precedence graph over events, so a single depth-first
search with memoization on ``(scheduled set, data structure state)`` decides
all of them. Candidates are tried in increasing event-id order; the first
witness found is therefore the lexicographically least one.

The brute-force oracle below enumerates permutations and checks each
definition literally. It shares nothing with the search beyond the
transition function.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Optional, Union

from kserial.histories import ThreadedHistory, precedes, validate_history
from kserial.semantics import (
    Behavior,
    DataStructureKind,
    Event,
    initial_state,
    is_valid_behavior,
    step,
)

DEFAULT_CAP = 14
ORACLE_CAP = 8


class TooLarge(ValueError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"history has {size} events, above the cap of {cap}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class KBound:
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError(f"k must be a natural number, got {self.k!r}")


@dataclass(frozen=True)
class Verdict:
    condition: str
    holds: bool
    witness: Optional[Behavior] = None
    checked_nodes: int = 0


class Constraint(enum.Enum):
    REAL_TIME = "RealTime"
    PER_THREAD = "PerThreadOnly"


def _as_k(bound: Union[KBound, int]) -> int:
    return bound.k if isinstance(bound, KBound) else KBound(bound).k


def _events_by_id(h: ThreadedHistory) -> list[Event]:
    return sorted(h.completed_events, key=lambda e: e.id)


def _prepare(h: ThreadedHistory, cap: int) -> list[Event]:
    validate_history(h)
    events = _events_by_id(h)
    if len(events) > cap:
        raise TooLarge(len(events), cap)
    return events


def _program_order_preds(h: ThreadedHistory, events: list[Event]) -> list[int]:
    index = {e.id: i for i, e in enumerate(events)}
    preds = [0] * len(events)
    for thread in h.threads:
        own = h.events_of(thread)
        for prev, cur in zip(own, own[1:]):
            preds[index[cur.id]] |= 1 << index[prev.id]
    return preds


def _real_time_preds(h: ThreadedHistory, events: list[Event]) -> list[int]:
    preds = [0] * len(events)
    for i, e in enumerate(events):
        for j, other in enumerate(events):
            if i != j and precedes(h, other.id, e.id):
                preds[i] |= 1 << j
    return preds


def _k_serial_preds(h: ThreadedHistory, events: list[Event], k: int) -> list[int]:
    index = {e.id: i for i, e in enumerate(events)}
    preds = _program_order_preds(h, events)
    for i, e in enumerate(events):
        for thread in h.threads:
            own = h.events_of(thread)
            # latest 1-based position of an event of `thread` that finishes before e starts
            latest = 0
            for pos, other in enumerate(own, start=1):
                if precedes(h, other.id, e.id):
                    latest = pos
            cutoff = latest - k
            if cutoff >= 1 and own[cutoff - 1].id != e.id:
                # program order makes every earlier event of `thread` follow too
                preds[i] |= 1 << index[own[cutoff - 1].id]
    return preds


def _search(
    kind: DataStructureKind, events: list[Event], preds: list[int]
) -> tuple[Optional[Behavior], int]:
    n = len(events)
    full = (1 << n) - 1
    dead: set = set()
    order: list[int] = []
    nodes = 0

    def extend(mask: int, state) -> bool:
        nonlocal nodes
        nodes += 1
        if mask == full:
            return True
        key = (mask, state)
        if key in dead:
            return False
        for i in range(n):
            bit = 1 << i
            if mask & bit or preds[i] & ~mask:
                continue
            nxt = step(kind, state, events[i])
            if nxt is None:
                continue
            order.append(i)
            if extend(mask | bit, nxt):
                return True
            order.pop()
        dead.add(key)
        return False

    if extend(0, initial_state(kind)):
        return tuple(events[i] for i in order), nodes
    return None, nodes


def _certify(kind: DataStructureKind, witness: Behavior, events: list[Event], preds: list[int]):
    """Re-check a witness independently of the search that produced it."""
    position = {e.id: p for p, e in enumerate(witness)}
    if sorted(position) != sorted(e.id for e in events):
        raise AssertionError("witness is not a permutation of the history's events")
    if not is_valid_behavior(kind, witness):
        raise AssertionError("witness is not a valid behavior")
    for i, e in enumerate(events):
        for j, other in enumerate(events):
            if preds[i] >> j & 1 and position[other.id] > position[e.id]:
                raise AssertionError(f"witness orders {e} before required predecessor {other}")


def _decide(kind, h, condition, make_preds, cap) -> Verdict:
    events = _prepare(h, cap)
    preds = make_preds(h, events)
    witness, nodes = _search(kind, events, preds)
    if witness is not None:
        _certify(kind, witness, events, preds)
    return Verdict(condition, witness is not None, witness, nodes)


def check_linearizable(kind: DataStructureKind, h: ThreadedHistory, cap: int = DEFAULT_CAP) -> Verdict:
    return _decide(kind, h, "linearizable", _real_time_preds, cap)


def check_sequentially_consistent(
    kind: DataStructureKind, h: ThreadedHistory, cap: int = DEFAULT_CAP
) -> Verdict:
    return _decide(kind, h, "sequentially-consistent", _program_order_preds, cap)


def check_k_serial(
    kind: DataStructureKind, h: ThreadedHistory, bound: Union[KBound, int], cap: int = DEFAULT_CAP
) -> Verdict:
    """``e`` in the k-serial condition ranges over every event of the history,
    including other threads' events; same-thread pairs add nothing beyond
    program order."""
    k = _as_k(bound)
    return _decide(kind, h, f"{k}-serial", lambda hh, ev: _k_serial_preds(hh, ev, k), cap)


def check(
    kind: DataStructureKind,
    h: ThreadedHistory,
    condition: str,
    k: Optional[int] = None,
    cap: int = DEFAULT_CAP,
) -> Verdict:
    """Dispatch on a condition name: ``lin``, ``sc`` or ``ksc``."""
    if condition == "lin":
        return check_linearizable(kind, h, cap)
    if condition == "sc":
        return check_sequentially_consistent(kind, h, cap)
    if condition == "ksc":
        if k is None:
            raise ValueError("condition 'ksc' needs a bound k")
        return check_k_serial(kind, h, k, cap)
    raise ValueError(f"unknown condition {condition!r}")


# -- brute-force oracle -------------------------------------------------------


def _respects(h: ThreadedHistory, order: Sequence[Event], constraint) -> bool:
    position = {e.id: p for p, e in enumerate(order)}
    for thread in h.threads:
        own = h.events_of(thread)
        if any(position[a.id] > position[b.id] for a, b in zip(own, own[1:])):
            return False
    if constraint is Constraint.PER_THREAD:
        return True
    if constraint is Constraint.REAL_TIME:
        return all(
            position[a.id] < position[b.id]
            for a in order
            for b in order
            if a.id != b.id and precedes(h, a.id, b.id)
        )
    k = _as_k(constraint)
    # i-th event e2 of thread t precedes e  =>  h(t)(j) before e in s, for all j <= i - k
    for thread in h.threads:
        own = h.events_of(thread)
        for i, e2 in enumerate(own, start=1):
            for e in order:
                if not precedes(h, e2.id, e.id):
                    continue
                for j in range(1, i - k + 1):
                    if position[own[j - 1].id] >= position[e.id] and own[j - 1].id != e.id:
                        return False
    return True


def candidate_orders(
    h: ThreadedHistory, constraint: Union[Constraint, KBound, int], cap: int = ORACLE_CAP
) -> Iterator[Behavior]:
    """Every permutation of the events satisfying ``constraint``, in lexicographic id order."""
    events = _prepare(h, cap)
    for perm in itertools.permutations(events):
        if _respects(h, perm, constraint):
            yield perm


def brute_force_serializations(
    kind: DataStructureKind,
    h: ThreadedHistory,
    constraint: Union[Constraint, KBound, int],
    cap: int = ORACLE_CAP,
) -> Iterator[Behavior]:
    """Constraint-respecting permutations that are valid behaviors.

    ``constraint`` is :attr:`Constraint.REAL_TIME` (linearizations),
    :attr:`Constraint.PER_THREAD` (SC serializations) or a k bound.
    """
    for order in candidate_orders(h, constraint, cap):
        if is_valid_behavior(kind, order):
            yield order


def oracle_verdict(
    kind: DataStructureKind,
    h: ThreadedHistory,
    constraint: Union[Constraint, KBound, int],
    cap: int = ORACLE_CAP,
) -> bool:
    return next(brute_force_serializations(kind, h, constraint, cap), None) is not None
