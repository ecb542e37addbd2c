"""Sequential semantics of the five data structures as labelled transition systems.

Every kind has a deterministic transition function: given a state and an
event, :func:`step` returns the successor state or ``None`` when the event is
not enabled. States are immutable and hashable so they can be used as
memoization keys by the checkers.

Value conventions:

* naturals are plain ``int`` values ``>= 0``;
* :data:`NULL` is the distinguished null value (``deq`` on an empty queue);
* ``None`` marks an unused argument slot.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

#: Largest natural accepted by the runtime value domain (inclusive).
MAX_VALUE = 255


class Null(enum.Enum):
    NULL = "NULL"

    def __repr__(self) -> str:
        return "NULL"

    __str__ = __repr__


NULL = Null.NULL

Value = Union[int, Null, None]


class DataStructureKind(enum.Enum):
    POOL = "Pool"
    POOL_MEM = "PoolMem"
    QUEUE = "Queue"
    STACK = "Stack"
    REGISTER = "Register"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "DataStructureKind":
        key = name.strip().lower().replace("_", "").replace("-", "")
        for kind in cls:
            if kind.value.lower() == key or kind.name.replace("_", "").lower() == key:
                return kind
        raise ValueError(f"unknown data structure kind: {name!r}")

    def has_method(self, method: str) -> bool:
        if self is DataStructureKind.REGISTER:
            return register_index(method) is not None
        return method in _ALPHABETS[self]

    @property
    def base_methods(self) -> tuple[str, ...]:
        """Method names of the kind; registers report the ``wr``/``rd`` families."""
        if self is DataStructureKind.REGISTER:
            return ("wr", "rd")
        return _ALPHABETS[self]


_ALPHABETS = {
    DataStructureKind.POOL: ("put", "take"),
    DataStructureKind.POOL_MEM: ("put", "take", "mem"),
    DataStructureKind.QUEUE: ("enq", "deq"),
    DataStructureKind.STACK: ("push", "pop"),
}

#: Methods whose event carries an input argument.
INPUT_METHODS = frozenset({"put", "enq", "push", "wr", "mem"})
#: Methods whose event carries an output argument.
OUTPUT_METHODS = frozenset({"take", "deq", "pop", "rd", "mem"})

_REGISTER_METHOD = re.compile(r"^(wr|rd)(\d+)$")


@lru_cache(maxsize=None)
def register_index(method: str) -> Optional[int]:
    """Index ``i`` of a ``wr<i>``/``rd<i>`` method name, ``None`` for anything else."""
    match = _REGISTER_METHOD.match(method)
    return int(match.group(2)) if match else None


@lru_cache(maxsize=None)
def method_family(method: str) -> str:
    """``wr3`` -> ``wr``; every other method name is its own family."""
    if register_index(method) is not None:
        return method[:2]
    return method


def takes_input(method: str) -> bool:
    return method_family(method) in INPUT_METHODS


def gives_output(method: str) -> bool:
    return method_family(method) in OUTPUT_METHODS


def is_natural(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


@dataclass(frozen=True)
class Event:
    """One completed method application ``(id, method, input, output)``."""

    id: int
    method: str
    input: Value = None
    output: Value = None

    def describe(self) -> str:
        """Compact form without the id, e.g. ``enq(1)``, ``deq(NULL)``, ``mem(2,3)``."""
        args = [str(v) for v in (self.input, self.output) if v is not None]
        return f"{self.method}({','.join(args)})"

    def __str__(self) -> str:
        return f"{self.describe()}#{self.id}"


Behavior = tuple[Event, ...]


class RegisterBank:
    """Immutable register state: a map from index to value, 0 everywhere else."""

    __slots__ = ("_cells", "_hash")

    def __init__(self, cells: Optional[dict[int, int]] = None):
        self._cells = {i: v for i, v in (cells or {}).items() if v != 0}
        self._hash = hash(frozenset(self._cells.items()))

    def get(self, index: int) -> int:
        return self._cells.get(index, 0)

    def set(self, index: int, value: int) -> "RegisterBank":
        cells = dict(self._cells)
        cells[index] = value
        return RegisterBank(cells)

    def items(self) -> list[tuple[int, int]]:
        """Non-zero cells, sorted by index."""
        return sorted(self._cells.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegisterBank):
            return NotImplemented
        return self._cells == other._cells

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {v}" for i, v in self.items())
        return f"RegisterBank({{{inner}}})"


DsState = Union[frozenset, tuple, RegisterBank]


class InvalidBehavior(ValueError):
    """Raised by :func:`run_behavior` at the first event that is not enabled."""

    def __init__(self, index: int, event: Event):
        super().__init__(f"event {event} at position {index} is not enabled")
        self.index = index
        self.event = event


def initial_state(kind: DataStructureKind) -> DsState:
    if kind in (DataStructureKind.POOL, DataStructureKind.POOL_MEM):
        return frozenset()
    if kind in (DataStructureKind.QUEUE, DataStructureKind.STACK):
        return ()
    return RegisterBank()


def _step_pool(state: frozenset, method: str, x: Value, y: Value) -> Optional[frozenset]:
    if method == "put":
        if not is_natural(x) or y is not None:
            return None
        return state | {x}
    if method == "take":
        if x is not None:
            return None
        if y is NULL:
            return state if not state else None
        if y in state:
            return state - {y}
        return None
    # mem(x, y): y == x means present, y == x + 1 means absent.
    if not is_natural(x) or not is_natural(y):
        return None
    if (y == x and x in state) or (y == x + 1 and x not in state):
        return state
    return None


def _step_queue(state: tuple, method: str, x: Value, y: Value) -> Optional[tuple]:
    if method == "enq":
        if not is_natural(x) or y is not None:
            return None
        return state + (x,)
    if x is not None:
        return None
    if y is NULL:
        return state if not state else None
    if state and state[0] == y:
        return state[1:]
    return None


def _step_stack(state: tuple, method: str, x: Value, y: Value) -> Optional[tuple]:
    if method == "push":
        if not is_natural(x) or y is not None:
            return None
        return state + (x,)
    if x is not None:
        return None
    if y is NULL:
        return state if not state else None
    if state and state[-1] == y:
        return state[:-1]
    return None


def _step_register(state: RegisterBank, method: str, x: Value, y: Value) -> Optional[RegisterBank]:
    index = register_index(method)
    if method.startswith("wr"):
        if not is_natural(x) or y is not None:
            return None
        return state.set(index, x)
    if x is not None or not is_natural(y):
        return None
    return state if state.get(index) == y else None


def step(kind: DataStructureKind, state: DsState, event: Event) -> Optional[DsState]:
    """Successor of ``state`` under ``event``; ``None`` when the event is not enabled.

    Raises ``ValueError`` when the method is outside the kind's alphabet.
    """
    method = event.method
    if not kind.has_method(method):
        raise ValueError(f"method {method!r} is not in the alphabet of {kind}")
    if kind is DataStructureKind.QUEUE:
        return _step_queue(state, method, event.input, event.output)
    if kind is DataStructureKind.STACK:
        return _step_stack(state, method, event.input, event.output)
    if kind is DataStructureKind.REGISTER:
        return _step_register(state, method, event.input, event.output)
    return _step_pool(state, method, event.input, event.output)


def check_distinct_ids(events: Iterable[Event]) -> None:
    seen: set[int] = set()
    for event in events:
        if event.id in seen:
            raise ValueError(f"duplicate event id {event.id}")
        seen.add(event.id)


def run_behavior(kind: DataStructureKind, start: DsState, behavior: Sequence[Event]) -> DsState:
    """Fold :func:`step` over ``behavior`` from ``start``.

    Raises :class:`InvalidBehavior` carrying the index of the first event that
    is not enabled.
    """
    check_distinct_ids(behavior)
    state = start
    for index, event in enumerate(behavior):
        nxt = step(kind, state, event)
        if nxt is None:
            raise InvalidBehavior(index, event)
        state = nxt
    return state


def is_valid_behavior(kind: DataStructureKind, behavior: Sequence[Event]) -> bool:
    try:
        run_behavior(kind, initial_state(kind), behavior)
    except InvalidBehavior:
        return False
    return True


def runs_from(kind: DataStructureKind, start: DsState, behavior: Sequence[Event]) -> bool:
    """Whether ``behavior`` is executable starting at ``start`` (ids not rechecked)."""
    state = start
    for event in behavior:
        state = step(kind, state, event)
        if state is None:
            return False
    return True


def behavior_from(kind: DataStructureKind, calls: Iterable[tuple], first_id: int = 1) -> Behavior:
    """Build a behavior from compact ``(method, input, output)`` triples.

    Handy for fixtures: ``behavior_from(QUEUE, [("enq", 1, None), ("deq", None, 1)])``.
    The result is not validated against the semantics.
    """
    events = []
    for offset, (method, inp, out) in enumerate(calls):
        if not kind.has_method(method):
            raise ValueError(f"method {method!r} is not in the alphabet of {kind}")
        events.append(Event(first_id + offset, method, inp, out))
    return tuple(events)


def describe(behavior: Iterable[Event]) -> str:
    """Dot-joined compact rendering, e.g. ``enq(1)·deq(1)``."""
    return "·".join(e.describe() for e in behavior)
