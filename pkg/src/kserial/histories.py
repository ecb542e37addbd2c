"""Invocation/response actions and threaded histories."""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

from kserial.semantics import Behavior, Event, Value


class ActionKind(enum.Enum):
    INV = "inv"
    RES = "res"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Action:
    event_id: int
    kind: ActionKind
    method: str
    payload: Value = None


@dataclass(frozen=True)
class ThreadedAction:
    thread: int
    action: Action


class MalformedReason(enum.Enum):
    WELL_FORMEDNESS = "WellFormedness"
    COMPLETENESS = "Completeness"
    THREAD_SEQUENTIALITY = "ThreadSequentiality"

    def __str__(self) -> str:
        return self.value


class MalformedHistory(ValueError):
    def __init__(self, reason: MalformedReason, position: int, detail: str = ""):
        message = f"{reason} violated at action {position}"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.reason = reason
        self.position = position


class NotSequential(ValueError):
    pass


def derive_actions(event: Event) -> tuple[Action, Action]:
    """Split an event into its matching invocation and response."""
    return (
        Action(event.id, ActionKind.INV, event.method, event.input),
        Action(event.id, ActionKind.RES, event.method, event.output),
    )


@dataclass(frozen=True)
class ThreadedHistory:
    actions: tuple[ThreadedAction, ...] = ()

    def __post_init__(self):
        if not isinstance(self.actions, tuple):
            object.__setattr__(self, "actions", tuple(self.actions))

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    @cached_property
    def _index(self) -> tuple[dict[int, int], dict[int, int], dict[int, int]]:
        inv_pos: dict[int, int] = {}
        res_pos: dict[int, int] = {}
        thread_of: dict[int, int] = {}
        for pos, ta in enumerate(self.actions):
            a = ta.action
            if a.kind is ActionKind.INV:
                inv_pos.setdefault(a.event_id, pos)
                thread_of.setdefault(a.event_id, ta.thread)
            else:
                res_pos.setdefault(a.event_id, pos)
        return inv_pos, res_pos, thread_of

    def inv_position(self, event_id: int) -> int:
        return self._index[0][event_id]

    def res_position(self, event_id: int) -> int:
        return self._index[1][event_id]

    def thread_of(self, event_id: int) -> int:
        return self._index[2][event_id]

    @property
    def threads(self) -> list[int]:
        """Thread ids in order of first appearance."""
        return list(dict.fromkeys(ta.thread for ta in self.actions))

    @cached_property
    def completed_events(self) -> tuple[Event, ...]:
        """Completed events, in invocation order."""
        responses = {
            ta.action.event_id: ta.action
            for ta in self.actions
            if ta.action.kind is ActionKind.RES
        }
        events = []
        for ta in self.actions:
            a = ta.action
            if a.kind is ActionKind.INV and a.event_id in responses:
                events.append(Event(a.event_id, a.method, a.payload, responses[a.event_id].payload))
        return tuple(events)

    def events_of(self, thread: int) -> tuple[Event, ...]:
        """``h(t)``: the completed events of ``thread`` in program order."""
        return tuple(e for e in self.completed_events if self.thread_of(e.id) == thread)

    @classmethod
    def from_behavior(cls, behavior: Iterable[Event], thread: int = 0) -> "ThreadedHistory":
        """Sequential single-thread history performing ``behavior``."""
        actions = []
        for event in behavior:
            inv, res = derive_actions(event)
            actions += [ThreadedAction(thread, inv), ThreadedAction(thread, res)]
        return cls(tuple(actions))

    @classmethod
    def sequential(cls, steps: Iterable[tuple[int, Event]]) -> "ThreadedHistory":
        """Sequential history from ``(thread, event)`` pairs, each call run to completion."""
        actions = []
        for thread, event in steps:
            inv, res = derive_actions(event)
            actions += [ThreadedAction(thread, inv), ThreadedAction(thread, res)]
        return cls(tuple(actions))


def validate_history(h: ThreadedHistory) -> None:
    """Raise :class:`MalformedHistory` unless ``h`` is well-formed, complete and
    sequential per thread. Checks run left to right, so the reported position
    is the first offending action."""
    invoked: dict[int, tuple[int, str]] = {}
    responded: set[int] = set()
    open_call: dict[int, int] = {}
    for pos, ta in enumerate(h.actions):
        a = ta.action
        if a.kind is ActionKind.INV:
            if a.event_id in invoked:
                raise MalformedHistory(
                    MalformedReason.WELL_FORMEDNESS, pos, f"event {a.event_id} invoked twice"
                )
            if ta.thread in open_call:
                raise MalformedHistory(
                    MalformedReason.THREAD_SEQUENTIALITY,
                    pos,
                    f"thread {ta.thread} still has event {open_call[ta.thread]} open",
                )
            invoked[a.event_id] = (pos, a.method)
            open_call[ta.thread] = a.event_id
            continue
        if a.event_id not in invoked or a.event_id in responded:
            raise MalformedHistory(
                MalformedReason.WELL_FORMEDNESS,
                pos,
                f"response of event {a.event_id} without a preceding invocation",
            )
        if invoked[a.event_id][1] != a.method:
            raise MalformedHistory(
                MalformedReason.WELL_FORMEDNESS,
                pos,
                f"response method {a.method!r} does not match invocation",
            )
        if open_call.get(ta.thread) != a.event_id:
            raise MalformedHistory(
                MalformedReason.THREAD_SEQUENTIALITY,
                pos,
                f"thread {ta.thread} responds to event {a.event_id} it did not invoke",
            )
        del open_call[ta.thread]
        responded.add(a.event_id)
    pending = [pos for eid, (pos, _) in invoked.items() if eid not in responded]
    if pending:
        raise MalformedHistory(MalformedReason.COMPLETENESS, min(pending), "invocation never returns")


def is_valid_history(h: ThreadedHistory) -> bool:
    try:
        validate_history(h)
    except MalformedHistory:
        return False
    return True


def project_thread(h: ThreadedHistory, thread: int) -> ThreadedHistory:
    return ThreadedHistory(tuple(ta for ta in h.actions if ta.thread == thread))


def remove_thread(h: ThreadedHistory, thread: int) -> ThreadedHistory:
    """Everything except ``thread``'s actions (complement of :func:`project_thread`)."""
    return ThreadedHistory(tuple(ta for ta in h.actions if ta.thread != thread))


def precedes(h: ThreadedHistory, e: int, e2: int) -> bool:
    """Real-time order: the response of ``e`` occurs before the invocation of ``e2``."""
    return h.res_position(e) < h.inv_position(e2)


def to_behavior(h: ThreadedHistory) -> Behavior:
    acts = h.actions
    if len(acts) % 2:
        raise NotSequential("odd number of actions")
    events = []
    for i in range(0, len(acts), 2):
        inv, res = acts[i].action, acts[i + 1].action
        if (
            inv.kind is not ActionKind.INV
            or res.kind is not ActionKind.RES
            or inv.event_id != res.event_id
        ):
            raise NotSequential(f"invocation at {i} is not immediately followed by its response")
        events.append(Event(inv.event_id, inv.method, inv.payload, res.payload))
    return tuple(events)


def interleave(parts: Sequence[ThreadedHistory], order: Sequence[int]) -> ThreadedHistory:
    """Merge histories by drawing the next action from ``parts[order[k]]``."""
    cursors = [0] * len(parts)
    actions = []
    for which in order:
        actions.append(parts[which].actions[cursors[which]])
        cursors[which] += 1
    return ThreadedHistory(tuple(actions))
