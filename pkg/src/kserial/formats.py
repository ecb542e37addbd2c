"""Line-oriented text formats.

Behavior file, one event per line::

    <id> <method> <input> <output>

Trace file, one threaded action per line::

    <thread> <event_id> inv|res <method> <payload>

Workload script, one call per line, threads numbered from 0::

    <thread>: <method> [<input>]

Values are naturals, ``NULL``, or ``-`` for an unused slot. Blank lines and
lines starting with ``#`` are ignored; workload headers ``# kind: Queue``,
``# seed: 7`` and ``# distinct: true`` carry metadata.
"""

from __future__ import annotations

from collections.abc import Iterable

from kserial.histories import Action, ActionKind, ThreadedAction, ThreadedHistory
from kserial.semantics import NULL, Behavior, DataStructureKind, Event, Value
from kserial.harness import Workload


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def format_value(value: Value) -> str:
    if value is None:
        return "-"
    if value is NULL:
        return "NULL"
    return str(value)


def parse_value(token: str, line_no: int = 0) -> Value:
    if token == "-":
        return None
    if token == "NULL":
        return NULL
    if token.isdigit():
        return int(token)
    raise ParseError(line_no, f"bad value {token!r}")


def _parse_int(token: str, line_no: int, what: str) -> int:
    if not token.isdigit():
        raise ParseError(line_no, f"bad {what} {token!r}")
    return int(token)


def _content_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line_no, line


def dump_behavior(behavior: Iterable[Event]) -> str:
    return "".join(
        f"{e.id} {e.method} {format_value(e.input)} {format_value(e.output)}\n" for e in behavior
    )


def parse_behavior(text: str) -> Behavior:
    events = []
    seen = set()
    for line_no, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(line_no, "expected 'id method input output'")
        eid = _parse_int(parts[0], line_no, "event id")
        if eid in seen:
            raise ParseError(line_no, f"duplicate event id {eid}")
        seen.add(eid)
        events.append(
            Event(eid, parts[1], parse_value(parts[2], line_no), parse_value(parts[3], line_no))
        )
    return tuple(events)


def dump_trace(h: ThreadedHistory) -> str:
    return "".join(
        f"{ta.thread} {ta.action.event_id} {ta.action.kind} {ta.action.method} "
        f"{format_value(ta.action.payload)}\n"
        for ta in h.actions
    )


def parse_trace(text: str) -> ThreadedHistory:
    actions = []
    for line_no, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 5:
            raise ParseError(line_no, "expected 'thread event_id kind method payload'")
        thread = _parse_int(parts[0], line_no, "thread id")
        eid = _parse_int(parts[1], line_no, "event id")
        try:
            kind = ActionKind(parts[2])
        except ValueError:
            raise ParseError(line_no, f"action kind must be inv or res, got {parts[2]!r}") from None
        actions.append(ThreadedAction(thread, Action(eid, kind, parts[3], parse_value(parts[4], line_no))))
    return ThreadedHistory(tuple(actions))


def dump_workload(w: Workload) -> str:
    lines = [
        f"# kind: {w.kind}",
        f"# seed: {w.seed}",
        f"# distinct: {'true' if w.distinct_values else 'false'}",
    ]
    for t, script in enumerate(w.scripts):
        for method, inp in script:
            lines.append(f"{t}: {method} {format_value(inp)}")
    return "\n".join(lines) + "\n"


def parse_workload(text: str, kind: DataStructureKind | None = None) -> Workload:
    meta: dict[str, str] = {}
    calls: dict[int, list] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                meta[key.strip().lower()] = value.strip()
            continue
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(line_no, "expected 'thread: method input'")
        thread = _parse_int(head.strip(), line_no, "thread id")
        parts = rest.split()
        if not 1 <= len(parts) <= 2:
            raise ParseError(line_no, "expected 'thread: method input'")
        inp = parse_value(parts[1], line_no) if len(parts) == 2 else None
        calls.setdefault(thread, []).append((parts[0], inp))
    if kind is None:
        if "kind" not in meta:
            raise ParseError(0, "workload has no '# kind:' header and no kind was given")
        kind = DataStructureKind.parse(meta["kind"])
    threads = max(calls, default=-1) + 1
    scripts = tuple(tuple(calls.get(t, ())) for t in range(threads))
    seed = int(meta.get("seed", "0"))
    distinct = meta.get("distinct", "false").lower() == "true"
    try:
        return Workload(kind, scripts, seed, distinct)
    except ValueError as exc:
        raise ParseError(0, str(exc)) from exc
