"""Consistency checking for concurrent pools, queues, stacks and registers.

Sequential semantics, threaded histories, linearizability / sequential
consistency / k-serial checkers, composition and robustness analysis, and a
deterministic harness driving deliberately weak implementations.
"""

from kserial.semantics import (
    NULL,
    DataStructureKind,
    Event,
    InvalidBehavior,
    initial_state,
    is_valid_behavior,
    run_behavior,
    step,
)
from kserial.histories import (
    Action,
    ActionKind,
    MalformedHistory,
    ThreadedAction,
    ThreadedHistory,
)
from kserial.checkers import (
    KBound,
    TooLarge,
    Verdict,
    check_k_serial,
    check_linearizable,
    check_sequentially_consistent,
)

__all__ = [
    "NULL",
    "Action",
    "ActionKind",
    "DataStructureKind",
    "Event",
    "InvalidBehavior",
    "KBound",
    "MalformedHistory",
    "ThreadedAction",
    "ThreadedHistory",
    "TooLarge",
    "Verdict",
    "check_k_serial",
    "check_linearizable",
    "check_sequentially_consistent",
    "initial_state",
    "is_valid_behavior",
    "run_behavior",
    "step",
]
