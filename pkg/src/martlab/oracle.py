"""Desk-scale counting oracles: witness relations evaluated by enumeration.

A :class:`WitnessRelation` stands in for a nondeterministic machine: its
computation paths are the full witness cube of a declared length, and the
three counting modes read off the accepting-path count, the number of
distinct emitted outputs, and the accepting-minus-rejecting gap.

Enumeration is exhaustive and capped (default 22 witness bits) so every
count stays exact and fast.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable

from .cantor import BitString
from .errors import CapExceeded, SpanModeUnavailable, UniquenessViolation

__all__ = [
    "CountMode",
    "WitnessRelation",
    "DEFAULT_WITNESS_CAP",
    "count",
    "decide_unique",
    "explicit_set_relation",
    "sat_relation",
]

DEFAULT_WITNESS_CAP = 22


class CountMode(enum.Enum):
    WITNESS_COUNT = "witness-count"
    DISTINCT_OUTPUT_COUNT = "distinct-output-count"
    ACCEPT_MINUS_REJECT = "accept-minus-reject"


@dataclass(frozen=True)
class WitnessRelation:
    """A finitely described witness relation.

    ``witness_length`` maps input length to the witness-cube width;
    ``verify`` must be deterministic and total on its domain.  ``emit`` is
    only needed for distinct-output counting.
    """

    name: str
    witness_length: Callable[[int], int]
    verify: Callable[[BitString, BitString], bool]
    emit: Callable[[BitString, BitString], BitString] | None = None


def _witness_cube(rel: WitnessRelation, x: BitString, cap: int) -> tuple[int, range]:
    k = rel.witness_length(len(x))
    if k < 0:
        raise ValueError(f"{rel.name}: negative witness length {k}")
    if k > cap:
        raise CapExceeded(
            f"{rel.name}: witness length {k} exceeds cap {cap} on |x|={len(x)}"
        )
    return k, range(1 << k)


def count(
    rel: WitnessRelation,
    mode: CountMode,
    x: BitString,
    cap: int = DEFAULT_WITNESS_CAP,
) -> int:
    """Exact count over the witness cube in the requested mode.

    Only ACCEPT_MINUS_REJECT may return a negative number.
    """
    k, cube = _witness_cube(rel, x, cap)
    if mode is CountMode.DISTINCT_OUTPUT_COUNT and rel.emit is None:
        raise SpanModeUnavailable(f"{rel.name} has no emit map")

    accepts = 0
    outputs: set[BitString] = set()
    for v in cube:
        y = BitString.from_int(v, k)
        if rel.verify(x, y):
            accepts += 1
            if mode is CountMode.DISTINCT_OUTPUT_COUNT:
                outputs.add(rel.emit(x, y))

    if mode is CountMode.WITNESS_COUNT:
        return accepts
    if mode is CountMode.DISTINCT_OUTPUT_COUNT:
        return len(outputs)
    return 2 * accepts - (1 << k)


def decide_unique(
    rel: WitnessRelation, x: BitString, cap: int = DEFAULT_WITNESS_CAP
) -> bool:
    """Accept iff exactly one witness; reject iff none.

    More than one witness means the relation is not a valid unique-witness
    stand-in, which is an error rather than an answer.
    """
    c = count(rel, CountMode.WITNESS_COUNT, x, cap)
    if c > 1:
        raise UniquenessViolation(f"{rel.name}: {c} witnesses on {x!r}")
    return c == 1


def explicit_set_relation(
    name: str, members: Iterable[BitString | str]
) -> WitnessRelation:
    """Membership in an explicit finite set, with the empty witness.

    The witness cube has width zero, so each member has exactly one
    accepting path; this is a valid unique-witness relation.
    """
    member_set = frozenset(
        m if isinstance(m, BitString) else BitString(m) for m in members
    )
    return WitnessRelation(
        name=name,
        witness_length=lambda n: 0,
        verify=lambda x, y: x in member_set,
        emit=lambda x, y: x,
    )


def sat_relation(num_vars: int) -> WitnessRelation:
    """Satisfying assignments of the formula a truth table encodes.

    The input ``x`` is a ``2**num_vars``-bit truth table; a witness ``y``
    assigns the variables, and ``x[y]`` decides acceptance.  The emit map is
    the assignment itself, so distinct-output and witness counts agree.
    """
    rows = 1 << num_vars

    def verify(x: BitString, y: BitString) -> bool:
        if len(x) != rows:
            raise ValueError(
                f"input length {len(x)} != 2**{num_vars} truth-table rows"
            )
        return x[y.to_int()] == 1

    return WitnessRelation(
        name=f"sat-{num_vars}",
        witness_length=lambda n: num_vars,
        verify=verify,
        emit=lambda x, y: y,
    )
