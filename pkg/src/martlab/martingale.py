"""Evaluable betting functions on binary prefixes.

A :class:`Martingale` bundles an exact evaluator (when one exists), a
precision-``r`` approximate evaluator, the value at the empty string, an
optional freeze depth past which values repeat, and a metadata tag recording
the counting class the construction claims (recorded, never proved).

The operations here are the generic checks every construction must survive:
the exact averaging law, success scans against ``2**((1-s)*n)`` thresholds,
the bit-by-bit diagonalization that defeats a given martingale, and
finite-horizon dimension statistics on a fixed dyadic grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from .cantor import EMPTY, BitString
from .dyadic import (
    Dyadic,
    ONE,
    ZERO,
    cmp_pow2,
    grid_floor_one_minus_log2_ratio,
)
from .errors import NegativeValue

__all__ = [
    "Martingale",
    "RatioForm",
    "AveragingViolation",
    "AveragingReport",
    "SuccessReport",
    "DimensionReport",
    "verify_averaging",
    "success_scan",
    "diagonalize",
    "empirical_dimension",
    "tree_csv",
    "tree_dot",
]


@dataclass(frozen=True)
class RatioForm:
    """A martingale written as integer numerator over a power of two.

    ``numerator(w) / 2**log_denominator(w)`` must equal the exact value; the
    numerator plays the counting-function role, the denominator the
    polynomial-time power-of-two role.
    """

    numerator: Callable[[BitString], int]
    log_denominator: Callable[[BitString], int]

    def value(self, w: BitString) -> Dyadic:
        return Dyadic(self.numerator(w), self.log_denominator(w))


@dataclass(frozen=True)
class Martingale:
    """An evaluable betting function.

    ``exact`` may be None for approximation-only martingales (aggregates of
    infinite families); ``approx(w, r)`` must then be within ``2**-r`` of the
    true value.  ``freeze_depth = n`` declares that strings longer than ``n``
    take the value of their length-``n`` prefix.
    """

    approx: Callable[[BitString, int], Dyadic]
    exact: Callable[[BitString], Dyadic] | None
    initial_capital: Dyadic
    freeze_depth: int | None = None
    class_tag: str = "unclassified"
    supermartingale: bool = False
    ratio: RatioForm | None = None
    meta: Mapping = field(default_factory=dict)

    @classmethod
    def from_exact(
        cls,
        evaluate: Callable[[BitString], Dyadic],
        freeze_depth: int | None = None,
        class_tag: str = "unclassified",
        supermartingale: bool = False,
        ratio: RatioForm | None = None,
        meta: Mapping | None = None,
    ) -> "Martingale":
        def approx(w: BitString, r: int) -> Dyadic:
            return evaluate(w)

        return cls(
            approx=approx,
            exact=evaluate,
            initial_capital=evaluate(EMPTY),
            freeze_depth=freeze_depth,
            class_tag=class_tag,
            supermartingale=supermartingale,
            ratio=ratio,
            meta=dict(meta or {}),
        )

    @classmethod
    def constant(cls, value: Dyadic) -> "Martingale":
        if value.is_negative():
            raise NegativeValue(f"constant martingale value {value}")
        return cls.from_exact(
            lambda w: value, freeze_depth=0, class_tag="constant"
        )

    def value(self, w: BitString) -> Dyadic:
        if self.exact is None:
            raise ValueError("martingale has no exact evaluator")
        v = self.exact(w)
        if v.is_negative():
            raise NegativeValue(f"negative value {v} at {w!r}")
        return v

    def value_approx(self, w: BitString, r: int) -> Dyadic:
        return self.approx(w, r)

    def has_exact(self) -> bool:
        return self.exact is not None


@dataclass(frozen=True)
class AveragingViolation:
    node: BitString
    parent_value: Dyadic
    child_sum: Dyadic


@dataclass(frozen=True)
class AveragingReport:
    depth: int
    supermartingale: bool
    violations: tuple[AveragingViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def _nodes_to_depth(depth: int) -> Iterator[BitString]:
    stack = [EMPTY]
    while stack:
        w = stack.pop()
        yield w
        if len(w) < depth:
            stack.append(w.append(1))
            stack.append(w.append(0))


def verify_averaging(m: Martingale, depth: int) -> AveragingReport:
    """Check ``2*d(w) == d(w0) + d(w1)`` for every ``w`` shorter than depth.

    Supermartingales are held to the relaxed ``>=`` law.  Values are computed
    once per node and compared exactly.
    """
    values: dict[BitString, Dyadic] = {}
    for w in _nodes_to_depth(depth):
        values[w] = m.value(w)
    violations = []
    for w, v in values.items():
        if len(w) >= depth:
            continue
        child_sum = values[w.append(0)] + values[w.append(1)]
        doubled = v.scale2(1)
        bad = doubled < child_sum if m.supermartingale else doubled != child_sum
        if bad:
            violations.append(AveragingViolation(w, v, child_sum))
    violations.sort(key=lambda v: (len(v.node), str(v.node)))
    return AveragingReport(depth, m.supermartingale, tuple(violations))


@dataclass(frozen=True)
class SuccessReport:
    """Threshold crossings of a martingale along one prefix sequence."""

    horizon: int
    s: Dyadic
    values: tuple[Dyadic, ...]
    success_levels: frozenset[int]
    unitary_hit: int | None

    def succeeded(self) -> bool:
        return bool(self.success_levels)


def success_scan(m: Martingale, S: BitString, s: Dyadic) -> SuccessReport:
    """Exact comparison ``d(S[:n]) >= 2**((1-s)*n)`` at every level.

    At ``s == 1`` the threshold is constant 1, the finite surrogate of
    unbounded success at this horizon.
    """
    values = []
    levels = set()
    unitary = None
    one_minus_s = ONE - s
    for n in range(len(S) + 1):
        v = m.value(S.prefix(n))
        values.append(v)
        exponent = one_minus_s * Dyadic(n)
        if cmp_pow2(v, exponent) >= 0:
            levels.add(n)
        if unitary is None and v >= ONE:
            unitary = n
    return SuccessReport(len(S), s, tuple(values), frozenset(levels), unitary)


def diagonalize(m: Martingale, N: int) -> BitString:
    """The length-``N`` prefix that the martingale cannot grow on.

    Each next bit is 1 exactly when the 1-child value is strictly smaller;
    ties go to 0.  The value trace along the result is non-increasing.
    """
    w = EMPTY
    for _ in range(N):
        zero_value = m.value(w.append(0))
        one_value = m.value(w.append(1))
        w = w.append(1 if one_value < zero_value else 0)
    return w


@dataclass(frozen=True)
class DimensionReport:
    """Grid-quantized ``1 - log2(d(S[:n]))/n`` statistics over one prefix.

    ``levels[n]`` is None where the value is zero (the +infinity sentinel).
    ``best``/``worst`` are the min/max over levels; ``worst`` is None when
    any level is +infinity.
    """

    grid_bits: int
    levels: tuple[Dyadic | None, ...]
    best: Dyadic | None
    worst: Dyadic | None

    @property
    def has_infinite_level(self) -> bool:
        return any(v is None for v in self.levels)


def empirical_dimension(
    m: Martingale, S: BitString, grid_bits: int = 10
) -> DimensionReport:
    """Finite-horizon dimension witnesses along ``S``.

    For ``1 <= n <= |S|`` the statistic ``1 - log2(d(S[:n]))/n`` is floored
    onto the ``2**-grid_bits`` grid with exact comparisons; the min over
    levels witnesses dimension, the max strong dimension, both relative to
    this horizon only.
    """
    if len(S) < 1:
        raise ValueError("needs a prefix of length at least 1")
    levels: list[Dyadic | None] = []
    for n in range(1, len(S) + 1):
        v = m.value(S.prefix(n))
        if v.is_zero():
            levels.append(None)
        else:
            levels.append(grid_floor_one_minus_log2_ratio(v, n, grid_bits))
    finite = [v for v in levels if v is not None]
    best = min(finite) if finite else None
    worst = max(finite) if len(finite) == len(levels) else None
    return DimensionReport(grid_bits, tuple(levels), best, worst)


def tree_csv(m: Martingale, depth: int) -> str:
    """Level-order ``node,value`` dump with values rendered ``p/2**k``."""
    lines = ["node,value"]
    level = [EMPTY]
    for _ in range(depth + 1):
        next_level = []
        for w in level:
            label = str(w) if len(w) else "λ"
            lines.append(f"{label},{m.value(w)}")
            next_level.extend((w.append(0), w.append(1)))
        level = next_level
    return "\n".join(lines) + "\n"


def tree_dot(m: Martingale, depth: int) -> str:
    """DOT rendering, root on top, 0-child left, value-1 leaves highlighted."""
    lines = [
        "digraph martingale {",
        "  ordering=out;",
        '  node [shape=box, fontname="monospace"];',
    ]
    for w in sorted(_nodes_to_depth(depth), key=lambda w: (len(w), str(w))):
        v = m.value(w)
        name = f'"{w}"' if len(w) else '"λ"'
        attrs = f'label="{v}"'
        if len(w) == depth and v >= ONE:
            attrs += ", style=filled, fillcolor=palegreen"
        lines.append(f"  {name} [{attrs}];")
        if len(w) < depth:
            for b in (0, 1):
                child = w.append(b)
                lines.append(f'  {name} -> "{child}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
