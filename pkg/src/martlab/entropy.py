"""Entropy rates of per-level language families and covering certificates.

A family is one cover per string length.  The entropy-rate table records the
exact member count at each level and the ratio ``log2(count) / n`` floored
onto the ``2**-10`` grid; the max over levels is the finite-horizon surrogate
of the rate.

A certificate audits the three covering-measure conditions at desk scale:
membership of supplied witness prefixes (the infinite "covers the class
infinitely often" claim is honestly reduced to a finite witness set and
labeled as claimed), the per-level count gap ``count < 2**(n - f(n))`` as an
integer comparison, and the declared modulus for the capital series
``sum 2**-f(n)`` on audited tails.  A valid certificate converts directly
into a martingale family whose aggregate covers every certified element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .cantor import BitString
from .combinators import ConvergenceModulus, MartingaleFamily
from .constructions import Cover, cover_martingale
from .dyadic import Dyadic, ZERO, grid_floor_log2_ratio
from .errors import CapExceeded
from .martingale import Martingale

__all__ = [
    "LevelFamily",
    "EntropyRateReport",
    "EntropyCertificate",
    "level_count",
    "entropy_rate",
    "mc_certificate",
    "certificate_family",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 22


@dataclass(frozen=True)
class LevelFamily:
    """Per-level covers; ``cover_at(n)`` may be None for an empty level."""

    cover_at: Callable[[int], Cover | None]
    name: str = "family"

    @classmethod
    def from_predicate(
        cls, predicate: Callable[[BitString], bool], name: str = "family"
    ) -> "LevelFamily":
        def cover_at(n: int) -> Cover:
            return Cover.from_predicate(predicate, n, name=f"{name}@{n}")

        return cls(cover_at, name)


def level_count(fam: LevelFamily, n: int) -> int:
    """Exact ``|members at level n|`` via the cover's counter or enumeration."""
    cover = fam.cover_at(n)
    if cover is None:
        return 0
    if cover.ext_count is not None:
        from .cantor import EMPTY

        return cover.ext_count(EMPTY)
    if n > ENUMERATION_CAP:
        raise CapExceeded(f"level {n} exceeds enumeration cap")
    return sum(
        1
        for v in range(1 << n)
        if cover.contains(BitString.from_int(v, n))
    )


@dataclass(frozen=True)
class EntropyRateReport:
    horizon: int
    grid_bits: int
    counts: tuple  # per level 1..H
    ratios: tuple  # grid-floored Dyadic per level; None where count is 0
    max_ratio: Dyadic | None


def entropy_rate(
    fam: LevelFamily, horizon: int, grid_bits: int = 10
) -> EntropyRateReport:
    """Exact counts and grid-floored ``log2(count)/n`` up to the horizon."""
    counts = []
    ratios: list[Dyadic | None] = []
    for n in range(1, horizon + 1):
        c = level_count(fam, n)
        counts.append(c)
        ratios.append(None if c == 0 else grid_floor_log2_ratio(c, n, grid_bits))
    finite = [r for r in ratios if r is not None]
    return EntropyRateReport(
        horizon,
        grid_bits,
        tuple(counts),
        tuple(ratios),
        max(finite) if finite else None,
    )


@dataclass(frozen=True)
class LevelVerdict:
    level: int
    count: int
    gap: int
    count_below_gap: bool


@dataclass(frozen=True)
class WitnessVerdict:
    witness: BitString
    covered_at: int | None


@dataclass(frozen=True)
class ModulusVerdict:
    i: int
    start: int
    tail: Dyadic
    ok: bool


@dataclass(frozen=True)
class EntropyCertificate:
    """Audited desk-scale evidence for a covering-measure claim.

    The class-coverage condition is recorded as *claimed for* the supplied
    witnesses only; no finite audit can check an infinitely-often claim.
    """

    family_name: str
    horizon: int
    levels: tuple[LevelVerdict, ...]
    witnesses: tuple[WitnessVerdict, ...]
    modulus_audits: tuple[ModulusVerdict, ...]
    valid: bool
    failing_level: int | None

    def to_text(self) -> str:
        lines = [
            f"certificate for {self.family_name} up to level {self.horizon}",
            f"status: {'VALID' if self.valid else 'INVALID'}"
            + (
                f" (first failure at level {self.failing_level})"
                if self.failing_level is not None
                else ""
            ),
            "claimed-for witnesses:",
        ]
        for wv in self.witnesses:
            where = (
                f"covered at level {wv.covered_at}"
                if wv.covered_at is not None
                else "NOT COVERED within horizon"
            )
            lines.append(f"  {wv.witness or 'λ'}: {where}")
        lines.append("per-level count gaps:")
        for lv in self.levels:
            lines.append(
                f"  n={lv.level}: count={lv.count} "
                f"{'<' if lv.count_below_gap else '>='} 2^({lv.level}-{lv.gap})"
            )
        lines.append("modulus tail audits:")
        for mv in self.modulus_audits:
            lines.append(
                f"  i={mv.i}: tail from {mv.start} sums to {mv.tail} "
                f"{'<=' if mv.ok else '>'} 2^-{mv.i}"
            )
        return "\n".join(lines) + "\n"


def mc_certificate(
    fam: LevelFamily,
    gap: Callable[[int], int],
    modulus: Callable[[int], int],
    horizon: int,
    witnesses: Iterable[BitString] = (),
    audit_is: tuple[int, ...] = (0, 2, 4, 8),
) -> EntropyCertificate:
    """Audit the covering conditions and assemble the certificate.

    ``gap`` is the integer capital-gap function; level ``n`` passes when
    ``count < 2**(n - gap(n))`` (count 0 passes vacuously).  ``modulus``
    promises ``sum_{n >= modulus(i)} 2**-gap(n) <= 2**-i``, audited here over
    levels up to the horizon.
    """
    levels = []
    failing = None
    for n in range(1, horizon + 1):
        c = level_count(fam, n)
        g = gap(n)
        if c == 0:
            ok = True
        elif n - g < 0:
            ok = False
        else:
            ok = c < (1 << (n - g))
        levels.append(LevelVerdict(n, c, g, ok))
        if not ok and failing is None:
            failing = n

    witness_verdicts = []
    for w in witnesses:
        covered_at = None
        for n in range(1, min(len(w), horizon) + 1):
            cover = fam.cover_at(n)
            if cover is not None and cover.contains(w.prefix(n)):
                covered_at = n
                break
        witness_verdicts.append(WitnessVerdict(w, covered_at))

    audits = []
    for i in audit_is:
        start = modulus(i)
        tail = ZERO
        for n in range(start, horizon + 1):
            tail = tail + Dyadic.pow2(-gap(n))
        ok = tail <= Dyadic.pow2(-i)
        audits.append(ModulusVerdict(i, start, tail, ok))

    valid = (
        failing is None
        and all(a.ok for a in audits)
        and all(wv.covered_at is not None for wv in witness_verdicts)
    )
    return EntropyCertificate(
        fam.name,
        horizon,
        tuple(levels),
        tuple(witness_verdicts),
        tuple(audits),
        valid,
        failing,
    )


def certificate_family(
    fam: LevelFamily,
    cert: EntropyCertificate,
    gap: Callable[[int], int],
    modulus: Callable[[int], int],
) -> tuple[MartingaleFamily, ConvergenceModulus]:
    """The certified cover family as summable martingales.

    Member ``n`` is the cover martingale at level ``n`` (zero when the level
    is empty or past the horizon); capitals are bounded by ``2**-gap(n)``
    thanks to the certified count gap, and the certificate's modulus lifts to
    the family by the usual ``2**|w|`` shift.
    """
    if not cert.valid:
        raise ValueError("refusing to aggregate an invalid certificate")
    horizon = cert.horizon

    def generator(n: int) -> Martingale:
        if n < 1 or n > horizon:
            return Martingale.constant(ZERO)
        cover = fam.cover_at(n)
        if cover is None:
            return Martingale.constant(ZERO)
        return cover_martingale(cover)

    def capital_bound(n: int) -> Dyadic:
        if n < 1 or n > horizon:
            return ZERO
        return Dyadic.pow2(-gap(n))

    family = MartingaleFamily(
        generator=generator,
        capital_bound=capital_bound,
        name=f"covers({fam.name})",
        support_end=horizon + 1,
    )
    lifted = ConvergenceModulus(
        lambda w, i: modulus(i + len(w)),
        name=f"lifted({fam.name})",
    )
    return family, lifted
