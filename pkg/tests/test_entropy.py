import math

from martlab.cantor import BitString, EMPTY
from martlab.combinators import borel_cantelli_measure, unit_certificate
from martlab.constructions import Cover
from martlab.dyadic import Dyadic, grid_floor_log2_ratio
from martlab.entropy import (
    LevelFamily,
    certificate_family,
    entropy_rate,
    level_count,
    mc_certificate,
)


def constant_family(predicate, name):
    return LevelFamily.from_predicate(predicate, name)


def test_rate_of_everything_is_one():
    fam = constant_family(lambda x: True, "all")
    report = entropy_rate(fam, 8)
    assert all(r == Dyadic(1) for r in report.ratios)
    assert report.max_ratio == Dyadic(1)


def test_rate_of_singletons_is_zero():
    fam = constant_family(lambda x: x.count_ones() == 0, "zeros")
    report = entropy_rate(fam, 8)
    assert all(c == 1 for c in report.counts)
    assert report.max_ratio == Dyadic(0)


def test_rate_trend_toward_quarter_entropy():
    fam = constant_family(
        lambda x: 4 * x.count_ones() <= len(x), "light-strings"
    )
    report = entropy_rate(fam, 16)
    # exact binomial counts are the oracle
    for n in (4, 8, 12, 16):
        expected = sum(math.comb(n, k) for k in range(n // 4 + 1))
        assert report.counts[n - 1] == expected
    ratios = [report.ratios[n - 1] for n in (4, 8, 12, 16)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    # approaching the binary entropy of 1/4 (~0.8113) from below
    assert Dyadic(11, 4) < ratios[-1] < Dyadic(832, 10)


def test_empty_levels_skipped():
    fam = LevelFamily(lambda n: None if n % 2 else Cover.from_predicate(
        lambda x: True, n
    ), "evens")
    report = entropy_rate(fam, 6)
    assert report.ratios[0] is None
    assert report.ratios[1] == Dyadic(1)


def test_union_rate_law():
    left = constant_family(lambda x: x.count_ones() == 0, "zeros")
    right = constant_family(
        lambda x: x.count_ones() == len(x), "ones"
    )
    union = constant_family(
        lambda x: x.count_ones() in (0, len(x)), "either"
    )
    horizon = 10
    rl = entropy_rate(left, horizon)
    rr = entropy_rate(right, horizon)
    ru = entropy_rate(union, horizon)
    for n in range(1, horizon + 1):
        cu = ru.counts[n - 1]
        cmax = max(rl.counts[n - 1], rr.counts[n - 1])
        assert cu <= 2 * cmax
        # grid consequence: union ratio <= max ratio + 1/n, floored
        if cu:
            allowed = grid_floor_log2_ratio(2 * cmax, n)
            assert ru.ratios[n - 1] <= allowed


def test_level_count_uses_analytic_counter():
    cover = Cover(
        level=30,
        contains=lambda x: False,
        ext_count=lambda w: 7 if len(w) == 0 else 0,
    )
    fam = LevelFamily(lambda n: cover if n == 30 else None, "wide")
    assert level_count(fam, 30) == 7


def test_certificate_fails_on_full_family():
    fam = constant_family(lambda x: True, "all")
    cert = mc_certificate(fam, gap=lambda n: 0, modulus=lambda i: i, horizon=6)
    assert not cert.valid
    assert cert.failing_level == 1
    assert "INVALID" in cert.to_text()


def test_certificate_trivial_above_empty_levels():
    fam = LevelFamily(
        lambda n: Cover.from_members(
            [BitString.from_int(0, n)], n
        ) if n <= 3 else None,
        "low-levels",
    )
    cert = mc_certificate(
        fam,
        gap=lambda n: n // 2,
        modulus=lambda i: 2 * i + 4,
        horizon=8,
        witnesses=[BitString("00000000")],
    )
    assert cert.valid
    assert cert.witnesses[0].covered_at == 1


def test_certificate_witness_not_covered():
    fam = LevelFamily(
        lambda n: Cover.from_members([BitString.from_int(0, n)], n),
        "zeros",
    )
    cert = mc_certificate(
        fam,
        gap=lambda n: n,
        modulus=lambda i: i + 1,
        horizon=4,
        witnesses=[BitString("1111")],
    )
    assert not cert.valid
    assert cert.witnesses[0].covered_at is None


def test_certificate_modulus_audit_fails():
    fam = LevelFamily(
        lambda n: Cover.from_members([BitString.from_int(0, n)], n),
        "zeros",
    )
    cert = mc_certificate(
        fam,
        gap=lambda n: 0,  # series of ones cannot converge
        modulus=lambda i: 0,
        horizon=6,
    )
    assert not cert.valid


def test_certificate_bridge_to_covering_martingale():
    fam = LevelFamily(
        lambda n: Cover.from_members(
            [BitString.from_int(0, n), BitString.from_int((1 << n) - 1, n)]
            if n >= 2
            else [],
            n,
        ),
        "edges",
    )
    def gap(n):
        return max(0, n - 2)  # counts are 2 = 2^1 < 2^2 at every level

    def modulus(i):
        return i + 4
    cert = mc_certificate(
        fam, gap, modulus, horizon=8, witnesses=[BitString("0" * 8)]
    )
    assert cert.valid
    family, lifted = certificate_family(fam, cert, gap, modulus)
    # capitals certified below the gap bound
    for n in range(2, 9):
        member = family.member(n)
        assert member.initial_capital == Dyadic(2, n)
        assert member.initial_capital <= Dyadic.pow2(-gap(n))
    aggregate = borel_cantelli_measure(family, lifted, audit_levels=9)
    for n in range(2, 9):
        for x in (BitString("0" * n), BitString("1" * n)):
            cert_x = unit_certificate(family, lifted, n, x)
            assert cert_x.covered
            assert aggregate.value(x) >= Dyadic(1)
