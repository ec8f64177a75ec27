import random
from fractions import Fraction

import pytest

from martlab.cantor import (
    BitString,
    EMPTY,
    LanguageView,
    all_strings,
    census,
    char_prefix,
    string_index,
)
from martlab.constructions import (
    AcceptanceSpec,
    Cover,
    acceptance_martingale,
    biimmunity_martingale,
    condexp_martingale,
    cover_martingale,
    subset_cover,
    subset_martingale,
)
from martlab.dyadic import Dyadic, ONE, ZERO
from martlab.errors import (
    CapExceeded,
    GapViolation,
    NegativeValue,
    RowSumViolation,
)
from martlab.martingale import verify_averaging
from martlab.oracle import WitnessRelation, sat_relation


def marked(horizon=16):
    return LanguageView.from_indices([1, 3], horizon=horizon)


# -- cover ----------------------------------------------------------------


def test_cover_figure_values():
    m = cover_martingale(
        Cover.from_members(["0001", "0010", "0011", "0110", "1101"], 4)
    )
    assert m.value(EMPTY) == Dyadic(5, 4)
    assert m.value(BitString("0")) == Dyadic(1, 1)
    assert m.value(BitString("1")) == Dyadic(1, 3)
    assert m.value(BitString("11")) == Dyadic(1, 2)
    assert m.value(BitString("0010")) == ONE


def test_cover_empty_and_full():
    empty = cover_martingale(Cover.from_members([], 3))
    assert empty.value(EMPTY) == ZERO
    assert empty.value(BitString("101")) == ZERO
    full = cover_martingale(Cover.from_members(all_strings(3), 3))
    for w in ("", "1", "01", "110"):
        assert full.value(BitString(w)) == ONE


def test_cover_freeze():
    m = cover_martingale(Cover.from_members(["01"], 2))
    assert m.freeze_depth == 2
    assert m.value(BitString("0110")) == m.value(BitString("01"))
    assert m.value(BitString("0000")) == ZERO


def test_cover_level_cap():
    with pytest.raises(CapExceeded):
        cover_martingale(Cover.from_predicate(lambda x: True, 23))


def test_cover_from_sat_relation():
    # members of the cover: 4-bit truth tables with at least one model
    m = cover_martingale(Cover.from_relation(sat_relation(2), 4))
    assert m.class_tag == "SpanP"
    assert m.value(EMPTY) == Dyadic(15, 4)
    assert m.value(BitString("0000")) == ZERO


def test_cover_gap_language_validates():
    cheat = WitnessRelation("bad-gap", lambda n: 1, lambda x, y: True)
    cover = Cover.from_relation(cheat, 2, gap_language=True)
    with pytest.raises(GapViolation):
        cover_martingale(cover).value(EMPTY)


def test_cover_root_law_randomized():
    rnd = random.Random(7)
    for n in range(1, 7):
        for _ in range(5):
            members = {
                BitString.from_int(rnd.randrange(1 << n), n)
                for _ in range(rnd.randrange(1 << n))
            }
            m = cover_martingale(Cover.from_members(members, n))
            assert m.value(EMPTY) == Dyadic(len(members), n)
            for x in all_strings(n):
                expected = ONE if x in members else ZERO
                assert m.value(x) == expected


# -- conditional expectation ----------------------------------------------


def figure_condexp():
    values = {"0001": 2, "0010": 1, "0011": 4, "0110": 3, "1101": 4}
    return condexp_martingale(lambda x: values.get(str(x), 0), 4)


def test_condexp_figure_values():
    m = figure_condexp()
    assert m.value(EMPTY) == Dyadic(7, 3)
    assert m.value(BitString("0")) == Dyadic(5, 2)
    assert m.value(BitString("001")) == Dyadic(5, 1)
    assert m.value(BitString("0011")) == Dyadic(4)


def test_condexp_constant_one():
    m = condexp_martingale(lambda x: 1, 3)
    for w in ("", "0", "11", "010"):
        assert m.value(BitString(w)) == ONE


def test_condexp_rejects_negative():
    with pytest.raises(NegativeValue):
        condexp_martingale(lambda x: -1, 2).value(EMPTY)


def test_condexp_indicator_equals_cover():
    rnd = random.Random(11)
    for n in (2, 4):
        members = {
            BitString.from_int(v, n)
            for v in rnd.sample(range(1 << n), (1 << n) // 2)
        }
        as_cover = cover_martingale(Cover.from_members(members, n))
        as_condexp = condexp_martingale(
            lambda x: 1 if x in members else 0, n
        )
        stack = [EMPTY]
        while stack:
            w = stack.pop()
            assert as_cover.value(w) == as_condexp.value(w)
            if len(w) < n + 2:
                stack.extend((w.append(0), w.append(1)))


def test_condexp_leaf_law_randomized():
    rnd = random.Random(13)
    for n in range(1, 7):
        values = {
            str(BitString.from_int(v, n)): rnd.randrange(8)
            for v in range(1 << n)
        }
        m = condexp_martingale(lambda x: values[str(x)], n)
        for x in all_strings(n):
            assert m.value(x) == Dyadic(values[str(x)])


# -- subset ----------------------------------------------------------------


def test_subset_figure_values():
    m = subset_martingale(marked(), 4)
    assert m.value(EMPTY) == Dyadic(1, 2)
    assert m.value(BitString("0101")) == ONE
    assert m.value(BitString("1")) == ZERO
    assert m.value(BitString("01")) == Dyadic(1, 1)


def test_subset_full_and_empty():
    everything = LanguageView(lambda s: True, horizon=16)
    m = subset_martingale(everything, 4)
    for w in ("", "0", "10", "111"):
        assert m.value(BitString(w)) == ONE
    nothing = LanguageView.from_indices([], horizon=16)
    m = subset_martingale(nothing, 4)
    assert m.value(EMPTY) == Dyadic(1, 4)
    assert m.value(BitString("0000")) == ONE
    assert m.value(BitString("0100")) == ZERO


def test_subset_leaf_count_law_randomized():
    rnd = random.Random(17)
    for n in range(1, 7):
        indices = [i for i in range(n) if rnd.random() < 0.5]
        B = LanguageView.from_indices(indices, horizon=n)
        m = subset_martingale(B, n)
        c = census(B, n)
        assert m.value(EMPTY) == Dyadic.pow2(c - n)
        unit_leaves = sum(1 for x in all_strings(n) if m.value(x) == ONE)
        assert unit_leaves == 1 << c


def test_subset_cover_counts_match_enumeration():
    B = marked()
    cover = subset_cover(B, 5)
    for w in ("", "0", "01", "0101", "11"):
        w = BitString(w)
        brute = sum(
            1
            for v in range(1 << (5 - len(w)))
            if cover.contains(w + BitString.from_int(v, 5 - len(w)))
        )
        assert cover.ext_count(w) == brute


# -- acceptance ------------------------------------------------------------


def test_acceptance_figure_path():
    m = acceptance_martingale(AcceptanceSpec.biased(marked(), 3, 2))
    expected = [ONE, Dyadic(3, 1), Dyadic(9, 2), Dyadic(27, 3), Dyadic(81, 4)]
    S = BitString("0101")
    for n, value in enumerate(expected):
        assert m.value(S.prefix(n)) == value
    assert m.freeze_depth is None


def test_acceptance_fair_coin():
    spec = AcceptanceSpec(f=lambda x, b: 2, q=lambda n: 2)
    m = acceptance_martingale(spec)
    for w in ("", "0", "01", "110", "0101"):
        assert m.value(BitString(w)) == ONE


def test_acceptance_gap_error_free_machine():
    target = marked()

    def g(x):
        return 4 if target.contains(x) else 0

    m = acceptance_martingale(AcceptanceSpec.from_gap(g, lambda n: 2))
    assert m.class_tag == "GapP"
    S = char_prefix(target, 4)
    for n in range(5):
        assert m.value(S.prefix(n)) == Dyadic.pow2(n)
    # one wrong bit kills the capital
    assert m.value(BitString("1")) == ZERO


def test_acceptance_row_sum_checked():
    spec = AcceptanceSpec(f=lambda x, b: 1, q=lambda n: 2)
    with pytest.raises(RowSumViolation):
        acceptance_martingale(spec).value(BitString("0"))


def test_acceptance_gap_negative_rejected():
    spec = AcceptanceSpec.from_gap(lambda x: 5, lambda n: 2)
    with pytest.raises(NegativeValue):
        acceptance_martingale(spec).value(BitString("0"))


def test_acceptance_product_law_randomized():
    rnd = random.Random(19)
    for _ in range(10):
        q = rnd.randrange(1, 4)
        rows = {}

        def f(x, b, q=q, rows=rows):
            key = str(x)
            if key not in rows:
                f1 = rnd.randrange(0, (1 << q) + 1)
                rows[key] = ((1 << q) - f1, f1)
            return rows[key][b]

        m = acceptance_martingale(AcceptanceSpec(f=f, q=lambda n: q))
        for w in all_strings(6):
            product = Fraction(1)
            for i in range(6):
                product *= Fraction(f(string_index(i), w[i]), 1 << q)
            expected = Fraction(2) ** 6 * product
            got = m.value(w)
            assert Fraction(got.num, 1 << got.log_den) == expected


def test_acceptance_growth_bound():
    # correctness 1 - 2^-q(k) with q(k) = 2k (the k = 0 row degenerates to 0)
    target = marked()

    def f(x, b):
        k = len(x)
        correct = (1 << (2 * k)) - 1
        return correct if b == int(target.contains(x)) else 1

    spec = AcceptanceSpec(f=f, q=lambda k: 2 * k)
    m = acceptance_martingale(spec)
    for n in range(1, 7):
        S = char_prefix(target, n)
        lhs = m.value(S)
        bound = Fraction(2) ** n
        for i in range(n):
            bound *= 1 - Fraction(1, 2 ** (2 * len(string_index(i))))
        assert Fraction(lhs.num, 1 << lhs.log_den) >= bound


# -- bi-immunity -----------------------------------------------------------


def test_biimmunity_figure_values():
    m = biimmunity_martingale(marked())
    assert m.value(BitString("0101")) == Dyadic(4)
    assert m.value(BitString("0100")) == ZERO
    assert m.value(BitString("11")) == Dyadic(2)


def test_biimmunity_empty_language():
    m = biimmunity_martingale(LanguageView.from_indices([], horizon=16))
    for w in ("", "0", "10", "1101"):
        assert m.value(BitString(w)) == ONE


def test_biimmunity_everything():
    m = biimmunity_martingale(LanguageView(lambda s: True, horizon=16))
    assert m.value(BitString("1111")) == Dyadic(16, 0)
    assert m.value(BitString("1110")) == ZERO
    assert m.value(BitString("0111")) == ZERO


def test_biimmunity_value_law_exhaustive():
    rnd = random.Random(23)
    for _ in range(5):
        indices = [i for i in range(6) if rnd.random() < 0.5]
        A = LanguageView.from_indices(indices, horizon=8)
        m = biimmunity_martingale(A)
        for length in range(7):
            prefix = char_prefix(A, length)
            for w in all_strings(length):
                dominates = all(
                    w[i] == 1 for i in range(length) if prefix[i] == 1
                )
                expected = (
                    Dyadic.pow2(prefix.count_ones()) if dominates else ZERO
                )
                assert m.value(w) == expected


def test_biimmunity_support_law():
    # positive capital exactly on prefixes dominating the language
    A = marked(horizon=8)
    m = biimmunity_martingale(A)
    for w in all_strings(5):
        prefix = char_prefix(A, 5)
        dominates = all(w[i] == 1 for i in range(5) if prefix[i] == 1)
        assert (m.value(w) > ZERO) == dominates


# -- cross-construction averaging -------------------------------------------


@pytest.mark.parametrize("depth", [5])
def test_all_figures_average_exactly(depth):
    from martlab.golden import build_figure, figure_ids

    for fid in figure_ids():
        assert verify_averaging(build_figure(fid), depth).passed


def test_unbounded_constructions_average_to_depth_twelve():
    target = LanguageView.from_indices([1, 3, 6, 10], horizon=16)
    assert verify_averaging(biimmunity_martingale(target), 12).passed
    assert verify_averaging(
        acceptance_martingale(AcceptanceSpec.biased(target, 3, 2)), 12
    ).passed


def test_leveled_constructions_average_past_their_freeze():
    rnd = random.Random(29)
    for n in (2, 4):
        members = [
            BitString.from_int(v, n)
            for v in rnd.sample(range(1 << n), 1 << (n - 1))
        ]
        for m in (
            cover_martingale(Cover.from_members(members, n)),
            condexp_martingale(lambda x: x.to_int() % 3, n),
            subset_martingale(marked(), n),
        ):
            assert verify_averaging(m, n + 3).passed
