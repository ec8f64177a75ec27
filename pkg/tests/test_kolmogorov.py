from fractions import Fraction

import pytest

from martlab.cantor import BitString, all_strings
from martlab.circuits import TruthTable, circuit_for, encode_circuit
from martlab.dyadic import Dyadic, ONE
from martlab.errors import CapExceeded
from martlab.kolmogorov import (
    build_kt_table,
    cached_kt_table,
    k_rate,
    kolmogorov_witness_relation,
    kt,
    kt_cover_martingale,
    load_kt_table,
    save_kt_table,
    short_program_counts,
)
from martlab.machine import BudgetPoly, C_LIT, run
from martlab.martingale import verify_averaging
from martlab.oracle import CountMode, count


def test_literal_bound_holds_everywhere(kt_table_10):
    for bits, value in kt_table_10.entries.items():
        assert value <= len(bits) + C_LIT


def test_every_string_has_an_entry(kt_table_10):
    for length in range(11):
        for v in range(1 << length):
            bits = format(v, f"0{length}b") if length else ""
            assert bits in kt_table_10.entries


def test_runs_compress(kt_table_10, budget):
    assert kt(BitString("0" * 10), budget, table=kt_table_10) < 10 + C_LIT
    assert kt(BitString("0" * 10), budget, table=kt_table_10) == 8


def test_budget_monotonicity(kt_table_10, budget):
    tighter = BudgetPoly(3, 1, 8)  # pointwise below the default budget
    tight_table = build_kt_table(tighter, 7)
    for length in range(8):
        for v in range(1 << length):
            bits = format(v, f"0{length}b") if length else ""
            x = BitString(bits)
            assert tight_table.lookup(x) >= kt_table_10.lookup(x)


def test_length_cap_enforced(kt_table_10, budget):
    with pytest.raises(CapExceeded):
        kt(BitString("0" * 11), budget, table=kt_table_10)


def test_csv_roundtrip(tmp_path, budget):
    table = build_kt_table(budget, 5)
    path = tmp_path / "kt.csv"
    save_kt_table(table, path)
    loaded = load_kt_table(path)
    assert loaded.entries == table.entries
    assert loaded.budget == table.budget
    assert loaded.length_cap == table.length_cap
    assert loaded.machine_version == table.machine_version


def test_cached_table_reused(tmp_path, budget):
    first = cached_kt_table(budget, 5, tmp_path)
    second = cached_kt_table(budget, 5, tmp_path)
    assert first.entries == second.entries


def test_kt_cover_empty_when_gap_fills_length(budget):
    m = kt_cover_martingale(6, 6, budget)
    assert m.initial_capital == Dyadic(0)
    for w in ("", "010", "111111"):
        assert m.value(BitString(w)) == Dyadic(0)


def test_kt_cover_capital_and_leaf_law(kt_table_10, budget):
    for n, gap in ((9, 0), (10, 0), (10, 1), (8, 2)):
        m = kt_cover_martingale(n, gap, budget)
        assert m.initial_capital <= Dyadic.pow2(-gap)
        assert verify_averaging(m, min(n, 6)).passed
        bound = n - gap
        for x in all_strings(n):
            compressible = kt_table_10.lookup(x) < bound
            assert (m.value(x) >= ONE) == compressible


def test_kt_cover_leaf_counts_programs(kt_table_10, budget):
    n = 10
    counts = short_program_counts(n, n, budget)
    m = kt_cover_martingale(n, 0, budget)
    for bits, expected in counts.items():
        assert m.value(BitString(bits)) == Dyadic(expected)


def test_k_rate_on_zeros(kt_table_10, budget):
    report = k_rate(BitString("0" * 10), budget, table=kt_table_10)
    assert all(
        a >= b for a, b in zip(report.ratios, report.ratios[1:])
    )
    assert report.lowest == Fraction(4, 5)
    assert report.lowest < 1


def test_k_rate_single_bit(kt_table_10, budget):
    report = k_rate(BitString("1"), budget, table=kt_table_10)
    assert len(report.values) == 1
    assert report.lowest == report.highest


def test_k_rate_incompressible_floor(kt_table_10, budget):
    # nothing beats the literal bound from below arbitrarily: every ratio
    # is at least (kt >= 3) / n, and for strings with no structure the
    # table value stays near the literal cost
    report = k_rate(BitString("1001101011"), budget, table=kt_table_10)
    for n, value in enumerate(report.values, start=1):
        assert value >= 3


def test_circuit_link(census2, census3, budget):
    # census circuits give runnable programs, and the table value never
    # exceeds what the circuit encoding (or the literal fallback) provides
    generous = BudgetPoly(4, 2, 64)
    table = build_kt_table(generous, 8)
    for census in (census2, census3):
        rows = 1 << census.n
        for mask in census.sizes:
            tt = TruthTable(census.n, mask)
            program = encode_circuit(circuit_for(census, tt))
            assert run(program, generous(rows)).output == tt.to_bits()
            assert table.lookup(tt.to_bits()) <= max(
                len(program), rows + C_LIT
            )


def test_witness_relation_counts_pairs(budget):
    rel = kolmogorov_witness_relation(8, budget)
    x = BitString("0" * 4)
    expected = sum(
        1
        for length in range(1, 9)
        for v in range(1 << length)
        if run(format(v, f"0{length}b"), budget(4)).output == x
    )
    assert count(rel, CountMode.WITNESS_COUNT, x) == expected
    assert expected >= 1
