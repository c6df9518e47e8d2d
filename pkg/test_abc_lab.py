import math

import pytest

from recurrence_powers.abc_lab import (
    ABC_DISCLAIMER,
    closed_form_y,
    estimate_lower_constants,
    scan_quality,
    triple,
    xy_pair,
)
from recurrence_powers.bounds import lower_bound_constants
from recurrence_powers.config import Settings
from recurrence_powers.errors import InvalidInput, ZeroEncountered, ZeroTerm
from recurrence_powers.recurrence import make_sequence, resolve_sequence

PRESETS = ["fibonacci", "pell", "lucas"]


def test_xy_examples():
    fib = resolve_sequence("fibonacci")
    rec = xy_pair(fib, 3, 1)
    assert (rec.X, rec.S, rec.Y, rec.d) == (5, 3, -20, 5)
    rec = xy_pair(resolve_sequence("pell"), 2, 0)
    assert (rec.X, rec.S, rec.Y, rec.d) == (8, 2, 32, 32)
    rec = xy_pair(fib, 0, 0)
    assert (rec.X, rec.S, rec.Y) == (4, 0, 16)
    with pytest.raises(InvalidInput):
        xy_pair(fib, 1, 2)


def test_identity_suite():
    print("\nTesting X^2 - D S^2 = Y against the closed form for n <= 200...")
    checked = 0
    for name in PRESETS:
        seq = resolve_sequence(name)
        for n in range(201):
            for m in range(n + 1):
                # xy_pair raises IdentityMismatch when the closed form disagrees
                rec = xy_pair(seq, n, m)
                assert rec.X ** 2 - seq.D * rec.S ** 2 == rec.Y
                assert rec.Y % rec.d == 0
                checked += 1
    print(f"✅ {checked} pairs, zero mismatches")


def test_closed_form_y():
    lucas = resolve_sequence("lucas")
    assert closed_form_y(lucas, 5, 2) == xy_pair(lucas, 5, 2).Y
    assert closed_form_y(resolve_sequence("fibonacci"), 0, 0) == 16


def test_fibonacci_spot_triple():
    print("\nTesting the Fibonacci (3, 1) triple...")
    t = triple(resolve_sequence("fibonacci"), 3, 1)
    assert (t.A, t.B, t.C) == (-4, 9, 5)
    assert t.A + t.B == t.C
    assert t.rad == 30
    assert abs(t.quality - math.log(9) / math.log(30)) < 1e-12
    assert t.reduced and t.residual_gcd == 1 and t.complete_factorization
    print("✅ quality", t.quality)


def test_other_triples():
    fib = resolve_sequence("fibonacci")
    t = triple(fib, 1, 1)
    assert (t.A, t.B, t.C, t.rad) == (-4, 5, 1, 10)
    pell = triple(resolve_sequence("pell"), 2, 0)
    assert (pell.A, pell.B, pell.C, pell.rad) == (1, 1, 2, 2)
    assert pell.quality == 1.0


def test_zero_sum_is_not_a_triple():
    with pytest.raises(ZeroTerm):
        triple(resolve_sequence("fibonacci"), 0, 0)


def test_triples_are_coprime():
    for name in PRESETS:
        seq = resolve_sequence(name)
        for n in range(1, 16):
            for m in range(n + 1):
                t = triple(seq, n, m)
                assert t.A + t.B == t.C
                assert math.gcd(t.A, t.B) == 1 and t.reduced


def test_scan_quality():
    print("\nTesting the quality scan for Fibonacci n <= 10...")
    report = scan_quality(resolve_sequence("fibonacci"), 10, epsilon=0.1, top=5)
    assert report.scanned == 66
    assert report.zero_terms == 1
    assert report.incomplete == 0
    assert len(report.entries) == 5
    qualities = [t.quality for t in report.entries]
    assert qualities == sorted(qualities, reverse=True)
    assert report.above_threshold >= sum(1 for q in qualities if q > 1.1)
    assert report.note == ABC_DISCLAIMER
    print("✅ best quality", qualities[0])


def test_scan_quality_with_workers():
    seq = resolve_sequence("pell")
    serial = scan_quality(seq, 12, top=10)
    pooled = scan_quality(seq, 12, top=10, settings=Settings(workers=2))
    assert serial.entries == pooled.entries


def test_estimate_lower_constants():
    seq = resolve_sequence("fibonacci")
    estimate = estimate_lower_constants(seq, 5, 80)
    assert estimate.non_rigorous
    assert estimate.d3_emp == 5
    rigorous = lower_bound_constants(seq)
    assert estimate.d4_emp >= float(rigorous.d4.lower)
    n, m = estimate.d4_witness
    assert 5 <= n <= 80 and 0 <= m <= n
    assert estimate.d5_emp is not None and estimate.d5_emp > 0


def test_empirical_d4_shrinks_with_range():
    for name in ("fibonacci", "pell", "lucas"):
        seq = resolve_sequence(name)
        previous = None
        for n_max in range(10, 121, 10):
            d4 = estimate_lower_constants(seq, 5, n_max).d4_emp
            if previous is not None:
                assert d4 <= previous
            previous = d4


def test_estimate_reports_zero_witness():
    seq = make_sequence(1, 1, 1, -1)
    with pytest.raises(ZeroEncountered) as info:
        estimate_lower_constants(seq, 0, 5)
    assert info.value.witness == (1, 0)
    with pytest.raises(InvalidInput):
        estimate_lower_constants(seq, 5, 5)


if __name__ == "__main__":
    print("Testing the abc lab...")
    print("=" * 80)
    test_xy_examples()
    test_identity_suite()
    test_closed_form_y()
    test_fibonacci_spot_triple()
    test_other_triples()
    test_zero_sum_is_not_a_triple()
    test_triples_are_coprime()
    test_scan_quality()
    test_scan_quality_with_workers()
    test_estimate_lower_constants()
    test_empirical_d4_shrinks_with_range()
    test_estimate_reports_zero_witness()
    print("\nTests completed!")
