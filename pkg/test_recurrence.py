import os
from fractions import Fraction
from unittest.mock import patch

import pytest

from recurrence_powers.errors import DegenerateSequence, InvalidInput, SequenceParseError
from recurrence_powers.recurrence import (
    ConditionStatus,
    Parity,
    binet_interval,
    chebyshev,
    chebyshev_eval,
    check_nondegenerate,
    companion_term,
    condition_17,
    load_presets,
    lucas_companion,
    make_sequence,
    parse_seeds,
    resolve_sequence,
    term,
    terms,
)

PRESETS = ["fibonacci", "pell", "lucas"]


def iterate(seq, n):
    values = [seq.U0, seq.U1]
    while len(values) <= n:
        values.append(seq.P * values[-1] + seq.Q * values[-2])
    return values[n]


def test_make_sequence_examples():
    print("\nTesting sequence construction...")
    fib = make_sequence(1, 1, 0, 1)
    assert fib.D == 5 and fib.a1a2_int == 1
    lucas = make_sequence(1, 1, 2, 1)
    assert lucas.D == 5 and lucas.a1a2_int == -5
    for seq in (fib, lucas, make_sequence(2, 1, 0, 1)):
        assert seq.alpha + seq.beta == seq.P
        assert seq.alpha * seq.beta == -seq.Q
        assert seq.a1 * seq.a2 == seq.a1a2_int
        assert seq.alpha > 1 and seq.alpha > abs(seq.beta)
    print("✅ derived fields check out")


@pytest.mark.parametrize("seeds, failed", [
    ((1, -1, 0, 1), "discriminant_positive"),
    ((0, 2, 1, 1), "pq_nonzero"),
    ((1, 1, 0, 0), "seeds_nonzero"),
    ((2, -1, 0, 1), "discriminant_positive"),
    ((-1, 1, 0, 1), "dominant_root"),
    ((1, 2, 1, 2), "coefficients_nonzero"),
])
def test_degenerate_inputs_are_rejected(seeds, failed):
    with pytest.raises(DegenerateSequence) as info:
        make_sequence(*seeds)
    assert failed in [c.name for c in info.value.failures]


def test_check_nondegenerate_reports_every_item():
    report = check_nondegenerate(make_sequence(1, 1, 0, 1))
    assert report.passed
    assert {"pq_nonzero", "seeds_nonzero", "discriminant_positive", "root_ratio_not_unity"} <= {
        c.name for c in report.checks
    }
    bad = check_nondegenerate((0, 2, 1, 1))
    assert not bad.passed
    assert [c.name for c in bad.failures()] == ["pq_nonzero", "root_ratio_not_unity", "dominant_root"]


def test_perfect_square_discriminant_is_allowed():
    seq = make_sequence(1, 2, 0, 1)  # roots 2 and -1
    assert seq.square_discriminant
    assert seq.alpha.as_rational() == 2 and seq.beta.as_rational() == -1
    assert [term(seq, n) for n in range(6)] == [0, 1, 1, 3, 5, 11]


def test_term_examples():
    fib = resolve_sequence("fibonacci")
    assert term(fib, 10) == 55
    assert term(fib, 0) == 0 and term(fib, 1) == 1
    assert term(resolve_sequence("pell"), 7) == 169
    with pytest.raises(InvalidInput):
        term(fib, -1)


def test_doubling_matches_iteration():
    print("\nTesting fast doubling against the recurrence for n <= 1000...")
    for name in PRESETS:
        seq = resolve_sequence(name)
        values = [u for _, u in terms(seq, 0, 1001)]
        for n in (0, 1, 2, 17, 64, 255, 999, 1000):
            assert term(seq, n) == values[n] == iterate(seq, n)
        assert [u for _, u in terms(seq, 500, 505)] == values[500:505]
    print("✅ all presets agree")


def test_companion_examples():
    fib = resolve_sequence("fibonacci")
    assert companion_term(fib, 3) == 4
    assert companion_term(fib, 0) == 2
    assert companion_term(resolve_sequence("lucas"), 2) == 5
    assert [lucas_companion(fib, n) for n in range(6)] == [2, 1, 3, 4, 7, 11]


def test_companion_identity():
    print("\nTesting W_n^2 - D U_n^2 = 4(-Q)^n a1a2 for n <= 500...")
    for name in PRESETS:
        seq = resolve_sequence(name)
        for n in range(501):
            w, u = companion_term(seq, n), term(seq, n)
            assert w * w - seq.D * u * u == 4 * (-seq.Q) ** n * seq.a1a2_int
    print("✅ identity holds")


def test_binet_interval_contains_term():
    for name in PRESETS:
        seq = resolve_sequence(name)
        for bits in (64, 128, 256):
            for n in (0, 5, 40, 100):
                assert binet_interval(seq, n, bits).contains(term(seq, n))


def test_chebyshev():
    assert chebyshev_eval(0, 11) == 2
    assert chebyshev_eval(1, 11) == 11
    assert chebyshev_eval(2, 3) == 7
    assert chebyshev_eval(4, 2) == 2
    previous, current = 2, 5
    for n in range(2, 40):
        previous, current = current, 5 * current - previous
        assert chebyshev(n, 5).value == current


def test_lucas_type_doubling_identity():
    for P, Q in [(1, 1), (2, 1), (3, 1), (3, -1)]:
        seq = make_sequence(P, Q, 2, P)
        for n in range(101):
            assert term(seq, 2 * n) == term(seq, n) ** 2 - 2 * (-Q) ** n


def test_condition_17_examples():
    lucas = resolve_sequence("lucas")
    fib = resolve_sequence("fibonacci")
    assert condition_17(lucas, Parity.EVEN, 0) is ConditionStatus.FAILS
    assert condition_17(fib, Parity.ODD, 3) is ConditionStatus.HOLDS
    assert condition_17(fib, Parity.EVEN, 0) is ConditionStatus.HOLDS
    assert Parity.of(4) is Parity.EVEN and Parity.of(7) is Parity.ODD


def test_presets_and_parsing():
    presets = load_presets()
    assert presets == {"fibonacci": (1, 1, 0, 1), "pell": (2, 1, 0, 1), "lucas": (1, 1, 2, 1)}
    assert parse_seeds(" 2, 1, 0 ,1") == (2, 1, 0, 1)
    assert resolve_sequence("Fibonacci").name == "fibonacci"
    assert resolve_sequence("3,1,0,1").descriptor == "3,1,0,1"
    with pytest.raises(SequenceParseError):
        parse_seeds("1,1,0")
    with pytest.raises(SequenceParseError):
        parse_seeds("1,1,zero,1")
    with pytest.raises(SequenceParseError):
        resolve_sequence("tribonacci")


def test_presets_file_from_environment(tmp_path):
    custom = tmp_path / "presets.env"
    custom.write_text("jacobsthal=1,2,0,1\n")
    with patch.dict(os.environ, {"RPL_PRESETS": str(custom)}):
        seq = resolve_sequence("jacobsthal")
    assert seq.seeds == (1, 2, 0, 1)
    assert seq.alpha.as_rational() == 2 and seq.beta.as_rational() == Fraction(-1)


if __name__ == "__main__":
    print("Testing binary recurrence sequences...")
    print("=" * 80)
    test_make_sequence_examples()
    test_check_nondegenerate_reports_every_item()
    test_perfect_square_discriminant_is_allowed()
    test_term_examples()
    test_doubling_matches_iteration()
    test_companion_examples()
    test_companion_identity()
    test_binet_interval_contains_term()
    test_chebyshev()
    test_lucas_type_doubling_identity()
    test_condition_17_examples()
    test_presets_and_parsing()
    print("\nTests completed!")
