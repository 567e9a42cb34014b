from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfcert.algebraic import Decision, from_rational, mk_algebraic
from cfcert.ball import Ball
from cfcert.criterion import (
    CHECK_NAMES,
    Outcome,
    Verdict,
    build_certificate,
    build_ledger,
    check_proof_inequalities,
    contradiction_threshold,
    detect_records,
    exponent_denominator,
    houses_bounded,
    scan_records,
    stable_threshold,
    witness_check,
)
from cfcert.errors import HypothesisShapeError, HypothesisViolated
from cfcert.poly import IntPolynomial


def B(x, prec=128):
    return Ball.from_rational(Fraction(x), prec)


def sqrt_pow2(e):
    """sqrt(2^e): degree 1 when e is even, degree 2 otherwise."""
    if e % 2 == 0:
        return from_rational(2 ** (e // 2))
    return mk_algebraic(IntPolynomial((-(2**e), 0, 1)))


def ten_family(count, shift=0):
    return [sqrt_pow2(10**n + shift) for n in range(1, count + 1)]


def test_exponent_denominator_values():
    assert [exponent_denominator(n, 2, 1) for n in range(1, 5)] == [1, 2, 12, 120]
    assert exponent_denominator(3, 3, 2) == 126
    assert exponent_denominator(1, 7, 5) == 5


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("D", [1, 2, 3])
def test_exponent_denominator_recurrence(d, D):
    e = [None] + [exponent_denominator(n, d, D) for n in range(1, 52)]
    assert e[2] == d * e[1]
    for n in range(2, 51):
        assert e[n + 1] == d * (D * d ** (n - 1) + 1) * e[n]


def test_record_examples():
    assert detect_records([B(1), B(2), B(3)]) == [2]
    assert detect_records([B(1), B(4), B(2), B(16)]) == [1, 3]
    assert detect_records([B(7)] * 6) == []


def test_undecided_records_are_flagged():
    fuzzy = Ball.from_int(2, 64).inflate(Ball.from_rational(Fraction(1, 10), 64).re)
    records, undecided = scan_records([B(1), fuzzy])
    assert records == [] and undecided == [1]


@given(st.integers(2, 12))
def test_records_keep_appearing_for_growing_sequences(horizon):
    values = [B(2 ** (n * n)) for n in range(1, horizon + 1)]
    records = detect_records(values)
    assert records == list(range(1, horizon))


def ledger_from(log_houses, d=2, D=1):
    return build_ledger([B(x) for x in log_houses], d, D)


def test_witness_examples():
    ledger = ledger_from([5, 50, 500, 5000])
    w2 = witness_check(ledger, 2)
    assert w2.outcome is Outcome.HOLDS
    assert w2.lhs_log2.contains(B(500)) and w2.rhs_log2.overlaps(B(229))
    w3 = witness_check(ledger, 3)
    assert w3.outcome is Outcome.HOLDS and w3.rhs_log2.overlaps(B(4467))
    flat = witness_check(ledger_from([1, 1, 1]), 2)
    assert flat.outcome is Outcome.FAILS and flat.rhs_log2.overlaps(B(17))


@given(
    st.lists(st.integers(0, 10**4), min_size=3, max_size=6),
    st.integers(2, 9),
)
def test_witness_scaling_is_re_evaluated(houses, c):
    N = len(houses) - 1
    base = witness_check(ledger_from(houses), N)
    scaled = witness_check(ledger_from([c * h for h in houses]), N)
    assert scaled.lhs_log2.overlaps(base.lhs_log2 * c)
    sigma = base.rhs_log2 - 3**N
    assert (scaled.rhs_log2 - 3**N).overlaps(sigma * c)
    lhs, rhs = c * houses[-1], 3**N + 2**N * c * sum(houses[:-1])
    assert scaled.outcome is (Outcome.HOLDS if lhs >= rhs else Outcome.FAILS)


def linear_scan(d, h):
    N = 1
    while not (d + 1) ** N > d**N * (2 * N - 1 + h):
        N += 1
    return N


@pytest.mark.parametrize("d, D, H, expected", [(2, 1, 1, 1), (2, 2, 4, 7), (3, 1, 2, 11)])
def test_threshold_examples(d, D, H, expected):
    assert contradiction_threshold(d, D, H) == expected
    assert linear_scan(d, H.bit_length() - 1) == expected


@given(st.integers(2, 6), st.integers(0, 40))
def test_threshold_matches_scan(d, h):
    assert contradiction_threshold(d, 1, H_star_log2=h) == linear_scan(d, h)
    assert stable_threshold(d, 1, H_star_log2=h) >= linear_scan(d, h)


def test_threshold_non_monotone_onset():
    # the ratio exceeds 1 at N=1, drops below it, then rises for good
    assert contradiction_threshold(2, 1, 1) == 1
    assert stable_threshold(2, 1, 1) == 6


def test_threshold_with_non_power_height():
    assert contradiction_threshold(2, 1, 3) == linear_scan(2, Fraction(1585, 1000))


def test_proof_inequalities():
    rep = check_proof_inequalities(50, 2, 1)
    assert rep.log_bound[1] is True
    assert [rep.growth_bound[N] for N in (1, 2, 3)] == [False, False, False]
    assert all(rep.growth_bound[N] for N in range(4, 51))
    assert rep.onset == 4
    assert rep.ratio_increasing[3] and all(rep.ratio_increasing.values())


def test_shape_refused():
    with pytest.raises(HypothesisShapeError):
        contradiction_threshold(1, 1, 1)
    with pytest.raises(HypothesisShapeError):
        build_certificate(ten_family(5), 1, 1, H_star_log2=10, horizon=4)


def test_certificate_for_power_family():
    cert = build_certificate(ten_family(5), 2, 1, H_star_log2=10, horizon=4, prec=256)
    assert cert.verdict is Verdict.EXCLUDED
    assert cert.N == 3
    assert all(v is Decision.YES for v in cert.hypothesis_checks.values())
    assert cert.witness_lhs_log2.contains(B(5000))
    assert cert.witness_rhs_log2.overlaps(B(4467))
    assert cert.threshold_N_star == 8
    assert any("conjugate" in n for n in cert.notes)
    assert "degree <= 1" in cert.statement


def test_certificate_degree_two_family():
    cert = build_certificate(ten_family(5, shift=1), 2, 1, H_star_log2=10, horizon=4, prec=256)
    assert cert.verdict is Verdict.EXCLUDED
    assert not cert.warnings


def test_constant_sqrt2_is_inconclusive():
    r2 = mk_algebraic(IntPolynomial((-2, 0, 1)))
    cert = build_certificate([r2] * 5, 2, 1, H_star_log2=10, horizon=4)
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert cert.failed_check == "witness_ok"
    assert "bounded houses" in cert.warnings
    assert houses_bounded(cert.log2_houses)


def test_strict_degree_hypothesis():
    qs = [from_rational(n) for n in range(1, 6)]
    with pytest.raises(HypothesisViolated) as exc:
        build_certificate(qs, 2, 1, H_star=1, horizon=4, strict_degree=True)
    assert exc.value.name == "max-degree-not-attained"


def test_certified_violations_raise():
    cubic = mk_algebraic(IntPolynomial((-2, 0, 0, 1)))
    with pytest.raises(HypothesisViolated) as exc:
        build_certificate([cubic] * 5, 2, 1, H_star=1, horizon=4)
    assert exc.value.name == "degree-exceeds-d"
    half = from_rational(Fraction(1, 2))
    with pytest.raises(HypothesisViolated) as exc:
        build_certificate([half] * 5, 2, 1, H_star=1, horizon=4)
    assert exc.value.name == "not-algebraic-integer"


@pytest.mark.parametrize("check", CHECK_NAMES)
def test_fault_injection_flips_verdict(check):
    qs = ten_family(5)
    cert = build_certificate(qs, 2, 1, H_star_log2=10, horizon=4, force_undecided=check)
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert cert.failed_check == check
