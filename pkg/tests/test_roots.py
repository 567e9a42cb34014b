from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfcert.ball import Ball
from cfcert.errors import PrecisionExhausted
from cfcert.poly import IntPolynomial, squarefree_part
from cfcert.roots import isolate_roots, root_bound_bits


def pairwise_disjoint(balls):
    return all(not a.overlaps(b) for i, a in enumerate(balls) for b in balls[i + 1 :])


def test_integer_roots_are_contained():
    p = IntPolynomial.from_roots([-3, 1, 7])
    balls = isolate_roots(p, 2.0**-60)
    assert len(balls) == 3
    for r, b in zip([-3, 1, 7], balls):
        assert b.contains(Ball.from_int(r, 64))
        assert b.rad <= 2.0**-60


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=9))
def test_isolation_matches_numpy(coeffs):
    p = squarefree_part(IntPolynomial(tuple(coeffs) + (1,)))
    if p.degree < 1:
        return
    balls = isolate_roots(p, 2.0**-80)
    assert len(balls) == p.degree
    assert pairwise_disjoint(balls)
    assert all(b.rad <= 2.0**-80 for b in balls)
    approx = np.roots(list(reversed(p.coeffs)))
    for z in approx:
        dist = min(abs(complex(float(b.re), float(b.im)) - z) for b in balls)
        assert dist < 1e-5 * max(1.0, abs(z))


def test_real_roots_are_snapped():
    balls = isolate_roots(IntPolynomial((-2, 0, 1)), 2.0**-100)
    assert all(b.is_real for b in balls)
    cplx = isolate_roots(IntPolynomial((1, 0, 1)), 2.0**-100)
    assert not any(b.is_real for b in cplx)


def test_huge_coefficients():
    p = IntPolynomial((-(2**100000), 0, 1))
    balls = isolate_roots(p, Fraction(2**49900))
    assert len(balls) == 2
    top = max(balls, key=lambda b: b.re)
    assert top.contains(Ball.from_int(2**50000, 64))


def test_root_bound():
    p = IntPolynomial.from_roots([100, -5])
    assert 2 ** root_bound_bits(p) >= 100


def test_precision_cap(monkeypatch):
    monkeypatch.setenv("CFCERT_MAX_PREC", "64")
    p = IntPolynomial.from_roots([1, 2]) * IntPolynomial((-(10**30) - 1, 10**30))
    with pytest.raises(PrecisionExhausted):
        isolate_roots(p, 2.0**-200)
