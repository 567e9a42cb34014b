from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cfcert.errors import IrreducibilityUndecided
from cfcert.poly import IntPolynomial, irreducible_factors, is_irreducible, squarefree_part

small_polys = st.lists(st.integers(-9, 9), min_size=2, max_size=6).map(
    lambda c: IntPolynomial(tuple(c) + (1,))
)


def test_normalization_and_printing():
    p = IntPolynomial((-2, 0, 1, 0, 0))
    assert p.coeffs == (-2, 0, 1)
    assert p.degree == 2 and p.is_monic
    assert str(p) == "x^2 - 2"
    assert str(IntPolynomial((1, -3, 2))) == "2 * x^2 - 3 * x + 1"
    assert str(IntPolynomial((-(2**100), 0, 1))) == "x^2 - 2^100"


def test_evaluation_and_structure():
    p = IntPolynomial.from_roots([1, 2, 3])
    assert p(2) == 0 and p(Fraction(1, 2)) != 0
    assert p.reversed().coeffs == tuple(reversed(p.coeffs))
    assert p.compose_neg()(-1) == 0
    assert IntPolynomial((1, 0, 0, 0, 1)).rotation_order() == 4
    assert IntPolynomial((-2, 0, 0, 1)).rotation_order() == 3
    assert IntPolynomial((-1, -1, 1)).rotation_order() == 1


def test_quadratic_split_without_sympy():
    assert irreducible_factors(IntPolynomial((-4, 0, 1))) == [
        IntPolynomial((-2, 1)),
        IntPolynomial((2, 1)),
    ]
    assert is_irreducible(IntPolynomial((-2, 0, 1)))


@given(small_polys, small_polys)
def test_factors_multiply_back(p, q):
    prod = p * q
    factors = irreducible_factors(prod)
    x = sympy.Symbol("x")
    ref = sympy.Poly(list(reversed(prod.coeffs)), x).sqf_part()
    acc = IntPolynomial((1,))
    for f in factors:
        acc = acc * f
    assert acc.primitive() == IntPolynomial(tuple(int(c) for c in reversed(ref.all_coeffs()))).primitive()
    for f in factors:
        assert sympy.Poly(list(reversed(f.coeffs)), x).is_irreducible


def test_cap_refuses_large_degree():
    p = IntPolynomial((-2,) + (0,) * 69 + (1,))
    with pytest.raises(IrreducibilityUndecided):
        irreducible_factors(p, cap=64)


def test_squarefree_part():
    p = IntPolynomial.from_roots([1, 1, 2])
    assert squarefree_part(p) == IntPolynomial.from_roots([1, 2])
