"""Dense integer polynomials and their factorization over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .ball import Ball
from .config import EXACT_DEGREE_CAP
from .errors import IrreducibilityUndecided


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients in ascending degree order."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(a) for a in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        if not c:
            c = (0,)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots) -> IntPolynomial:
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        if self.coeffs == (0,):
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    def content(self) -> int:
        g = 0
        for a in self.coeffs:
            g = gcd(g, a)
        return g

    def primitive(self) -> IntPolynomial:
        """Content-free with a positive leading coefficient."""
        g = self.content() or 1
        if self.leading < 0:
            g = -g
        return IntPolynomial(tuple(a // g for a in self.coeffs))

    def reversed(self) -> IntPolynomial:
        """``x**deg * p(1/x)``; the polynomial of reciprocal roots."""
        c = list(self.coeffs)
        while c and c[0] == 0:
            c.pop(0)
        return IntPolynomial(tuple(reversed(c)))

    def compose_neg(self) -> IntPolynomial:
        """``p(-x)``."""
        return IntPolynomial(tuple(a if i % 2 == 0 else -a for i, a in enumerate(self.coeffs)))

    def derivative(self) -> IntPolynomial:
        return IntPolynomial(tuple(i * a for i, a in enumerate(self.coeffs))[1:] or (0,))

    def __mul__(self, other: IntPolynomial) -> IntPolynomial:
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __call__(self, x):
        """Horner evaluation at an int, Fraction or Ball."""
        if isinstance(x, Ball):
            acc = Ball.from_int(self.coeffs[-1], x.prec)
            for a in reversed(self.coeffs[:-1]):
                acc = acc * x + a
            return acc
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def rotation_order(self) -> int:
        """Largest ``k`` such that all exponents with nonzero coefficient agree
        mod ``k``. The root set is then invariant under rotation by ``2*pi/k``."""
        exps = [i for i, a in enumerate(self.coeffs) if a]
        k = 0
        for e in exps[1:]:
            k = gcd(k, e - exps[0])
        return k

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if not a:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(a) == 1:
                coef = "-" if a < 0 else "+"
                terms.append(f"{coef} {mono}")
            else:
                sep = " * " if mono else ""
                terms.append(f"{'-' if a < 0 else '+'} {_coef_text(abs(a))}{sep}{mono}")
        s = " ".join(terms) or "0"
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _coef_text(a: int) -> str:
    """Decimal, or ``2^k`` for large powers of two; huge values are
    abbreviated by their bit length."""
    if a > 1 << 64 and a & (a - 1) == 0:
        return f"2^{a.bit_length() - 1}"
    if a.bit_length() > 12000:
        return f"<{a.bit_length()}-bit integer>"
    return str(a)


def rational_root(p: IntPolynomial) -> Fraction:
    """The root of a degree-one polynomial."""
    if p.degree != 1:
        raise ValueError("not linear")
    return Fraction(-p.coeffs[0], p.coeffs[1])


def _split_quadratic(p: IntPolynomial) -> list[IntPolynomial] | None:
    """Linear factors of a quadratic, or None when it is irreducible."""
    c, b, a = p.coeffs
    disc = b * b - 4 * a * c
    if disc < 0 or isqrt(disc) ** 2 != disc:
        return None
    s = isqrt(disc)
    out = {IntPolynomial((b - s, 2 * a)).primitive(), IntPolynomial((b + s, 2 * a)).primitive()}
    return sorted(out, key=lambda f: f.coeffs)


@lru_cache(maxsize=4096)
def _factor_cached(coeffs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain=sympy.ZZ)
    _, factors = poly.factor_list()
    out = []
    for f, _mult in factors:
        c = tuple(int(a) for a in reversed(f.all_coeffs()))
        out.append(IntPolynomial(c).primitive().coeffs)
    out.sort(key=lambda c: (len(c), c))
    return tuple(out)


def irreducible_factors(p: IntPolynomial, cap: int = EXACT_DEGREE_CAP) -> list[IntPolynomial]:
    """Distinct irreducible factors of ``p`` (primitive, positive leading
    coefficient), ordered by degree then coefficients.

    Linear and quadratic inputs are decided directly; anything else goes to
    sympy's Zassenhaus factorization, refused beyond ``cap``.
    """
    if p.degree < 1:
        raise ValueError("constant polynomial has no roots")
    q = p.primitive()
    if q.degree == 1:
        return [q]
    if q.degree == 2:
        split = _split_quadratic(q)
        return [q] if split is None else split
    if q.degree > cap:
        raise IrreducibilityUndecided(
            f"degree {q.degree} exceeds the factorization cap {cap}"
        )
    return [IntPolynomial(c) for c in _factor_cached(q.coeffs)]


def is_irreducible(p: IntPolynomial, cap: int = EXACT_DEGREE_CAP) -> bool:
    fs = irreducible_factors(p, cap)
    return len(fs) == 1 and fs[0].degree == p.degree


def squarefree_part(p: IntPolynomial, cap: int = EXACT_DEGREE_CAP) -> IntPolynomial:
    out = IntPolynomial((1,))
    for f in irreducible_factors(p, cap):
        out = out * f
    return out
