"""Algebraic numbers: exact minimal polynomial plus an isolating disk.

House, Mahler measure and Weil height are computed from certified
enclosures of all conjugates and reported on a base-2 logarithmic scale.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import gmpy2
from gmpy2 import mpfr

from .ball import _DN, ZERO, Ball, _abs, _neg, ball_max, ball_sum, certainly_gt, certainly_lt, div_int, near, snap
from .config import EXACT_DEGREE_CAP, max_prec
from .errors import (
    ConjugateInputs,
    DegreeCapExceeded,
    NotMonicForIntegerContext,
    PrecisionExhausted,
    SelectorAmbiguous,
    ZeroInput,
)
from .poly import IntPolynomial, irreducible_factors, rational_root
from .roots import isolate_squarefree, root_bound_bits

GUARD_BITS = 16


class Decision(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Selector:
    """Which root of a polynomial to take.

    ``kind`` is ``"largest-modulus"``, ``"largest-real"`` or ``"disk"``; the
    disk selector carries a centre ``(re, im)`` (Fractions) and a radius.
    """

    kind: str
    center: tuple[Fraction, Fraction] | None = None
    radius: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("largest-modulus", "largest-real", "disk"):
            raise ValueError(f"unknown selector {self.kind!r}")
        if self.kind == "disk" and (self.center is None or self.radius is None or self.radius <= 0):
            raise ValueError("disk selector needs a centre and a positive radius")

    @classmethod
    def disk(cls, re, im, radius) -> Selector:
        return cls("disk", (Fraction(re), Fraction(im)), Fraction(radius))

    @classmethod
    def parse(cls, text: str) -> Selector:
        """``largest-modulus``, ``largest-real`` or ``disk:re,im,radius``."""
        if text.startswith("disk:"):
            parts = text[5:].split(",")
            if len(parts) != 3:
                raise ValueError("disk selector is disk:re,im,radius")
            return cls.disk(*(Fraction(p.strip()) for p in parts))
        return cls(text)

    def __str__(self) -> str:
        if self.kind != "disk":
            return self.kind
        re, im = self.center
        return f"disk:{re},{im},{self.radius}"


LARGEST_MODULUS = Selector("largest-modulus")
LARGEST_REAL = Selector("largest-real")


@dataclass(frozen=True)
class AlgebraicNumber:
    """Root of ``min_poly`` (irreducible, primitive, positive leading
    coefficient) singled out by ``isolator``."""

    min_poly: IntPolynomial
    isolator: Ball

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    @property
    def is_integer(self) -> bool:
        """Algebraic integer (monic minimal polynomial)."""
        return self.min_poly.is_monic

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def is_zero(self) -> bool:
        return self.min_poly.coeffs == (0, 1)

    def as_rational(self) -> Fraction:
        return rational_root(self.min_poly)

    def conjugates(self, target_exp: int) -> tuple[tuple[Ball, ...], int]:
        """All conjugates as disks of radius ``<= 2**target_exp`` and the index
        of this number among them."""
        return _conjugates(self.min_poly.coeffs, self.isolator, target_exp)

    def ball(self, prec: int) -> Ball:
        """Enclosure with relative accuracy about ``2**-prec``."""
        if self.is_rational:
            return Ball.from_rational(self.as_rational(), prec + 4)
        balls, i = self.conjugates(_relative_target(self.min_poly, prec))
        return balls[i]

    def __str__(self) -> str:
        return f"root of {self.min_poly} near {self.isolator!r}"


def _relative_target(p: IntPolynomial, prec: int) -> int:
    """Absolute target exponent giving every nonzero root about ``prec`` bits
    of relative accuracy."""
    rev = p.reversed()
    small = root_bound_bits(rev) if rev.degree >= 1 else 0
    return -(small + prec + 4)


@lru_cache(maxsize=4096)
def _conjugates(coeffs, isolator: Ball, target_exp: int):
    p = IntPolynomial(coeffs)
    exp = target_exp
    for _ in range(64):
        balls = isolate_squarefree(p, exp)
        hits = [i for i, b in enumerate(balls) if b.overlaps(isolator)]
        if len(hits) == 1:
            return balls, hits[0]
        inside = [i for i in hits if isolator.contains(balls[i])]
        if len(inside) == 1:
            return balls, inside[0]
        if not hits:
            raise ValueError("isolator contains no root of the minimal polynomial")
        exp -= 32
    raise PrecisionExhausted("could not match the isolator to a root")


# -- structural equal-modulus certification -----------------------------------


def _unit_root(m: int, k: int, prec: int) -> Ball:
    """Enclosure of ``exp(2 pi i m / k)``."""
    m %= k
    if 4 * m % k == 0:
        quarter = 4 * m // k
        re, im = [(1, 0), (0, 1), (-1, 0), (0, -1)][quarter]
        return Ball.point(re, im, prec)
    w = prec + 32
    ctx = near(w)
    theta = ctx.div(ctx.mul(ctx.mul_2exp(ctx.const_pi(), 1), m), k)
    # pi, the product, the quotient and cos/sin each round once at w bits.
    return Ball(ctx.cos(theta), ctx.sin(theta), gmpy2.mul_2exp(mpfr(1), 8 - w), prec)


def _modulus_classes(balls, sym) -> list[int]:
    """Union-find labels: equal labels mean certifiably equal modulus.

    Images of a root under complex conjugation and under rotation by
    multiples of ``2 pi / k`` (``k`` the rotation order of ``sym``) are roots
    of ``sym``; when an image disk meets exactly one isolating disk, that
    disk's root is the image and shares the modulus. ``sym`` may also be a
    list of ``(factor, indices)`` pairs, each factor owning those balls.
    """
    n = len(balls)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    groups = [(sym, list(range(n)))] if isinstance(sym, IntPolynomial) else sym
    units = [False] * n
    for poly, idx in groups:
        own = [balls[i] for i in idx]
        k = poly.rotation_order()
        rotations = [_unit_root(m, k, balls[0].prec) for m in range(1, k)] if k > 1 else []
        for i, b in zip(idx, own):
            images = [b.conj()] + [b * z for z in rotations] + [b.conj() * z for z in rotations]
            for img in images:
                hits = [j for j, c in zip(idx, own) if img.overlaps(c)]
                if len(hits) == 1 and hits[0] != i:
                    parent[find(hits[0])] = find(i)
        for i, u in zip(idx, on_unit_circle(own, poly)):
            units[i] = u
    first = next((i for i in range(n) if units[i]), None)
    for i in range(n):
        if units[i]:
            parent[find(i)] = find(first)
    # exact points of equal modulus
    for i in range(n):
        for j in range(i + 1, n):
            a, c = balls[i], balls[j]
            if a.is_exact and c.is_exact and a.is_real and c.is_real and _abs(a.re) == _abs(c.re):
                parent[find(j)] = find(i)
    return [find(i) for i in range(n)]


def on_unit_circle(balls, sym: IntPolynomial) -> list[bool]:
    """Roots certified to have modulus exactly 1.

    For a self-reciprocal ``sym`` the map ``z -> 1/conj(z)`` permutes the
    roots; a disk whose image meets no other disk holds a fixed point.
    """
    c = sym.coeffs
    flags = [False] * len(balls)
    if c != c[::-1] and c != tuple(-a for a in c[::-1]):
        return flags
    for i, b in enumerate(balls):
        if b.contains_zero():
            continue
        img = b.conj().inv()
        if not img.overlaps(b):
            continue
        flags[i] = not any(j != i and img.overlaps(o) for j, o in enumerate(balls))
    return flags


def _im_sign(b: Ball) -> int | None:
    if b.is_real:
        return 0
    if b.im > b.rad:
        return 1
    if b.im < _neg(b.rad):
        return -1
    return None


def _re_ball(b: Ball) -> Ball:
    return Ball(b.re, ZERO, b.rad, b.prec)


def _pick_smallest_arg(balls, idx):
    """Among points of certified equal modulus, the one of smallest principal
    argument in ``[0, 2 pi)``: the closed upper half plane ordered by
    decreasing real part, then the open lower half by increasing real part."""
    keyed = []
    for i in idx:
        s = _im_sign(balls[i])
        if s is None:
            return None
        half, re = (0, -_re_ball(balls[i])) if s >= 0 else (1, _re_ball(balls[i]))
        keyed.append((half, re, i))
    best = min(h for h, _, _ in keyed)
    group = [(re, i) for h, re, i in keyed if h == best]
    for re, i in group:
        if all(j == i or certainly_lt(re, other) for other, j in group):
            return i
    return None


def _select(balls, sym, selector: Selector) -> int | None:
    """Index of the selected root, or None when precision is insufficient."""
    if selector.kind == "largest-modulus":
        mods = [b.abs() for b in balls]
        top = [
            i for i, m in enumerate(mods) if not any(certainly_lt(m, o) for o in mods)
        ]
        if len(top) == 1:
            return top[0]
        labels = _modulus_classes(balls, sym)
        if len({labels[i] for i in top}) != 1:
            return None
        return _pick_smallest_arg(balls, top)
    if selector.kind == "largest-real":
        signs = [_im_sign(b) for b in balls]
        real = [i for i, s in enumerate(signs) if s == 0]
        if any(s is None for s in signs):
            return None
        if not real:
            raise SelectorAmbiguous("polynomial has no real root")
        return max(real, key=lambda i: balls[i].re)
    re, im = selector.center
    prec = balls[0].prec
    centre = Ball.from_rational(re, prec) + Ball.from_rational(im, prec) * Ball.point(0, 1, prec)
    radius = Ball.from_rational(selector.radius, prec)
    outer = centre.inflate(radius.upper())
    inner = Ball(centre.re, centre.im, _DN.sub(radius.lower(), centre.rad), prec)
    hits = [i for i, b in enumerate(balls) if b.overlaps(outer)]
    if not hits:
        raise SelectorAmbiguous("no root inside the selector disk")
    if len(hits) == 1 and inner.rad > 0 and inner.contains(balls[hits[0]]):
        return hits[0]
    return None


def _all_roots(factors, exp):
    labelled = []
    for fi, f in enumerate(factors):
        for b in isolate_squarefree(f, exp):
            labelled.append((fi, b))
    return labelled


def mk_algebraic(
    poly: IntPolynomial,
    selector: Selector = LARGEST_MODULUS,
    *,
    require_integer: bool = False,
    prec: int = 64,
) -> AlgebraicNumber:
    """The root of ``poly`` picked by ``selector``, with its minimal polynomial.

    Ties for ``largest-modulus`` (certified equal moduli) go to the smallest
    principal argument in ``[0, 2 pi)``.
    """
    if poly.degree < 1:
        raise ValueError("polynomial must be nonconstant")
    factors = irreducible_factors(poly)
    bits = max(root_bound_bits(f) for f in factors)
    exp = bits - prec
    cap = max_prec()
    while True:
        labelled = _all_roots(factors, exp)
        balls = [b for _, b in labelled]
        disjoint = all(
            not balls[i].overlaps(balls[j])
            for i in range(len(balls))
            for j in range(i + 1, len(balls))
            if labelled[i][0] != labelled[j][0]
        )
        groups = [(f, [i for i, (fi, _) in enumerate(labelled) if fi == k]) for k, f in enumerate(factors)]
        pick = _select(balls, groups, selector) if disjoint else None
        if pick is not None:
            break
        exp -= max(prec, bits - exp)
        if bits - exp > cap:
            raise SelectorAmbiguous(f"selector {selector} not resolved within {cap} bits")
    fi, ball = labelled[pick]
    f = factors[fi]
    if require_integer and not f.is_monic:
        raise NotMonicForIntegerContext(f"minimal polynomial {f} is not monic")
    return AlgebraicNumber(f, ball)


def from_rational(q) -> AlgebraicNumber:
    q = Fraction(q)
    p = IntPolynomial((-q.numerator, q.denominator))
    return AlgebraicNumber(p, Ball.from_rational(q, max(64, abs(q.numerator).bit_length() + 64)))


def negate(a: AlgebraicNumber) -> AlgebraicNumber:
    return AlgebraicNumber(a.min_poly.compose_neg().primitive(), -a.isolator)


def reciprocal(a: AlgebraicNumber) -> AlgebraicNumber:
    """``1/a``; the minimal polynomial is the coefficient reversal."""
    if a.is_zero:
        raise ZeroInput("reciprocal of zero")
    q = a.min_poly.reversed().primitive()
    if a.is_rational:
        return from_rational(1 / a.as_rational())
    prec = 64
    while True:
        b = a.ball(prec)
        if not b.contains_zero():
            iso = _certify_isolator(q, b.inv())
            if iso is not None:
                return AlgebraicNumber(q, iso)
        prec *= 2
        if prec > max_prec():
            raise PrecisionExhausted("reciprocal isolator not certified")


def _certify_isolator(p: IntPolynomial, enclosure: Ball) -> Ball | None:
    """A disk isolating the root of ``p`` known to lie in ``enclosure``."""
    exp = min(-64, int(gmpy2.floor(gmpy2.log2(enclosure.rad))) - 8) if not enclosure.is_exact else -64
    balls = isolate_squarefree(p, exp)
    hits = [b for b in balls if b.overlaps(enclosure)]
    if len(hits) == 1:
        return hits[0]
    return None


# -- exact arithmetic via composed polynomials --------------------------------


def _power_sums(p: IntPolynomial, count: int) -> list[Fraction]:
    """Newton power sums ``s_0..s_count`` of the roots of ``p``."""
    n = p.degree
    c = [Fraction(a, p.leading) for a in p.coeffs]
    s = [Fraction(n)]
    for k in range(1, count + 1):
        acc = sum((c[n - i] * s[k - i] for i in range(1, min(k - 1, n) + 1)), Fraction(0))
        if k <= n:
            acc += k * c[n - k]
        s.append(-acc)
    return s


def _from_power_sums(s: list[Fraction], n: int) -> list[Fraction]:
    """Monic polynomial (ascending coefficients) of degree ``n`` whose roots
    have power sums ``s``."""
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    for k in range(1, n + 1):
        acc = s[k]
        for i in range(1, k):
            acc += c[n - i] * s[k - i]
        c[n - k] = -acc / k
    return c


def composed_polynomial(op: str, p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """``lc(p)^deg q lc(q)^deg p prod (x - (a_i op b_j))`` over all root pairs,
    i.e. the resultant eliminating ``y`` from ``p(y)`` and ``q(x - y)`` (sum) or
    ``y^deg q q(x/y)`` (product), computed through Newton power sums."""
    m, n = p.degree, q.degree
    N = m * n
    sp = _power_sums(p, N)
    sq = _power_sums(q, N)
    if op == "add":
        s = [
            sum((comb(k, j) * sp[j] * sq[k - j] for j in range(k + 1)), Fraction(0))
            for k in range(N + 1)
        ]
    elif op == "mul":
        s = [sp[k] * sq[k] for k in range(N + 1)]
    else:
        raise ValueError(f"unknown op {op!r}")
    c = _from_power_sums(s, N)
    scale = p.leading**n * q.leading**m
    out = []
    for a in c:
        v = a * scale
        if v.denominator != 1:
            raise ArithmeticError("composed polynomial is not integral")
        out.append(v.numerator)
    return IntPolynomial(tuple(out))


def exact_combine(
    op: str, a: AlgebraicNumber, b: AlgebraicNumber, *, cap: int = EXACT_DEGREE_CAP
) -> AlgebraicNumber:
    """``a + b`` or ``a * b`` with its true minimal polynomial."""
    if a.degree * b.degree > cap:
        raise DegreeCapExceeded(f"degree product {a.degree * b.degree} exceeds {cap}")
    if a.is_rational and b.is_rational:
        x, y = a.as_rational(), b.as_rational()
        return from_rational(x + y if op == "add" else x * y)
    if op == "mul" and (a.is_zero or b.is_zero):
        return from_rational(0)
    big = composed_polynomial(op, a.min_poly, b.min_poly)
    factors = irreducible_factors(big, cap)
    prec = 64
    while prec <= max_prec():
        x, y = a.ball(prec), b.ball(prec)
        value = x + y if op == "add" else x * y
        exp = min(-prec, int(gmpy2.floor(gmpy2.log2(value.rad))) - 4) if not value.is_exact else -prec
        labelled = _all_roots(factors, exp)
        hits = [(fi, rb) for fi, rb in labelled if rb.overlaps(value)]
        if len(hits) == 1:
            fi, rb = hits[0]
            return AlgebraicNumber(factors[fi], rb)
        prec *= 2
    raise PrecisionExhausted("could not identify the combined root")


# -- profiles -----------------------------------------------------------------


@dataclass(frozen=True)
class NumberProfile:
    degree: int
    log2_house: Ball
    log2_mahler: Ball
    log2_height: Ball
    attains_house: Decision
    mahler_exact: int | Fraction | None = None


def mahler_exact(p: IntPolynomial, roots) -> int | None:
    """Mahler measure as an integer when every root is certified on one side
    of the unit circle (then it is ``|a_0|`` or ``|lead|``)."""
    mods = [b.abs() for b in roots]
    one = Ball.from_int(1, roots[0].prec)
    if all(certainly_gt(m, one) for m in mods):
        return abs(p.coeffs[0])
    units = on_unit_circle(roots, p)
    if all(u or m.upper() <= 1 for m, u in zip(mods, units)):
        return abs(p.leading)
    return None


def _attains(balls, idx, sym) -> Decision:
    mods = [b.abs() for b in balls]
    mine = mods[idx]
    labels = None
    undecided = False
    for j, m in enumerate(mods):
        if j == idx:
            continue
        if certainly_gt(m, mine):
            return Decision.NO
        if certainly_lt(m, mine):
            continue
        if labels is None:
            labels = _modulus_classes(balls, sym)
        if labels[j] != labels[idx]:
            undecided = True
    return Decision.UNDECIDED if undecided else Decision.YES


def profile(a: AlgebraicNumber, prec: int = 128) -> NumberProfile:
    """House, Mahler measure and Weil height of ``a`` as base-2 logarithms.

    Log outputs are snapped to absolute radius ``2**-prec`` (or are exact).
    The internal precision doubles until that accuracy is reached and the
    house-attainment flag is decided, up to the global precision cap.
    """
    if prec < 32:
        raise ValueError("prec must be at least 32")
    if a.is_zero:
        raise ZeroInput("house of zero has no logarithm")
    return _profile(a, prec)


@lru_cache(maxsize=4096)
def _profile(a: AlgebraicNumber, prec: int) -> NumberProfile:
    p = a.min_poly
    d = p.degree
    cap = max_prec()
    work = prec + GUARD_BITS
    best = None
    while True:
        balls, idx = a.conjugates(_relative_target(p, work))
        wprec = max(b.prec for b in balls)
        balls = tuple(b.with_prec(wprec) for b in balls)
        mods = [b.abs() for b in balls]
        exact_m = mahler_exact(p, balls)
        if exact_m is not None:
            log_m = Ball.from_int(exact_m, wprec).log2()
        else:
            log_m = Ball.from_int(abs(p.leading), wprec).log2() + ball_sum(
                (m.max1().log2() for m in mods), wprec
            )
        units = on_unit_circle(balls, p)
        if any(units) and all(u or m.upper() <= 1 for m, u in zip(mods, units)):
            log_house = Ball.from_int(0, wprec)
        else:
            log_house = ball_max(mods).log2()
        log_h = div_int(log_m, d) if d > 1 else log_m
        attains = _attains(balls, idx, p)
        fine = all(_fits(x, prec) for x in (log_m, log_house, log_h))
        if fine:
            best = NumberProfile(
                degree=d,
                log2_house=snap(log_house, prec),
                log2_mahler=snap(log_m, prec),
                log2_height=snap(log_h, prec),
                attains_house=attains,
                mahler_exact=exact_m,
            )
            if attains is not Decision.UNDECIDED:
                return best
        if 2 * work > cap:
            if best is None:
                raise PrecisionExhausted("profile accuracy not reached")
            return best
        work *= 2


def _fits(b: Ball, prec: int) -> bool:
    return b.rad <= gmpy2.mul_2exp(mpfr(1), -prec - 1)


def log2_abs(a: AlgebraicNumber, prec: int = 128) -> Ball:
    """``log2 |a|`` snapped to absolute radius ``2**-prec``."""
    if a.is_zero:
        raise ZeroInput("log of zero")
    work = prec + GUARD_BITS
    while True:
        v = a.ball(work).abs().log2()
        if _fits(v, prec):
            return snap(v, prec)
        work *= 2
        if work > max_prec():
            raise PrecisionExhausted("log2|a| accuracy not reached")


# -- Liouville-Mignotte separation -------------------------------------------


def _check_nonconjugate(a: AlgebraicNumber, b: AlgebraicNumber):
    if a.min_poly == b.min_poly:
        raise ConjugateInputs("inputs share a minimal polynomial")


def separation_lower_bound(a: AlgebraicNumber, b: AlgebraicNumber, prec: int = 128) -> Ball:
    """Enclosure of ``log2`` of ``1 / (2^(da db) M(a)^db M(b)^da)``, a lower
    bound for ``|a - b|`` when ``a`` and ``b`` are not conjugate."""
    _check_nonconjugate(a, b)
    if a.is_zero or b.is_zero:
        ma = Ball.from_int(0, prec) if a.is_zero else profile(a, prec).log2_mahler
        mb = Ball.from_int(0, prec) if b.is_zero else profile(b, prec).log2_mahler
    else:
        ma = profile(a, prec).log2_mahler
        mb = profile(b, prec).log2_mahler
    da, db = a.degree, b.degree
    return -(Ball.from_int(da * db, prec) + ma * db + mb * da)


def separation_bound_exact(a: AlgebraicNumber, b: AlgebraicNumber, prec: int = 128) -> Fraction | None:
    """The separation bound as an exact rational when both Mahler measures
    are certified integers, else None."""
    _check_nonconjugate(a, b)

    def m(x):
        if x.is_zero:
            return 1
        return profile(x, prec).mahler_exact

    ma, mb = m(a), m(b)
    if ma is None or mb is None:
        return None
    da, db = a.degree, b.degree
    return Fraction(1, 2 ** (da * db) * ma**db * mb**da)


def conjugate_geometry(a: AlgebraicNumber, prec: int = 128):
    """``(balls, idx, labels, units)`` for the conjugates of ``a``: isolating
    disks with about ``prec`` bits of relative accuracy, the index of ``a``,
    equal-modulus class labels and certified unit-modulus flags."""
    balls, idx = a.conjugates(_relative_target(a.min_poly, prec))
    return balls, idx, _modulus_classes(balls, a.min_poly), on_unit_circle(balls, a.min_poly)
