"""Complex midpoint-radius balls over MPFR dyadic rationals.

Midpoints are rounded to nearest at the ball's working precision and every
rounding error is folded into the radius. Radii are kept at 64 bits and are
only ever rounded upward, so each derived ball encloses the exact result of
the operation applied to any points of the operand balls.

All MPFR operations go through explicit contexts: gmpy2 operators on bare
``mpfr`` objects silently round to the global 53-bit context.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

RAD_PREC = 64

_EMAX = gmpy2.get_emax_max()
_EMIN = gmpy2.get_emin_min()


@lru_cache(maxsize=None)
def context(prec: int, rnd=gmpy2.RoundToNearest):
    return gmpy2.context(
        precision=prec,
        round=rnd,
        emax=_EMAX,
        emin=_EMIN,
        subnormalize=False,
        trap_underflow=True,
        trap_overflow=True,
        trap_invalid=True,
        trap_divzero=True,
    )


def near(prec: int):
    return context(prec, gmpy2.RoundToNearest)


def down(prec: int):
    return context(prec, gmpy2.RoundDown)


def up(prec: int):
    return context(prec, gmpy2.RoundUp)


_UP = up(RAD_PREC)
_DN = down(RAD_PREC)
ZERO = mpfr(0)


def exact(n) -> mpfr:
    """Exact MPFR value of an int or an mpfr (no rounding)."""
    if isinstance(n, int):
        return mpfr(n, max(n.bit_length(), 2))
    return n


def _rerr(x: mpfr, prec: int) -> mpfr:
    # |x - t| <= 2^(1-prec) |x| when x = RN_prec(t); a zero result is exact.
    if gmpy2.is_zero(x):
        return ZERO
    return _UP.mul_2exp(_UP.abs(x), 1 - prec)


def _uadd(*xs: mpfr) -> mpfr:
    acc = ZERO
    for x in xs:
        acc = _UP.add(acc, x)
    return acc


@dataclass(frozen=True)
class Ball:
    """Closed disk ``{z : |z - (re + i im)| <= rad}``."""

    re: mpfr
    im: mpfr
    rad: mpfr
    prec: int

    # -- construction -------------------------------------------------------

    @classmethod
    def point(cls, re, im=0, prec: int = 128) -> Ball:
        """Ball of radius zero; ``re``/``im`` must be ints or mpfr values."""
        return cls(exact(re), exact(im), ZERO, prec)

    @classmethod
    def from_int(cls, n: int, prec: int) -> Ball:
        x = exact(n)
        r = near(prec).plus(x)
        return cls(r, ZERO, ZERO if r == x else _rerr(r, prec), prec)

    @classmethod
    def from_rational(cls, q, prec: int) -> Ball:
        q = Fraction(q)
        if q.denominator == 1:
            return cls.from_int(q.numerator, prec)
        r = near(prec).div(exact(q.numerator), exact(q.denominator))
        return cls(r, ZERO, ZERO if to_fraction(r) == q else _rerr(r, prec), prec)

    @classmethod
    def from_interval(cls, lo: mpfr, hi: mpfr, prec: int) -> Ball:
        """Real ball enclosing ``[lo, hi]``."""
        if lo > hi:
            raise ValueError("empty interval")
        if lo == hi:
            m = near(prec).plus(lo)
            if m == lo:
                return cls(m, ZERO, ZERO, prec)
        m = near(prec).div_2exp(near(prec + 2).add(lo, hi), 1)
        rad = _UP.maxnum(_UP.sub(hi, m), _UP.sub(m, lo))
        return cls(m, ZERO, rad, prec)

    @classmethod
    def from_mpc(cls, z, prec: int, rad=ZERO) -> Ball:
        return cls(z.real, z.imag, rad, prec)

    def with_prec(self, prec: int) -> Ball:
        return Ball(self.re, self.im, self.rad, prec)

    def inflate(self, r: mpfr) -> Ball:
        return Ball(self.re, self.im, _UP.add(self.rad, r), self.prec)

    # -- basic queries ------------------------------------------------------

    @property
    def is_real(self) -> bool:
        return gmpy2.is_zero(self.im)

    @property
    def is_exact(self) -> bool:
        return gmpy2.is_zero(self.rad)

    def lower(self) -> mpfr:
        """Lower endpoint of a real ball."""
        return down(self.prec).sub(self.re, self.rad)

    def upper(self) -> mpfr:
        return up(self.prec).add(self.re, self.rad)

    def mag_upper(self) -> mpfr:
        """Upper bound on ``|z|`` over the ball."""
        return _UP.add(_UP.hypot(self.re, self.im), self.rad)

    def mag_lower(self) -> mpfr:
        m = _DN.sub(_DN.hypot(self.re, self.im), self.rad)
        return m if m > 0 else ZERO

    def contains_zero(self) -> bool:
        return self.mag_lower() <= 0

    def overlaps(self, other: Ball) -> bool:
        """False only when the disks are certifiably disjoint."""
        return (self - other).contains_zero()

    def contains(self, other: Ball) -> bool:
        """True only when ``other`` is certifiably inside ``self``."""
        p = max(self.prec, other.prec)
        d = Ball(self.re, self.im, ZERO, p) - Ball(other.re, other.im, ZERO, p)
        dist = _UP.add(_UP.hypot(d.re, d.im), d.rad)
        return _UP.add(dist, other.rad) <= self.rad

    def contains_point(self, z: Ball) -> bool:
        return self.contains(z)

    def __bool__(self):
        raise TypeError("Ball has no truth value; use certified predicates")

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Ball:
        if isinstance(other, Ball):
            return other
        if isinstance(other, int):
            return Ball.from_int(other, self.prec)
        if isinstance(other, Fraction):
            return Ball.from_rational(other, self.prec)
        return NotImplemented

    def __neg__(self) -> Ball:
        return Ball(_neg(self.re), _neg(self.im), self.rad, self.prec)

    def conj(self) -> Ball:
        return Ball(self.re, _neg(self.im), self.rad, self.prec)

    def __add__(self, other) -> Ball:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        ctx = near(p)
        re = ctx.add(self.re, other.re)
        im = ctx.add(self.im, other.im)
        rad = _uadd(self.rad, other.rad, _rerr(re, p), _rerr(im, p))
        return Ball(re, im, rad, p)

    __radd__ = __add__

    def __sub__(self, other) -> Ball:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Ball:
        return (-self) + other

    def __mul__(self, other) -> Ball:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = max(self.prec, other.prec)
        ctx = near(p)
        a, b = self, other
        if a.is_real and b.is_real:
            re = ctx.mul(a.re, b.re)
            im = ZERO
        else:
            re = ctx.fmms(a.re, b.re, a.im, b.im)
            im = ctx.fmma(a.re, b.im, a.im, b.re)
        ma = _UP.hypot(a.re, a.im)
        mb = _UP.hypot(b.re, b.im)
        rad = _uadd(
            _UP.mul(ma, b.rad),
            _UP.mul(mb, a.rad),
            _UP.mul(a.rad, b.rad),
            _rerr(re, p),
            _rerr(im, p),
        )
        return Ball(re, im, rad, p)

    __rmul__ = __mul__

    def mul_2exp(self, k: int) -> Ball:
        """Exact scaling by ``2**k``."""
        return Ball(
            _shift(self.re, k),
            _shift(self.im, k),
            _shift(self.rad, k),
            self.prec,
        )

    def inv(self) -> Ball:
        p = self.prec
        mlo = _DN.hypot(self.re, self.im)
        gap = _DN.sub(mlo, self.rad)
        if gap <= 0:
            raise ZeroDivisionError("ball contains zero")
        # |1/(m+e) - 1/m| <= r / (|m| (|m| - r))
        spread = _UP.div(self.rad, _DN.mul(mlo, gap))
        ctx = near(p)
        if self.is_real:
            c = ctx.div(1, self.re)
            return Ball(c, ZERO, _UP.add(spread, _rerr(c, p)), p)
        wide = near(p + 16)
        n2 = wide.fmma(self.re, self.re, self.im, self.im)
        c = Ball(ctx.div(self.re, n2), _neg(ctx.div(self.im, n2)), ZERO, p)
        # residual bound: |c - 1/m| = |c m - 1| / |m|
        resid = c * Ball(self.re, self.im, ZERO, p) - 1
        err = _UP.div(resid.mag_upper(), mlo)
        return Ball(c.re, c.im, _uadd(spread, err), p)

    def __truediv__(self, other) -> Ball:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other) -> Ball:
        return self._coerce(other) * self.inv()

    def __pow__(self, k: int) -> Ball:
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Ball.from_int(1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- real-valued functions ---------------------------------------------

    def abs(self) -> Ball:
        """Real ball enclosing ``|z|`` for ``z`` in the ball."""
        p = self.prec
        if self.is_real:
            a = _abs(self.re)
            lo = down(p).sub(a, self.rad)
            hi = up(p).add(a, self.rad)
        else:
            lo = down(p).sub(down(p).hypot(self.re, self.im), self.rad)
            hi = up(p).add(up(p).hypot(self.re, self.im), self.rad)
        if lo < 0:
            lo = ZERO
        return Ball.from_interval(lo, hi, p)

    def _monotone(self, name: str) -> Ball:
        if not self.is_real:
            raise ValueError(f"{name} needs a real ball")
        lo, hi = self.lower(), self.upper()
        if lo <= 0:
            raise ValueError(f"{name} of a ball reaching nonpositive values")
        p = self.prec
        return Ball.from_interval(
            getattr(down(p), name)(lo), getattr(up(p), name)(hi), p
        )

    def log2(self) -> Ball:
        return self._monotone("log2")

    def log(self) -> Ball:
        return self._monotone("log")

    def sqrt(self) -> Ball:
        if self.is_real and self.lower() == 0 and self.upper() >= 0:
            return Ball.from_interval(ZERO, up(self.prec).sqrt(self.upper()), self.prec)
        return self._monotone("sqrt")

    def max1(self) -> Ball:
        """``max(1, x)`` over a real ball."""
        lo, hi = self.lower(), self.upper()
        one = mpfr(1)
        return Ball.from_interval(max(lo, one), max(hi, one), self.prec)

    def __repr__(self) -> str:
        if self.is_real:
            return f"Ball({float(self.re):.12g} +/- {float(self.rad):.3g})"
        return (
            f"Ball({float(self.re):.12g}{float(self.im):+.12g}j"
            f" +/- {float(self.rad):.3g})"
        )


def _neg(x: mpfr) -> mpfr:
    return context(max(x.precision, 2)).minus(x)


def _abs(x: mpfr) -> mpfr:
    return context(max(x.precision, 2)).abs(x)


def _shift(x: mpfr, k: int) -> mpfr:
    if gmpy2.is_zero(x):
        return x
    return context(max(x.precision, 2)).mul_2exp(x, k)


# -- certified comparisons of real balls -------------------------------------


def certainly_lt(a: Ball, b: Ball) -> bool:
    return a.upper() < b.lower()


def certainly_le(a: Ball, b: Ball) -> bool:
    return a.upper() <= b.lower()


def certainly_gt(a: Ball, b: Ball) -> bool:
    return a.lower() > b.upper()


def certainly_ge(a: Ball, b: Ball) -> bool:
    return a.lower() >= b.upper()


def permits_le(a: Ball, b: Ball) -> bool:
    """True unless ``a > b`` is certified."""
    return not certainly_gt(a, b)


def compare(a: Ball, b: Ball) -> int | None:
    """-1/0/1 when the order of the two real balls is certified, else None.

    0 is returned only for two identical exact points.
    """
    if certainly_lt(a, b):
        return -1
    if certainly_gt(a, b):
        return 1
    if a.is_exact and b.is_exact and a.re == b.re:
        return 0
    return None


def ball_max(balls) -> Ball:
    """Enclosure of ``max`` over a nonempty list of real balls."""
    balls = list(balls)
    lo = max(b.lower() for b in balls)
    hi = max(b.upper() for b in balls)
    return Ball.from_interval(lo, hi, max(b.prec for b in balls))


def ball_sum(balls, prec: int) -> Ball:
    acc = Ball.from_int(0, prec)
    for b in balls:
        acc = acc + b
    return acc


def snap(b: Ball, prec: int) -> Ball:
    """Round a real ball outward to absolute accuracy ``2**-prec``.

    Exact balls whose midpoint already lies on the grid pass through; any
    other ball whose radius is at most ``2**-(prec+1)`` becomes a ball of
    radius exactly ``2**-prec`` centred on the grid. Wider balls keep their
    width (plus the re-centring slack).
    """
    grid = prec + 1
    scaled = near(max(b.prec, 2) + 8).mul_2exp(b.re, grid)
    k = int(round(Fraction(*map(int, scaled.as_integer_ratio())))) if not gmpy2.is_zero(scaled) else 0
    m = _shift(exact(k), -grid) if k else ZERO
    if b.is_exact and m == b.re:
        return Ball(m, ZERO, ZERO, b.prec)
    shift = _UP.abs(context(max(b.prec, 2) + grid + 64).sub(b.re, m))
    need = _UP.add(b.rad, shift)
    unit = _shift(mpfr(1), -prec)
    return Ball(m, ZERO, unit if need <= unit else need, b.prec)


def _digits(x: mpfr, n: int) -> str:
    mant, e10, _ = x.digits(10, n)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    return f"{sign}{mant[0]}.{mant[1:]}e{e10 - 1:+d}"


def to_decimal(x: mpfr, digits: int = 30) -> str:
    if gmpy2.is_zero(x):
        return "0"
    return _digits(x, digits)


def _rad_decimal(r: mpfr) -> str:
    if gmpy2.is_zero(r):
        return "0"
    # 6 significant digits round-to-nearest lose < 2^-17 relative
    return _digits(_UP.mul(r, _UP.add(1, _shift(mpfr(1), -15))), 6)


def ball_to_pair(b: Ball, digits: int = 30) -> list[str]:
    """Decimal ``[mid, rad]`` (``[re, im, rad]`` if complex) enclosing ``b``.

    The decimal radius absorbs both the decimal rounding of the midpoint and
    its own conversion, so the printed pair is still a valid enclosure.
    """
    slack = ZERO
    if not b.is_exact:
        slack = _UP.mul(_UP.hypot(b.re, b.im), _UP.mul_2exp(mpfr(1), -3 * digits + 3))
    elif not (gmpy2.is_zero(b.re) or b.re.is_integer()) or not gmpy2.is_zero(b.im):
        slack = _UP.mul(_UP.hypot(b.re, b.im), _UP.mul_2exp(mpfr(1), -3 * digits + 3))
    rad = _rad_decimal(_UP.add(b.rad, slack))
    if b.is_real:
        if b.is_exact and b.re.is_integer():
            return [str(int(b.re)), "0"]
        return [to_decimal(b.re, digits), rad]
    return [to_decimal(b.re, digits), to_decimal(b.im, digits), rad]


def div_int(b: Ball, d: int) -> Ball:
    """Real ball divided by a positive integer of any size."""
    if d <= 0:
        raise ValueError("divisor must be positive")
    e = exact(d)
    lo = down(b.prec).div(b.lower(), e)
    hi = up(b.prec).div(b.upper(), e)
    return Ball.from_interval(lo, hi, b.prec)


def to_fraction(x: mpfr) -> Fraction:
    return Fraction(*map(int, x.as_integer_ratio()))
