"""Certified isolation of the complex roots of integer polynomials.

Approximations come from Aberth-Ehrlich iteration (non-rigorous, in gmpy2
``mpc``). They are then certified with Smith's inclusion theorem: for a
squarefree ``p`` of degree ``n`` and distinct points ``z_i``, the disks
``D(z_i, n |p(z_i)| / |lc(p) prod_{j != i} (z_i - z_j)|)`` cover all roots
and every connected component of ``m`` disks holds exactly ``m`` roots. The
Weierstrass corrections are evaluated in ball arithmetic, so pairwise
disjoint disks certify one root each.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .ball import ZERO, Ball, up
from .config import max_prec
from .errors import PrecisionExhausted
from .poly import IntPolynomial, rational_root, squarefree_part


def root_bound_bits(p: IntPolynomial) -> int:
    """``b`` with every root of ``p`` of modulus at most ``2**b`` (Fujiwara)."""
    n = p.degree
    lead = abs(p.leading).bit_length() - 1
    best = -(10**9)
    for k in range(1, n + 1):
        a = abs(p.coeffs[n - k])
        if a:
            best = max(best, -(-(a.bit_length() - lead) // k))
    return max(best, 0) + 1


def _initial_guesses(p: IntPolynomial, bound_bits: int) -> list[complex] | None:
    n = p.degree
    top = max(abs(a) for a in p.coeffs)
    if top.bit_length() > 900 or bound_bits > 900:
        return None
    coeffs = [float(Fraction(a, top)) for a in reversed(p.coeffs)]
    try:
        roots = np.roots(np.array(coeffs, dtype=float))
    except np.linalg.LinAlgError:
        return None
    if len(roots) != n or not np.all(np.isfinite(roots)):
        return None
    out = []
    seen = set()
    for k, r in enumerate(sorted(roots, key=lambda z: (z.real, z.imag))):
        z = complex(r)
        while (z.real, z.imag) in seen:
            z += complex(1e-9, 1e-9) * (k + 1)
        seen.add((z.real, z.imag))
        out.append(z)
    return out


def _circle_guesses(n: int, bound_bits: int, prec: int) -> list[mpc]:
    ctx = gmpy2.context(precision=prec)
    with ctx:
        radius = gmpy2.mul_2exp(mpfr(1), bound_bits - 1)
        two_pi = 2 * gmpy2.const_pi()
        return [
            radius * mpc(gmpy2.cos(two_pi * k / n + mpfr("0.4")), gmpy2.sin(two_pi * k / n + mpfr("0.4")))
            for k in range(n)
        ]


def _eval_with_derivative(coeffs, z):
    pv = coeffs[-1]
    dv = 0
    for a in reversed(coeffs[:-1]):
        dv = dv * z + pv
        pv = pv * z + a
    return pv, dv


def _aberth(p: IntPolynomial, zs: list[mpc], prec: int, max_iter: int) -> list[mpc]:
    ctx = gmpy2.context(precision=prec, allow_complex=True)
    n = len(zs)
    tol_bits = prec - 6
    with ctx:
        coeffs = [mpfr(a) for a in p.coeffs]
        zs = [mpc(z) for z in zs]
        done = [False] * n
        for _ in range(max_iter):
            moved = False
            for i in range(n):
                if done[i]:
                    continue
                zi = zs[i]
                pv, dv = _eval_with_derivative(coeffs, zi)
                if pv == 0:
                    done[i] = True
                    continue
                if dv == 0:
                    zs[i] = zi * (1 + mpfr(2) ** (-prec // 2)) + mpfr(2) ** (-prec // 2)
                    moved = True
                    continue
                w = pv / dv
                s = 0
                for j in range(n):
                    if j != i:
                        diff = zi - zs[j]
                        if diff != 0:
                            s += 1 / diff
                step = w / (1 - w * s)
                zs[i] = zi - step
                scale = max(abs(zs[i]), mpfr(1))
                if abs(step) <= scale * gmpy2.mul_2exp(mpfr(1), -tol_bits):
                    done[i] = True
                else:
                    moved = True
            if not moved:
                break
    return zs


def _smith_radii(p: IntPolynomial, zs: list[mpc], prec: int) -> list[mpfr]:
    n = len(zs)
    pts = [Ball(z.real, z.imag, ZERO, prec) for z in zs]
    lead = Ball.from_int(p.leading, prec)
    radii = []
    for i, zi in enumerate(pts):
        num = p(zi)
        if num.is_exact and gmpy2.is_zero(num.re) and gmpy2.is_zero(num.im):
            radii.append(ZERO)
            continue
        den = lead
        for j, zj in enumerate(pts):
            if j != i:
                den = den * (zi - zj)
        if den.contains_zero():
            radii.append(None)
            continue
        w = num / den
        radii.append(up(64).mul(w.mag_upper(), n))
    return radii


def _pairwise_disjoint(balls: list[Ball]) -> bool:
    return not any(
        balls[i].overlaps(balls[j])
        for i in range(len(balls))
        for j in range(i + 1, len(balls))
    )


def _snap_real(balls: list[Ball]) -> list[Ball]:
    """Put the centre of every certifiably real root on the real axis.

    A root is real when the mirror image of its disk meets no other disk:
    the conjugate root then sits in the same isolating disk, so equals it.
    """
    out = list(balls)
    for i, b in enumerate(balls):
        if b.is_real:
            continue
        mirror = b.conj()
        if not mirror.overlaps(b):
            continue
        if any(j != i and mirror.overlaps(c) for j, c in enumerate(balls)):
            continue
        out[i] = Ball(b.re, ZERO, b.rad, b.prec)
    return out


def _target_exponent(target_rad) -> int:
    """Largest ``k`` with ``2**k <= target_rad``."""
    if isinstance(target_rad, int) and not isinstance(target_rad, bool):
        target_rad = Fraction(target_rad)
    if not isinstance(target_rad, Fraction):
        target_rad = Fraction(float(target_rad)) if not isinstance(target_rad, type(ZERO)) else Fraction(*target_rad.as_integer_ratio())
    if target_rad <= 0:
        raise ValueError("target radius must be positive")
    num, den = target_rad.numerator, target_rad.denominator
    k = num.bit_length() - den.bit_length()
    while Fraction(2) ** k > target_rad:
        k -= 1
    return k


def isolate_roots(poly: IntPolynomial, target_rad) -> list[Ball]:
    """Pairwise-disjoint isolating disks of radius ``<= target_rad``, one per
    distinct root, sorted by midpoint real then imaginary part."""
    return list(_isolate(squarefree_part(poly).coeffs, _target_exponent(target_rad)))


def isolate_squarefree(poly: IntPolynomial, target_exp: int) -> tuple[Ball, ...]:
    """As :func:`isolate_roots` for a polynomial already known squarefree,
    with the target radius given as ``2**target_exp``."""
    return _isolate(poly.coeffs, target_exp)


@lru_cache(maxsize=2048)
def _isolate(coeffs: tuple[int, ...], target_exp: int) -> tuple[Ball, ...]:
    p = IntPolynomial(coeffs)
    n = p.degree
    target = gmpy2.mul_2exp(mpfr(1), target_exp)
    if n < 1:
        return ()
    bound_bits = root_bound_bits(p)
    if n == 1:
        q = rational_root(p)
        prec = max(64, bound_bits - target_exp + 4)
        return (Ball.from_rational(q, prec),)

    cap = max_prec()
    prec = max(64, bound_bits - target_exp + 16)
    guesses = _initial_guesses(p, bound_bits)
    if guesses is None:
        zs = _circle_guesses(n, bound_bits, prec)
        iters = 200 + 4 * bound_bits
    else:
        zs = [mpc(complex(z)) for z in guesses]
        iters = 100
    while True:
        zs = _aberth(p, zs, prec, iters)
        iters = 60
        radii = _smith_radii(p, zs, prec)
        if all(r is not None for r in radii):
            balls = [Ball(z.real, z.imag, r, prec) for z, r in zip(zs, radii)]
            if _pairwise_disjoint(balls):
                balls = _snap_real(balls)
                if _pairwise_disjoint(balls) and all(b.rad <= target for b in balls):
                    balls.sort(key=lambda b: (b.re, b.im))
                    return tuple(balls)
        prec *= 2
        if prec - bound_bits > cap:
            raise PrecisionExhausted(
                f"root isolation of degree-{n} polynomial needs more than {cap} bits"
            )
