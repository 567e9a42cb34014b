"""Randomized and exhaustive checks of the height, house and separation
inequalities over corpora of algebraic integers.

A check fails only on a certified violation; comparisons that the balls
cannot decide are counted separately. Margins are in bits (log2 scale).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

import gmpy2
import mpmath
from gmpy2 import mpfr

from .algebraic import (
    AlgebraicNumber,
    conjugate_geometry,
    exact_combine,
    mk_algebraic,
    profile,
    reciprocal,
)
from .ball import Ball, certainly_gt, certainly_le, down, up
from .errors import GenerationBudgetExceeded
from .poly import IntPolynomial, is_irreducible

LEMMAS = ("L2", "L3", "L4", "L5", "T2")


@dataclass(frozen=True)
class Corpus:
    seed: int
    degree_max: int
    coeff_bound: int
    entries: tuple[AlgebraicNumber, ...]

    def __len__(self) -> int:
        return len(self.entries)


def random_monic(rng: random.Random, degree_max: int, coeff_bound: int) -> IntPolynomial:
    deg = rng.randint(1, degree_max)
    low = [rng.randint(-coeff_bound, coeff_bound) for _ in range(deg)]
    return IntPolynomial(tuple(low) + (1,))


def gen_corpus(seed: int, degree_max: int, coeff_bound: int, count: int, *, budget: int | None = None) -> Corpus:
    """``count`` algebraic integers from uniformly drawn monic polynomials,
    keeping only irreducible ones and never ``x`` itself. Each entry is the
    root of largest modulus."""
    if not 1 <= degree_max <= 6:
        raise ValueError("degree_max must be in [1, 6]")
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be at least 1")
    rng = random.Random(seed)
    budget = budget if budget is not None else 1000 * max(count, 1)
    entries = []
    tries = 0
    while len(entries) < count:
        tries += 1
        if tries > budget:
            raise GenerationBudgetExceeded(f"{len(entries)} of {count} entries after {budget} draws")
        p = random_monic(rng, degree_max, coeff_bound)
        if p.coeffs[0] == 0 or not is_irreducible(p):
            continue
        entries.append(mk_algebraic(p))
    return Corpus(seed, degree_max, coeff_bound, tuple(entries))


def quadratic_sweep(bound: int = 3) -> list[AlgebraicNumber]:
    """Every monic irreducible ``x^2 + b x + c`` with ``|b|, |c| <= bound``."""
    out = []
    for b in range(-bound, bound + 1):
        for c in range(-bound, bound + 1):
            p = IntPolynomial((c, b, 1))
            if c != 0 and is_irreducible(p):
                out.append(mk_algebraic(p))
    return out


@dataclass
class CheckReport:
    lemma: str
    cases: int = 0
    passes: int = 0
    undecided: int = 0
    failures: int = 0
    min_margin: float | None = None
    max_margin: float | None = None
    failure_details: list[str] = field(default_factory=list)
    undecided_details: list[str] = field(default_factory=list)

    def record(self, outcome: bool | None, margin=None, label: str = ""):
        self.cases += 1
        if outcome is True:
            self.passes += 1
        elif outcome is False:
            self.failures += 1
            self.failure_details.append(label)
        else:
            self.undecided += 1
            self.undecided_details.append(label)
        if margin is not None and outcome is True:
            m = float(margin)
            self.min_margin = m if self.min_margin is None else min(self.min_margin, m)
            self.max_margin = m if self.max_margin is None else max(self.max_margin, m)

    @property
    def undecided_rate(self) -> float:
        return self.undecided / self.cases if self.cases else 0.0

    def summary(self) -> str:
        return (
            f"{self.lemma}: cases={self.cases} pass={self.passes} "
            f"undecided={self.undecided} fail={self.failures} "
            f"min_margin={self.min_margin}"
        )


def _decide_nonneg(x: Ball) -> tuple[bool | None, mpfr | None]:
    if x.lower() >= 0:
        return True, x.lower()
    if x.upper() < 0:
        return False, None
    return None, None


# -- height against house and Mahler measure ----------------------------------


def _house_at_least_one(mods, units, idx) -> bool:
    return units[idx] or mods[idx].lower() >= 1


def _tie_height_house(a: AlgebraicNumber, prec: int) -> bool:
    """Certified ``H(a) = house(a)``: monic, every conjugate of the house's
    modulus and that modulus at least 1, so ``M = house^d``."""
    if not a.is_integer:
        return False
    balls, idx, labels, units = conjugate_geometry(a, prec)
    mods = [b.abs() for b in balls]
    top = max(range(len(balls)), key=lambda i: mods[i].upper())
    return all(lab == labels[top] for lab in labels) and _house_at_least_one(mods, units, top)


def _tie_house_mahler(a: AlgebraicNumber, prec: int) -> bool:
    """Certified ``house(a) = M(a)``: monic, house at least 1 and every other
    conjugate inside or on the unit circle."""
    if not a.is_integer:
        return False
    balls, idx, labels, units = conjugate_geometry(a, prec)
    mods = [b.abs() for b in balls]
    top = max(range(len(balls)), key=lambda i: mods[i].upper())
    if not _house_at_least_one(mods, units, top):
        return False
    return all(j == top or units[j] or mods[j].upper() <= 1 for j in range(len(balls)))


def check_l2(entries, prec: int = 128, report: CheckReport | None = None) -> CheckReport:
    """``H <= house <= M`` for every entry; exact ties are decided from the
    root geometry and count as passes with margin 0."""
    report = report or CheckReport("L2")
    for a in entries:
        pr = profile(a, prec)
        for lo, hi, tie in (
            (pr.log2_height, pr.log2_house, _tie_height_house),
            (pr.log2_house, pr.log2_mahler, _tie_house_mahler),
        ):
            ok, margin = _decide_nonneg(hi - lo)
            if ok is None and tie(a, prec):
                ok, margin = True, 0
            report.record(ok, margin, str(a.min_poly))
    return report


def _oracle_roots(p: IntPolynomial, prec: int):
    dps = prec // 3 + 20
    with mpmath.workdps(dps):
        roots = mpmath.polyroots(list(reversed(p.coeffs)), maxsteps=400, extraprec=4 * dps)
        return [mpmath.mpf(abs(r)) for r in roots], dps


def _mp(x: mpfr):
    man, exp = x.as_mantissa_exp()
    return mpmath.mpf((int(man), int(exp)))


def check_t2(entries, prec: int = 128, report: CheckReport | None = None) -> CheckReport:
    """``d log2 H = log2 M`` against Mahler measures from an independent
    root finder (mpmath); house values are compared too. A failure needs
    disagreement beyond the oracle tolerance ``2**-(prec/2)``."""
    report = report or CheckReport("T2")
    for a in entries:
        pr = profile(a, prec)
        try:
            mods, dps = _oracle_roots(a.min_poly, prec)
        except mpmath.libmp.NoConvergence:
            report.record(None, None, f"{a.min_poly}: oracle did not converge")
            continue
        with mpmath.workdps(dps):
            tol = mpmath.mpf(2) ** (-(prec // 2))
            m = abs(a.min_poly.leading) * mpmath.fprod(max(mpmath.mpf(1), r) for r in mods)
            pairs = (
                (pr.log2_height * a.degree, mpmath.log(m, 2)),
                (pr.log2_mahler, mpmath.log(m, 2)),
                (pr.log2_house, mpmath.log(max(mods), 2)),
            )
            ok = all(_mp(b.lower()) - tol <= ref <= _mp(b.upper()) + tol for b, ref in pairs)
        report.record(ok, None, str(a.min_poly))
    return report


# -- reciprocal -----------------------------------------------------------------


def check_l3(entries, prec: int = 128, report: CheckReport | None = None) -> CheckReport:
    """``H(a) = H(1/a)``: the two height balls must intersect. The margin
    recorded is the bit accuracy ``-log2`` of the larger width."""
    report = report or CheckReport("L3")
    for a in entries:
        if a.is_zero:
            continue
        h1 = profile(a, prec).log2_height
        h2 = profile(reciprocal(a), prec).log2_height
        ok = h1.overlaps(h2)
        width = max(h1.rad, h2.rad)
        margin = None if width == 0 else -float(gmpy2.log2(width)) - 1
        report.record(ok, margin, str(a.min_poly))
    return report


# -- sums -----------------------------------------------------------------------


def draw_groups(entries, count: int, seed: int, cap: int = 64, sizes=(2, 3)):
    """``count`` random pairs or triples whose degree product is at most ``cap``."""
    rng = random.Random(seed)
    entries = list(entries)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 1000 * count:
            raise GenerationBudgetExceeded("not enough groups under the degree cap")
        k = rng.choice(sizes)
        group = [rng.choice(entries) for _ in range(k)]
        prod = 1
        for b in group:
            prod *= b.degree
        if prod <= cap:
            out.append(group)
    return out


def sum_bound(group, prec: int = 128):
    """``(s, log2 H(s), rhs)``: the exact sum, its log height (0 when the sum
    vanishes) and ``k + sum log2 H(beta_i)``."""
    s = group[0]
    for b in group[1:]:
        s = exact_combine("add", s, b)
    lhs = Ball.from_int(0, prec) if s.is_zero else profile(s, prec).log2_height
    rhs = Ball.from_int(len(group), prec)
    for b in group:
        rhs = rhs + profile(b, prec).log2_height
    return s, lhs, rhs


def check_l4(groups, prec: int = 128, report: CheckReport | None = None) -> CheckReport:
    """``H(sum) <= 2^k prod H`` and ``deg(sum) <= prod deg``."""
    report = report or CheckReport("L4")
    for group in groups:
        s, lhs, rhs = sum_bound(group, prec)
        prod = 1
        for b in group:
            prod *= b.degree
        label = " + ".join(str(b.min_poly) for b in group)
        report.record(s.degree <= prod, None, f"degree of {label}")
        if certainly_le(lhs, rhs):
            report.record(True, down(64).sub(rhs.lower(), lhs.upper()), label)
        elif certainly_gt(lhs, rhs):
            report.record(False, None, label)
        else:
            report.record(None, None, label)
    return report


# -- separation -------------------------------------------------------------------


def _log2_mahler(a: AlgebraicNumber, prec: int) -> Ball:
    # zero has minimal polynomial x and Mahler measure 1
    return Ball.from_int(0, prec) if a.is_zero else profile(a, prec).log2_mahler


def separation_exponent(a: AlgebraicNumber, b: AlgebraicNumber, prec: int = 128) -> Ball:
    """``log2`` of the separation bound
    ``2^-(da db) M(a)^-db M(b)^-da`` for non-conjugate ``a`` and ``b``."""
    da, db = a.degree, b.degree
    la, lb = _log2_mahler(a, prec), _log2_mahler(b, prec)
    return -(la * db + lb * da + da * db)


def _log2_lower(x: mpfr) -> mpfr:
    with down(64):
        return gmpy2.log2(x)


def check_l5(entries, prec: int = 128, report: CheckReport | None = None, pairs=None) -> CheckReport:
    """Separation bound over non-conjugate pairs (all pairs by default).

    Distances come from root isolation alone, at a working precision at
    least four times the bit size of the bound. The margin is
    ``log2 |a - b| - log2 bound``.
    """
    report = report or CheckReport("L5")
    entries = list(entries)
    if pairs is None:
        pairs = list(combinations(range(len(entries)), 2))
    exps = {}
    for i, j in pairs:
        for k in (i, j):
            if k not in exps:
                exps[k] = _log2_mahler(entries[k], prec)
    top = max((e.upper() for e in exps.values()), default=mpfr(0))
    dmax = max((entries[k].degree for k in exps), default=1)
    size = int(dmax * dmax + 2 * dmax * float(top)) + 1
    work = max(prec, 4 * size)
    balls = {k: entries[k].ball(work) for k in exps}
    for i, j in pairs:
        a, b = entries[i], entries[j]
        if a.min_poly == b.min_poly:
            continue
        bound = separation_exponent(a, b, prec)
        dist = (balls[i] - balls[j]).mag_lower()
        if dist <= 0:
            report.record(None, None, f"{a.min_poly} vs {b.min_poly}")
            continue
        margin = down(64).sub(_log2_lower(dist), bound.upper())
        if margin >= 0:
            report.record(True, margin, "")
            continue
        far = (balls[i] - balls[j]).mag_upper()
        with up(64):
            hi = gmpy2.log2(far)
        if hi < bound.lower():
            report.record(False, None, f"{a.min_poly} vs {b.min_poly}")
        else:
            report.record(None, None, f"{a.min_poly} vs {b.min_poly}")
    return report


def separation_margin(a: AlgebraicNumber, b: AlgebraicNumber, prec: int = 128) -> Ball:
    """``log2 |a - b| - log2 bound`` as a ball."""
    bound = separation_exponent(a, b, prec)
    diff = (a.ball(4 * prec) - b.ball(4 * prec)).abs().log2()
    return diff - bound


# -- tight cases ------------------------------------------------------------------


@dataclass(frozen=True)
class TightCase:
    label: str
    height_minus_house: Ball
    house_minus_mahler: Ball | None


def tight_witnesses(prec: int = 128, integers=(1, 2, 3, 5, 7, 12, -4, -9), degrees=(2, 3, 4, 5, 6)):
    """Log-scale differences for families where the inequalities are
    equalities: rational integers (``H = house = M``) and the real ``d``-th
    roots of 2 (``H = house``)."""
    out = []
    for n in integers:
        pr = profile(mk_algebraic(IntPolynomial((-n, 1))), prec)
        out.append(TightCase(f"{n}", pr.log2_height - pr.log2_house, pr.log2_house - pr.log2_mahler))
    for d in degrees:
        pr = profile(mk_algebraic(IntPolynomial((-2,) + (0,) * (d - 1) + (1,))), prec)
        out.append(TightCase(f"2^(1/{d})", pr.log2_height - pr.log2_house, None))
    return out


def run_lemma_checks(corpus, which=LEMMAS, *, prec: int = 128, groups: int = 200, seed: int | None = None) -> dict[str, CheckReport]:
    """Run the selected checks over a corpus (or a plain list of numbers)."""
    entries = list(corpus.entries if isinstance(corpus, Corpus) else corpus)
    if not entries:
        raise ValueError("empty corpus")
    unknown = set(which) - set(LEMMAS)
    if unknown:
        raise ValueError(f"unknown checks {sorted(unknown)}")
    if seed is None:
        seed = corpus.seed if isinstance(corpus, Corpus) else 0
    out = {}
    if "L2" in which:
        out["L2"] = check_l2(entries, prec)
    if "T2" in which:
        out["T2"] = check_t2(entries, prec)
    if "L3" in which:
        out["L3"] = check_l3(entries, prec)
    if "L4" in which:
        out["L4"] = check_l4(draw_groups(entries, groups, seed), prec)
    if "L5" in which:
        out["L5"] = check_l5(entries, prec)
    return out
