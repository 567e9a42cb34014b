"""Finite-horizon transcendence checker for continued fractions with
algebraic-integer partial quotients.

The growth condition on the houses cannot be decided from a prefix, so the
checker looks for an explicit index ``N`` at which every step of the
contradiction argument holds certifiably, and then excludes every algebraic
value of degree at most ``D`` and height at most ``H_star``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .algebraic import AlgebraicNumber, Decision, profile
from .ball import (
    Ball,
    ball_max,
    ball_sum,
    certainly_ge,
    certainly_gt,
    certainly_le,
    certainly_lt,
    div_int,
    down,
    to_fraction,
    up,
)
from .cf_engine import build_trace, lemma_regime_unconditional
from .errors import HypothesisShapeError, HypothesisViolated, SearchBudgetExceeded

SEARCH_LIMIT = 10**6
STABILITY_WINDOW = 16

CHECK_NAMES = (
    "degrees_ok",
    "monic_ok",
    "attains_house_ok",
    "q_monotone_ok",
    "q_product_ok",
    "witness_ok",
    "contradiction_ok",
)


class Outcome(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDECIDED = "undecided"


class Verdict(str, enum.Enum):
    EXCLUDED = "ExcludedUpToHeight"
    INCONCLUSIVE = "Inconclusive"


def _require_shape(d: int, D: int):
    if d <= 1:
        raise HypothesisShapeError(f"d must exceed 1, got {d}", "d")
    if D < 1:
        raise HypothesisShapeError(f"D must be at least 1, got {D}", "D")


def exponent_denominator(n: int, d: int, D: int) -> int:
    """``D d^(n-1) prod_{i=1}^{n-2} (D d^i + 1)``; the empty product is 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    e = D * d ** (n - 1)
    for i in range(1, n - 1):
        e *= D * d**i + 1
    return e


# -- growth records -----------------------------------------------------------


def scan_records(values, *, log_scale: bool = False) -> tuple[list[int], list[int]]:
    """Indices ``k`` (1-based, ``k < len``) where
    ``a_{k+1} > (1 + 1/k^2) max_{n<=k} a_n`` is certified, and the indices
    where the comparison could not be decided.

    With ``log_scale`` the values are base-2 logarithms of the sequence.
    """
    values = list(values)
    if not values:
        raise ValueError("empty sequence")
    records, undecided = [], []
    for k in range(1, len(values)):
        top = ball_max(values[:k])
        prec = max(v.prec for v in values)
        factor = Ball.from_rational(1 + Fraction(1, k * k), prec)
        bound = top + factor.log2() if log_scale else top * factor
        nxt = values[k]
        if certainly_gt(nxt, bound):
            records.append(k)
        elif not certainly_le(nxt, bound):
            undecided.append(k)
    return records, undecided


def detect_records(values) -> list[int]:
    """Certified growth records of a linear-scale sequence of real balls."""
    return scan_records(values)[0]


@dataclass(frozen=True)
class LedgerEntry:
    n: int
    log2_house: Ball
    exponent_denominator: int
    normalized: Ball


@dataclass(frozen=True)
class GrowthLedger:
    d: int
    D: int
    per_n: tuple[LedgerEntry, ...]
    records: tuple[int, ...]
    undecided: tuple[int, ...] = ()

    def log2_house(self, n: int) -> Ball:
        return self.per_n[n - 1].log2_house


def build_ledger(log2_houses, d: int, D: int) -> GrowthLedger:
    """Normalize ``log2 house(alpha_n)`` by the exponent denominators and
    find the growth records of the normalized sequence."""
    _require_shape(d, D)
    entries = []
    for n, lh in enumerate(log2_houses, start=1):
        e = exponent_denominator(n, d, D)
        entries.append(LedgerEntry(n, lh, e, div_int(lh, e)))
    records, undecided = scan_records([x.normalized for x in entries], log_scale=True)
    return GrowthLedger(d, D, tuple(entries), tuple(records), tuple(undecided))


def houses_bounded(log2_houses) -> bool:
    """True when no house ever certifiably exceeds all earlier ones."""
    hs = list(log2_houses)
    return not any(certainly_gt(hs[k], ball_max(hs[:k])) for k in range(1, len(hs)))


# -- witness inequality -------------------------------------------------------


@dataclass(frozen=True)
class WitnessResult:
    outcome: Outcome
    lhs_log2: Ball
    rhs_log2: Ball


def _decide_ge(lhs: Ball, rhs: Ball) -> Outcome:
    if certainly_ge(lhs, rhs):
        return Outcome.HOLDS
    if certainly_lt(lhs, rhs):
        return Outcome.FAILS
    return Outcome.UNDECIDED


def witness_check(ledger: GrowthLedger, N: int) -> WitnessResult:
    """Compare ``log2 house(alpha_{N+1})`` with
    ``D (d+1)^N + D d^N sum_{n<=N} log2 house(alpha_n)``."""
    if N < 1 or N + 1 > len(ledger.per_n):
        raise ValueError(f"ledger does not cover indices 1..{N + 1}")
    d, D = ledger.d, ledger.D
    lhs = ledger.log2_house(N + 1)
    prec = lhs.prec
    total = ball_sum((ledger.log2_house(n) for n in range(1, N + 1)), prec)
    rhs = total * (D * d**N) + D * (d + 1) ** N
    return WitnessResult(_decide_ge(lhs, rhs), lhs, rhs)


# -- contradiction threshold --------------------------------------------------


def log2_upper(H_star) -> Fraction:
    """Exact dyadic upper bound for ``log2 H_star`` (exact for powers of 2)."""
    q = Fraction(H_star)
    if q < 1:
        raise ValueError("H_star must be at least 1")
    num, den = q.numerator, q.denominator
    if den == 1 and num & (num - 1) == 0:
        return Fraction(num.bit_length() - 1)
    prec = 128
    x = up(prec).div(mpfr(num), mpfr(den)) if den != 1 else mpfr(num)
    with up(prec):
        return to_fraction(gmpy2.log2(x))


def _height_log2(H_star=None, H_star_log2=None) -> Fraction:
    if (H_star is None) == (H_star_log2 is None):
        raise ValueError("give exactly one of H_star and H_star_log2")
    if H_star_log2 is not None:
        h = Fraction(H_star_log2)
        if h < 0:
            raise ValueError("H_star_log2 must be nonnegative")
        return h
    return log2_upper(H_star)


def _ratio(N: int, d: int, h: Fraction) -> Fraction:
    return Fraction((d + 1) ** N) / (d**N * (2 * N - 1 + h))


def threshold_holds(N: int, d: int, h: Fraction) -> bool:
    """``(d+1)^N > d^N (2N - 1 + h)``, decided exactly."""
    return _ratio(N, d, h) > 1


def contradiction_threshold(d: int, D: int, H_star=None, *, H_star_log2=None) -> int:
    """Smallest ``N`` with ``(d+1)^N > d^N (2N - 1 + log2 H_star)``.

    ``D`` does not enter the inequality but is validated. The scan is exact
    in rationals, with ``log2 H_star`` rounded upward.
    """
    _require_shape(d, D)
    h = _height_log2(H_star, H_star_log2)
    for N in range(1, SEARCH_LIMIT + 1):
        if threshold_holds(N, d, h):
            return N
    raise SearchBudgetExceeded(f"no threshold below {SEARCH_LIMIT}")


def stable_threshold(d: int, D: int, H_star=None, *, H_star_log2=None) -> int:
    """Smallest ``N`` where the inequality holds and its ratio increases over
    the next ``STABILITY_WINDOW`` indices.

    Differs from :func:`contradiction_threshold` when the ratio dips below 1
    again after a first crossing, as for ``d=2, H_star=1``.
    """
    _require_shape(d, D)
    h = _height_log2(H_star, H_star_log2)
    N = contradiction_threshold(d, D, H_star_log2=h)
    while N <= SEARCH_LIMIT:
        rs = [_ratio(N + i, d, h) for i in range(STABILITY_WINDOW + 1)]
        if rs[0] > 1 and all(a < b for a, b in zip(rs, rs[1:])):
            return N
        N += 1
    raise SearchBudgetExceeded(f"no stable threshold below {SEARCH_LIMIT}")


# -- inequalities used in the growth step -------------------------------------


@dataclass
class InequalityReport:
    d: int
    D: int
    N_max: int
    log_bound: dict[int, bool | None]
    growth_bound: dict[int, bool | None]
    onset: int | None
    ratio_increasing: dict[int, bool]

    @property
    def all_log_bounds_hold(self) -> bool:
        return all(v is True for v in self.log_bound.values())


def _log_bound(N: int) -> bool | None:
    """``ln(1 + 1/N^2) >= (2N^2 - 1) / (2N^4)``, with outward rounding."""
    rhs = Fraction(2 * N * N - 1, 2 * N**4)
    for prec in (128, 256, 512):
        x_lo = down(prec).div(mpfr(1), mpfr(N * N))
        x_hi = up(prec).div(mpfr(1), mpfr(N * N))
        with down(prec):
            lo = to_fraction(gmpy2.log1p(x_lo))
        with up(prec):
            hi = to_fraction(gmpy2.log1p(x_hi))
        if lo >= rhs:
            return True
        if hi < rhs:
            return False
    return None


def _ln2(prec: int) -> tuple[Fraction, Fraction]:
    with down(prec):
        lo = to_fraction(gmpy2.const_log2())
    with up(prec):
        hi = to_fraction(gmpy2.const_log2())
    return lo, hi


def _growth_bound(N: int, d: int, D: int, ln2) -> bool | None:
    """``d^N prod_{n<N}(D d^n + 1) (2N^2-1)/(2N^4) >= ln 2 (d+1)^N``."""
    prod = 1
    for n in range(1, N):
        prod *= D * d**n + 1
    lhs = Fraction(d**N * prod * (2 * N * N - 1), 2 * N**4)
    lo, hi = ln2
    scale = (d + 1) ** N
    if lhs >= hi * scale:
        return True
    if lhs < lo * scale:
        return False
    return None


def check_proof_inequalities(N_max: int, d: int, D: int, *, log_N_max: int | None = None) -> InequalityReport:
    """Certified truth values, for ``N <= N_max``, of the two elementary
    inequalities behind the growth step, the onset of the second one (first
    ``N`` from which it holds through ``N_max``), and whether
    ``d^(n^2) / exponent_denominator(n)`` increases at each step.

    The first inequality does not involve ``d`` or ``D`` and is cheap, so it
    can be checked further, up to ``log_N_max``.
    """
    if N_max < 1:
        raise ValueError("N_max must be at least 1")
    _require_shape(d, D)
    ln2 = _ln2(256)
    first = {N: _log_bound(N) for N in range(1, max(N_max, log_N_max or 0) + 1)}
    second = {N: _growth_bound(N, d, D, ln2) for N in range(1, N_max + 1)}
    onset = None
    for N in range(N_max, 0, -1):
        if second[N] is not True:
            break
        onset = N
    ratio = {}
    prev = Fraction(d, exponent_denominator(1, d, D))
    for n in range(2, N_max + 1):
        cur = Fraction(d ** (n * n), exponent_denominator(n, d, D))
        ratio[n] = cur > prev
        prev = cur
    return InequalityReport(d, D, N_max, first, second, onset, ratio)


# -- certificates -------------------------------------------------------------


@dataclass(frozen=True)
class StepResult:
    """All index-dependent checks at one candidate ``N``."""

    N: int
    witness: WitnessResult
    q_product: Decision
    q_product_lhs_log2: Ball
    contradiction: Decision
    contradiction_lhs_log2: Ball
    threshold_holds: bool

    def decisions(self) -> dict[str, Decision]:
        w = {Outcome.HOLDS: Decision.YES, Outcome.FAILS: Decision.NO}
        return {
            "q_product_ok": self.q_product,
            "witness_ok": w.get(self.witness.outcome, Decision.UNDECIDED),
            "contradiction_ok": self.contradiction,
        }


@dataclass
class Certificate:
    d: int
    D: int
    H_star_log2: Fraction
    horizon: int
    N: int | None
    hypothesis_checks: dict[str, Decision]
    witness_lhs_log2: Ball | None
    witness_rhs_log2: Ball | None
    contradiction_lhs_log2: Ball | None
    contradiction_rhs_log2: Ball | None
    threshold_N_star: int
    stable_N_star: int
    verdict: Verdict
    failed_check: str | None
    records: list[int]
    log2_houses: list[Ball]
    log2_abs_q: list[Ball]
    steps: list[StepResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def statement(self) -> str:
        if self.verdict is not Verdict.EXCLUDED:
            return f"inconclusive: {self.failed_check} not certified"
        return (
            f"the continued-fraction value is not an algebraic number of degree <= {self.D} "
            f"and height <= 2^{self.H_star_log2}, unless it is a conjugate of one of the "
            f"convergents p_n/q_n, n <= {self.N}"
        )


def _decision(ok: bool, bad: bool) -> Decision:
    if ok:
        return Decision.YES
    return Decision.NO if bad else Decision.UNDECIDED


def _step(N, ledger, log_q, d, D, h, prec) -> StepResult:
    w = witness_check(ledger, N)
    qq = log_q[N + 1] + log_q[N]
    house_next = ledger.log2_house(N + 1)
    q_prod = _decision(certainly_ge(qq, house_next), certainly_lt(qq, house_next))
    # Exponent of the lower bound on |alpha - p_N/q_N| from the separation
    # estimate, against the upper bound 1/|q_{N+1} q_N| on the same distance.
    total = ball_sum((ledger.log2_house(n) for n in range(1, N + 1)), prec)
    base = total + Ball.from_rational(Fraction(2 * N - 1) + h, prec)
    c_lhs = base * (D * d**N)
    contra = _decision(certainly_le(c_lhs, qq), certainly_gt(c_lhs, qq))
    return StepResult(N, w, q_prod, qq, contra, c_lhs, threshold_holds(N, d, h))


def build_certificate(
    quotients,
    d: int,
    D: int,
    H_star=None,
    horizon: int = 4,
    prec: int = 256,
    *,
    H_star_log2=None,
    strict_degree: bool = False,
    force_undecided: str | None = None,
) -> Certificate:
    """Check the contradiction argument on ``quotients[:horizon+1]``.

    The verdict is ``ExcludedUpToHeight`` only when every sub-check in
    :data:`CHECK_NAMES` is certified at one index ``N <= horizon``; the
    largest such ``N`` is reported. ``force_undecided`` names one sub-check
    to treat as undecided everywhere, for fault-injection testing.

    Raises :class:`HypothesisViolated` when a partial quotient certifiably
    has degree above ``d``, is not an algebraic integer, or has a conjugate
    of larger modulus. With ``strict_degree`` the maximal degree must also
    equal ``d``.
    """
    _require_shape(d, D)
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    if force_undecided is not None and force_undecided not in CHECK_NAMES:
        raise ValueError(f"unknown check {force_undecided!r}")
    quotients = list(quotients)
    if len(quotients) < horizon + 1:
        raise ValueError(f"need {horizon + 1} partial quotients, got {len(quotients)}")
    prefix: list[AlgebraicNumber] = quotients[: horizon + 1]
    h = _height_log2(H_star, H_star_log2)
    notes, warnings = [], []

    degrees = [a.degree for a in prefix]
    for n, deg in enumerate(degrees, start=1):
        if deg > d:
            raise HypothesisViolated("degree-exceeds-d", f"alpha_{n} has degree {deg} > {d}")
    if max(degrees) < d:
        if strict_degree:
            raise HypothesisViolated(
                "max-degree-not-attained", f"largest degree is {max(degrees)}, expected {d}"
            )
        warnings.append(f"max degree {max(degrees)} < d={d}; only deg <= d is used")
    for n, a in enumerate(prefix, start=1):
        if not a.is_integer:
            raise HypothesisViolated("not-algebraic-integer", f"alpha_{n} = {a}")

    profiles = [profile(a, prec) for a in prefix]
    for n, pr in enumerate(profiles, start=1):
        if pr.attains_house is Decision.NO:
            raise HypothesisViolated("house-not-attained", f"alpha_{n} has a larger conjugate")
    attains = (
        Decision.YES
        if all(pr.attains_house is Decision.YES for pr in profiles)
        else Decision.UNDECIDED
    )

    trace = build_trace(prefix, prec)
    if trace.precision_flag:
        warnings.append("convergent denominators below requested relative accuracy")
    q_mono = Decision.YES if trace.monotone_upto >= horizon + 1 else Decision.UNDECIDED
    if lemma_regime_unconditional(trace, horizon + 1):
        notes.append("tail bound: partial quotients certified real and >= 1")
    else:
        notes.append("tail bound: relies on certified increasing |q_n|")

    hypotheses = {
        "degrees_ok": Decision.YES,
        "monic_ok": Decision.YES,
        "attains_house_ok": attains,
        "q_monotone_ok": q_mono,
    }

    log_houses = [pr.log2_house for pr in profiles]
    ledger = build_ledger(log_houses, d, D)
    log_q = [s.abs_q.log2() for s in trace.states]
    N_star = contradiction_threshold(d, D, H_star_log2=h)
    N_stable = stable_threshold(d, D, H_star_log2=h)
    if houses_bounded(log_houses):
        warnings.append("bounded houses")

    def effective(checks: dict[str, Decision]) -> dict[str, Decision]:
        if force_undecided in checks:
            checks = dict(checks)
            checks[force_undecided] = Decision.UNDECIDED
        return checks

    hyp_eff = effective(hypotheses)
    hyp_ok = all(v is Decision.YES for v in hyp_eff.values())
    steps = [_step(N, ledger, log_q, d, D, h, prec) for N in range(1, horizon + 1)]

    chosen = None
    for st in reversed(steps):
        if hyp_ok and all(v is Decision.YES for v in effective(st.decisions()).values()):
            chosen = st
            break

    if chosen is not None:
        verdict, failed = Verdict.EXCLUDED, None
        shown = chosen
        checks = dict(hyp_eff, **effective(chosen.decisions()))
        if chosen.N < N_star:
            notes.append(
                f"contradiction certified directly at N={chosen.N}, below the generic threshold {N_star}"
            )
        notes.append("values conjugate to a convergent p_n/q_n, n <= N, are not excluded")
    else:
        verdict = Verdict.INCONCLUSIVE
        # report the step closest to a certificate, preferring larger N
        def open_checks(st):
            return sum(v is not Decision.YES for v in effective(st.decisions()).values())
        shown = min(reversed(steps), key=open_checks)
        checks = dict(hyp_eff, **effective(shown.decisions()))
        failed = next(k for k in CHECK_NAMES if checks[k] is not Decision.YES)

    return Certificate(
        d=d,
        D=D,
        H_star_log2=h,
        horizon=horizon,
        N=chosen.N if chosen else None,
        hypothesis_checks=checks,
        witness_lhs_log2=shown.witness.lhs_log2,
        witness_rhs_log2=shown.witness.rhs_log2,
        contradiction_lhs_log2=shown.contradiction_lhs_log2,
        contradiction_rhs_log2=shown.q_product_lhs_log2,
        threshold_N_star=N_star,
        stable_N_star=N_stable,
        verdict=verdict,
        failed_check=failed,
        records=list(ledger.records),
        log2_houses=log_houses,
        log2_abs_q=log_q,
        steps=steps,
        notes=notes,
        warnings=warnings,
    )
