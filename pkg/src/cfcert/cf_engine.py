"""Convergents of ``[0; a_1, a_2, ...]`` with algebraic partial quotients.

Numerators and denominators follow ``q_0 = 1, q_1 = a_1,
q_n = a_n q_{n-1} + q_{n-2}`` (and ``p_0 = 0, p_1 = 1`` likewise). Every
state carries ball enclosures; while the degrees stay under the exact cap
the exact algebraic values are carried alongside.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import gmpy2
from gmpy2 import mpfr

from .algebraic import AlgebraicNumber, exact_combine, from_rational
from .ball import Ball, certainly_lt, up
from .config import EXACT_DEGREE_CAP, max_prec
from .errors import DegreeCapExceeded, MonotonicityNotCertified, QNearZero


@dataclass(frozen=True)
class ConvergentState:
    n: int
    p_ball: Ball
    q_ball: Ball
    p_exact: AlgebraicNumber | None
    q_exact: AlgebraicNumber | None
    abs_q: Ball


@dataclass(frozen=True)
class CFTrace:
    quotients: tuple[AlgebraicNumber, ...]
    states: tuple[ConvergentState, ...]
    monotone_upto: int
    value: Ball
    prec: int
    working_prec: int
    exact_cap: int = EXACT_DEGREE_CAP
    precision_flag: bool = False
    finite: bool = False

    @property
    def N(self) -> int:
        return len(self.states) - 1

    def q_values(self) -> list[Ball]:
        return [s.q_ball for s in self.states]


@dataclass(frozen=True)
class TailBound:
    """Upper enclosure of ``log2(1 / |q_{N+1} q_N|)``.

    ``conditional`` is set when the partial quotients are not all certified
    real and ``>= 1``; the bound then rests on convergence with increasing
    ``|q_n|``.
    """

    N: int
    log2_bound: Ball
    conditional: bool


def start(prec: int = 128, *, exact_cap: int = EXACT_DEGREE_CAP) -> CFTrace:
    """The empty continued fraction: only ``p_0 = 0``, ``q_0 = 1``."""
    if prec < 32:
        raise ValueError("prec must be at least 32")
    work = prec + 32
    one, zero = from_rational(1), from_rational(0)
    s0 = ConvergentState(
        0, Ball.from_int(0, work), Ball.from_int(1, work), zero, one, Ball.from_int(1, work)
    )
    return CFTrace((), (s0,), 0, Ball.from_int(0, work), prec, work, exact_cap)


def _step_balls(prev2, prev1, a: Ball):
    if prev2 is None:  # n == 1
        p1, q1 = prev1
        return Ball.from_int(1, a.prec), a * q1
    (p2, q2), (p1, q1) = prev2, prev1
    return a * p1 + p2, a * q1 + q2


def _mul_add(a, x, y, cap):
    """Exact ``a * x + y`` or None once the degree cap is hit."""
    if x is None or y is None:
        return None
    try:
        prod = x if a.is_rational and a.as_rational() == 1 else exact_combine("mul", a, x, cap=cap)
        if y.is_zero:
            return prod
        return exact_combine("add", prod, y, cap=cap)
    except DegreeCapExceeded:
        return None


def _relative_ok(b: Ball, prec: int) -> bool:
    if b.is_exact:
        return True
    return b.rad <= up(64).mul(b.mag_lower(), gmpy2.mul_2exp(mpfr(1), -(prec // 2)))


def _ball_path(quotients, work):
    """Ball states for the whole prefix at working precision ``work``."""
    pq = [(Ball.from_int(0, work), Ball.from_int(1, work))]
    for n, a in enumerate(quotients, start=1):
        ab = a.ball(work)
        prev2 = pq[n - 2] if n >= 2 else None
        pq.append(_step_balls(prev2, pq[n - 1], ab))
    return pq


def advance(trace: CFTrace, a_next: AlgebraicNumber, prec: int | None = None) -> CFTrace:
    """Append the state for one more partial quotient."""
    if trace.finite:
        raise ValueError("trace was closed as a finite continued fraction")
    prec = max(prec or trace.prec, trace.prec)
    quotients = trace.quotients + (a_next,)
    n = len(quotients)
    work = max(trace.working_prec, prec + 32)
    cap = max_prec()
    flag = trace.precision_flag
    while True:
        pq = _ball_path(quotients, work)
        p_ball, q_ball = pq[n]
        if q_ball.contains_zero():
            if 2 * work > cap:
                raise QNearZero(f"q_{n} ball contains zero at {work} bits")
        elif _relative_ok(q_ball, prec) or 2 * work > cap:
            if not _relative_ok(q_ball, prec):
                flag = True
            break
        work *= 2

    states = list(trace.states)
    if work != trace.working_prec:
        states = [
            replace(s, p_ball=pq[i][0], q_ball=pq[i][1], abs_q=pq[i][1].abs())
            for i, s in enumerate(states)
        ]
    last = states[-1]
    if n == 1:
        p_ex, q_ex = from_rational(1), a_next
    else:
        before = states[-2]
        p_ex = _mul_add(a_next, last.p_exact, before.p_exact, trace.exact_cap)
        q_ex = _mul_add(a_next, last.q_exact, before.q_exact, trace.exact_cap)
    if p_ex is None or q_ex is None:
        p_ex = q_ex = None
    abs_q = q_ball.abs()
    states.append(ConvergentState(n, p_ball, q_ball, p_ex, q_ex, abs_q))

    mono = trace.monotone_upto
    if n == 1:
        mono = 1
    elif mono == n - 1 and certainly_lt(states[n - 1].abs_q, abs_q):
        mono = n
    return CFTrace(
        quotients,
        tuple(states),
        mono,
        p_ball / q_ball,
        prec,
        work,
        trace.exact_cap,
        flag,
    )


def build_trace(quotients, prec: int = 128, *, exact_cap: int = EXACT_DEGREE_CAP, finite: bool = False) -> CFTrace:
    """Fold :func:`advance` over ``quotients``. ``finite`` marks the sequence
    as complete, so the value is exact at truncation."""
    trace = start(prec, exact_cap=exact_cap)
    for a in quotients:
        trace = advance(trace, a, prec)
    if finite:
        trace = replace(trace, finite=True)
    return trace


def _real_at_least_one(a: AlgebraicNumber) -> bool:
    if a.is_rational:
        return a.as_rational() >= 1
    b = a.isolator
    return b.is_real and b.lower() >= 1


def lemma_regime_unconditional(trace: CFTrace, upto: int) -> bool:
    """True when ``a_1..a_upto`` are all certified real and ``>= 1``."""
    return all(_real_at_least_one(a) for a in trace.quotients[:upto])


def tail_error_bound(trace: CFTrace, N: int, *, allow_conditional: bool = True) -> TailBound:
    """Bound ``log2 |x - p_N/q_N| < log2(1 / |q_{N+1} q_N|)``."""
    if N + 1 > trace.N:
        raise ValueError(f"trace has no state {N + 1}")
    unconditional = lemma_regime_unconditional(trace, N + 1)
    if not unconditional:
        if not allow_conditional:
            raise MonotonicityNotCertified("partial quotients are not certified real >= 1")
        if trace.monotone_upto < N + 1:
            raise MonotonicityNotCertified(
                f"|q_n| certified increasing only up to {trace.monotone_upto}, need {N + 1}"
            )
    s0, s1 = trace.states[N], trace.states[N + 1]
    bound = -(s1.abs_q.log2() + s0.abs_q.log2())
    return TailBound(N, bound, not unconditional)


def value_at(trace: CFTrace, N: int) -> Ball:
    s = trace.states[N]
    if s.q_ball.contains_zero():
        raise QNearZero(f"q_{N} ball contains zero")
    return s.p_ball / s.q_ball


def limit_enclosure(trace: CFTrace, N: int | None = None, *, allow_conditional: bool = True) -> Ball:
    """Ball around ``p_N/q_N`` widened by the tail bound; it contains the
    continued-fraction value whenever the convergence hypotheses hold.

    For a finite trace the value at the last index is returned unwidened.
    """
    if trace.finite and (N is None or N == trace.N):
        return value_at(trace, trace.N)
    if N is None:
        N = trace.N - 1
    tail_error_bound(trace, N, allow_conditional=allow_conditional)
    s0, s1 = trace.states[N], trace.states[N + 1]
    radius = up(64).div(1, (s1.abs_q * s0.abs_q).lower())
    return value_at(trace, N).inflate(radius)
