"""Certified arithmetic on algebraic numbers and a finite-horizon
transcendence checker for continued fractions with algebraic-integer
partial quotients."""

__version__ = "0.1.0"

from .algebraic import (
    LARGEST_MODULUS,
    LARGEST_REAL,
    AlgebraicNumber,
    Decision,
    NumberProfile,
    Selector,
    exact_combine,
    from_rational,
    mk_algebraic,
    negate,
    profile,
    reciprocal,
    separation_bound_exact,
    separation_lower_bound,
)
from .ball import Ball
from .cf_engine import CFTrace, advance, build_trace, limit_enclosure, start, tail_error_bound
from .criterion import (
    Certificate,
    GrowthLedger,
    Verdict,
    build_certificate,
    build_ledger,
    check_proof_inequalities,
    contradiction_threshold,
    detect_records,
    exponent_denominator,
    witness_check,
)
from .lemma_lab import CheckReport, Corpus, gen_corpus, run_lemma_checks
from .poly import IntPolynomial
from .seqspec import SequenceSpec, emit, parse_spec

__all__ = [name for name in dir() if not name.startswith("_")]
