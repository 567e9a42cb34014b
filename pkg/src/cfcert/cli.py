"""``cfcert`` command line: analyze, certify, lemmas and threshold modes.

Reports are JSON; every enclosure is written as a ``[midpoint, radius]``
pair of decimal strings. Exit status is 0 when the mode completed without a
certified hypothesis violation or lemma failure, 1 when one was found, 2 on
an invalid spec and 3 when a computation gave up.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .algebraic import Decision, profile
from .ball import ball_to_pair
from .cf_engine import build_trace
from .criterion import (
    Certificate,
    build_certificate,
    build_ledger,
    check_proof_inequalities,
    contradiction_threshold,
    houses_bounded,
    stable_threshold,
)
from .errors import CfcertError, HypothesisViolated, SpecError
from .lemma_lab import check_l2, check_l3, check_t2, gen_corpus, run_lemma_checks
from .seqspec import SequenceSpec, parse_spec, quotients, spec_to_dict

MODES = ("analyze", "certify", "lemmas", "threshold")
ONSET_RANGE = 50
PAIR_DIGITS = 30

EXIT_OK, EXIT_VIOLATION, EXIT_SPEC, EXIT_COMPUTE = 0, 1, 2, 3


def _pair(b):
    return None if b is None else ball_to_pair(b, PAIR_DIGITS)


def _per_n(spec: SequenceSpec, qs, prec: int):
    """Rows of the per-index table plus the ledger records and warnings."""
    profiles = [profile(a, prec) for a in qs]
    trace = build_trace(qs, prec)
    houses = [p.log2_house for p in profiles]
    ledger = build_ledger(houses, spec.d, spec.D)
    rows = []
    for n, (a, pr) in enumerate(zip(qs, profiles), start=1):
        entry = ledger.per_n[n - 1]
        rows.append(
            {
                "n": n,
                "min_poly": str(a.min_poly),
                "degree": a.degree,
                "log2_house": _pair(pr.log2_house),
                "attains_house": pr.attains_house.value,
                "log2_abs_q": _pair(trace.states[n].abs_q.log2()),
                "exponent_denominator": str(entry.exponent_denominator),
                "normalized": _pair(entry.normalized),
            }
        )
    warnings = []
    if houses_bounded(houses):
        warnings.append("bounded houses")
    if ledger.undecided:
        warnings.append(f"record test undecided at k={list(ledger.undecided)}")
    if trace.precision_flag:
        warnings.append("convergent denominators below requested relative accuracy")
    return rows, list(ledger.records), warnings, profiles


def _hypothesis_problems(spec, qs, profiles) -> list[str]:
    out = []
    for n, (a, pr) in enumerate(zip(qs, profiles), start=1):
        if a.degree > spec.d:
            out.append(f"degree-exceeds-d at n={n}")
        if not a.is_integer:
            out.append(f"not-algebraic-integer at n={n}")
        if pr.attains_house is Decision.NO:
            out.append(f"house-not-attained at n={n}")
    return out


def certificate_dict(c: Certificate) -> dict:
    return {
        "verdict": c.verdict.value,
        "N": c.N,
        "N_star": c.threshold_N_star,
        "N_star_stable": c.stable_N_star,
        "checks": {k: v.value for k, v in c.hypothesis_checks.items()},
        "failed_check": c.failed_check,
        "witness": {"lhs_log2": _pair(c.witness_lhs_log2), "rhs_log2": _pair(c.witness_rhs_log2)},
        "contradiction": {
            "lhs_log2": _pair(c.contradiction_lhs_log2),
            "rhs_log2": _pair(c.contradiction_rhs_log2),
        },
        "statement": c.statement,
        "notes": list(c.notes),
    }


def _onsets(spec) -> dict:
    lab = check_proof_inequalities(ONSET_RANGE, spec.d, spec.D)
    return {
        "N_max": ONSET_RANGE,
        "log_bound_all_true": lab.all_log_bounds_hold,
        "growth_bound_onset": lab.onset,
        "exponent_ratio_increasing": all(lab.ratio_increasing.values()),
    }


def _threshold_grid(spec) -> list[dict]:
    rows = []
    for d in sorted({2, 3, spec.d}):
        for D in sorted({1, 2, spec.D}):
            for h in sorted({0, spec.H_star_log2}):
                rows.append(
                    {
                        "d": d,
                        "D": D,
                        "H_star_log2": str(h),
                        "N_star": contradiction_threshold(d, D, H_star_log2=h),
                        "N_star_stable": stable_threshold(d, D, H_star_log2=h),
                    }
                )
    return rows


def _report_dict(report):
    return {k: report.__dict__[k] for k in ("lemma", "cases", "passes", "undecided", "failures", "min_margin", "max_margin")} | {
        "failure_details": report.failure_details[:20],
        "undecided_details": report.undecided_details[:20],
    }


def run(spec: SequenceSpec, mode: str, *, seed: int = 42) -> tuple[dict, int]:
    """Execute ``mode`` and return ``(report, exit_status)``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    report = {
        "version": __version__,
        "mode": mode,
        "spec": spec_to_dict(spec),
        "per_n": [],
        "records": [],
        "certificate": None,
        "warnings": [],
    }
    status = EXIT_OK
    prec = spec.prec

    if mode == "threshold":
        report["threshold"] = _threshold_grid(spec)
        report["inequality_onsets"] = _onsets(spec)
        return report, status

    qs, warnings = quotients(spec)
    report["warnings"].extend(warnings)

    if mode == "lemmas":
        opts = spec.lemma_options()
        corpus = gen_corpus(seed, opts["degree_max"], opts["coeff_bound"], opts["count"])
        checks = run_lemma_checks(corpus, prec=min(prec, 128), seed=seed)
        seq = {"L2": check_l2(qs, prec), "L3": check_l3(qs, prec), "T2": check_t2(qs, prec)}
        report["lemmas"] = {
            "corpus": {"seed": seed, **opts},
            "corpus_checks": {k: _report_dict(v) for k, v in checks.items()},
            "sequence_checks": {k: _report_dict(v) for k, v in seq.items()},
        }
        if any(r.failures for r in list(checks.values()) + list(seq.values())):
            status = EXIT_VIOLATION
        return report, status

    rows, records, more, profiles = _per_n(spec, qs, prec)
    report["per_n"] = rows
    report["records"] = records
    report["warnings"].extend(more)

    if mode == "analyze":
        problems = _hypothesis_problems(spec, qs, profiles)
        report["warnings"].extend(f"hypothesis violated: {p}" for p in problems)
        report["inequality_onsets"] = _onsets(spec)
        return report, EXIT_VIOLATION if problems else EXIT_OK

    try:
        cert = build_certificate(qs, spec.d, spec.D, H_star_log2=spec.H_star_log2, horizon=spec.horizon, prec=prec)
    except HypothesisViolated as exc:
        report["certificate"] = {"verdict": "HypothesisViolated", "violation": exc.name, "detail": exc.detail}
        return report, EXIT_VIOLATION
    report["certificate"] = certificate_dict(cert)
    report["inequality_onsets"] = _onsets(spec)
    for w in cert.warnings:
        if w not in report["warnings"]:
            report["warnings"].append(w)
    return report, status


def write_csv(report: dict, path) -> None:
    cols = ["n", "min_poly", "degree", "log2_house_mid", "log2_house_rad", "attains_house",
            "log2_abs_q_mid", "log2_abs_q_rad", "normalized_mid", "normalized_rad"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in report["per_n"]:
            w.writerow([r["n"], r["min_poly"], r["degree"], *r["log2_house"], r["attains_house"],
                        *r["log2_abs_q"], *r["normalized"]])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfcert", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("spec_file", help="JSON sequence specification ('-' for stdin)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write the per-n table as CSV")
    p.add_argument("--prec", type=int, help="override the spec's precision in bits")
    p.add_argument("--seed", type=int, default=42, help="corpus seed for the lemmas mode")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = sys.stdin.buffer.read() if args.spec_file == "-" else Path(args.spec_file).read_bytes()
        spec = parse_spec(raw)
        if args.prec is not None:
            if args.prec < 32:
                raise SpecError("--prec must be at least 32", "--prec")
            spec = replace(spec, prec=args.prec)
    except (OSError, SpecError) as exc:
        print(f"cfcert: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        report, status = run(spec, args.mode, seed=args.seed)
    except SpecError as exc:
        print(f"cfcert: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except CfcertError as exc:
        print(f"cfcert: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv:
        write_csv(report, args.csv)
    return status


if __name__ == "__main__":
    sys.exit(main())
