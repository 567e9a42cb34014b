"""Sequence specifications: JSON input naming ``d``, ``D``, the height
budget, the horizon and a family of partial quotients."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .algebraic import AlgebraicNumber, Selector, from_rational, mk_algebraic
from .errors import ExpressionError, HypothesisShapeError, SchemaError
from .expr import IntExpr
from .poly import IntPolynomial

TOP_KEYS = {"d", "D", "H_star_log2", "horizon", "prec", "family", "lemmas"}
REQUIRED = ("d", "D", "H_star_log2", "horizon", "family")
FAMILY_KINDS = ("sqrt-int", "minpoly-list", "expr")
DEFAULT_PREC = 256
LEMMA_DEFAULTS = {"degree_max": 4, "coeff_bound": 20, "count": 100}


@dataclass(frozen=True)
class MinpolyEntry:
    coeffs: tuple[int, ...]
    selector: str = "largest-modulus"


@dataclass(frozen=True)
class Family:
    kind: str
    log2_a: IntExpr | None = None
    a_values: tuple[int, ...] | None = None
    entries: tuple[MinpolyEntry, ...] | None = None
    a_expr: IntExpr | None = None


@dataclass(frozen=True)
class SequenceSpec:
    d: int
    D: int
    H_star_log2: Fraction
    horizon: int
    family: Family
    prec: int = DEFAULT_PREC
    lemmas: tuple[tuple[str, int], ...] = tuple(sorted(LEMMA_DEFAULTS.items()))

    @property
    def length(self) -> int:
        return self.horizon + 1

    def lemma_options(self) -> dict[str, int]:
        return dict(self.lemmas)


def _int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, str) and value.strip().lstrip("-").isdigit():
            value = int(value)
        else:
            raise SchemaError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise SchemaError(f"must be at least {minimum}, got {value}", path)
    return value


def _fraction(value, path: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("expected a number", path)
    try:
        q = Fraction(str(value)) if isinstance(value, (int, float, str)) else None
    except (ValueError, ZeroDivisionError):
        q = None
    if q is None:
        raise SchemaError(f"expected a nonnegative number, got {value!r}", path)
    if q < 0:
        raise SchemaError("must be nonnegative", path)
    return q


def _expr(value, path: str) -> IntExpr:
    if not isinstance(value, str):
        raise ExpressionError("expression must be a string", path)
    return IntExpr(value, path)


def _family(obj, path: str) -> Family:
    if not isinstance(obj, dict):
        raise SchemaError("family must be an object", path)
    kind = obj.get("kind")
    if kind not in FAMILY_KINDS:
        raise SchemaError(f"kind must be one of {', '.join(FAMILY_KINDS)}", f"{path}.kind")
    allowed = {
        "sqrt-int": {"kind", "log2_a", "a_values"},
        "minpoly-list": {"kind", "entries"},
        "expr": {"kind", "a_expr"},
    }[kind]
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"unknown keys {sorted(extra)}", path)
    if kind == "sqrt-int":
        if ("log2_a" in obj) == ("a_values" in obj):
            raise SchemaError("give exactly one of log2_a and a_values", path)
        if "log2_a" in obj:
            return Family(kind, log2_a=_expr(obj["log2_a"], f"{path}.log2_a"))
        vals = obj["a_values"]
        if not isinstance(vals, list) or not vals:
            raise SchemaError("a_values must be a nonempty list", f"{path}.a_values")
        out = []
        for i, v in enumerate(vals):
            p = f"{path}.a_values[{i}]"
            if not isinstance(v, str) or not v.strip().isdigit():
                raise SchemaError("a_values entries are decimal integer strings", p)
            out.append(_int(int(v), p, 1))
        return Family(kind, a_values=tuple(out))
    if kind == "expr":
        if "a_expr" not in obj:
            raise SchemaError("missing a_expr", path)
        return Family(kind, a_expr=_expr(obj["a_expr"], f"{path}.a_expr"))
    entries = obj.get("entries")
    if not isinstance(entries, list) or not entries:
        raise SchemaError("entries must be a nonempty list", f"{path}.entries")
    out = []
    for i, e in enumerate(entries):
        p = f"{path}.entries[{i}]"
        if not isinstance(e, dict) or "coeffs" not in e:
            raise SchemaError("entry needs coeffs", p)
        if set(e) - {"coeffs", "selector"}:
            raise SchemaError(f"unknown keys {sorted(set(e) - {'coeffs', 'selector'})}", p)
        coeffs = e["coeffs"]
        if not isinstance(coeffs, list) or len(coeffs) < 2:
            raise SchemaError("coeffs must list at least two integers", f"{p}.coeffs")
        cs = tuple(_int(c, f"{p}.coeffs[{j}]") for j, c in enumerate(coeffs))
        if IntPolynomial(cs).degree < 1:
            raise SchemaError("polynomial must be nonconstant", f"{p}.coeffs")
        sel = e.get("selector", "largest-modulus")
        try:
            Selector.parse(sel)
        except (ValueError, TypeError, AttributeError) as exc:
            raise SchemaError(f"bad selector {sel!r}: {exc}", f"{p}.selector") from None
        out.append(MinpolyEntry(cs, sel))
    return Family(kind, entries=tuple(out))


def spec_from_dict(obj) -> SequenceSpec:
    if not isinstance(obj, dict):
        raise SchemaError("top level must be an object", "$")
    extra = set(obj) - TOP_KEYS
    if extra:
        raise SchemaError(f"unknown keys {sorted(extra)}", "$")
    for key in REQUIRED:
        if key not in obj:
            raise SchemaError(f"missing key {key!r}", f"$.{key}")
    d = _int(obj["d"], "$.d")
    D = _int(obj["D"], "$.D")
    if d <= 1:
        raise HypothesisShapeError(f"d must exceed 1, got {d}", "$.d")
    if D < 1:
        raise HypothesisShapeError(f"D must be at least 1, got {D}", "$.D")
    h = _fraction(obj["H_star_log2"], "$.H_star_log2")
    horizon = _int(obj["horizon"], "$.horizon")
    if horizon < 2:
        raise HypothesisShapeError(f"horizon must be at least 2, got {horizon}", "$.horizon")
    prec = _int(obj.get("prec", DEFAULT_PREC), "$.prec", 32)
    family = _family(obj["family"], "$.family")
    if family.a_values is not None and len(family.a_values) < horizon + 1:
        raise SchemaError(f"need {horizon + 1} a_values", "$.family.a_values")
    lemmas = dict(LEMMA_DEFAULTS)
    if "lemmas" in obj:
        lm = obj["lemmas"]
        if not isinstance(lm, dict) or set(lm) - set(LEMMA_DEFAULTS):
            raise SchemaError(f"lemmas takes {sorted(LEMMA_DEFAULTS)}", "$.lemmas")
        for k, v in lm.items():
            lemmas[k] = _int(v, f"$.lemmas.{k}", 1)
    return SequenceSpec(d, D, h, horizon, family, prec, tuple(sorted(lemmas.items())))


def parse_spec(text) -> SequenceSpec:
    """Validate a JSON sequence specification (bytes or str)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"not UTF-8: {exc}", "$") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, "$", exc.lineno) from None
    return spec_from_dict(obj)


def _fraction_out(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def spec_to_dict(spec: SequenceSpec) -> dict:
    f = spec.family
    fam: dict = {"kind": f.kind}
    if f.log2_a is not None:
        fam["log2_a"] = f.log2_a.text
    if f.a_values is not None:
        fam["a_values"] = [str(a) for a in f.a_values]
    if f.entries is not None:
        fam["entries"] = [{"coeffs": list(e.coeffs), "selector": e.selector} for e in f.entries]
    if f.a_expr is not None:
        fam["a_expr"] = f.a_expr.text
    return {
        "d": spec.d,
        "D": spec.D,
        "H_star_log2": _fraction_out(spec.H_star_log2),
        "horizon": spec.horizon,
        "prec": spec.prec,
        "family": fam,
        "lemmas": spec.lemma_options(),
    }


def emit(spec: SequenceSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True)


def _sqrt_of(a: int, path: str) -> AlgebraicNumber:
    if a <= 0:
        raise ExpressionError(f"a_n must be positive, got {a}", path)
    r = isqrt(a)
    if r * r == a:
        return from_rational(r)
    return mk_algebraic(IntPolynomial((-a, 0, 1)))


def quotients(spec: SequenceSpec, count: int | None = None) -> tuple[list[AlgebraicNumber], list[str]]:
    """The first ``count`` partial quotients (default ``horizon + 1``) and
    any warnings raised while building them."""
    count = count or spec.length
    f = spec.family
    warnings = []
    out = []
    if f.kind == "sqrt-int":
        for n in range(1, count + 1):
            if f.log2_a is not None:
                e = f.log2_a(n)
                if e < 0:
                    raise ExpressionError(f"log2_a is negative at n={n}", "$.family.log2_a")
                a = 1 << e
            else:
                if n > len(f.a_values):
                    raise SchemaError(f"need {count} a_values", "$.family.a_values")
                a = f.a_values[n - 1]
            q = _sqrt_of(a, f"$.family (n={n})")
            if q.degree == 1:
                warnings.append(f"a_{n} is a perfect square; alpha_{n} has degree 1")
            out.append(q)
    elif f.kind == "expr":
        for n in range(1, count + 1):
            out.append(from_rational(f.a_expr(n)))
    else:
        if len(f.entries) < count:
            warnings.append(f"{len(f.entries)} entries repeated periodically to length {count}")
        for n in range(1, count + 1):
            e = f.entries[(n - 1) % len(f.entries)]
            out.append(mk_algebraic(IntPolynomial(e.coeffs), Selector.parse(e.selector)))
    return out, warnings
