import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfcert.errors import ExpressionError, HypothesisShapeError, SchemaError
from cfcert.seqspec import emit, parse_spec, quotients, spec_from_dict

BASE = {"d": 2, "D": 1, "H_star_log2": 10, "horizon": 4,
        "family": {"kind": "sqrt-int", "log2_a": "10^n"}}


def with_(**kw):
    obj = json.loads(json.dumps(BASE))
    obj.update(kw)
    return obj


def test_parse_defaults():
    spec = parse_spec(json.dumps(BASE).encode())
    assert spec.prec == 256 and spec.length == 5
    assert spec.H_star_log2 == 10
    assert spec.lemma_options() == {"coeff_bound": 20, "count": 100, "degree_max": 4}


def test_fractional_height():
    assert spec_from_dict(with_(H_star_log2="3/2")).H_star_log2 == Fraction(3, 2)
    assert spec_from_dict(with_(H_star_log2=1.5)).H_star_log2 == Fraction(3, 2)


@pytest.mark.parametrize(
    "obj, path",
    [
        (with_(extra=1), "$"),
        ({k: v for k, v in BASE.items() if k != "horizon"}, "$.horizon"),
        (with_(d="two"), "$.d"),
        (with_(H_star_log2=-1), "$.H_star_log2"),
        (with_(family={"kind": "nope"}), "$.family.kind"),
        (with_(family={"kind": "sqrt-int"}), "$.family"),
        (with_(family={"kind": "sqrt-int", "a_values": ["2", "3"]}), "$.family.a_values"),
        (with_(family={"kind": "minpoly-list", "entries": [{"coeffs": [3]}]}), "$.family.entries[0].coeffs"),
        (with_(family={"kind": "minpoly-list", "entries": [{"coeffs": [-2, 0, 1], "selector": "disk:1"}]}),
         "$.family.entries[0].selector"),
        (with_(lemmas={"seed": 3}), "$.lemmas"),
        (with_(prec=8), "$.prec"),
    ],
)
def test_schema_errors_carry_path(obj, path):
    with pytest.raises(SchemaError) as exc:
        spec_from_dict(obj)
    assert exc.value.path == path


def test_shape_errors():
    with pytest.raises(HypothesisShapeError):
        spec_from_dict(with_(d=1))
    with pytest.raises(HypothesisShapeError):
        spec_from_dict(with_(horizon=1))


def test_expression_errors():
    with pytest.raises(ExpressionError) as exc:
        spec_from_dict(with_(family={"kind": "expr", "a_expr": "n/2"}))
    assert exc.value.path == "$.family.a_expr"


def test_json_syntax_error_has_line():
    with pytest.raises(SchemaError) as exc:
        parse_spec('{\n  "d": 2,\n  oops\n}')
    assert exc.value.line == 3


def test_quotients_sqrt_int():
    qs, warnings = quotients(parse_spec(json.dumps(BASE)))
    assert [q.degree for q in qs] == [1, 1, 1, 1, 1]
    assert len(warnings) == 5
    spec = spec_from_dict(with_(family={"kind": "sqrt-int", "a_values": ["2", "3", "4", "5", "6"]}))
    qs, warnings = quotients(spec)
    assert [q.degree for q in qs] == [2, 2, 1, 2, 2] and len(warnings) == 1


def test_quotients_minpoly_cycle_and_expr():
    spec = spec_from_dict(with_(family={"kind": "minpoly-list", "entries": [{"coeffs": [-2, 0, 1]}]}))
    qs, warnings = quotients(spec)
    assert len(qs) == 5 and all(q.min_poly == qs[0].min_poly for q in qs)
    assert "periodically" in warnings[0]
    qs, _ = quotients(spec_from_dict(with_(family={"kind": "expr", "a_expr": "n^2"})))
    assert [int(q.as_rational()) for q in qs] == [1, 4, 9, 16, 25]


families = st.one_of(
    st.builds(lambda e: {"kind": "sqrt-int", "log2_a": e}, st.sampled_from(["n", "10^n", "2*n + 1"])),
    st.builds(lambda vs: {"kind": "sqrt-int", "a_values": [str(v) for v in vs]},
              st.lists(st.integers(1, 10**30), min_size=12, max_size=14)),
    st.builds(lambda e: {"kind": "expr", "a_expr": e}, st.sampled_from(["n", "n^3 - 1"])),
    st.builds(lambda cs: {"kind": "minpoly-list", "entries": [{"coeffs": c + [1]} for c in cs]},
              st.lists(st.lists(st.integers(-9, 9), min_size=1, max_size=3), min_size=1, max_size=3)),
)


@given(
    st.integers(2, 6), st.integers(1, 4),
    st.fractions(min_value=0, max_value=100), st.integers(2, 11), st.integers(32, 1024), families,
)
def test_round_trip(d, D, h, horizon, prec, family):
    obj = {"d": d, "D": D, "H_star_log2": str(h), "horizon": horizon, "prec": prec, "family": family}
    spec = spec_from_dict(obj)
    assert parse_spec(emit(spec)) == spec
