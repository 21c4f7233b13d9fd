import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kflag import errors
from kflag.errors import BindingError, ExprSemanticError, ParseError, SchemaError, UnitError, ValidationError
from kflag.expr import (
    Int,
    Neg,
    Power,
    Product,
    Sum,
    Var,
    load_tower_spec,
    lower_expr,
    parse_expr,
    parse_poly,
    render_ast,
    tower_from_json,
)
from kflag.laurent import LaurentPoly, Monomial, u, v, w, y
from kflag.tower import make_tower

from corpus import ERRORS, ROUNDTRIP

SL2 = make_tower([("A", 2)])


def Y(j, i):
    return LaurentPoly.from_var(y(j, i))


# --- grammar ----------------------------------------------------------------


def test_sum_with_negative_power():
    assert parse_expr("y[1,1] + y[1,2]^-1") == Sum((Var("y", 1, 1), Power(Var("y", 1, 2), -1)))


def test_product_of_power_of_sum():
    got = parse_expr("(y[2,1] - 1)^3 * u[1,1]")
    assert got == Product((Power(Sum((Var("y", 2, 1), Neg(Int(1)))), 3), Var("u", 1, 1)))


def test_precedence_and_associativity():
    assert parse_expr("1 - 2 - 3") == Sum((Int(1), Neg(Int(2)), Neg(Int(3))))
    assert parse_expr("2*y[1,1]^3") == Product((Int(2), Power(Var("y", 1, 1), 3)))
    assert parse_poly("2 - 3 - 4") == -5
    assert parse_poly("2 + 3 * 4^2") == 50


def test_stage_index_zero():
    with pytest.raises(ExprSemanticError, match="stage index must be >= 1"):
        parse_expr("y[0,1]")


def test_error_position_and_expected():
    with pytest.raises(ParseError) as info:
        parse_expr("y[1,1] +\n  * 2")
    err = info.value
    assert (err.line, err.column) == (2, 3)
    assert set(err.expected) == {"SIGNED_INT", "VAR", "'('"}


def test_error_no_chained_exponent():
    with pytest.raises(ParseError) as info:
        parse_expr("y[1,1]^2^3")
    assert "'^'" not in info.value.expected


@pytest.mark.parametrize("src", ROUNDTRIP)
def test_roundtrip_corpus(src):
    ast = parse_expr(src)
    text = render_ast(ast)
    assert parse_expr(text) == ast
    assert render_ast(parse_expr(text)) == text


@pytest.mark.parametrize("src, cls, code", ERRORS)
def test_error_corpus(src, cls, code):
    with pytest.raises(getattr(errors, cls)) as info:
        parse_poly(src, SL2)
    assert info.value.exit_code == code


# --- lowering -------------------------------------------------------------------

y11, y12, y21 = Y(1, 1), Y(1, 2), Y(2, 1)
u11 = LaurentPoly.from_var(u(1, 1))
w11 = LaurentPoly.from_var(w(1, 1))
v11 = LaurentPoly.from_var(v(1, 1))

LOWER_CASES = [
    ("y[1,1]^-2", LaurentPoly.from_monomial(Monomial({y(1, 1): -2}))),
    ("0", LaurentPoly.const(0)),
    ("-4", LaurentPoly.const(-4)),
    ("y[1,1] + y[1,2]", y11 + y12),
    ("y[1,1] - y[1,1]", LaurentPoly.const(0)),
    ("(y[1,1] + 1)^2", y11 * y11 + 2 * y11 + 1),
    ("(y[1,1] - y[1,2])*(y[1,1] + y[1,2])", y11 * y11 - y12 * y12),
    ("y[1,1]^-1*y[1,1]", LaurentPoly.const(1)),
    ("(y[1,1]*y[1,2])^-2", LaurentPoly.from_monomial(Monomial({y(1, 1): -2, y(1, 2): -2}))),
    ("(0 - y[1,1])^-1", LaurentPoly.from_monomial(Monomial({y(1, 1): -1}), -1)),
    ("u[1,1]*y[2,1]^3", u11 * y21 * y21 * y21),
    ("w[1,1]^2", y11),
    ("w[1,1]^-1 + w[1,1]", w11 + LaurentPoly.from_monomial(Monomial({w(1, 1): -1}))),
    ("(w[1,1] + w[1,1]^-1)^2", y11 + 2 + LaurentPoly.from_monomial(Monomial({y(1, 1): -1}))),
    ("v[1,1]^2 - u[1,1]", LaurentPoly.const(0)),
    ("v[1,1]^3", u11 * v11),
    ("3*(y[1,1] + y[2,1])*-2", -6 * y11 - 6 * y21),
    ("y[1,1]^0", LaurentPoly.const(1)),
    ("(y[1,1] + y[1,2])^3 - y[1,1]^3 - y[1,2]^3", 3 * y11 * y11 * y12 + 3 * y11 * y12 * y12),
    ("2 - (3 - y[1,1])", y11 - 1),
]


@pytest.mark.parametrize("src, expected", LOWER_CASES, ids=[c[0] for c in LOWER_CASES])
def test_lower_table(src, expected):
    assert lower_expr(parse_expr(src)) == expected


def test_lower_errors():
    with pytest.raises(UnitError):
        parse_poly("(y[1,1]+1)^-1")
    with pytest.raises(BindingError):
        parse_poly("w[1,1]", SL2)
    with pytest.raises(BindingError):
        parse_poly("y[1,3]", SL2)
    spin = make_tower([("B_spin", 1)])
    assert parse_poly("w[1,1]", spin) == w11


# --- property: render/parse fixpoint on generated trees -----------------------------------

leaves = st.one_of(
    st.integers(-20, 20).map(Int),
    st.builds(Var, st.sampled_from("yuwv"), st.integers(1, 3), st.integers(1, 3)),
)


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Sum(tuple(xs))),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Product(tuple(xs))),
        st.builds(Power, children, st.integers(-3, 3)),
        st.lists(children, min_size=1, max_size=2).map(
            lambda xs: Sum((xs[0],) + tuple(Neg(x) for x in xs[1:])) if len(xs) > 1 else xs[0]
        ),
    )


trees = st.recursive(leaves, _extend, max_leaves=8)


@given(trees)
@settings(max_examples=300, deadline=None)
def test_render_parse_fixpoint(tree):
    text = render_ast(tree)
    again = parse_expr(text)
    assert render_ast(again) == text
    assert parse_expr(render_ast(again)) == again


@given(trees)
@settings(max_examples=200, deadline=None)
def test_render_preserves_value(tree):
    try:
        expected = lower_expr(tree)
    except UnitError:
        return
    assert lower_expr(parse_expr(render_ast(tree))) == expected


# --- tower specs --------------------------------------------------------------------------


def test_load_single_stage(write_tower):
    t = load_tower_spec(write_tower({"stages": [{"family": "A", "vars": 2}]}))
    assert t == SL2


def test_load_two_stage(write_tower, sl2_sl2):
    data = {
        "stages": [{"family": "A", "vars": 2}, {"family": "A", "vars": 2}],
        "maps": {"2": {"1": [[1, 0], [0, 0]]}},
    }
    assert load_tower_spec(write_tower(data)) == sl2_sl2


def test_load_borel_blocks_for_c(write_tower):
    t = load_tower_spec(write_tower({"stages": [{"family": "C", "vars": 2, "blocks": [1, 1]}]}))
    assert t.stage(1).is_borel


def test_version_field(write_tower):
    load_tower_spec(write_tower({"version": 1, "stages": [{"family": "A", "vars": 2}]}))
    with pytest.raises(SchemaError, match="version"):
        load_tower_spec(write_tower({"version": 2, "stages": [{"family": "A", "vars": 2}]}))


def test_json_error_names_path(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError, match="broken.json"):
        load_tower_spec(path)
    with pytest.raises(SchemaError, match="cannot read"):
        load_tower_spec(tmp_path / "missing.json")


@pytest.mark.parametrize(
    "data, field",
    [
        ({"stages": [{"family": "A"}]}, "stages[0].vars"),
        ({"stages": [{"family": 3, "vars": 2}]}, "stages[0].family"),
        ({"stages": []}, "stages"),
        ({"stages": [{"family": "A", "vars": 2, "blocks": "x"}]}, "stages[0].blocks"),
        ({"stages": [{"family": "A", "vars": 2}], "maps": []}, "maps"),
        ({"stages": [{"family": "A", "vars": 2}] * 2, "maps": {"2": {"1": [[1, "a"], [0, 0]]}}}, "maps.2.1"),
        ({"stages": [{"family": "A", "vars": 2}], "extra": 1}, "extra"),
        ({"stages": [{"family": "A", "vars": 2, "colour": 1}]}, "colour"),
    ],
)
def test_schema_errors_name_field(data, field):
    with pytest.raises(SchemaError, match=field.replace("[", r"\[").replace("]", r"\]")):
        tower_from_json(data)


def test_validation_errors_propagate():
    with pytest.raises(ValidationError):
        tower_from_json({"stages": [{"family": "A", "vars": 2}] * 2, "maps": {"2": {"1": [[1, 0]]}}})


def test_tower_json_is_sorted_utf8(sl2_sl2):
    from kflag.expr import dumps

    text = dumps(sl2_sl2.to_json())
    assert json.loads(text) == sl2_sl2.to_json()
    assert text == dumps(json.loads(text))
