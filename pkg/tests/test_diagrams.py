import json

import numpy as np
import pytest

from obc_lib.diagrams import (
    Expr,
    ExprSyntaxError,
    Layer,
    TypeMismatch,
    black_degree,
    cross_for,
    expand_derived,
    expr_compose,
    expr_tensor,
    expr_to_json,
    parity,
    parse_expr,
    print_expr,
)
from obc_lib.suites import random_expr


def test_parse_composition_of_generators():
    e = parse_expr("c . c")
    assert (e.src, e.dst) == ("u", "u")
    assert list(e.terms) == [(Layer("", "c", ""), Layer("", "c", ""))]
    assert parity(e) == 0
    assert black_degree(parse_expr("x . c . x")) == 2


def test_tensor_pads_layers():
    e = parse_expr("s * id(u)")
    assert (e.src, e.dst) == ("uuu", "uuu")
    assert list(e.terms) == [(Layer("", "s", "u"),)]
    assert expr_tensor(Expr.gen("cup"), Expr.gen("x")) == parse_expr("cup * x")


def test_compose_is_outer_after_inner():
    e = expr_compose(Expr.gen("x", "d"), Expr.gen("rcup"))
    assert (e.src, e.dst) == ("", "du")
    assert expr_compose(Expr.gen("cap"), Expr.gen("ls")).src == "ud"
    with pytest.raises(TypeMismatch):
        expr_compose(Expr.gen("cup"), Expr.gen("cup"))


def test_linear_structure():
    e = parse_expr("2 * s - s")
    assert e == Expr.gen("s")
    assert (parse_expr("s - s")).is_zero()
    assert parse_expr("i * c") == Expr.gen("c").scale("i")
    with pytest.raises(TypeMismatch):
        Expr.gen("s") + Expr.gen("x")


def test_print_then_parse():
    e = parse_expr("(s * id(u)) . (id(u) * s) - 2 * id(uuu) + (1/2) * (x * c * id(u))")
    assert parse_expr(print_expr(e)) == e
    assert print_expr(Expr("u", "u")) == "0 * id(u)"


def test_json_export():
    data = json.loads(expr_to_json(parse_expr("3 * cap")))
    assert data["src"] == "du"
    assert data["dst"] == ""
    assert data["terms"] == [{"coeff": "3", "layers": [["", "cap", ""]]}]


def test_bubbles_and_unit_words():
    assert (Expr.bubble(2).src, Expr.bubble(2).dst) == ("", "")
    assert parse_expr("D(3)") == Expr.bubble(3)
    assert parse_expr("D'(1)") == Expr.bubble(1, clockwise=True)
    assert parse_expr("id(1)") == Expr.identity("")
    assert parse_expr("id(↑↓)") == Expr.identity("ud")
    with pytest.raises(ValueError):
        Expr.bubble(-1)


def test_crossings_by_orientation():
    assert [cross_for(a, b) for a, b in ("uu", "dd", "ud", "du")] == ["s", "ds", "ls", "rs"]


def test_derived_generators_expand():
    assert expand_derived("s") is None
    assert expand_derived("ls") is None
    cd = expand_derived("cd")
    assert (cd.src, cd.dst) == ("d", "d")
    rcup = expand_derived("rcup")
    assert (rcup.src, rcup.dst) == ("", "du")


@pytest.mark.parametrize("text", ["cup . cup", "foo", "s * ", "id(uq)", "D(x)", "(s"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.line == 1
    assert info.value.column >= 1


def test_error_position_on_later_line():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("s .\n  bogus")
    assert info.value.line == 2
    assert info.value.column == 3


def test_round_trip_on_random_expressions():
    rng = np.random.default_rng(31)
    for _ in range(150):
        e = random_expr(rng)
        assert parse_expr(print_expr(e)) == e, print_expr(e)


@pytest.mark.parametrize("src,dst,text", [
    ("u", "d", "0(u->d)"),
    ("", "ud", "0(1->ud)"),
    ("uu", "uu", "0 * id(uu)"),
])
def test_zero_morphisms_print_and_parse(src, dst, text):
    zero = Expr(src, dst)
    assert print_expr(zero) == text
    assert parse_expr(text) == zero
