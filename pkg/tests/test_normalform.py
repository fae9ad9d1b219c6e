import json
from math import factorial

import numpy as np
import pytest

from obc_lib.diagrams import Expr, TypeMismatch, expr_compose, expr_tensor, parity, parse_expr, print_expr
from obc_lib.normalform import (
    STATS,
    STRATEGIES,
    NormalMorphism,
    caching,
    clear_cache,
    dim_filtered,
    enumerate_keys,
    eval_loop,
    identity_key,
    key_expr,
    nm_compose,
    nm_tensor,
    nm_to_expr,
    normalize,
    slide_bubbles,
    trace_closure,
)
from obc_lib.scalars import BubblePoly, delta_prime
from obc_lib.suites import (
    AOBC_RELATIONS,
    CLIFFORD_SLIDES,
    DOWN_RELATIONS,
    OB_RELATIONS,
    OBC_RELATIONS,
    VANISHING_BUBBLES,
    random_expr,
)

RELATIONS = OB_RELATIONS + OBC_RELATIONS + AOBC_RELATIONS + DOWN_RELATIONS + CLIFFORD_SLIDES + VANISHING_BUBBLES


def test_clifford_squares_to_identity():
    assert normalize(parse_expr("c . c")) == NormalMorphism.identity("u")


@pytest.mark.parametrize("label,lhs,rhs", RELATIONS, ids=[r[0] for r in RELATIONS])
def test_defining_relations_hold(label, lhs, rhs):
    assert normalize(parse_expr(lhs)) == normalize(parse_expr(rhs))


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_dot_free_endomorphisms_of_up_words(r):
    word = "u" * r
    assert sum(1 for _ in enumerate_keys(word, word, max_dots=0)) == 2 ** r * factorial(r)


@pytest.mark.parametrize("a,b,count", [
    ("du", "du", 8),
    ("ud", "", 2),
    ("", "du", 2),
    ("u", "d", 0),
    ("uu", "u", 0),
])
def test_walled_hom_counts(a, b, count):
    assert sum(1 for _ in enumerate_keys(a, b, max_dots=0)) == count


def test_dot_bounds():
    assert sum(1 for _ in enumerate_keys("u", "u", max_dots=1)) == 4
    assert sum(1 for _ in enumerate_keys("uu", "uu", per_strand=2)) == 8 * 4
    with pytest.raises(ValueError):
        list(enumerate_keys("u", "u"))
    assert [k for k in enumerate_keys("", "")] == [identity_key("")]


def test_filtered_dimension_counts_bubbles():
    assert dim_filtered("", "", 3) == 5
    assert dim_filtered("", "", 0) == 1


def test_strategies_agree():
    e = parse_expr("(s * id(u)) . (id(u) * x) . (id(u) * s) . (c * id(uu))")
    results = [normalize(e, strategy) for strategy in STRATEGIES]
    assert all(r == results[0] for r in results)
    with pytest.raises(ValueError):
        normalize(e, "sideways")


def test_bubble_values():
    assert normalize(parse_expr("D(1)")).terms == {identity_key(""): BubblePoly.delta(1)}
    assert normalize(parse_expr("D'(3)")).terms == {identity_key(""): delta_prime(3)}
    assert normalize(parse_expr("D'(3) - D(3) + D(1) . D(1)")).is_zero()


def test_eval_loop():
    assert eval_loop("ccw", 0, 3) == BubblePoly.delta(3)
    assert eval_loop("cw", 0, 3) == delta_prime(3)
    assert eval_loop("cw", 1, 3).is_zero()
    assert eval_loop("ccw", 0, 2).is_zero()
    with pytest.raises(ValueError):
        eval_loop("up", 0, 1)


def test_keys_realize_to_themselves():
    for key in enumerate_keys("du", "du", max_dots=1):
        assert normalize(key_expr(key)).terms == {key: BubblePoly.const(1)}


def test_normal_form_round_trip():
    e = parse_expr("s . (id(u) * x) . s + 3 * (c * c)")
    nm = normalize(e)
    assert normalize(nm_to_expr(nm)) == nm
    assert nm.is_integral()
    assert nm.parities() == {0}


def test_compose_and_tensor():
    f = normalize(parse_expr("s . (x * id(u))"))
    g = normalize(parse_expr("id(u) * c"))
    assert nm_compose(f, g) == normalize(parse_expr("s . (x * id(u)) . (id(u) * c)"))
    assert nm_compose(NormalMorphism.identity("uu"), f) == f
    assert nm_tensor(normalize(parse_expr("x")), normalize(parse_expr("c"))) == normalize(parse_expr("x * c"))
    assert nm_tensor(NormalMorphism.identity(""), f) == f
    with pytest.raises(TypeMismatch):
        nm_compose(f, NormalMorphism.identity("u"))


def test_trace_closure():
    assert trace_closure(NormalMorphism.identity("u")).is_zero()
    assert trace_closure(normalize(parse_expr("x"))).terms == {identity_key(""): BubblePoly.delta(1)}
    with pytest.raises(TypeMismatch):
        trace_closure(NormalMorphism.identity(""))


def test_slide_bubbles():
    assert slide_bubbles(BubblePoly.const(1), "u") == NormalMorphism.identity("u")
    assert slide_bubbles(BubblePoly.delta(1), "").terms == {identity_key(""): BubblePoly.delta(1)}
    assert slide_bubbles(BubblePoly.delta(1), "u") == normalize(parse_expr("D(1) * id(u)"))


def test_json_and_text():
    nm = normalize(parse_expr("c . c"))
    data = json.loads(nm.to_json())
    assert data["src"] == "u"
    assert data["terms"] == [{"key": identity_key("u").to_dict(), "coeff": "1"}]
    assert str(nm) == "[b0>t0]"
    assert str(NormalMorphism("u", "u")) == "0"


def test_cache_is_transparent():
    e = parse_expr("(id(u) * x) . s . (x * id(u))")
    clear_cache()
    cached = normalize(e)
    assert STATS["stacks"] > 0
    with caching(False):
        uncached = normalize(e)
    assert cached == uncached


def test_interchange_on_random_pairs():
    rng = np.random.default_rng(23)
    for _ in range(100):
        f = random_expr(rng, max_layers=3, max_word=2)
        g = random_expr(rng, max_layers=3, max_word=2)
        lhs = normalize(expr_tensor(f, g))
        other = expr_compose(expr_tensor(Expr.identity(f.dst), g), expr_tensor(f, Expr.identity(g.src)))
        sign = -1 if parity(f) and parity(g) else 1
        assert lhs == normalize(other).scale(sign), (print_expr(f), print_expr(g))
