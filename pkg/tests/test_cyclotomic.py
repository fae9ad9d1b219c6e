import json

import pytest

import obc_lib.cyclotomic as cyclotomic
from obc_lib.cyclotomic import (
    CycloData,
    CycloMorphism,
    bubble_specialize,
    check_e1_e2,
    cyclo_dim,
    cyclo_identity,
    cyclo_normalize,
    delta_series,
    free_bubble_monomials,
    gamma_check,
    hom_transport,
    ideal_equivalence,
    obcf_bridge,
    parse_f,
    route_agreement,
    transport_count,
)
from obc_lib.diagrams import Expr, parse_expr
from obc_lib.normalform import normalize
from obc_lib.scalars import BubblePoly, ZPoly, delta_prime
from obc_lib.utils import CapExceeded


def _all_ok(pairs):
    failed = [label for label, ok in pairs if not ok]
    assert not failed, failed


@pytest.mark.parametrize("text,coeffs", [
    ("t^2-3", {2: 1, 0: -3}),
    ("t*(t^2-3)", {3: 1, 1: -3}),
    ("(t^2-1)(t^2-4)", {4: 1, 2: -5, 0: 4}),
    ("t", {1: 1}),
])
def test_parse_f(text, coeffs):
    assert parse_f(text) == coeffs


@pytest.mark.parametrize("text", ["t^2 - t", "2t^2", "3", "t^2 +", "s^2"])
def test_parse_f_rejects(text):
    with pytest.raises(ValueError):
        parse_f(text)


def test_parse_f_degree_cap():
    with pytest.raises(CapExceeded):
        parse_f("t^6")


def test_delta_series_for_concrete_pair():
    data = CycloData(parse_f("t^2-3"), parse_f("t^2"))
    assert [data.delta(r) for r in range(5)] == [ZPoly.const(3 ** r) for r in range(5)]
    assert data.delta_prime(0) == ZPoly.const(-1)
    assert data.delta_prime(1) == ZPoly.const(3)
    assert data.delta_prime(2).is_zero()
    _all_ok(check_e1_e2(data))


def test_equal_polynomials_give_trivial_bubbles():
    data = CycloData(parse_f("t^2-3"), parse_f("t^2-3"))
    delta, dprime = delta_series(data, 4)
    assert delta == [ZPoly.const(1)] + [ZPoly()] * 4
    assert dprime == [ZPoly.const(-1)] + [ZPoly()] * 4


def test_formal_delta(quadratic):
    assert quadratic.formal
    assert quadratic.delta(1) == ZPoly.var(0) + 3
    _all_ok(check_e1_e2(quadratic))
    for r in range(5):
        assert quadratic.delta_from_prime(r) == quadratic.delta(r)


def test_degrees_must_match():
    with pytest.raises(ValueError):
        CycloData(parse_f("t^2-3"), parse_f("t^4"))
    with pytest.raises(ValueError):
        delta_series(CycloData(parse_f("t^4")), 1)


def test_data_export(quadratic):
    data = json.loads(quadratic.to_json(3))
    assert data["l"] == 2
    assert data["zprime"] == "formal"
    assert len(data["delta"]) == 4
    assert data["delta"][0] == "1"


def test_bubble_specialization(quadratic_pair):
    d1, d3 = BubblePoly.delta(1), BubblePoly.delta(3)
    assert bubble_specialize(d1, quadratic_pair) == quadratic_pair.delta(1)
    assert bubble_specialize(d1 * d3, quadratic_pair) == quadratic_pair.delta(1) * quadratic_pair.delta(2)
    assert bubble_specialize(delta_prime(1), quadratic_pair, "set2") == quadratic_pair.delta_prime(1)
    with pytest.raises(ValueError):
        bubble_specialize(d1, quadratic_pair, "set3")


def test_dots_reduce_on_up_strand(quadratic):
    assert cyclo_normalize(parse_expr("x . x"), quadratic) == cyclo_identity("u", quadratic, ZPoly.const(3))
    linear = CycloData(parse_f("t"))
    assert cyclo_normalize(parse_expr("x"), linear).is_zero()
    cubed = cyclo_normalize(parse_expr("x . x . x"), quadratic)
    assert cubed == cyclo_normalize(parse_expr("x"), quadratic).scale(3)
    assert cubed.max_strand_dots() == 1


def test_dots_reduce_on_down_strand(quadratic_pair):
    reduced = cyclo_normalize(parse_expr("xd . xd"), quadratic_pair)
    assert reduced == cyclo_identity("d", quadratic_pair, ZPoly.const(5))


def test_bubbles_become_scalars(quadratic_pair):
    reduced = cyclo_normalize(Expr.bubble(3), quadratic_pair)
    assert reduced == cyclo_identity("", quadratic_pair, quadratic_pair.delta(2))


def test_normal_forms_are_reduced(quadratic):
    e = parse_expr("(x * x) . s . (x * id(u)) . (c * x)")
    cm = cyclo_normalize(e, quadratic)
    assert cm.max_strand_dots() < quadratic.ell
    assert cyclo_normalize(normalize(e), quadratic) == cm


def test_mode_and_route_checks(quadratic):
    with pytest.raises(ValueError):
        cyclo_normalize(parse_expr("x"), quadratic, mode="set3")
    with pytest.raises(ValueError):
        cyclo_normalize(parse_expr("x"), quadratic, route="scenic")
    with pytest.raises(ValueError):
        cyclo_normalize(parse_expr("x"), quadratic, mode="set2", route="gamma")


def test_routes_agree(quadratic):
    exprs = [
        parse_expr("x . x . x"),
        parse_expr("(x * id(u)) . s . (x * x)"),
        parse_expr("(c * x) . s . (x * id(u)) . s"),
    ]
    _all_ok(route_agreement(quadratic, exprs))


def test_transport():
    assert hom_transport("u", "d") is None
    t = hom_transport("du", "")
    assert (t.r, t.end_word) == (1, "u")
    cap = Expr.gen("cap")
    assert normalize(t.from_end(t.to_end(cap))) == normalize(cap)
    assert hom_transport("uu", "uu").trivial
    with pytest.raises(ValueError):
        t.to_end(Expr.gen("rcap"))


@pytest.mark.parametrize("a,b,count", [("du", "", 2), ("ud", "ud", 8), ("d", "d", 2), ("u", "d", 0)])
def test_transport_preserves_counts(a, b, count):
    assert transport_count(a, b) == (count, count)


def test_cyclo_dims():
    assert cyclo_dim("u", "u", 1) == 2
    assert cyclo_dim("uu", "uu", 2) == 32
    assert cyclo_dim("u", "d", 2) == 0
    assert cyclo_dim("u", "u", 2, include_bubbles=True, max_weight=3) == 4 * 4
    assert len(free_bubble_monomials(2, 3)) == 4
    with pytest.raises(ValueError):
        cyclo_dim("u", "u", 2, include_bubbles=True)
    with pytest.raises(ValueError):
        cyclo_dim("u", "u", 0)


def test_gamma_is_bijective_on_one_strand(quadratic):
    assert gamma_check(1, quadratic) == (4, 4)


@pytest.mark.slow
def test_gamma_is_bijective_on_two_strands(quadratic):
    assert gamma_check(2, quadratic) == (32, 32)


@pytest.mark.slow
def test_generating_sets_agree(quadratic):
    _all_ok(ideal_equivalence(quadratic))


@pytest.mark.parametrize("f", ["t", "t^2-3", "t^3-2t"])
def test_formal_bridge(f):
    data, checks = obcf_bridge(parse_f(f))
    assert data.ell == max(parse_f(f))
    _all_ok(checks)


def test_bridge_rank_is_computed_from_reductions(monkeypatch):
    data, checks = obcf_bridge(parse_f("t^2-3"))
    labels = dict(checks)
    assert labels["End(uu) K-rank = 32"]

    def lossy(m, data, **kwargs):
        return CycloMorphism(m.src, m.dst, data.ell)

    monkeypatch.setattr(cyclotomic, "cyclo_normalize", lossy)
    _, checks = obcf_bridge(parse_f("t^2-3"))
    labels = dict(checks)
    assert not labels["End(u) K-rank = 4"]
    assert not labels["End(u) k-count = K-rank x bubble monomials"]
