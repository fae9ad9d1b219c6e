from fractions import Fraction

import pytest

from obc_lib.scalars import (
    I,
    ONE,
    ZERO,
    BubblePoly,
    GRat,
    SymPoly,
    bubble_monomials,
    bubble_mul,
    bubble_weight,
    delta_prime,
    e_from_h,
    grat_arith,
    powersum_eval,
    sym_ops,
)


def test_grat_arithmetic():
    half = GRat(Fraction(1, 2))
    assert half + half == ONE
    assert I * I == -1
    assert (GRat(1, 1) * GRat(1, -1)) == 2
    assert GRat(3, 4).conj() == GRat(3, -4)
    assert (ONE / GRat(0, 2)) == GRat(0, Fraction(-1, 2))


def test_grat_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ZERO.inv()
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@pytest.mark.parametrize("text,value", [
    ("3/4", GRat(Fraction(3, 4))),
    ("-2", GRat(-2)),
    ("i", I),
    ("1-2*i", GRat(1, -2)),
    ("(1/2+3i)", GRat(Fraction(1, 2), 3)),
])
def test_grat_parse(text, value):
    assert GRat.parse(text) == value


def test_grat_parse_rejects_garbage():
    with pytest.raises(ValueError):
        GRat.parse("x")
    with pytest.raises(ValueError):
        GRat.parse("")


def test_grat_text():
    assert str(GRat(Fraction(1, 2))) == "1/2"
    assert str(I) == "1*i"
    assert GRat(2).is_integral()
    assert not GRat(Fraction(1, 3)).is_integral()


def test_grat_domain_bridge():
    g = GRat(Fraction(-5, 3), 7)
    assert GRat.from_domain(g.to_domain()) == g


def test_delta_prime_recursion():
    d1, d3 = BubblePoly.delta(1), BubblePoly.delta(3)
    assert delta_prime(-1) == BubblePoly.const(-1)
    assert delta_prime(1) == d1
    assert delta_prime(2).is_zero()
    assert delta_prime(3) == d3 - d1 * d1


def test_delta_needs_odd_label():
    assert BubblePoly.delta(-1) == BubblePoly.const(1)
    with pytest.raises(ValueError):
        BubblePoly.delta(2)
    with pytest.raises(ValueError):
        BubblePoly.parse("D2")


def test_bubble_parse():
    p = BubblePoly.parse("D1*D3 - 2")
    assert p == BubblePoly.delta(1) * BubblePoly.delta(3) - 2
    assert not p.is_constant()
    assert p.constant() == -2


def test_bubble_monomials_by_weight():
    monos = bubble_monomials(3)
    # 1, D1, D1^2, D1^3, D3
    assert len(monos) == 5
    assert [bubble_weight(m) for m in monos] == sorted(bubble_weight(m) for m in monos)
    assert len(bubble_monomials(0)) == 1


def test_e_from_h():
    h1, h2 = SymPoly.h(1), SymPoly.h(2)
    assert e_from_h(1) == h1
    assert e_from_h(2) == h1 * h1 - h2
    assert SymPoly.h(0) == SymPoly.const(1)
    assert SymPoly.h(-1).is_zero()


def test_grat_arith_ops():
    a, b = GRat(1, 2), GRat(Fraction(1, 3))
    assert grat_arith(a, b, "add") == GRat(Fraction(4, 3), 2)
    assert grat_arith(a, b, "mul") == GRat(Fraction(1, 3), Fraction(2, 3))
    assert grat_arith(a, None, "neg") == GRat(-1, -2)
    assert grat_arith(a, None, "inv") * a == ONE
    with pytest.raises(ValueError):
        grat_arith(a, b, "pow")


def test_bubble_mul_commutes():
    p, q = BubblePoly.parse("D1 + 2"), BubblePoly.parse("D3 - D1")
    assert bubble_mul(p, q) == bubble_mul(q, p)
    assert bubble_mul(p, BubblePoly.const(1)) == p


def test_powersums():
    h1, h2 = SymPoly.h(1), SymPoly.h(2)
    assert powersum_eval(1, 3) == h1
    assert powersum_eval(2, 3) == h2 * 2 - h1 * h1
    # one variable: p2 = x^2 = h1^2
    assert powersum_eval(2, 1) == h1 * h1
    with pytest.raises(ValueError):
        powersum_eval(0, 2)


def test_sym_ops_dispatch():
    h1 = SymPoly.h(1)
    assert sym_ops(h1, h1, "mul") == h1 * h1
    assert sym_ops(None, None, "e_from_h", 2) == e_from_h(2)
    assert sym_ops(None, None, "powersum_eval", 2, 3) == powersum_eval(2, 3)
    with pytest.raises(ValueError):
        sym_ops(h1, h1, "div")
