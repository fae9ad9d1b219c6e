import json

import numpy as np
import pytest

from obc_lib.diagrams import Expr, parse_expr
from obc_lib.normalform import nm_compose, nm_tensor, nm_to_expr, normalize
from obc_lib.qrep import (
    SuperMatrix,
    casimir_matrix,
    central_element_matrix,
    commutant_dim,
    context,
    gen_matrix,
    module_matrix,
    phi_eval,
    phi_rank,
    psi_eval,
    sgn,
    sgn_closed,
    super_kron,
    supercommutator,
)
from obc_lib.suites import random_expr
from obc_lib.utils import CapExceeded


def test_odd_generators_supercommute_to_even():
    e1 = gen_matrix(1, "e", 1, 1, 1)
    assert e1.parity() == 1
    assert supercommutator(e1, e1) == gen_matrix(1, "e", 1, 1, 0).scale(2)
    e12, e21 = gen_matrix(2, "e", 1, 2, 0), gen_matrix(2, "e", 2, 1, 0)
    assert supercommutator(e12, e21) == gen_matrix(2, "e", 1, 1, 0) - gen_matrix(2, "e", 2, 2, 0)


def test_generator_index_checks():
    with pytest.raises(ValueError):
        gen_matrix(2, "e", 3, 1, 0)
    with pytest.raises(ValueError):
        gen_matrix(2, "e", 1, 1, 2)
    with pytest.raises(ValueError):
        gen_matrix(2, "f", 1, 1, 0)
    with pytest.raises(ValueError):
        context(0)


def test_kron_shapes_and_parities():
    ctx = context(1)
    a = ctx.identity("u")
    k = super_kron(a, a)
    assert k.shape == (4, 4)
    assert k == ctx.identity("uu")
    assert ctx.parities("uu") == (0, 1, 1, 0)


def test_module_action_is_a_derivation():
    x = module_matrix(2, (1, 1, 2), "ud")
    assert x.shape == (16, 16)
    assert x.parity() == 1


def test_central_elements():
    ctx = context(2)
    assert central_element_matrix(2, 1, "u") == ctx.identity("u").scale(2)
    assert central_element_matrix(2, 2, "u", allow_even=True).is_zero()
    with pytest.raises(ValueError):
        central_element_matrix(2, 2, "u")
    with pytest.raises(ValueError):
        central_element_matrix(2, 0, "u")
    z3 = central_element_matrix(2, 3, "uu")
    assert supercommutator(z3, module_matrix(2, (1, 1, 2), "uu")).is_zero()


def test_sign_of_short_sequences():
    assert sgn(()) == 1
    assert sgn((1,)) == 1
    assert sgn((1, 1)) == 1
    assert sgn((0, 0, 0)) == 1


def test_psi_respects_relations():
    assert psi_eval(2, parse_expr("c . c")) == context(2).identity("u")
    lhs = parse_expr("s . (id(u) * x)")
    rhs = parse_expr("(x * id(u)) . s - id(uu) - (id(u) * c) . (c * id(u))")
    assert psi_eval(2, lhs, "u") == psi_eval(2, rhs, "u")


def test_psi_of_bubble_is_central_element():
    assert psi_eval(2, Expr.bubble(1), "u") == central_element_matrix(2, 1, "u")
    assert psi_eval(1, Expr.bubble(2), "u").is_zero()


def test_psi_agrees_with_normal_form():
    e = parse_expr("(id(u) * x) . s . (c * x)")
    assert psi_eval(2, e, "u") == psi_eval(2, nm_to_expr(normalize(e)), "u")
    assert psi_eval(2, normalize(e), "u") == psi_eval(2, e, "u")


def test_phi_rejects_dots():
    with pytest.raises(ValueError):
        phi_eval(2, parse_expr("x"))
    assert phi_eval(1, parse_expr("cap . rcup")).is_zero()


@pytest.mark.parametrize("n,word,dim", [(1, "u", 2), (2, "uu", 8)])
def test_commutant_matches_dot_free_basis(n, word, dim):
    assert commutant_dim(n, word) == dim
    assert phi_rank(n, word) == dim


def test_export_formats():
    m = gen_matrix(1, "e", 1, 1, 1).scale("i")
    data = json.loads(m.to_json())
    assert data["rows"] == 2
    assert data["entries"] == [[0, 1, "0", "1"], [1, 0, "0", "1"]]
    assert m.to_coordinate_text().splitlines()[0] == "# 2 x 2"
    frame = m.to_frame()
    assert list(frame.columns) == ["row", "col", "re", "im"]
    assert len(frame) == 2


def test_matrix_size_cap(monkeypatch):
    monkeypatch.setattr("obc_lib.qrep.check_dim", _always_over)
    with pytest.raises(CapExceeded):
        commutant_dim(1, "uu")


def _always_over(dim, what="matrix"):
    raise CapExceeded(f"{what} dimension {dim} too large")


def test_super_matrix_shape_check():
    with pytest.raises(ValueError):
        SuperMatrix.identity((0, 1)) + SuperMatrix.identity((0,))


def test_sign_closed_form_agrees():
    for k in range(1, 7):
        for m in range(2 ** k):
            eps = tuple((m >> b) & 1 for b in range(k))
            assert sgn(eps) == sgn_closed(eps), eps


def test_casimir_commutes_with_diagonal_action():
    omega = casimir_matrix(2, "u")
    assert omega.parity() == 0
    for g in ((0, 1, 2), (1, 1, 1), (1, 2, 1)):
        assert supercommutator(omega, module_matrix(2, g, "uu")).is_zero()
    assert casimir_matrix(2, "").is_zero()


def test_psi_is_functorial_on_random_pairs():
    rng = np.random.default_rng(41)
    for _ in range(200):
        g = random_expr(rng, max_layers=3, max_word=3)
        f = random_expr(rng, max_layers=3, max_word=3, src=g.dst)
        fg = nm_compose(normalize(f), normalize(g))
        assert psi_eval(1, fg, "u") == psi_eval(1, f, "u") @ psi_eval(1, g, "u")


def test_phi_is_monoidal_on_random_pairs():
    rng = np.random.default_rng(43)
    dot_free = ("cup", "cap", "rcup", "rcap", "s", "ls", "rs", "ds", "c", "cd")
    for _ in range(200):
        f = random_expr(rng, max_layers=3, max_word=2, gens=dot_free)
        g = random_expr(rng, max_layers=3, max_word=2, gens=dot_free)
        nf, ng = normalize(f), normalize(g)
        if any(not p.is_constant() for nm in (nf, ng) for p in nm.terms.values()):
            continue
        assert phi_eval(1, nm_tensor(nf, ng)) == super_kron(phi_eval(1, f), phi_eval(1, g))
        assert phi_eval(2, nf) == phi_eval(2, f)
