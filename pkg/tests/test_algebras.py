import json
from functools import reduce
from itertools import permutations

import pytest

from obc_lib.algebras import (
    ASergElement,
    _perm_mul,
    _transposition,
    affine_sergeev_relations,
    alpha_images,
    aserg_generators,
    aserg_straighten,
    cyclo_basis,
    cyclo_reduce,
    element_image,
    key_to_aserg,
    nu_images,
    nu_independence,
    phi_images,
    reduced_word,
    sergeev_basis,
    sergeev_relations,
    serg_mul,
    structure_constants_json,
    verify_presentation,
    walled_relations,
)
from obc_lib.diagrams import Expr
from obc_lib.normalform import enumerate_keys, key_expr, normalize

QUADRATIC = {2: 1, 0: -3}


def _failures(results):
    return [(res.name, res.residual) for res in results if not res.ok]


@pytest.mark.parametrize("w", list(permutations(range(3))))
def test_reduced_words(w):
    word = reduced_word(w)
    product = reduce(_perm_mul, [_transposition(3, i) for i in word], (0, 1, 2))
    assert product == w
    inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if w[i] > w[j])
    assert len(word) == inversions


def test_affine_relations_by_hand():
    one = ASergElement.one(2)
    x1, x2 = ASergElement.x(2, 1), ASergElement.x(2, 2)
    c1, c2 = ASergElement.c(2, 1), ASergElement.c(2, 2)
    s1 = ASergElement.s(2, 1)
    assert s1 * x1 == x2 * s1 - one - c1 * c2
    assert c1 * x1 == -(x1 * c1)
    assert c1 * x2 == x2 * c1
    assert x1 * x2 == x2 * x1
    assert (x1 * x1 * x2).x_degree() == 3


def test_sergeev_products():
    c1, c2, s1 = ASergElement.c(2, 1), ASergElement.c(2, 2), ASergElement.s(2, 1)
    assert serg_mul(c1, c1) == ASergElement.one(2)
    assert serg_mul(s1, c1) == serg_mul(c2, s1)
    assert (serg_mul(c1, c2) + serg_mul(c2, c1)).is_zero()
    with pytest.raises(ValueError):
        serg_mul(ASergElement.x(2, 1), c1)
    assert aserg_straighten([s1, s1]) == ASergElement.one(2)
    with pytest.raises(ValueError):
        aserg_straighten([])
    assert len(sergeev_basis(3)) == 48


def test_generator_indices():
    with pytest.raises(ValueError):
        ASergElement.s(2, 2)
    with pytest.raises(ValueError):
        ASergElement.x(2, 3)
    with pytest.raises(ValueError):
        ASergElement.c(2, 0)
    assert sorted(aserg_generators(2)) == ["c1", "c2", "s1", "x1", "x2"]


def test_structure_constants_of_one_clifford():
    data = json.loads(structure_constants_json(sergeev_basis(1), serg_mul))
    assert len(data["basis"]) == 2
    assert data["table"]["1"]["1"] == [[0, "1"]]
    assert data["table"]["0"]["1"] == [[1, "1"]]


def test_cyclotomic_reduction():
    x = ASergElement.x(1, 1)
    assert cyclo_reduce(x * x, QUADRATIC) == ASergElement.one(1).scale(3)
    assert cyclo_reduce(x, {1: 1}).is_zero()
    x2 = ASergElement.x(2, 2)
    reduced = cyclo_reduce(x2 * x2 * x2, QUADRATIC)
    assert all(max(a) < 2 for a, _, _ in reduced.terms)


def test_cyclotomic_reduction_is_multiplicative(rng):
    gens = aserg_generators(2)
    names = sorted(gens)
    for _ in range(8):
        a = aserg_straighten([gens[names[int(k)]] for k in rng.integers(len(names), size=3)])
        b = aserg_straighten([gens[names[int(k)]] for k in rng.integers(len(names), size=3)])
        lhs = cyclo_reduce(a * b, QUADRATIC)
        rhs = cyclo_reduce(cyclo_reduce(a, QUADRATIC) * cyclo_reduce(b, QUADRATIC), QUADRATIC)
        assert lhs == rhs


@pytest.mark.parametrize("f", [{2: 1, 1: 1}, {2: 2, 0: 1}, {0: 1}])
def test_cyclotomic_polynomial_shape(f):
    with pytest.raises(ValueError):
        cyclo_reduce(ASergElement.one(1), f)


def test_cyclotomic_basis_size():
    assert len(cyclo_basis(1, 2)) == 4
    assert len(cyclo_basis(2, 2)) == 32


@pytest.mark.parametrize("r", [1, 2, 3])
def test_sergeev_presentation_in_diagrams(r):
    assert not _failures(verify_presentation(sergeev_relations(r), phi_images(r), "u" * r))


@pytest.mark.parametrize("r", [1, 2])
def test_affine_presentation(r):
    assert not _failures(verify_presentation(affine_sergeev_relations(r), nu_images(r), "u" * r))
    assert not _failures(verify_presentation(affine_sergeev_relations(r), aserg_generators(r), ASergElement.one(r)))


@pytest.mark.parametrize("r,s", [(1, 1), (2, 1), (1, 2)])
def test_walled_presentation(r, s):
    word = "d" * s + "u" * r
    assert not _failures(verify_presentation(walled_relations(r, s), alpha_images(r, s), word))


def test_perturbed_dot_is_rejected():
    images = nu_images(2)
    images["x1"] = images["x1"] + Expr.identity("uu")
    results = {res.name: res for res in verify_presentation(affine_sergeev_relations(2), images, "uu")}
    assert not results["s1 x1 = x2 s1 - 1 - c1 c2"].ok
    assert results["c1^2 = 1"].ok


def test_keys_come_from_algebra_elements():
    images = nu_images(2)
    for key in enumerate_keys("uu", "uu", max_dots=1):
        assert normalize(element_image(key_to_aserg(key), images)) == normalize(key_expr(key))
    with pytest.raises(ValueError):
        key_to_aserg(next(enumerate_keys("ud", "ud", max_dots=0)))


@pytest.mark.slow
def test_nu_images_are_independent():
    assert nu_independence(2) == (32, 32)
