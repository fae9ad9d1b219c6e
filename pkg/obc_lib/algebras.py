"""
Sergeev-type superalgebras by straightening, and their maps into the diagram
engine.

ASerg_r has PBW basis x^a c^b w (x_1^a1...x_r^ar, c_1^b1...c_r^br, w in S_r)
with

    x_i x_j = x_j x_i        c_i^2 = 1               c_i c_j = -c_j c_i
    c_i x_i = -x_i c_i       c_i x_j = x_j c_i       w c_i = c_w(i) w
    s_i x_j = x_j s_i        (j != i, i+1)
    s_i x_i = x_{i+1} s_i - 1 - c_i c_{i+1}

Ser_r is the x-free part. Algebra indices count strands from the right;
the diagram maps below convert to engine columns.
"""
from __future__ import annotations

import itertools
import json
from functools import lru_cache
from typing import NamedTuple

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .diagrams import Expr, Layer, expr_compose
from .normalform import BOTTOM, NormalKey, normalize
from .scalars import GRat, I, ONE, ZERO


# -- permutations ----------------------------------------------------------------

def _perm_mul(w: tuple, v: tuple) -> tuple:
    """(w v)(i) = w(v(i))."""
    return tuple(w[v[i]] for i in range(len(v)))


def _transposition(r: int, i: int) -> tuple:
    t = list(range(r))
    t[i], t[i + 1] = t[i + 1], t[i]
    return tuple(t)


def reduced_word(w: tuple) -> list:
    """0-based i's with w = s_i1 s_i2 ... s_ik."""
    w = list(w)
    word = []
    moved = True
    while moved:
        moved = False
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.insert(0, i)
                moved = True
                break
    return word


def _clifford_sort(seq) -> tuple:
    """(sign, sorted distinct indices) of the product c_seq[0] c_seq[1] ..."""
    seq = list(seq)
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    seq.sort()
    out = []
    for k in seq:
        if out and out[-1] == k:
            out.pop()
        else:
            out.append(k)
    return sign, out


def _bits(r: int, indices) -> tuple:
    bits = [0] * r
    for k in indices:
        bits[k] = 1
    return tuple(bits)


# -- elements -------------------------------------------------------------------------

class ASergElement:
    """Linear combination of x^a c^b w, keys (a, b, w) with 0-based tuples."""

    __slots__ = ("r", "terms")

    def __init__(self, r: int, terms=None):
        self.r = r
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = GRat.coerce(coeff)
            if coeff:
                total = clean.get(mono, ZERO) + coeff
                if total:
                    clean[mono] = total
                else:
                    clean.pop(mono, None)
        self.terms = clean

    # constructors, 1-based indices
    @classmethod
    def one(cls, r: int) -> "ASergElement":
        return cls(r, {((0,) * r, (0,) * r, tuple(range(r))): ONE})

    @classmethod
    def mono(cls, a, b, w, coeff=1) -> "ASergElement":
        return cls(len(a), {(tuple(a), tuple(b), tuple(w)): coeff})

    @classmethod
    def x(cls, r: int, i: int) -> "ASergElement":
        _check_index(r, i)
        return cls.mono(_bits(r, [i - 1]), (0,) * r, tuple(range(r)))

    @classmethod
    def c(cls, r: int, i: int) -> "ASergElement":
        _check_index(r, i)
        return cls.mono((0,) * r, _bits(r, [i - 1]), tuple(range(r)))

    @classmethod
    def s(cls, r: int, i: int) -> "ASergElement":
        if not 1 <= i < r:
            raise ValueError(f"s_{i} needs 1 <= i < {r}")
        return cls.mono((0,) * r, (0,) * r, _transposition(r, i - 1))

    def _check(self, other):
        if self.r != other.r:
            raise ValueError(f"elements of ASerg_{self.r} and ASerg_{other.r} do not combine")

    def __add__(self, other: "ASergElement") -> "ASergElement":
        self._check(other)
        merged = dict(self.terms)
        for m, c in other.terms.items():
            merged[m] = merged.get(m, ZERO) + c
        return ASergElement(self.r, merged)

    def __neg__(self):
        return ASergElement(self.r, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ASergElement":
        c = GRat.coerce(c)
        return ASergElement(self.r, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, ASergElement):
            return self.scale(other)
        self._check(other)
        out = ASergElement(self.r)
        for mono, coeff in self.terms.items():
            vec = other.terms
            for gen in reversed(_gen_word(mono)):
                vec = _apply(gen, vec)
            out = out + ASergElement(self.r, vec).scale(coeff)
        return out

    def __eq__(self, other):
        if not isinstance(other, ASergElement):
            return NotImplemented
        return self.r == other.r and self.terms == other.terms

    def __hash__(self):
        return hash((self.r, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def x_degree(self) -> int:
        return max((sum(a) for a, _, _ in self.terms), default=-1)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b, w), coeff in sorted(self.terms.items()):
            parts.append(f"{coeff}*{mono_text(a, b, w)}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ASergElement(r={self.r}: {self})"


def _check_index(r: int, i: int):
    if not 1 <= i <= r:
        raise ValueError(f"index {i} out of range 1..{r}")


def mono_text(a, b, w) -> str:
    factors = []
    for k, e in enumerate(a):
        if e:
            factors.append(f"x{k + 1}" + (f"^{e}" if e > 1 else ""))
    factors += [f"c{k + 1}" for k, bit in enumerate(b) if bit]
    if list(w) != sorted(w):
        factors.append("w(" + ",".join(str(v + 1) for v in w) + ")")
    return "*".join(factors) or "1"


def _gen_word(mono) -> list:
    a, b, w = mono
    word = []
    for k, e in enumerate(a):
        word += [("x", k)] * e
    word += [("c", k) for k, bit in enumerate(b) if bit]
    word += [("s", i) for i in reduced_word(w)]
    return word


def _apply(gen, vec: dict) -> dict:
    out = {}
    for mono, coeff in vec.items():
        for m2, c2 in _left(gen, mono):
            total = out.get(m2, ZERO) + coeff * c2
            if total:
                out[m2] = total
            else:
                out.pop(m2, None)
    return out


@lru_cache(maxsize=None)
def _left(gen, mono) -> tuple:
    """gen times a basis monomial, as (monomial, GRat) pairs."""
    kind, i = gen
    a, b, w = mono
    r = len(a)
    if kind == "x":
        a2 = list(a)
        a2[i] += 1
        return (((tuple(a2), b, w), ONE),)
    if kind == "c":
        sign = (-1) ** (a[i] + sum(b[:i]))
        b2 = list(b)
        b2[i] ^= 1
        return (((a, tuple(b2), w), GRat(sign)),)
    # s_i
    t = _transposition(r, i)
    if not any(a):
        sign, idx = _clifford_sort([t[k] for k, bit in enumerate(b) if bit])
        return (((a, _bits(r, idx), _perm_mul(t, w)), GRat(sign)),)
    k = next(j for j, e in enumerate(a) if e)
    a_rest = list(a)
    a_rest[k] -= 1
    rest = {(tuple(a_rest), b, w): ONE}
    out = _apply(("x", t[k]), _apply(("s", i), rest))
    if k in (i, i + 1):
        cc = _apply(("c", i), _apply(("c", i + 1), rest))
        for m, c in cc.items():
            out[m] = out.get(m, ZERO) - c
        for m, c in rest.items():
            out[m] = out.get(m, ZERO) + (c if k == i + 1 else -c)
    return tuple((m, c) for m, c in out.items() if c)


def serg_mul(m1: ASergElement, m2: ASergElement) -> ASergElement:
    """Product in the Sergeev superalgebra."""
    if m1.x_degree() > 0 or m2.x_degree() > 0:
        raise ValueError("Sergeev elements carry no polynomial generators")
    return m1 * m2


def aserg_straighten(factors) -> ASergElement:
    """Product of a sequence of elements, in PBW normal form."""
    factors = list(factors)
    if not factors:
        raise ValueError("empty product")
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def sergeev_basis(r: int) -> list:
    return [((0,) * r, b, w) for w in itertools.permutations(range(r)) for b in itertools.product((0, 1), repeat=r)]


# -- cyclotomic quotient ---------------------------------------------------------

def _f_in(el_x, f: dict, one: ASergElement) -> ASergElement:
    out = ASergElement(one.r)
    power = one
    for d in range(max(f) + 1):
        if f.get(d):
            out = out + power.scale(f[d])
        power = power * el_x
    return out


def _w_to(r: int, k: int) -> ASergElement:
    """s_{k-1} ... s_1, sending strand 1 to strand k."""
    out = ASergElement.one(r)
    for i in range(k - 1, 0, -1):
        out = out * ASergElement.s(r, i)
    return out


def _w_from(r: int, k: int) -> ASergElement:
    out = ASergElement.one(r)
    for i in range(1, k):
        out = out * ASergElement.s(r, i)
    return out


@lru_cache(maxsize=None)
def _reducer(r: int, k: int, f_items: tuple) -> ASergElement:
    """x_k^ell modulo the ideal, as an element of x-degree < ell."""
    f = dict(f_items)
    ell = max(f)
    one = ASergElement.one(r)
    xk = ASergElement.x(r, k)
    conj = _w_to(r, k) * _f_in(ASergElement.x(r, 1), f, one) * _w_from(r, k)
    lower = _f_in(xk, {d: c for d, c in f.items() if d < ell}, one) if len(f) > 1 else ASergElement(r)
    return _f_in(xk, f, one) - conj - lower


def _check_f(f: dict):
    ell = max(f, default=0)
    if ell < 1:
        raise ValueError("f must have degree >= 1")
    if GRat.coerce(f[ell]) != ONE:
        raise ValueError("f must be monic")
    for d, c in f.items():
        if (ell - d) % 2 and GRat.coerce(c):
            raise ValueError(f"f may only have terms t^(ell-2k); t^{d} is not allowed")


def cyclo_reduce(el: ASergElement, f: dict) -> ASergElement:
    """Reduce el modulo the two-sided ideal generated by f(x_1)."""
    _check_f(f)
    f = {d: GRat.coerce(c) for d, c in f.items() if GRat.coerce(c)}
    ell = max(f)
    items = tuple(sorted(f.items()))
    r = el.r
    done = {}
    pending = dict(el.terms)
    while pending:
        mono, coeff = pending.popitem()
        a, b, w = mono
        k = next((j for j, e in enumerate(a) if e >= ell), None)
        if k is None:
            total = done.get(mono, ZERO) + coeff
            if total:
                done[mono] = total
            else:
                done.pop(mono, None)
            continue
        a_rest = list(a)
        a_rest[k] -= ell
        head = ASergElement.mono(tuple(a_rest), (0,) * r, tuple(range(r)))
        tail = ASergElement.mono((0,) * r, b, w)
        new = head * _reducer(r, k + 1, items) * tail
        for m, c in new.terms.items():
            total = pending.get(m, ZERO) + c * coeff
            if total:
                pending[m] = total
            else:
                pending.pop(m, None)
    return ASergElement(r, done)


def cyclo_basis(n: int, ell: int) -> list:
    return [(a, b, w)
            for w in itertools.permutations(range(n))
            for b in itertools.product((0, 1), repeat=n)
            for a in itertools.product(range(ell), repeat=n)]


def structure_constants(basis: list, mul) -> dict:
    """index -> index -> [[index, coeff], ...] for a multiplication closed on the basis span."""
    index = {m: t for t, m in enumerate(basis)}
    table = {}
    for i, m1 in enumerate(basis):
        row = {}
        for j, m2 in enumerate(basis):
            prod = mul(ASergElement(len(m1[0]), {m1: ONE}), ASergElement(len(m2[0]), {m2: ONE}))
            row[j] = [[index[m], str(c)] for m, c in sorted(prod.terms.items())]
        table[i] = row
    return table


def structure_constants_json(basis: list, mul) -> str:
    return json.dumps({
        "basis": [mono_text(*m) for m in basis],
        "table": structure_constants(basis, mul),
    })


# -- maps into the diagram engine ----------------------------------------------------

def phi_images(r: int) -> dict:
    """Ser_r -> End(u^r): s_i crosses strands i, i+1; strand i sits at column r - i."""
    images = {}
    for i in range(1, r):
        images[f"s{i}"] = Expr.gen("s", "u" * (r - i - 1), "u" * (i - 1))
    for i in range(1, r + 1):
        images[f"c{i}"] = Expr.gen("c", "u" * (r - i), "u" * (i - 1))
    return images


def nu_images(r: int) -> dict:
    images = phi_images(r)
    for i in range(1, r + 1):
        images[f"x{i}"] = Expr.gen("x", "u" * (r - i), "u" * (i - 1))
    return images


def alpha_images(r: int, s: int) -> dict:
    """BC_{r,s} -> End(d^s u^r). Indices 1..r are the up strands, r+1..r+s the down strands."""
    if r < 1 or s < 1:
        raise ValueError("walled images need r >= 1 and s >= 1")
    images = {}
    for i in range(1, r):
        images[f"s{i}"] = Expr.gen("s", "d" * s + "u" * (r - i - 1), "u" * (i - 1))
    for i in range(r + 1, r + s):
        images[f"s{i}"] = Expr.gen("ds", "d" * (r + s - i - 1), "d" * (i - r - 1) + "u" * r)
    for i in range(1, r + 1):
        images[f"c{i}"] = Expr.gen("c", "d" * s + "u" * (r - i), "u" * (i - 1)).scale(I)
    for i in range(r + 1, r + s + 1):
        images[f"c{i}"] = Expr.gen("cd", "d" * (r + s - i), "d" * (i - r - 1) + "u" * r).scale(I)
    left, right = "d" * (s - 1), "u" * (r - 1)
    images["e"] = Expr.from_stack(left + "du" + right, (Layer(left, "cap", right), Layer(left, "rcup", right)))
    return images


def element_image(el: ASergElement, images: dict) -> Expr:
    """nu (or phi) applied to an algebra element."""
    word = "u" * el.r
    out = Expr(word, word)
    for mono, coeff in el.terms.items():
        names = [f"{kind}{i + 1}" for kind, i in _gen_word(mono)]
        out = out + _word_expr(names, images, word).scale(coeff)
    return out


def _word_expr(names, images: dict, unit: str) -> Expr:
    out = Expr.identity(unit)
    for name in reversed(names):
        out = expr_compose(images[name], out)
    return out


def key_to_aserg(key: NormalKey) -> ASergElement:
    """Algebra element whose image under nu is exactly the key (End(u^r) keys)."""
    r = len(key.src)
    if key.src != "u" * r or key.dst != key.src:
        raise ValueError(f"key_to_aserg needs an endomorphism of u^r, got {key.src!r}->{key.dst!r}")
    a = [0] * r
    b = [0] * r
    w = list(range(r))
    for start, end, cliff, dots in key.strands:
        assert start[0] == BOTTOM
        i, j = r - 1 - start[1], r - 1 - end[1]
        a[i] = dots
        b[j] = cliff
        w[i] = j
    ident = tuple(range(r))
    zero = (0,) * r
    cliffs = ASergElement.mono(zero, tuple(b), ident)
    perm = ASergElement.mono(zero, zero, tuple(w))
    dots = ASergElement.mono(tuple(a), zero, ident)
    return cliffs * perm * dots


def nu_independence(r: int, max_exp: int = 1) -> tuple:
    """(count, rank) of the normalized nu images of x^a c^b w with all a_i <= max_exp."""
    images = nu_images(r)
    rows = {}
    columns = {}
    monos = [(a, b, w) for w in itertools.permutations(range(r)) for b in itertools.product((0, 1), repeat=r)
             for a in itertools.product(range(max_exp + 1), repeat=r)]
    for t, mono in enumerate(monos):
        nm = normalize(element_image(ASergElement(r, {mono: ONE}), images))
        row = {}
        for key, poly in nm.terms.items():
            row[columns.setdefault(key, len(columns))] = poly.constant().to_domain()
        if row:
            rows[t] = row
    rank = DomainMatrix(rows, (len(monos), max(len(columns), 1)), QQ_I).rank() if rows else 0
    return len(monos), rank


# -- presentations ----------------------------------------------------------------

class RelationResult(NamedTuple):
    name: str
    ok: bool
    residual: str


def _w(*names):
    return tuple(names)


def sergeev_relations(r: int) -> list:
    """(name, lhs, rhs); each side is a list of (coeff, generator names)."""
    rels = []
    for i in range(1, r):
        rels.append((f"s{i}^2 = 1", [(1, _w(f"s{i}", f"s{i}"))], [(1, ())]))
        rels.append((f"s{i} c{i} = c{i + 1} s{i}", [(1, _w(f"s{i}", f"c{i}"))], [(1, _w(f"c{i + 1}", f"s{i}"))]))
        rels.append((f"s{i} c{i + 1} = c{i} s{i}", [(1, _w(f"s{i}", f"c{i + 1}"))], [(1, _w(f"c{i}", f"s{i}"))]))
        for j in range(1, r + 1):
            if j not in (i, i + 1):
                rels.append((f"s{i} c{j} = c{j} s{i}", [(1, _w(f"s{i}", f"c{j}"))], [(1, _w(f"c{j}", f"s{i}"))]))
    for i in range(1, r - 1):
        rels.append((f"braid s{i} s{i + 1}",
                     [(1, _w(f"s{i}", f"s{i + 1}", f"s{i}"))], [(1, _w(f"s{i + 1}", f"s{i}", f"s{i + 1}"))]))
    for i in range(1, r):
        for j in range(i + 2, r):
            rels.append((f"s{i} s{j} = s{j} s{i}", [(1, _w(f"s{i}", f"s{j}"))], [(1, _w(f"s{j}", f"s{i}"))]))
    for i in range(1, r + 1):
        rels.append((f"c{i}^2 = 1", [(1, _w(f"c{i}", f"c{i}"))], [(1, ())]))
        for j in range(i + 1, r + 1):
            rels.append((f"c{i} c{j} = -c{j} c{i}", [(1, _w(f"c{i}", f"c{j}"))], [(-1, _w(f"c{j}", f"c{i}"))]))
    return rels


def affine_sergeev_relations(r: int) -> list:
    rels = sergeev_relations(r)
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            rels.append((f"x{i} x{j} = x{j} x{i}", [(1, _w(f"x{i}", f"x{j}"))], [(1, _w(f"x{j}", f"x{i}"))]))
        for j in range(1, r + 1):
            sign = -1 if i == j else 1
            rels.append((f"c{i} x{j} = {'-' if sign < 0 else ''}x{j} c{i}",
                         [(1, _w(f"c{i}", f"x{j}"))], [(sign, _w(f"x{j}", f"c{i}"))]))
    for i in range(1, r):
        rels.append((f"s{i} x{i} = x{i + 1} s{i} - 1 - c{i} c{i + 1}",
                     [(1, _w(f"s{i}", f"x{i}"))],
                     [(1, _w(f"x{i + 1}", f"s{i}")), (-1, ()), (-1, _w(f"c{i}", f"c{i + 1}"))]))
        for j in range(1, r + 1):
            if j not in (i, i + 1):
                rels.append((f"s{i} x{j} = x{j} s{i}", [(1, _w(f"s{i}", f"x{j}"))], [(1, _w(f"x{j}", f"s{i}"))]))
    return rels


def walled_relations(r: int, s: int) -> list:
    """Relations of BC_{r,s} that hold between the displayed images."""
    n = r + s
    sgens = [i for i in range(1, n) if i != r]
    rels = []
    for i in sgens:
        rels.append((f"s{i}^2 = 1", [(1, _w(f"s{i}", f"s{i}"))], [(1, ())]))
        rels.append((f"s{i} c{i} = c{i + 1} s{i}", [(1, _w(f"s{i}", f"c{i}"))], [(1, _w(f"c{i + 1}", f"s{i}"))]))
        if i + 1 in sgens:
            rels.append((f"braid s{i} s{i + 1}",
                         [(1, _w(f"s{i}", f"s{i + 1}", f"s{i}"))], [(1, _w(f"s{i + 1}", f"s{i}", f"s{i + 1}"))]))
    for i in range(1, n + 1):
        rels.append((f"c{i}^2 = {'-1' if i <= r else '1'}", [(1, _w(f"c{i}", f"c{i}"))], [(-1 if i <= r else 1, ())]))
        for j in range(i + 1, n + 1):
            rels.append((f"c{i} c{j} = -c{j} c{i}", [(1, _w(f"c{i}", f"c{j}"))], [(-1, _w(f"c{j}", f"c{i}"))]))
    rels.append(("e^2 = 0", [(1, _w("e", "e"))], []))
    if r >= 2:
        rels.append((f"e s{r - 1} e = e", [(1, _w("e", f"s{r - 1}", "e"))], [(1, _w("e"))]))
    if s >= 2:
        rels.append((f"e s{r + 1} e = e", [(1, _w("e", f"s{r + 1}", "e"))], [(1, _w("e"))]))
    rels.append((f"e c{r} = e c{r + 1}", [(1, _w("e", f"c{r}"))], [(1, _w("e", f"c{r + 1}"))]))
    rels.append((f"c{r} e = c{r + 1} e", [(1, _w(f"c{r}", "e"))], [(1, _w(f"c{r + 1}", "e"))]))
    for j in sgens:
        if j not in (r - 1, r + 1):
            rels.append((f"e s{j} = s{j} e", [(1, _w("e", f"s{j}"))], [(1, _w(f"s{j}", "e"))]))
    for j in range(1, n + 1):
        if j not in (r, r + 1):
            rels.append((f"e c{j} = c{j} e", [(1, _w("e", f"c{j}"))], [(1, _w(f"c{j}", "e"))]))
    return rels


def _side(terms, images: dict, unit):
    if isinstance(unit, ASergElement):
        out = ASergElement(unit.r)
        for coeff, names in terms:
            prod = unit
            for name in names:
                prod = prod * images[name]
            out = out + prod.scale(coeff)
        return out
    out = Expr(unit, unit)
    for coeff, names in terms:
        out = out + _word_expr(names, images, unit).scale(coeff)
    return out


def verify_presentation(relations: list, images: dict, unit) -> list:
    """Check each relation between images. unit is the object word for diagram
    images, or the unit ASergElement for algebra images."""
    results = []
    for name, lhs, rhs in relations:
        diff = _side(lhs, images, unit) - _side(rhs, images, unit)
        if isinstance(diff, ASergElement):
            residual = diff
        else:
            residual = normalize(diff)
        ok = residual.is_zero()
        results.append(RelationResult(name, ok, "" if ok else str(residual)))
    return results


def aserg_generators(r: int) -> dict:
    gens = {}
    for i in range(1, r + 1):
        gens[f"x{i}"] = ASergElement.x(r, i)
        gens[f"c{i}"] = ASergElement.c(r, i)
    for i in range(1, r):
        gens[f"s{i}"] = ASergElement.s(r, i)
    return gens
