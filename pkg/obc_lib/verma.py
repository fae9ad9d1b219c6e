"""
The generic Verma supermodule M = U(q) (x)_{U(b)} U(h), truncated by degree.

A basis symbol is (word, c): word is the PBW-ordered product of lowering
generators (order index k < N for f_k, N + k for the odd fbar_k) and c the
exponent bits on hbar_1..hbar_n. Every symbol carries a polynomial tail in
h_1..h_n acting on the right; the grading is the tail degree.

Vectors of V^a (x) M are dicts (vt, symbol) -> CartanPoly, vt a tuple of
V-basis indices (see qrep).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .diagrams import GENS, Expr, expand_derived
from .normalform import NormalKey, NormalMorphism, BOTTOM, enumerate_keys, key_expr, nm_to_expr
from .qrep import context, phi_eval, supercommutator
from .scalars import BubblePoly, GRat, ONE, _ExpPoly, bubble_monomials
from .utils import check_dim

logger = logging.getLogger("Verma")


class CartanPoly(_ExpPoly):
    """Polynomial in h_1..h_n (slot i-1 is h_i), every variable of degree 1."""

    __slots__ = ()
    PREFIX = "h"


@dataclass(frozen=True)
class Truncation:
    D: int = 4
    E: int = 8

    def __post_init__(self):
        if self.D < 0 or self.E < 0:
            raise ValueError(f"truncation bounds must be >= 0, got D={self.D}, E={self.E}")


class VermaVector:
    __slots__ = ("word", "terms", "truncated")

    def __init__(self, word: str = "", terms=None, truncated: bool = False):
        self.word = word
        clean = {}
        for key, poly in (terms or {}).items():
            if poly:
                clean[key] = poly
        self.terms = clean
        self.truncated = truncated

    @classmethod
    def highest(cls, n: int, vt: tuple = (), word: str = "") -> "VermaVector":
        """vt (x) u-hat."""
        return cls(word, {(tuple(vt), ((), (0,) * n)): CartanPoly.const(1)})

    def __add__(self, other: "VermaVector") -> "VermaVector":
        if self.word != other.word:
            raise ValueError(f"cannot add vectors over {self.word!r} and {other.word!r}")
        merged = dict(self.terms)
        for k, p in other.terms.items():
            merged[k] = merged[k] + p if k in merged else p
        return VermaVector(self.word, merged, self.truncated or other.truncated)

    def __sub__(self, other: "VermaVector") -> "VermaVector":
        return self + other.scale(-1)

    def scale(self, c) -> "VermaVector":
        return VermaVector(self.word, {k: p * GRat.coerce(c) for k, p in self.terms.items()}, self.truncated)

    def __eq__(self, other):
        if not isinstance(other, VermaVector):
            return NotImplemented
        return self.word == other.word and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def grading(self) -> int:
        return max((p.degree() for p in self.terms.values()), default=-1)

    def top_component(self) -> "VermaVector":
        d = self.grading()
        out = {}
        for k, p in self.terms.items():
            top = CartanPoly({m: c for m, c in p.terms.items() if p.degree_of(m) == d})
            if top:
                out[k] = top
        return VermaVector(self.word, out, self.truncated)

    def dump(self) -> str:
        lines = [f"V^{self.word or '1'} (x) M{' [truncated]' if self.truncated else ''}"]
        for (vt, (word, c)), p in sorted(self.terms.items(), key=lambda kv: str(kv[0])):
            lines.append(f"  v{list(vt)} (x) f{list(word)} hbar{list(c)} * ({p})")
        return "\n".join(lines)

    def __repr__(self):
        return f"VermaVector({len(self.terms)} terms, grading {self.grading()})"


# -- q(n) structure --------------------------------------------------------------

@lru_cache(maxsize=None)
def lowering_pairs(n: int) -> tuple:
    """(i, j) with i > j, row-major."""
    return tuple((i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i > j)


def _order(n: int, g: tuple) -> int:
    eps, i, j = g
    pairs = lowering_pairs(n)
    return eps * len(pairs) + pairs.index((i, j))


def _gen_at(n: int, k: int) -> tuple:
    pairs = lowering_pairs(n)
    eps, t = divmod(k, len(pairs))
    return (eps,) + pairs[t]


@lru_cache(maxsize=None)
def superbracket(n: int, g1: tuple, g2: tuple) -> tuple:
    """[g1, g2] in the e^eps_ij basis, as a tuple of (generator, GRat)."""
    ctx = context(n)
    m = supercommutator(ctx.gen_matrix(g1[1], g1[2], g1[0]), ctx.gen_matrix(g2[1], g2[2], g2[0]))
    out = []
    for a, b, v in m.raw():
        # even block holds e^0 coefficients, lower-left block e^1
        if a < n and b < n:
            out.append(((0, a + 1, b + 1), GRat.from_domain(v)))
        elif a >= n and b < n:
            out.append(((1, a - n + 1, b + 1), GRat.from_domain(v)))
    return tuple(sorted(out))


def superbracket_table(n: int) -> list:
    gens = [(eps, i, j) for eps in (0, 1) for i in range(1, n + 1) for j in range(1, n + 1)]
    rows = []
    for g1 in gens:
        for g2 in gens:
            for g, c in superbracket(n, g1, g2):
                rows.append({"left": _gen_text(g1), "right": _gen_text(g2), "term": _gen_text(g), "coeff": str(c)})
    return rows


def _gen_text(g: tuple) -> str:
    return f"e{g[0]}_{g[1]}{g[2]}"


# -- straightening ----------------------------------------------------------------

_MUL = {}


def clear_cache():
    _MUL.clear()
    superbracket.cache_clear()


def _acc(out: dict, key, poly):
    total = out.get(key)
    total = poly if total is None else total + poly
    if total:
        out[key] = total
    else:
        out.pop(key, None)


def _on_highest(n: int, g: tuple, c: tuple) -> dict:
    """g acting on hbar^c (x) 1 for g in b."""
    eps, i, j = g
    if i < j:
        return {}
    if eps == 0:
        return {((), c): CartanPoly.var(i - 1)}
    sign = -1 if sum(c[:i - 1]) % 2 else 1
    bits = list(c)
    if bits[i - 1]:
        bits[i - 1] = 0
        return {((), tuple(bits)): CartanPoly.var(i - 1) * sign}
    bits[i - 1] = 1
    return {((), tuple(bits)): CartanPoly.const(sign)}


def mul_left(n: int, g: tuple, sym: tuple) -> dict:
    """g times the basis symbol, straightened: symbol -> CartanPoly."""
    key = (n, g, sym)
    hit = _MUL.get(key)
    if hit is not None:
        return hit
    word, c = sym
    eps, i, j = g
    out = {}
    if i > j:
        o = _order(n, g)
        if not word or o < word[0] or (o == word[0] and eps == 0):
            out = {((o,) + word, c): CartanPoly.const(1)}
            _MUL[key] = out
            return out
        if o == word[0]:
            # odd square is half the self-bracket
            for g2, coeff in superbracket(n, g, g):
                for s, p in mul_left(n, g2, (word[1:], c)).items():
                    _acc(out, s, p * (coeff / 2))
            _MUL[key] = out
            return out
    elif not word:
        out = _on_highest(n, g, c)
        _MUL[key] = out
        return out
    head = _gen_at(n, word[0])
    rest = (word[1:], c)
    sign = -1 if eps and head[0] else 1
    for s, p in mul_left(n, g, rest).items():
        for s2, q in mul_left(n, head, s).items():
            _acc(out, s2, p * q * sign)
    for g2, coeff in superbracket(n, g, head):
        for s, p in mul_left(n, g2, rest).items():
            _acc(out, s, p * coeff)
    _MUL[key] = out
    return out


# -- action on V^a (x) M ------------------------------------------------------------

def _vpar(n: int, t: int) -> int:
    return 1 if t >= n else 0


@lru_cache(maxsize=None)
def _letter_columns(n: int, g: tuple, letter: str, tilde: bool = False) -> dict:
    ctx = context(n)
    x = ctx.gen_matrix(g[1], g[2], g[0], tilde=tilde)
    if letter == "d":
        x = ctx.dual(x)
    cols = {}
    for a, b, v in x.raw():
        cols.setdefault(b, []).append((a, GRat.from_domain(v)))
    return cols


def _act_term(n: int, g: tuple, word: str, vt: tuple, sym: tuple, poly: CartanPoly):
    """Coproduct action of g on one basis term of V^word (x) M."""
    eps = g[0]
    passed = 0
    for pos, letter in enumerate(word):
        sign = -1 if eps and passed else 1
        for row, v in _letter_columns(n, g, letter).get(vt[pos], ()):
            yield vt[:pos] + (row,) + vt[pos + 1:], sym, poly * (v * sign)
        passed ^= _vpar(n, vt[pos])
    sign = -1 if eps and passed else 1
    for s, p in mul_left(n, g, sym).items():
        yield vt, s, poly * p * sign


def _truncate(terms: dict, t: Truncation):
    out, hit = {}, False
    for (vt, sym), poly in terms.items():
        if len(sym[0]) > t.E:
            hit = True
            continue
        keep = {m: c for m, c in poly.terms.items() if poly.degree_of(m) <= t.D}
        if len(keep) != len(poly.terms):
            hit = True
        if keep:
            out[(vt, sym)] = CartanPoly(keep)
    return out, hit


def act(n: int, g: tuple, v: VermaVector, t: Truncation = Truncation()) -> VermaVector:
    """Left action of the generator g = (eps, i, j) on v."""
    out = {}
    for (vt, sym), poly in v.terms.items():
        for vt2, s2, p2 in _act_term(n, g, v.word, vt, sym, poly):
            _acc(out, (vt2, s2), p2)
    out, hit = _truncate(out, t)
    return VermaVector(v.word, out, v.truncated or hit)


def _apply_omega(n: int, word: str, pos: int, terms: dict) -> dict:
    """Casimir between the V-factor at pos and everything to its right."""
    out = {}
    right = word[pos + 1:]
    for (vt, sym), poly in terms.items():
        w = vt[pos]
        pw = _vpar(n, w)
        head, tail = vt[:pos], vt[pos + 1:]
        for eps in (0, 1):
            sign = -1 if eps and pw else 1
            for a in range(1, n + 1):
                for b in range(1, n + 1):
                    rows = _letter_columns(n, (eps, a, b), "u", True).get(w)
                    if not rows:
                        continue
                    acted = list(_act_term(n, (eps, b, a), right, tail, sym, poly))
                    for w2, va in rows:
                        for tail2, s2, p2 in acted:
                            _acc(out, (head + (w2,) + tail2, s2), p2 * (va * sign))
    return out


@lru_cache(maxsize=None)
def _local_columns(n: int, gen: str) -> dict:
    m = context(n).local(gen)
    cols = {}
    for a, b, v in m.raw():
        cols.setdefault(b, []).append((a, GRat.from_domain(v)))
    return cols, m.parity()


def _split_index(idx: int, width: int, base: int) -> tuple:
    digits = []
    for _ in range(width):
        idx, d = divmod(idx, base)
        digits.append(d)
    return tuple(reversed(digits))


def _apply_layer(n: int, layer, terms: dict, t: Truncation) -> tuple:
    if layer.gen == "x":
        return _truncate(_apply_omega(n, layer.src, len(layer.left), terms), t)
    if layer.gen == "xd":
        stack = next(iter(expand_derived("xd").terms))
        hit = False
        for sub in stack:
            padded = type(layer)(layer.left + sub.left, sub.gen, sub.right + layer.right)
            terms, h = _apply_layer(n, padded, terms, t)
            hit = hit or h
        return terms, hit
    cols, par = _local_columns(n, layer.gen)
    spec = GENS[layer.gen]
    p, w_in, w_out = len(layer.left), len(spec.src), len(spec.dst)
    base = 2 * n
    out = {}
    for (vt, sym), poly in terms.items():
        block = vt[p:p + w_in]
        col = 0
        for d in block:
            col = col * base + d
        sign = -1 if par and sum(_vpar(n, d) for d in vt[:p]) % 2 else 1
        for row, v in cols.get(col, ()):
            new = vt[:p] + _split_index(row, w_out, base) + vt[p + w_in:]
            _acc(out, (new, sym), poly * (v * sign))
    return _truncate(out, t)


def psiM_eval(n: int, e, v: VermaVector, t: Truncation = Truncation()) -> VermaVector:
    """Apply the image of a diagram under Psi evaluated at M to v."""
    if isinstance(e, NormalMorphism):
        e = nm_to_expr(e)
    if not isinstance(e, Expr):
        raise TypeError(f"expected Expr or NormalMorphism, got {type(e).__name__}")
    if e.src != v.word:
        raise ValueError(f"diagram source {e.src!r} does not match vector word {v.word!r}")
    total = VermaVector(e.dst)
    for stack, coeff in e.terms.items():
        terms = {k: p * coeff for k, p in v.terms.items()}
        hit = v.truncated
        for layer in stack:
            terms, h = _apply_layer(n, layer, terms, t)
            hit = hit or h
        total = total + VermaVector(e.dst, terms, hit)
    return total


# -- the top-degree lemmas ------------------------------------------------------

def standard_input(n: int, r: int) -> VermaVector:
    """v_r (x) ... (x) v_1 (x) u-hat; needs r <= n."""
    if r > n:
        raise ValueError(f"v_r (x) ... (x) v_1 needs r <= n, got r={r}, n={n}")
    return VermaVector.highest(n, tuple(range(r - 1, -1, -1)), "u" * r)


def x_on_strand(r: int, k: int) -> Expr:
    """x_k: a dot on the k-th strand counted from the right."""
    return Expr.gen("x", "u" * (r - k), "u" * (k - 1))


def _h(i: int) -> CartanPoly:
    return CartanPoly.var(i - 1)


def _top_matches(label: str, result: VermaVector, want: VermaVector) -> tuple:
    """(label, ok); a result that hit the truncation never passes."""
    if result.truncated:
        logger.warning("%s: result hit the truncation, raise D or E", label)
        return f"{label} [truncated]", False
    return label, result.top_component() == want


def check_x1(n: int, t: Truncation = Truncation()) -> list:
    """(label, ok) for every v_i and v_ibar."""
    out = []
    x = Expr.gen("x")
    for i in range(1, n + 1):
        for t_idx, sign in ((i - 1, 1), (i - 1 + n, -1)):
            v = VermaVector.highest(n, (t_idx,), "u")
            want = VermaVector("u", {((t_idx,), ((), (0,) * n)): _h(i) * sign})
            out.append(_top_matches(f"x1 v{'' if sign > 0 else '-'}{i}", psiM_eval(n, x, v, t), want))
    return out


def check_xk(n: int, r: int, t: Truncation = Truncation()) -> list:
    out = []
    v = standard_input(n, r)
    (vt, sym), = v.terms.keys()
    for k in range(1, r + 1):
        want = VermaVector("u" * r, {(vt, sym): _h(k)})
        out.append(_top_matches(f"x{k} r={r}", psiM_eval(n, x_on_strand(r, k), v, t), want))
    return out


def check_bubbles(n: int, ks=(1, 3), t: Truncation = Truncation()) -> list:
    out = []
    u = VermaVector.highest(n)
    for k in ks:
        power_sum = CartanPoly()
        for i in range(1, n + 1):
            power_sum = power_sum + _h(i) ** k
        want = VermaVector("", {((), ((), (0,) * n)): power_sum * 2})
        out.append(_top_matches(f"bubble D{k}", psiM_eval(n, Expr.bubble(k), u, t), want))
    return out


def undot(key: NormalKey) -> NormalKey:
    return NormalKey(key.src, key.dst, tuple((a, b, cl, 0) for a, b, cl, _ in key.strands))


def expected_top(n: int, key: NormalKey) -> VermaVector:
    """v(undot d) (x) u-hat h_r^beta_r ... h_1^beta_1."""
    r = len(key.src)
    m = phi_eval(n, key_expr(undot(key)))
    col = 0
    for d in range(r - 1, -1, -1):
        col = col * 2 * n + d
    tail = CartanPoly.const(1)
    for a, b, cl, dots in key.strands:
        if a[0] == BOTTOM and dots:
            tail = tail * _h(r - a[1]) ** dots
    out = {}
    for row, j, v in m.raw():
        if j == col:
            out[(_split_index(row, r, 2 * n), ((), (0,) * n))] = tail * GRat.from_domain(v)
    return VermaVector(key.dst, out)


def check_top_component(n: int, r: int, max_dots: int = 2, t: Truncation = Truncation()) -> list:
    out = []
    v = standard_input(n, r)
    for key in enumerate_keys("u" * r, "u" * r, max_dots=max_dots):
        out.append(_top_matches(f"top {key}", psiM_eval(n, key_expr(key), v, t), expected_top(n, key)))
    return out


def independence_check(n: int, r: int, max_dots: int = 2, t: Truncation = Truncation()) -> tuple:
    """(count, rank) of psiM images of keys times bubble monomials, total dots <= max_dots."""
    v = standard_input(n, r)
    word = "u" * r
    rows = {}
    columns = {}
    count = 0
    for key in enumerate_keys(word, word, max_dots=max_dots):
        for mono in bubble_monomials(max_dots - key.dots):
            poly_expr = NormalMorphism(word, word, {key: _bubble_poly(mono)})
            image = psiM_eval(n, poly_expr, v, t)
            if image.truncated:
                logger.warning("independence: image of %s hit the truncation", key)
            row = {}
            for (vt, sym), p in image.terms.items():
                for m, c in p.terms.items():
                    col = columns.setdefault((vt, sym, m), len(columns))
                    row[col] = c.to_domain()
            if row:
                rows[count] = row
            count += 1
    check_dim(len(columns), "independence system")
    rank = DomainMatrix(rows, (count, max(len(columns), 1)), QQ_I).rank() if rows else 0
    logger.info("independence n=%d r=%d dots<=%d: %d elements, rank %d", n, r, max_dots, count, rank)
    return count, rank


def _bubble_poly(mono: tuple):
    return BubblePoly({mono: ONE})


def check_act_bracket(n: int, g1: tuple, g2: tuple, v: VermaVector, t: Truncation = Truncation()) -> bool:
    """g1 g2 v - (-1)^{p1 p2} g2 g1 v == [g1, g2] v."""
    lhs = act(n, g1, act(n, g2, v, t), t)
    rhs = act(n, g2, act(n, g1, v, t), t)
    lhs = lhs - rhs.scale(-1 if g1[0] and g2[0] else 1)
    br = VermaVector(v.word)
    for g, c in superbracket(n, g1, g2):
        br = br + act(n, g, v, t).scale(c)
    return lhs == br
