"""
Cyclotomic quotients of the affine category.

f(t) = t^l + z1 t^(l-2) + z2 t^(l-4) + ...   (polynomial on up strands)
f'(t) = t^l + zp1 t^(l-2) + ...              (on down strands, possibly formal)

delta(u^2) = f'(u)/f(u) and delta'(u^2) = -f(u)/f'(u) give the values of the
counterclockwise and clockwise dotted bubbles in the quotient. Morphisms are
reduced to keys with fewer than l closed dots on every strand.

Reduction works in End(L^r) (L = 'u' for set1, 'd' for set2) after bending
every Hom space there on the left. Relations at the right edge of a picture
lie in the left tensor ideal, so dots are moved to the rightmost strand and
f (or f') is applied there.
"""
from __future__ import annotations

import logging
from functools import lru_cache

from pydantic import BaseModel
from sympy import Poly, Symbol, I as SYM_I
from sympy.parsing.sympy_parser import convert_xor, implicit_multiplication, parse_expr as sym_parse, standard_transformations
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .algebras import ASergElement, cyclo_basis, cyclo_reduce, element_image, key_to_aserg, nu_images
from .diagrams import Expr, Layer, cross_for, expr_compose, expr_tensor
from .normalform import NormalKey, NormalMorphism, enumerate_keys, identity_key, key_expr, normalize
from .scalars import BubblePoly, GRat, ONE, ZPoly, bubble_monomials, delta_prime
from . import utils
from .utils import CapExceeded, check_ell, flow

logger = logging.getLogger("Cyclo")

MODES = ("set1", "set2")
ROUTES = ("curl", "gamma")
_STEP_CAP = 100000


# -- polynomial input --------------------------------------------------------

_T = Symbol("t")
_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication)


def parse_f(text: str) -> dict:
    """'t^2-3', 't*(t^2-3)', '(t^2-1)(t^2-4)' -> {degree: GRat}."""
    try:
        expr = sym_parse(text.replace("i", "I"), local_dict={"t": _T, "I": SYM_I}, transformations=_TRANSFORMS)
        poly = Poly(expr, _T, domain=QQ_I)
    except Exception as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc}")
    coeffs = {}
    for (deg,), c in poly.terms():
        coeffs[deg] = GRat.from_domain(QQ_I.from_sympy(c))
    _check_shape(coeffs, "f")
    return coeffs


def _check_shape(coeffs: dict, name: str):
    if not coeffs:
        raise ValueError(f"{name} is zero")
    ell = max(coeffs)
    if ell < 1:
        raise ValueError(f"{name} must have degree >= 1")
    if GRat.coerce(coeffs[ell]) != ONE:
        raise ValueError(f"{name} must be monic")
    for d, c in coeffs.items():
        if (ell - d) % 2 and c:
            raise ValueError(f"{name} has a t^{d} term; only t^(l-2k) terms are allowed")
    check_ell(ell)


# -- data ------------------------------------------------------------------------

class CycloDataModel(BaseModel):
    l: int
    z: list[str]
    zprime: list[str] | str
    delta: list[str]
    delta_prime: list[str]


class CycloData:
    """f, f' and the delta series. z[s] is the coefficient of t^(l-2s)."""

    def __init__(self, f: dict, fprime: dict | None = None):
        _check_shape(f, "f")
        self.ell = max(f)
        self.f = {d: GRat.coerce(c) for d, c in f.items() if GRat.coerce(c)}
        half = self.ell // 2
        self.z = [ZPoly.const(self.f.get(self.ell - 2 * s, 0)) for s in range(half + 1)]
        self.formal = fprime is None
        if self.formal:
            self.zprime = [ZPoly.const(1)] + [ZPoly.var(s - 1) for s in range(1, half + 1)]
        else:
            _check_shape(fprime, "f'")
            if max(fprime) != self.ell:
                raise ValueError(f"f and f' must have the same degree, got {self.ell} and {max(fprime)}")
            self.zprime = [ZPoly.const(fprime.get(self.ell - 2 * s, 0)) for s in range(half + 1)]
        self._delta = [ZPoly.const(1)]
        self._delta_prime = [ZPoly.const(-1)]
        self._from_prime = [ZPoly.const(1)]

    @classmethod
    def from_text(cls, f: str, fprime: str | None = None) -> "CycloData":
        if fprime is None or fprime.strip().lower() == "formal":
            return cls(parse_f(f))
        return cls(parse_f(f), parse_f(fprime))

    def zs(self, s: int) -> ZPoly:
        return self.z[s] if s < len(self.z) else ZPoly()

    def zps(self, s: int) -> ZPoly:
        return self.zprime[s] if s < len(self.zprime) else ZPoly()

    def fprime_coeffs(self) -> dict:
        """{degree: ZPoly} for f'."""
        return {self.ell - 2 * s: c for s, c in enumerate(self.zprime) if c}

    def f_coeffs(self) -> dict:
        return {self.ell - 2 * s: c for s, c in enumerate(self.z) if c}

    def delta(self, r: int) -> ZPoly:
        # sum_{s<=r} z_s delta_{r-s} = zp_r
        while len(self._delta) <= r:
            k = len(self._delta)
            value = self.zps(k)
            for s in range(1, k + 1):
                value = value - self.zs(s) * self._delta[k - s]
            self._delta.append(value)
        return self._delta[r]

    def delta_prime(self, r: int) -> ZPoly:
        # sum_{s<=r} zp_s delta'_{r-s} = -z_r
        while len(self._delta_prime) <= r:
            k = len(self._delta_prime)
            value = -self.zs(k)
            for s in range(1, k + 1):
                value = value - self.zps(s) * self._delta_prime[k - s]
            self._delta_prime.append(value)
        return self._delta_prime[r]

    def delta_from_prime(self, r: int) -> ZPoly:
        """Value of the counterclockwise bubble D_{2r-1} forced by clockwise bubbles = delta'."""
        while len(self._from_prime) <= r:
            k = len(self._from_prime)
            rest = delta_prime(2 * k - 1) - BubblePoly.delta(2 * k - 1)
            self._from_prime.append(self.delta_prime(k) - _eval_bubbles(rest, self._from_prime))
        return self._from_prime[r]

    def series(self, precision: int | None = None) -> tuple:
        if precision is None:
            precision = utils.DELTA_PRECISION
        return [self.delta(r) for r in range(precision + 1)], [self.delta_prime(r) for r in range(precision + 1)]

    def to_model(self, precision: int | None = None) -> CycloDataModel:
        delta, dprime = self.series(precision)
        return CycloDataModel(
            l=self.ell,
            z=[str(c) for c in self.z],
            zprime="formal" if self.formal else [str(c) for c in self.zprime],
            delta=[str(c) for c in delta],
            delta_prime=[str(c) for c in dprime],
        )

    def to_json(self, precision: int | None = None) -> str:
        return self.to_model(precision).model_dump_json()

    def __repr__(self):
        f = " + ".join(f"{c}*t^{d}" for d, c in sorted(self.f.items(), reverse=True))
        return f"CycloData(l={self.ell}, f={f}, f'={'formal' if self.formal else self.zprime})"


def delta_series(data: CycloData, precision: int | None = None) -> tuple:
    if precision is None:
        precision = utils.DELTA_PRECISION
    if precision < data.ell // 2:
        raise ValueError(f"precision must be at least {data.ell // 2}")
    return data.series(precision)


def check_e1_e2(data: CycloData, precision: int | None = None) -> list:
    """(label, ok) for the coefficient identities of f'/f and -f/f' and their product."""
    if precision is None:
        precision = utils.DELTA_PRECISION
    checks = []
    half = data.ell // 2
    for r in range(precision + 1):
        lhs = ZPoly()
        for s in range(min(r, half) + 1):
            lhs = lhs + data.zs(s) * data.delta(r - s)
        checks.append((f"e1 r={r}", lhs == (data.zps(r) if r <= half else ZPoly())))
        lhs = ZPoly()
        for s in range(min(r, half) + 1):
            lhs = lhs + data.zps(s) * data.delta_prime(r - s)
        checks.append((f"e2 r={r}", lhs == -(data.zs(r) if r <= half else ZPoly())))
        prod = ZPoly()
        for s in range(r + 1):
            prod = prod + data.delta(s) * data.delta_prime(r - s)
        checks.append((f"delta*delta' r={r}", prod == ZPoly.const(-1 if r == 0 else 0)))
    return checks


# -- bubbles -----------------------------------------------------------------------

def _eval_bubbles(p: BubblePoly, values) -> ZPoly:
    """Substitute D_{2j+1} -> values[j+1]."""
    out = ZPoly()
    for mono, coeff in p.terms.items():
        term = ZPoly.const(coeff)
        for j, e in enumerate(mono):
            for _ in range(e):
                term = term * values[j + 1]
        out = out + term
    return out


def bubble_specialize(p: BubblePoly, data: CycloData, mode: str = "set1") -> ZPoly:
    """Counterclockwise D_{2r-1} -> delta_r; in set2 the value is forced by the clockwise bubbles."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    top = max((len(m) for m in p.terms), default=0)
    fetch = data.delta if mode == "set1" else data.delta_from_prime
    values = [fetch(r) for r in range(top + 1)]
    return _eval_bubbles(p, values)


def _specialized(nm: NormalMorphism, data: CycloData, mode: str) -> dict:
    out = {}
    for key, poly in nm.terms.items():
        value = bubble_specialize(poly, data, mode)
        if value:
            out[key] = value
    return out


# -- morphisms -----------------------------------------------------------------------

class CycloMorphism:
    """Keys with fewer than l dots per strand, coefficients in K."""

    __slots__ = ("src", "dst", "ell", "terms")

    def __init__(self, src: str, dst: str, ell: int, terms=None):
        self.src = src
        self.dst = dst
        self.ell = ell
        clean = {}
        for key, coeff in (terms or {}).items():
            if coeff:
                clean[key] = coeff
        self.terms = clean

    def __add__(self, other: "CycloMorphism") -> "CycloMorphism":
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, ZPoly()) + c
        return CycloMorphism(self.src, self.dst, self.ell, merged)

    def __neg__(self):
        return CycloMorphism(self.src, self.dst, self.ell, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CycloMorphism":
        if not isinstance(c, ZPoly):
            c = ZPoly.const(c)
        return CycloMorphism(self.src, self.dst, self.ell, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, CycloMorphism):
            return NotImplemented
        return (self.src, self.dst, self.terms) == (other.src, other.dst, other.terms)

    def __hash__(self):
        return hash((self.src, self.dst, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def max_strand_dots(self) -> int:
        return max((_strand_max(k) for k in self.terms), default=0)

    def coefficient(self, key: NormalKey) -> ZPoly:
        return self.terms.get(key, ZPoly())

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{k}" for k, c in sorted(self.terms.items()))

    def __repr__(self):
        return f"CycloMorphism({self.src or '1'}->{self.dst or '1'}: {self})"


def _strand_max(key: NormalKey) -> int:
    return max((st[3] for st in key.strands), default=0)


def _acc(out: dict, key, value):
    total = out.get(key, ZPoly()) + value
    if total:
        out[key] = total
    else:
        out.pop(key, None)


# -- transport -------------------------------------------------------------------------

def _dual(letter: str) -> str:
    return "d" if letter == "u" else "u"


def _bend_source(g: Expr) -> Expr:
    """g: xA -> B  becomes  A -> x*B."""
    x, rest = g.src[0], g.src[1:]
    coev = Expr.gen("rcup" if x == "u" else "cup")
    return expr_compose(expr_tensor(Expr.identity(_dual(x)), g), expr_tensor(coev, Expr.identity(rest)))


def _bend_target(g: Expr) -> Expr:
    """g: A -> yB  becomes  y*A -> B."""
    y, rest = g.dst[0], g.dst[1:]
    ev = Expr.gen("cap" if y == "u" else "rcap")
    return expr_compose(expr_tensor(ev, Expr.identity(rest)), expr_tensor(Expr.identity(_dual(y)), g))


def _cross(g: Expr, pos: int) -> Expr:
    w = g.dst
    return expr_compose(Expr.gen(cross_for(w[pos], w[pos + 1]), w[:pos], w[pos + 2:]), g)


class HomTransport:
    """Mutually inverse maps Hom(a, b) <-> End(L^r), built from left bendings and crossings."""

    def __init__(self, a: str, b: str, letter: str = "u"):
        if flow(a) != flow(b):
            raise ValueError(f"Hom({a or '1'}, {b or '1'}) is zero")
        self.a, self.b, self.letter = a, b, letter
        dual = _dual(letter)
        steps = [("src", None)] * len(a)
        target = "".join(_dual(ch) for ch in reversed(a)) + b
        self.r = target.count(letter)
        word = list(target)
        moved = True
        while moved:
            moved = False
            for p in range(len(word) - 1):
                if word[p] == letter and word[p + 1] == dual:
                    steps.append(("cross", p))
                    word[p], word[p + 1] = word[p + 1], word[p]
                    moved = True
        steps += [("dst", None)] * self.r
        self.steps = steps
        self.end_word = letter * self.r

    @property
    def trivial(self) -> bool:
        return self.a == self.b == self.end_word

    def to_end(self, g: Expr) -> Expr:
        if (g.src, g.dst) != (self.a, self.b):
            raise ValueError(f"expected a morphism {self.a or '1'}->{self.b or '1'}")
        if self.trivial:
            return g
        for kind, pos in self.steps:
            if kind == "src":
                g = _bend_source(g)
            elif kind == "cross":
                g = _cross(g, pos)
            else:
                g = _bend_target(g)
        return g

    def from_end(self, h: Expr) -> Expr:
        if (h.src, h.dst) != (self.end_word, self.end_word):
            raise ValueError(f"expected an endomorphism of {self.end_word or '1'}")
        if self.trivial:
            return h
        for kind, pos in reversed(self.steps):
            if kind == "src":
                h = _bend_target(h)
            elif kind == "cross":
                h = _cross(h, pos)
            else:
                h = _bend_source(h)
        return h


def hom_transport(a: str, b: str, letter: str = "u") -> HomTransport | None:
    """None marks the zero Hom space."""
    if flow(a) != flow(b):
        return None
    return HomTransport(a, b, letter)


def transport_count(a: str, b: str, letter: str = "u") -> tuple:
    """(#dot-free keys a->b, #dot-free keys of End(L^r)); equal whenever the transport exists."""
    t = hom_transport(a, b, letter)
    if t is None:
        return 0, 0
    return (sum(1 for _ in enumerate_keys(a, b, max_dots=0)),
            sum(1 for _ in enumerate_keys(t.end_word, t.end_word, max_dots=0)))


# -- reduction -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _edge_power(r: int, letter: str, pos: int, power: int) -> NormalMorphism:
    """Dot^power on the rightmost strand, conjugated back to column pos."""
    word = letter * r
    cross = "s" if letter == "u" else "ds"
    dot = "x" if letter == "u" else "xd"
    up = [Layer(letter * p, cross, letter * (r - p - 2)) for p in range(pos, r - 1)]
    stack = up + [Layer(letter * (r - 1), dot, "")] * power + list(reversed(up))
    return normalize(Expr.from_stack(word, tuple(stack)))


def _strip_dots(key: NormalKey, endpoint, count: int) -> NormalKey:
    strands = []
    for st in key.strands:
        if endpoint in (st[0], st[1]):
            st = (st[0], st[1], st[2], st[3] - count)
        strands.append(st)
    return NormalKey(key.src, key.dst, tuple(sorted(strands)))


def _curl_replacement(key: NormalKey, data: CycloData, mode: str) -> dict:
    """key modulo the ideal, via f (or f') on the rightmost strand."""
    letter = "u" if mode == "set1" else "d"
    ell = data.ell
    r = len(key.src)
    st = next(s for s in key.strands if s[3] >= ell)
    # dots sit at the bottom of up strands and the top of down strands
    pos = st[0][1]
    stripped = key_expr(_strip_dots(key, st[0], ell))
    coeffs = data.f_coeffs() if mode == "set1" else data.fprime_coeffs()
    total = {}
    for d, c in coeffs.items():
        edge = key_expr_sum(_edge_power(r, letter, pos, d))
        composite = expr_compose(stripped, edge) if letter == "u" else expr_compose(edge, stripped)
        for k, v in _specialized(normalize(composite), data, mode).items():
            _acc(total, k, v * c)
    lead = total.get(key)
    if lead is None or not lead.is_constant():
        raise RuntimeError(f"curl reduction lost the leading key {key}")
    factor = lead.constant().inv()
    out = {}
    for k, v in total.items():
        if k != key:
            _acc(out, k, -v * factor)
    return out


def key_expr_sum(nm: NormalMorphism) -> Expr:
    """Expr of a NormalMorphism with constant coefficients."""
    out = Expr(nm.src, nm.dst)
    for key, poly in nm.terms.items():
        if not poly.is_constant():
            raise ValueError("bubble coefficients cannot be placed in an Expr")
        out = out + key_expr(key).scale(poly.constant())
    return out


def _gamma_replacement(key: NormalKey, data: CycloData) -> dict:
    """key modulo the ideal, via the cyclotomic Sergeev algebra."""
    r = len(key.src)
    reduced = cyclo_reduce(key_to_aserg(key), data.f)
    image = normalize(element_image(reduced, nu_images(r)))
    return _specialized(image, data, "set1")


def _reduce_end(terms: dict, data: CycloData, mode: str, route: str, stats: dict) -> dict:
    done = {}
    pending = dict(terms)
    while pending:
        key = max(pending, key=lambda k: (k.dots, k))
        coeff = pending.pop(key)
        if _strand_max(key) < data.ell:
            _acc(done, key, coeff)
            continue
        stats["steps"] += 1
        if stats["steps"] > _STEP_CAP:
            raise CapExceeded("cyclotomic reduction did not terminate within the step cap")
        if route == "gamma":
            repl = _gamma_replacement(key, data)
        else:
            repl = _curl_replacement(key, data, mode)
        for k, v in repl.items():
            _acc(pending, k, v * coeff)
    return done


def _reduce(src: str, dst: str, terms: dict, data: CycloData, mode: str, route: str, stats: dict) -> dict:
    letter = "u" if mode == "set1" else "d"
    transport = None
    done = {}
    pending = dict(terms)
    while pending:
        key = max(pending, key=lambda k: (k.dots, k))
        coeff = pending.pop(key)
        if _strand_max(key) < data.ell:
            _acc(done, key, coeff)
            continue
        if transport is None:
            transport = HomTransport(src, dst, letter)
        if transport.trivial:
            reduced = _reduce_end({key: coeff}, data, mode, route, stats)
            for k, v in reduced.items():
                _acc(done, k, v)
            continue
        stats["transports"] += 1
        there = _specialized(normalize(transport.to_end(key_expr(key))), data, mode)
        reduced = _reduce_end(there, data, mode, route, stats)
        for k_end, v_end in reduced.items():
            back = _specialized(normalize(transport.from_end(key_expr(k_end))), data, mode)
            for k, v in back.items():
                _acc(pending, k, v * v_end * coeff)
    return done


def cyclo_normalize(m, data: CycloData, mode: str = "set1", route: str = "curl",
                    strategy: str = "global") -> CycloMorphism:
    """Normal form of m in the cyclotomic quotient."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}, expected one of {ROUTES}")
    if route == "gamma" and mode != "set1":
        raise ValueError("the gamma route reduces up strands; use mode set1")
    nm = m if isinstance(m, NormalMorphism) else normalize(m, strategy)
    stats = {"steps": 0, "transports": 0}
    terms = _reduce(nm.src, nm.dst, _specialized(nm, data, mode), data, mode, route, stats)
    logger.debug(f"{nm.src or '1'}->{nm.dst or '1'}: {stats['steps']} reductions, {stats['transports']} transports")
    return CycloMorphism(nm.src, nm.dst, data.ell, terms)


def cyclo_identity(word: str, data: CycloData, coeff: ZPoly | None = None) -> CycloMorphism:
    return CycloMorphism(word, word, data.ell, {identity_key(word): coeff if coeff is not None else ZPoly.const(1)})


# -- dimensions ------------------------------------------------------------------------

def cyclo_dim(a: str, b: str, ell: int, include_bubbles: bool = False, max_weight: int | None = None) -> int:
    """Keys a->b with fewer than ell dots per strand, times free bubble monomials if asked."""
    if ell < 1:
        raise ValueError("l must be at least 1")
    if flow(a) != flow(b):
        return 0
    keys = sum(1 for _ in enumerate_keys(a, b, per_strand=ell))
    if not include_bubbles:
        return keys
    if max_weight is None:
        raise ValueError("counting with bubbles needs a weight cap")
    return keys * len(free_bubble_monomials(ell, max_weight))


def free_bubble_monomials(ell: int, max_weight: int) -> list:
    """Monomials in D1, D3, ..., D_{2(l//2)-1}: the bubbles left free over k."""
    return [m for m in bubble_monomials(max_weight) if len(m) <= ell // 2]


def gamma_check(n: int, data: CycloData) -> tuple:
    """(count, rank) of the images of the Serg_n^f basis in End(u^n)."""
    images = nu_images(n)
    columns = {}
    rows = {}
    basis = cyclo_basis(n, data.ell)
    for t, mono in enumerate(basis):
        cm = cyclo_normalize(element_image(ASergElement(n, {mono: ONE}), images), data)
        row = {}
        for key, coeff in cm.terms.items():
            if not coeff.is_constant():
                raise ValueError("basis image has non-constant coefficients")
            row[columns.setdefault(key, len(columns))] = coeff.constant().to_domain()
        if row:
            rows[t] = row
    if not rows:
        return len(basis), 0
    return len(basis), DomainMatrix(rows, (len(basis), len(columns)), QQ_I).rank()


def _f_expr(word: str, coeffs: dict, letter: str) -> list:
    """[(coeff, Expr)] for id_word (x) f(dot) on one strand of the given letter."""
    dot = "x" if letter == "u" else "xd"
    out = []
    for d, c in coeffs.items():
        stack = (Layer(word, dot, ""),) * d
        out.append((c, Expr.from_stack(word + letter, stack)))
    return out


def ideal_equivalence(data: CycloData, max_left: int = 1) -> list:
    """Each generator of one generating set vanishes under reduction by the other."""
    checks = []
    lefts = [""]
    for _ in range(max_left):
        lefts = lefts + [w + ch for w in lefts for ch in "ud" if len(w + ch) <= max_left]
    lefts = sorted(set(lefts), key=lambda w: (len(w), w))
    half = data.ell // 2
    for word in lefts:
        for mode, letter, coeffs, clockwise, value in (
            ("set2", "u", data.f_coeffs(), False, data.delta),
            ("set1", "d", data.fprime_coeffs(), True, data.delta_prime),
        ):
            total = CycloMorphism(word + letter, word + letter, data.ell)
            for c, e in _f_expr(word, coeffs, letter):
                total = total + cyclo_normalize(e, data, mode=mode).scale(c)
            label = "f(x)" if letter == "u" else "f'(xd)"
            checks.append((f"{label} on {word or '1'}|{letter} under {mode}", total.is_zero()))
            for r in range(1, half + 1):
                bubble = expr_tensor(Expr.identity(word), Expr.bubble(2 * r - 1, clockwise=clockwise))
                diff = cyclo_normalize(bubble, data, mode=mode) - cyclo_identity(word, data, value(r))
                name = "clockwise" if clockwise else "bubble"
                checks.append((f"{name} {2 * r - 1} on {word or '1'} under {mode}", diff.is_zero()))
    return checks


def route_agreement(data: CycloData, exprs) -> list:
    """(label, ok) comparing curl and gamma reductions."""
    out = []
    for t, e in enumerate(exprs):
        a = cyclo_normalize(e, data, route="curl")
        b = cyclo_normalize(e, data, route="gamma")
        out.append((f"routes agree #{t}", a == b))
    return out


def obcf_bridge(f: dict, max_weight: int = 4) -> tuple:
    """CycloData with formal f' and checks that the bubbles left free over k map injectively into K."""
    data = CycloData(f)
    checks = []
    if data.ell >= 2:
        checks.append(("delta_1 = zp1 - z1", data.delta(1) == data.zps(1) - data.zs(1)))
    else:
        checks.append(("delta_r = 0 for l = 1", all(not data.delta(r) for r in range(1, max_weight + 1))))
    monos = free_bubble_monomials(data.ell, max_weight)
    images = [bubble_specialize(BubblePoly({m: ONE}), data) for m in monos]
    columns = {}
    rows = {}
    for t, img in enumerate(images):
        row = {}
        for mono, coeff in img.terms.items():
            row[columns.setdefault(mono, len(columns))] = coeff.to_domain()
        if row:
            rows[t] = row
    rank = DomainMatrix(rows, (len(monos), max(len(columns), 1)), QQ_I).rank() if rows else 0
    checks.append((f"free bubbles of weight <= {max_weight} independent in K", rank == len(monos)))
    for word in ("u", "uu"):
        count = cyclo_dim(word, word, data.ell)
        spanning = list(enumerate_keys(word, word, per_strand=data.ell + 2))
        k_rank, inside = _k_rank(spanning, data)
        checks.append((f"End({word}) reductions stay on keys with < l dots", inside))
        checks.append((f"End({word}) K-rank = {count}", k_rank == count))
        with_bubbles = cyclo_dim(word, word, data.ell, include_bubbles=True, max_weight=max_weight)
        checks.append((f"End({word}) k-count = K-rank x bubble monomials", with_bubbles == k_rank * len(monos)))
    return data, checks


def _zpoly_sympy(p: ZPoly):
    out = 0
    for mono, coeff in p.terms.items():
        term = QQ_I.to_sympy(coeff.to_domain())
        for j, e in enumerate(mono):
            term = term * Symbol(f"zp{j + 1}") ** e
        out = out + term
    return out


def _k_rank(keys: list, data: CycloData) -> tuple:
    """(rank over Frac(K), all reduced keys in range) for the cyclotomic images of keys."""
    columns = {}
    images = []
    inside = True
    for key in keys:
        cm = cyclo_normalize(NormalMorphism(key.src, key.dst, {key: ONE}), data)
        inside = inside and all(_strand_max(k) < data.ell for k in cm.terms)
        images.append({columns.setdefault(k, len(columns)): _zpoly_sympy(c) for k, c in cm.terms.items()})
    if not columns:
        return 0, inside
    rows = [[img.get(j, 0) for j in range(len(columns))] for img in images]
    dm = DomainMatrix.from_list_sympy(len(rows), len(columns), rows)
    return dm.to_field().rank(), inside
