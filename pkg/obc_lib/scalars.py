"""
Exact coefficients: Gaussian rationals and the commutative polynomial rings
used around the diagram engine.

- GRat         re + im*i over Q(i), backed by fractions.Fraction
- BubblePoly   polynomials in the counterclockwise bubbles D1, D3, D5, ...
- SymPoly      polynomials in h1, h2, ... (complete homogeneous symmetric
               functions, or the Cartan variables of the Verma module)
- ZPoly        polynomials in the formal parameters zp1, zp2, ... of f'
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from sympy.polys.domains import QQ, QQ_I


class GRat:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GRat is immutable")

    @classmethod
    def coerce(cls, value) -> "GRat":
        if isinstance(value, GRat):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to GRat")

    # arithmetic
    def __add__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return GRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GRat(-self.re, -self.im)

    def __sub__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return GRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return GRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inv(self) -> "GRat":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("GRat inverse of zero")
        return GRat(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> "GRat":
        return GRat(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _as_grat(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_integral(self) -> bool:
        return self.re.denominator == 1 and self.im.denominator == 1

    def is_real(self) -> bool:
        return self.im == 0

    # sympy bridge
    def to_domain(self):
        return QQ_I(QQ(self.re.numerator, self.re.denominator), QQ(self.im.numerator, self.im.denominator))

    @classmethod
    def from_domain(cls, elem) -> "GRat":
        return cls(_frac(elem.x), _frac(elem.y))

    # text
    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __repr__(self):
        return f"GRat({self})"

    @classmethod
    def parse(cls, text: str) -> "GRat":
        s = text.strip().replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        if not s:
            raise ValueError("empty scalar")
        try:
            if not s.endswith("i"):
                return cls(Fraction(s))
            body = s[:-1].rstrip("*")
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                real, imag = body[:cut], body[cut:]
            else:
                real, imag = "0", body
            if imag in ("", "+"):
                imag = "1"
            elif imag == "-":
                imag = "-1"
            return cls(Fraction(real), Fraction(imag))
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"invalid scalar {text!r}: {e}")


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _as_grat(value):
    if isinstance(value, GRat):
        return value
    if isinstance(value, (int, Fraction)):
        return GRat(value)
    return None


ZERO = GRat(0)
ONE = GRat(1)
I = GRat(0, 1)


def grat_arith(a: GRat, b: GRat | None, op: str) -> GRat:
    """Single entry point for the four field operations."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown GRat op {op!r}")


# -- polynomials ------------------------------------------------------------

def _trim(exps) -> tuple:
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def _mono_mul(a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


class _ExpPoly:
    """Commutative polynomial: exponent tuple -> GRat, zero terms never stored."""

    __slots__ = ("terms",)
    PREFIX = "y"

    def __init__(self, terms=None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = GRat.coerce(coeff)
            if coeff:
                mono = _trim(mono)
                total = clean.get(mono, ZERO) + coeff
                if total:
                    clean[mono] = total
                else:
                    clean.pop(mono, None)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def const(cls, c=1):
        return cls({(): c})

    @classmethod
    def var(cls, j: int, power: int = 1):
        """Variable number j (0-based slot)."""
        return cls({(0,) * j + (power,): ONE})

    @staticmethod
    def weight(slot: int) -> int:
        return 1

    def degree_of(self, mono: tuple) -> int:
        return sum(e * self.weight(j) for j, e in enumerate(mono))

    def degree(self) -> int:
        return max((self.degree_of(m) for m in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def constant(self) -> GRat:
        return self.terms.get((), ZERO)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        g = _as_grat(other)
        if g is not None:
            return type(self).const(g)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        merged = dict(self.terms)
        for m, c in o.terms.items():
            merged[m] = merged.get(m, ZERO) + c
        return type(self)(merged)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        g = _as_grat(other)
        if g is not None:
            return type(self)({m: c * g for m, c in self.terms.items()})
        if not isinstance(other, type(self)):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, ZERO) + c1 * c2
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = type(self).const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.terms.values())

    def substitute(self, values) -> GRat:
        """Evaluate with slot j -> values[j] (GRat or int)."""
        total = ZERO
        for mono, coeff in self.terms.items():
            term = coeff
            for j, e in enumerate(mono):
                if e:
                    term = term * GRat.coerce(values[j]) ** e
            total = total + term
        return total

    def map_coefficients(self, fn):
        return type(self)({m: fn(c) for m, c in self.terms.items()})

    # text
    def _var_name(self, slot: int) -> str:
        return f"{self.PREFIX}{slot + 1}"

    def sorted_terms(self):
        """Graded-lex, highest first."""
        return sorted(self.terms.items(), key=lambda mc: (self.degree_of(mc[0]), mc[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = []
            for j, e in enumerate(mono):
                if e == 1:
                    factors.append(self._var_name(j))
                elif e > 1:
                    factors.append(f"{self._var_name(j)}^{e}")
            body = "*".join(factors)
            sign = "+"
            if coeff.is_real() and coeff.re < 0:
                sign, coeff = "-", -coeff
            if not body:
                text = _coeff_text(coeff)
            elif coeff == ONE:
                text = body
            else:
                text = f"{_coeff_text(coeff)}*{body}"
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    @classmethod
    def parse(cls, text: str):
        return _parse_poly(cls, text)


def _coeff_text(c: GRat) -> str:
    return str(c) if c.is_real() else f"({c})"


_TERM = re.compile(r"\s*([+-])?\s*((?:\([^)]*\)|[^+\-()\s]|\s(?![+-]))+)")


def _parse_poly(cls, text: str):
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    var = re.compile(rf"^{re.escape(cls.PREFIX)}(\d+)(?:\^(\d+))?$")
    total = cls()
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r} at column {pos + 1}")
        pos = m.end()
        term = cls.const(-1 if m.group(1) == "-" else 1)
        for factor in _split_top(m.group(2).strip(), "*"):
            factor = factor.strip()
            vm = var.match(factor)
            if vm:
                term = term * cls.var(int(vm.group(1)) - 1, int(vm.group(2) or 1))
            elif factor == "i":
                term = term * I
            else:
                term = term * GRat.parse(factor)
        total = total + term
    return total


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


class BubblePoly(_ExpPoly):
    """End(1) of the affine category: slot j holds the bubble D_{2j+1}."""

    __slots__ = ()
    PREFIX = "D"

    @staticmethod
    def weight(slot: int) -> int:
        return 2 * slot + 1

    def _var_name(self, slot: int) -> str:
        return f"D{2 * slot + 1}"

    @classmethod
    def delta(cls, k: int) -> "BubblePoly":
        """D_k for odd k >= 1; D_{-1} is the unit."""
        if k == -1:
            return cls.const(1)
        if k < 1 or k % 2 == 0:
            raise ValueError(f"D_k needs odd k >= 1, got {k}")
        return cls.var((k - 1) // 2)

    @classmethod
    def parse(cls, text: str):
        # D3 is slot 1; rewrite odd labels to slot numbers first
        def relabel(m):
            k = int(m.group(1))
            if k % 2 == 0:
                raise ValueError(f"bubble D{k} must have an odd label")
            return f"D{(k + 1) // 2}"
        return _parse_poly(cls, re.sub(r"D(\d+)", relabel, text))

    @staticmethod
    def indices(mono: tuple) -> list[int]:
        """Multiset of bubble labels in a monomial, ascending."""
        out = []
        for j, e in enumerate(mono):
            out.extend([2 * j + 1] * e)
        return out


def bubble_mul(p: BubblePoly, q: BubblePoly) -> BubblePoly:
    return p * q


@lru_cache(maxsize=None)
def delta_prime(k: int) -> BubblePoly:
    """Clockwise bubble with k dots in terms of the counterclockwise ones."""
    if k == -1:
        return BubblePoly.const(-1)
    if k < -1:
        raise ValueError(f"delta_prime needs k >= -1, got {k}")
    if k % 2 == 0:
        return BubblePoly()
    out = BubblePoly.delta(k)
    for i in range(1, (k - 1) // 2 + 1):
        out = out - BubblePoly.delta(2 * i - 1) * delta_prime(k - 2 * i)
    return out


def bubble_monomials(max_weight: int):
    """All bubble monomials of weight <= max_weight, graded-lex ascending."""
    out = []

    def rec(slot, remaining, acc):
        w = 2 * slot + 1
        if w > remaining:
            out.append(_trim(acc))
            return
        for e in range(remaining // w + 1):
            rec(slot + 1, remaining - e * w, acc + [e])

    rec(0, max_weight, [])
    return sorted(set(out), key=lambda m: (bubble_weight(m), m))


def bubble_weight(mono: tuple) -> int:
    return sum(e * (2 * j + 1) for j, e in enumerate(mono))


class SymPoly(_ExpPoly):
    __slots__ = ()
    PREFIX = "h"

    @staticmethod
    def weight(slot: int) -> int:
        return slot + 1

    @classmethod
    def h(cls, r: int) -> "SymPoly":
        if r < 0:
            return cls()
        if r == 0:
            return cls.const(1)
        return cls.var(r - 1)


@lru_cache(maxsize=None)
def e_from_h(r: int) -> SymPoly:
    """e_r via sum_s (-1)^s e_s h_{r-s} = 0."""
    if r < 0:
        return SymPoly()
    if r == 0:
        return SymPoly.const(1)
    out = SymPoly()
    for s in range(r):
        sign = -1 if (r + s + 1) % 2 else 1
        out = out + e_from_h(s) * SymPoly.h(r - s) * sign
    return out


@lru_cache(maxsize=None)
def _h_in_n_vars(r: int, n: int) -> SymPoly:
    if r <= n:
        return SymPoly.h(r)
    out = SymPoly()
    for s in range(1, n + 1):
        sign = 1 if s % 2 else -1
        out = out + _reduce_n(e_from_h(s), n) * _h_in_n_vars(r - s, n) * sign
    return out


def _reduce_n(p: SymPoly, n: int) -> SymPoly:
    out = SymPoly()
    for mono, coeff in p.terms.items():
        term = SymPoly.const(coeff)
        for j, e in enumerate(mono):
            if e:
                term = term * _h_in_n_vars(j + 1, n) ** e
        out = out + term
    return out


@lru_cache(maxsize=None)
def _powersum(k: int) -> SymPoly:
    # Newton: k h_k = sum_{i=1}^k p_i h_{k-i}
    out = SymPoly.h(k) * k
    for i in range(1, k):
        out = out - _powersum(i) * SymPoly.h(k - i)
    return out


def powersum_eval(k: int, n: int) -> SymPoly:
    """p_k in the h-basis, with h_r (r > n) rewritten through e_r = 0 in n variables."""
    if k < 1 or n < 1:
        raise ValueError("powersum_eval needs k >= 1 and n >= 1")
    return _reduce_n(_powersum(k), n)


def sym_ops(p, q, op: str, *args):
    if op == "mul":
        return p * q
    if op == "e_from_h":
        return e_from_h(args[0])
    if op == "powersum_eval":
        return powersum_eval(*args)
    raise ValueError(f"unknown SymPoly op {op!r}")


class ZPoly(_ExpPoly):
    """Coefficients in K = k[zp1, zp2, ...]."""

    __slots__ = ()
    PREFIX = "zp"
