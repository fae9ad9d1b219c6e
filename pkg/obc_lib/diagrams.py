"""
Objects, generator layers and un-normalized morphism expressions.

A word is a str over 'u' (up) and 'd' (down); '' is the unit object.
A stack is a tuple of Layers read bottom to top. An Expr is a linear
combination of stacks sharing source and target.

Grammar (see parse_expr):

    expr    := term (('+' | '-') term)*
    term    := compose
    compose := tensor ('.' tensor)*          f . g  means f after g
    tensor  := atom ('*' atom)*
    atom    := GEN | id(WORD) | D(k) | D'(k) | SCALAR | '(' expr ')' | '-' atom
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

from .scalars import GRat, ONE, ZERO
from .utils import normalize_word


class TypeMismatch(ValueError):
    pass


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", offset: int = 0):
        line = text.count("\n", 0, offset) + 1
        col = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.column = col


@dataclass(frozen=True)
class GenSpec:
    name: str
    src: str
    dst: str
    odd: bool = False
    dot: bool = False


# Engine primitives. cup/cap/s/x/c generate; the rest carry expansions.
GENS = {
    "cup": GenSpec("cup", "", "ud"),
    "cap": GenSpec("cap", "du", ""),
    "s": GenSpec("s", "uu", "uu"),
    "x": GenSpec("x", "u", "u", dot=True),
    "c": GenSpec("c", "u", "u", odd=True, dot=True),
    "rcup": GenSpec("rcup", "", "du"),
    "rcap": GenSpec("rcap", "ud", ""),
    "ls": GenSpec("ls", "ud", "du"),
    "rs": GenSpec("rs", "du", "ud"),
    "ds": GenSpec("ds", "dd", "dd"),
    "xd": GenSpec("xd", "d", "d", dot=True),
    "cd": GenSpec("cd", "d", "d", odd=True, dot=True),
}

CROSSINGS = ("s", "ls", "rs", "ds")
CUPS = ("cup", "rcup")
CAPS = ("cap", "rcap")


def cross_for(a: str, b: str) -> str:
    """Crossing whose source is the two letters a, b."""
    return {"uu": "s", "dd": "ds", "ud": "ls", "du": "rs"}[a + b]


class Layer(NamedTuple):
    left: str
    gen: str
    right: str

    @property
    def src(self) -> str:
        return self.left + GENS[self.gen].src + self.right

    @property
    def dst(self) -> str:
        return self.left + GENS[self.gen].dst + self.right

    @property
    def pos(self) -> int:
        return len(self.left)


def stack_words(src: str, stack) -> list[str]:
    """Words at every level: words[h] is the source of layer h, words[-1] the target."""
    words = [src]
    for layer in stack:
        if layer.src != words[-1]:
            raise TypeMismatch(f"layer {layer} expects {layer.src!r} but receives {words[-1]!r}")
        words.append(layer.dst)
    return words


def stack_parity(stack) -> int:
    return sum(1 for layer in stack if GENS[layer.gen].odd) % 2


def stack_dots(stack) -> int:
    return sum(1 for layer in stack if layer.gen in ("x", "xd"))


def pad_stack(stack, left: str = "", right: str = ""):
    return tuple(Layer(left + l.left, l.gen, l.right + right) for l in stack)


class Expr:
    __slots__ = ("src", "dst", "terms")

    def __init__(self, src: str, dst: str, terms=None):
        self.src = src
        self.dst = dst
        clean = {}
        for stack, coeff in (terms or {}).items():
            stack = tuple(stack)
            coeff = GRat.coerce(coeff)
            if not coeff:
                continue
            words = stack_words(src, stack)
            if words[-1] != dst:
                raise TypeMismatch(f"stack ends at {words[-1]!r}, expected {dst!r}")
            total = clean.get(stack, ZERO) + coeff
            if total:
                clean[stack] = total
            else:
                clean.pop(stack, None)
        self.terms = clean

    # constructors
    @classmethod
    def identity(cls, word: str = "") -> "Expr":
        return cls(word, word, {(): ONE})

    @classmethod
    def gen(cls, name: str, left: str = "", right: str = "") -> "Expr":
        if name not in GENS:
            raise ValueError(f"unknown generator {name!r}")
        layer = Layer(left, name, right)
        return cls(layer.src, layer.dst, {(layer,): ONE})

    @classmethod
    def from_stack(cls, src: str, stack, coeff=1) -> "Expr":
        words = stack_words(src, stack)
        return cls(src, words[-1], {tuple(stack): coeff})

    @classmethod
    def scalar(cls, value) -> "Expr":
        return cls("", "", {(): GRat.coerce(value)})

    @classmethod
    def bubble(cls, k: int, clockwise: bool = False) -> "Expr":
        """Counterclockwise (or clockwise) bubble carrying k dots."""
        if k < 0:
            raise ValueError("bubble needs k >= 0")
        return cls.from_stack("", bubble_stack(k, clockwise))

    # linear structure
    def _check_same(self, other: "Expr"):
        if (self.src, self.dst) != (other.src, other.dst):
            raise TypeMismatch(f"cannot add {self.src!r}->{self.dst!r} and {other.src!r}->{other.dst!r}")

    def __add__(self, other: "Expr") -> "Expr":
        self._check_same(other)
        merged = dict(self.terms)
        for s, c in other.terms.items():
            merged[s] = merged.get(s, ZERO) + c
        return Expr(self.src, self.dst, merged)

    def __neg__(self) -> "Expr":
        return Expr(self.src, self.dst, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def scale(self, c) -> "Expr":
        c = GRat.coerce(c)
        return Expr(self.src, self.dst, {s: v * c for s, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return (self.src, self.dst, self.terms) == (other.src, other.dst, other.terms)

    def __hash__(self):
        return hash((self.src, self.dst, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_integral(self) -> bool:
        return all(c.is_integral() for c in self.terms.values())

    def __repr__(self):
        return f"Expr({self.src or '1'}->{self.dst or '1'}: {print_expr(self)})"


def expr_compose(f: Expr, g: Expr) -> Expr:
    """f after g."""
    if f.src != g.dst:
        raise TypeMismatch(f"cannot compose: source {f.src or '1'!r} of the outer map differs from target {g.dst or '1'!r} of the inner map")
    out = {}
    for s1, c1 in g.terms.items():
        for s2, c2 in f.terms.items():
            stack = s1 + s2
            out[stack] = out.get(stack, ZERO) + c1 * c2
    return Expr(g.src, f.dst, out)


def expr_tensor(f: Expr, g: Expr) -> Expr:
    """(f (x) 1) o (1 (x) g): the layers of g sit below the layers of f."""
    out = {}
    for sf, cf in f.terms.items():
        for sg, cg in g.terms.items():
            stack = pad_stack(sg, left=f.src) + pad_stack(sf, right=g.dst)
            out[stack] = out.get(stack, ZERO) + cf * cg
    return Expr(f.src + g.src, f.dst + g.dst, out)


def black_degree(e: Expr) -> int:
    return max((stack_dots(s) for s in e.terms), default=0)


def parity(e: Expr) -> int:
    parities = {stack_parity(s) for s in e.terms}
    if len(parities) > 1:
        raise ValueError("parity of a non-homogeneous expression is undefined")
    return parities.pop() if parities else 0


def bubble_stack(k: int, clockwise: bool = False) -> tuple:
    if clockwise:
        return (Layer("", "cup", ""),) + (Layer("", "x", "d"),) * k + (Layer("", "rcap", ""),)
    return (Layer("", "rcup", ""),) + (Layer("d", "x", ""),) * k + (Layer("", "cap", ""),)


def expand_derived(name: str):
    """Defining expression of a derived generator, or None for primitives and ls."""
    if name == "rs":
        stack = (Layer("du", "cup", ""), Layer("d", "s", "d"), Layer("", "cap", "ud"))
    elif name == "rcup":
        stack = (Layer("", "cup", ""), Layer("", "ls", ""))
    elif name == "rcap":
        stack = (Layer("", "ls", ""), Layer("", "cap", ""))
    elif name == "ds":
        stack = (Layer("dd", "cup", ""), Layer("d", "rs", "d"), Layer("", "cap", "dd"))
    elif name in ("cd", "xd"):
        stack = (Layer("d", "cup", ""), Layer("d", name[0], "d"), Layer("", "cap", "d"))
    else:
        return None
    return Expr.from_stack(GENS[name].src, stack)


# -- printing ------------------------------------------------------------------

def _layer_text(layer: Layer) -> str:
    parts = []
    if layer.left:
        parts.append(f"id({layer.left})")
    parts.append(layer.gen)
    if layer.right:
        parts.append(f"id({layer.right})")
    return " * ".join(parts)


def _stack_text(src: str, stack) -> str:
    if not stack:
        return f"id({src})"
    return " . ".join(_layer_text(l) for l in reversed(stack))


def print_expr(e: Expr) -> str:
    if not e.terms:
        return f"0 * id({e.src})" if e.src == e.dst else f"0({e.src or '1'}->{e.dst or '1'})"
    items = sorted(e.terms.items(), key=lambda sc: (len(sc[0]), _stack_text(e.src, sc[0])))
    out = ""
    for n, (stack, coeff) in enumerate(items):
        sign = "+"
        if coeff.is_real() and coeff.re < 0:
            sign, coeff = "-", -coeff
        body = _stack_text(e.src, stack)
        if len(stack) > 1:
            body = f"({body})"
        text = body if coeff == ONE else f"({coeff}) * {body}"
        if n == 0:
            out = ("- " if sign == "-" else "") + text
        else:
            out += f" {sign} {text}"
    return out


def expr_to_json(e: Expr) -> str:
    return json.dumps({
        "src": e.src,
        "dst": e.dst,
        "terms": [
            {"coeff": str(c), "layers": [list(l) for l in stack]}
            for stack, c in sorted(e.terms.items(), key=lambda sc: _stack_text(e.src, sc[0]))
        ],
    })


# -- parsing -------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, at: int | None = None):
        raise ExprSyntaxError(message, self.text, self.pos if at is None else at)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> Expr:
        start = self.pos
        e = self.compose()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            at = self.pos
            rhs = self.compose()
            try:
                e = e + rhs if op == "+" else e - rhs
            except TypeMismatch as exc:
                self.error(f"type error in sum: {exc}", at)
        if e is None:
            self.error("empty expression", start)
        return e

    def compose(self) -> Expr:
        e = self.tensor()
        while self.peek() == ".":
            self.pos += 1
            at = self.pos
            rhs = self.tensor()
            try:
                e = expr_compose(e, rhs)
            except TypeMismatch as exc:
                self.error(f"type error in composition: {exc}", at)
        return e

    def tensor(self) -> Expr:
        e = self.atom()
        while self.peek() == "*":
            self.pos += 1
            e = expr_tensor(e, self.atom())
        return e

    def _scalar_ahead(self):
        """Parenthesised scalar literal at the cursor, as (value, end) or None."""
        if self.peek() != "(":
            return None
        end = self.text.find(")", self.pos)
        if end < 0:
            return None
        inner = self.text[self.pos + 1:end]
        if "(" in inner:
            return None
        try:
            return GRat.parse(inner), end + 1
        except ValueError:
            return None

    def atom(self) -> Expr:
        ch = self.peek()
        start = self.pos
        if not ch:
            self.error("unexpected end of input")
        if ch == "-":
            self.pos += 1
            return -self.atom()
        if ch == "(":
            lit = self._scalar_ahead()
            if lit is not None:
                self.pos = lit[1]
                return Expr.scalar(lit[0])
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if ch.isdigit():
            end = self.pos
            while end < len(self.text) and (self.text[end].isdigit() or self.text[end] == "/"):
                end += 1
            literal = self.text[self.pos:end]
            self.pos = end
            if literal == "0" and self._zero_ahead():
                return self._zero_arg(start)
            try:
                return Expr.scalar(GRat.parse(literal))
            except ValueError:
                self.error(f"bad number {literal!r}", start)
        if ch.isalpha():
            end = self.pos
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "'"):
                end += 1
            name = self.text[self.pos:end]
            self.pos = end
            if name == "id":
                return Expr.identity(self._word_arg(start))
            if name in ("D", "D'"):
                k = self._int_arg(start)
                return Expr.bubble(k, clockwise=(name == "D'"))
            if name == "i":
                return Expr.scalar(GRat(0, 1))
            if name in GENS:
                return Expr.gen(name)
            self.error(f"unknown generator {name!r}", start)
        self.error(f"unexpected {ch!r}")

    def _paren_body(self, start: int) -> str:
        self.expect("(")
        end = self.text.find(")", self.pos)
        if end < 0:
            self.error("missing ')'", start)
        body = self.text[self.pos:end]
        self.pos = end + 1
        return body.strip()

    def _zero_ahead(self) -> bool:
        if self.peek() != "(":
            return False
        end = self.text.find(")", self.pos)
        return end > 0 and "->" in self.text[self.pos:end]

    def _zero_arg(self, start: int) -> Expr:
        """0(a->b): the zero morphism between two words."""
        src, _, dst = self._paren_body(start).partition("->")
        try:
            return Expr(normalize_word(src), normalize_word(dst))
        except ValueError as exc:
            self.error(str(exc), start)

    def _word_arg(self, start: int) -> str:
        body = self._paren_body(start)
        try:
            return normalize_word(body)
        except ValueError as exc:
            self.error(str(exc), start)

    def _int_arg(self, start: int) -> int:
        body = self._paren_body(start)
        if not body.isdigit():
            self.error(f"expected a dot count, got {body!r}", start)
        return int(body)


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()
