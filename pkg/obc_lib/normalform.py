"""
Normal forms in the affine oriented Brauer-Clifford category.

A NormalKey is a normally ordered diagram without bubbles: a matching of
strand starts to strand ends, a Clifford bit and a dot count per strand.
A NormalMorphism maps keys to BubblePoly coefficients (bubbles sit to the
right of the key).

Endpoints are (side, pos) with side 0 = bottom, 1 = top. A strand starts at
a bottom 'u' or a top 'd' and ends at a top 'u' or a bottom 'd'.

Rewriting works on whole stacks:
  1. trace every strand and closed loop through the stack;
  2. a loop is cut open at its lowest cup, the result is normalized and
     closed again with a partial trace;
  3. a black dot with a crossing behind it on its strand is moved back
     through that crossing (two correction terms with one dot fewer);
  4. otherwise the stack is read out as +-realize(key).
"""
from __future__ import annotations

import json
import logging
import sys
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from itertools import permutations, product

from .diagrams import (
    CAPS,
    CUPS,
    GENS,
    Expr,
    Layer,
    TypeMismatch,
    bubble_stack,
    cross_for,
    expr_compose,
    expr_tensor,
    pad_stack,
    stack_words,
)
from .scalars import BubblePoly, GRat, bubble_monomials, delta_prime
from .utils import check_dots

logger = logging.getLogger("Normalize")

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

BOTTOM, TOP = 0, 1
STRATEGIES = ("global", "fold", "fold-top")

STATS = Counter()
_CACHE: dict = {}
_SLIDE_CACHE: dict = {}
_REALIZED: dict = {}
_caching = True

# (crossing, strand) -> (alpha, beta):
#   dot after the crossing = dot before + alpha * smoothing + beta * smoothing with two c's
# P joins bottom-left to top-right, Q joins bottom-right to top-left.
_DOT_PAST = {
    ("s", "Q"): (1, -1),
    ("s", "P"): (-1, -1),
    ("rs", "P"): (1, 1),
    ("rs", "Q"): (-1, 1),
    ("ls", "Q"): (-1, -1),
    ("ls", "P"): (1, -1),
    ("ds", "Q"): (1, 1),
    ("ds", "P"): (-1, 1),
}


@dataclass(frozen=True, order=True)
class NormalKey:
    src: str
    dst: str
    strands: tuple  # sorted ((start, end, cliff, dots), ...)

    @property
    def dots(self) -> int:
        return sum(s[3] for s in self.strands)

    @property
    def parity(self) -> int:
        return sum(s[2] for s in self.strands) % 2

    def strand_at(self, endpoint):
        for st in self.strands:
            if endpoint in (st[0], st[1]):
                return st
        raise KeyError(endpoint)

    def __str__(self):
        parts = []
        for start, end, cliff, dots in self.strands:
            text = f"{'bt'[start[0]]}{start[1]}>{'bt'[end[0]]}{end[1]}"
            if cliff:
                text += " c"
            if dots:
                text += f" x^{dots}"
            parts.append(text)
        return "[" + " | ".join(parts) + "]"

    def to_dict(self) -> dict:
        return {
            "src": self.src,
            "dst": self.dst,
            "matching": [[list(s[0]), list(s[1])] for s in self.strands],
            "cliff": [s[2] for s in self.strands],
            "dots": [s[3] for s in self.strands],
        }


def identity_key(word: str) -> NormalKey:
    strands = []
    for pos, ch in enumerate(word):
        if ch == "u":
            strands.append(((BOTTOM, pos), (TOP, pos), 0, 0))
        else:
            strands.append(((TOP, pos), (BOTTOM, pos), 0, 0))
    return NormalKey(word, word, tuple(sorted(strands)))


def _acc(out: dict, items, factor=1):
    for key, poly in items:
        total = out.get(key)
        total = poly * factor if total is None else total + poly * factor
        if total:
            out[key] = total
        else:
            out.pop(key, None)
    return out


class NormalMorphism:
    __slots__ = ("src", "dst", "terms")

    def __init__(self, src: str, dst: str, terms=None):
        self.src = src
        self.dst = dst
        clean = {}
        for key, poly in (terms or {}).items():
            if (key.src, key.dst) != (src, dst):
                raise TypeMismatch(f"key {key} does not have type {src!r}->{dst!r}")
            if not isinstance(poly, BubblePoly):
                poly = BubblePoly.const(GRat.coerce(poly))
            if poly:
                clean[key] = poly
        self.terms = clean

    @classmethod
    def identity(cls, word: str) -> "NormalMorphism":
        return cls(word, word, {identity_key(word): BubblePoly.const(1)})

    @classmethod
    def from_items(cls, src: str, dst: str, items) -> "NormalMorphism":
        return cls(src, dst, _acc({}, items))

    def items(self):
        return tuple(self.terms.items())

    def _check_same(self, other):
        if (self.src, self.dst) != (other.src, other.dst):
            raise TypeMismatch(f"cannot add {self.src!r}->{self.dst!r} and {other.src!r}->{other.dst!r}")

    def __add__(self, other):
        self._check_same(other)
        return NormalMorphism(self.src, self.dst, _acc(dict(self.terms), other.items()))

    def __neg__(self):
        return NormalMorphism(self.src, self.dst, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "NormalMorphism":
        """Multiply by a scalar or by a bubble polynomial."""
        return NormalMorphism(self.src, self.dst, {k: p * factor for k, p in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, NormalMorphism):
            return NotImplemented
        return (self.src, self.dst, self.terms) == (other.src, other.dst, other.terms)

    def __hash__(self):
        return hash((self.src, self.dst, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def black_degree(self) -> int:
        return max((k.dots + p.degree() for k, p in self.terms.items()), default=0)

    def parities(self) -> set:
        return {k.parity for k in self.terms}

    def is_integral(self) -> bool:
        return all(p.is_integral() for p in self.terms.values())

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for key in sorted(self.terms, key=str):
            poly = self.terms[key]
            if poly == 1:
                out.append(str(key))
            else:
                out.append(f"({poly}) * {key}")
        return " + ".join(out)

    def __repr__(self):
        return f"NormalMorphism({self.src or '1'}->{self.dst or '1'}: {self})"

    def to_json(self) -> str:
        return json.dumps({
            "src": self.src,
            "dst": self.dst,
            "terms": [
                {"key": key.to_dict(), "coeff": str(self.terms[key])}
                for key in sorted(self.terms, key=str)
            ],
        })


# -- cache control -------------------------------------------------------------

@contextmanager
def caching(enabled: bool):
    """Run a block with the rewrite cache switched on or off."""
    global _caching
    previous = _caching
    _caching = enabled
    try:
        yield
    finally:
        _caching = previous


def clear_cache():
    _CACHE.clear()
    _SLIDE_CACHE.clear()
    _REALIZED.clear()
    STATS.clear()


# -- canonical representative ---------------------------------------------------

def _sort_columns(word: str, keys: list, layers: list) -> str:
    keys = list(keys)
    changed = True
    while changed:
        changed = False
        for t in range(len(keys) - 1):
            if keys[t] > keys[t + 1]:
                layers.append(Layer(word[:t], cross_for(word[t], word[t + 1]), word[t + 2:]))
                word = word[:t] + word[t + 1] + word[t] + word[t + 2:]
                keys[t], keys[t + 1] = keys[t + 1], keys[t]
                changed = True
    return word


def _core(key: NormalKey, partner: dict) -> list:
    def other(ep):
        st = partner[ep]
        return st[1] if st[0] == ep else st[0]

    src, dst = key.src, key.dst
    caps = sorted({tuple(sorted((p, other((BOTTOM, p))[1]))) for p in range(len(src)) if other((BOTTOM, p))[0] == BOTTOM})
    rank = {pair: r for r, pair in enumerate(caps)}
    col_keys = []
    for p in range(len(src)):
        side, q = other((BOTTOM, p))
        if side == TOP:
            col_keys.append((0, q, 0))
        else:
            pair = tuple(sorted((p, q)))
            col_keys.append((1, rank[pair], 0 if p == pair[0] else 1))
    layers: list = []
    word = _sort_columns(src, col_keys, layers)
    through = sorted(k[1] for k in col_keys if k[0] == 0)
    for _ in caps:
        t = len(word) - 2
        layers.append(Layer(word[:t], "cap" if word[t] == "d" else "rcap", ""))
        word = word[:t]
    cups = sorted({tuple(sorted((p, other((TOP, p))[1]))) for p in range(len(dst)) if other((TOP, p))[0] == TOP})
    top_keys = list(through)
    for a, b in cups:
        gen = "cup" if dst[a] == "u" else "rcup"
        layers.append(Layer(word, gen, ""))
        word += GENS[gen].dst
        top_keys += [a, b]
    _sort_columns(word, top_keys, layers)
    return layers


def realize(key: NormalKey) -> tuple:
    """The five-band stack representing a key: white dots at bottom ends,
    black dots at bottom starts, the core, black dots at top starts, white
    dots at top ends."""
    hit = _REALIZED.get(key)
    if hit is not None:
        return hit
    src, dst = key.src, key.dst
    partner = {}
    for st in key.strands:
        partner[st[0]] = st
        partner[st[1]] = st
    layers = []
    for p, ch in enumerate(src):
        if ch == "d" and partner[(BOTTOM, p)][2]:
            layers.append(Layer(src[:p], "cd", src[p + 1:]))
    for p, ch in enumerate(src):
        if ch == "u":
            layers.extend([Layer(src[:p], "x", src[p + 1:])] * partner[(BOTTOM, p)][3])
    layers.extend(_core(key, partner))
    for p, ch in enumerate(dst):
        if ch == "d":
            layers.extend([Layer(dst[:p], "xd", dst[p + 1:])] * partner[(TOP, p)][3])
    for p, ch in enumerate(dst):
        if ch == "u" and partner[(TOP, p)][2]:
            layers.append(Layer(dst[:p], "c", dst[p + 1:]))
    out = tuple(layers)
    _REALIZED[key] = out
    return out


def key_expr(key: NormalKey) -> Expr:
    return Expr.from_stack(key.src, realize(key))


def bubble_expr(mono: tuple) -> Expr:
    out = Expr.identity("")
    for j, e in enumerate(mono):
        for _ in range(e):
            out = expr_compose(Expr.from_stack("", bubble_stack(2 * j + 1)), out)
    return out


def nm_to_expr(m: NormalMorphism) -> Expr:
    """Re-expand a normal morphism: realize(key) with its bubbles to the right."""
    out = Expr(m.src, m.dst)
    for key, poly in m.terms.items():
        base = key_expr(key)
        for mono, coeff in poly.terms.items():
            out = out + expr_tensor(base, bubble_expr(mono)).scale(coeff)
    return out


# -- tracing ---------------------------------------------------------------------

class _Path:
    __slots__ = ("start", "end", "events")

    def __init__(self, start, end, events):
        self.start = start
        self.end = end
        self.events = events


def _walk(words, stack, lv, pos, visited, closed=False):
    top = len(stack)
    origin = (lv, pos)
    events = []
    while True:
        visited.add((lv, pos))
        if words[lv][pos] == "u":
            if lv == top:
                return events, (TOP, pos)
            layer = stack[lv]
            spec = GENS[layer.gen]
            p, ws, wd = len(layer.left), len(spec.src), len(spec.dst)
            if pos < p:
                nxt = (lv + 1, pos)
            elif pos >= p + ws:
                nxt = (lv + 1, pos - ws + wd)
            else:
                o = pos - p
                if spec.dot:
                    events.append(("c" if spec.odd else "x", lv))
                    nxt = (lv + 1, pos)
                elif layer.gen in CAPS:
                    nxt = (lv, p + 1 - o)
                else:
                    events.append(("X", lv, "P" if o == 0 else "Q", "bottom", p + o))
                    nxt = (lv + 1, p + 1 - o)
        else:
            if lv == 0:
                return events, (BOTTOM, pos)
            layer = stack[lv - 1]
            spec = GENS[layer.gen]
            p, ws, wd = len(layer.left), len(spec.src), len(spec.dst)
            if pos < p:
                nxt = (lv - 1, pos)
            elif pos >= p + wd:
                nxt = (lv - 1, pos - wd + ws)
            else:
                o = pos - p
                if spec.dot:
                    events.append(("c" if spec.odd else "x", lv - 1))
                    nxt = (lv - 1, pos)
                elif layer.gen in CUPS:
                    events.append(("cup", lv - 1, p))
                    nxt = (lv, p + 1 - o)
                else:
                    events.append(("X", lv - 1, "Q" if o == 0 else "P", "top", p + o))
                    nxt = (lv - 1, p + 1 - o)
        if closed and nxt == origin:
            return events, None
        lv, pos = nxt


def _trace(words, stack):
    top = len(stack)
    visited: set = set()
    paths = []
    starts = [((0, p), (BOTTOM, p)) for p, ch in enumerate(words[0]) if ch == "u"]
    starts += [((top, p), (TOP, p)) for p, ch in enumerate(words[top]) if ch == "d"]
    for (lv, pos), start in starts:
        events, end = _walk(words, stack, lv, pos, visited)
        paths.append(_Path(start, end, events))
    loops = []
    for lv, word in enumerate(words):
        for pos in range(len(word)):
            if (lv, pos) not in visited:
                events, _ = _walk(words, stack, lv, pos, visited, closed=True)
                loops.append(events)
    return paths, loops


# -- rewriting ---------------------------------------------------------------------

def _smoothings(layer: Layer):
    left, right = layer.left, layer.right
    gen = layer.gen
    if gen in ("s", "ds"):
        dot = "c" if gen == "s" else "cd"
        letter = "u" if gen == "s" else "d"
        return [], [Layer(left + letter, dot, right), Layer(left, dot, letter + right)]
    if gen == "rs":
        s = [Layer(left, "cap", right), Layer(left, "cup", right)]
        return s, [Layer(left + "d", "c", right)] + s + [Layer(left, "c", "d" + right)]
    s = [Layer(left, "rcap", right), Layer(left, "rcup", right)]
    return s, [Layer(left, "c", "d" + right)] + s + [Layer(left + "d", "c", right)]


def _misplaced_dot(paths):
    for path in paths:
        crossing, whites = None, 0
        for ev in path.events:
            if ev[0] == "X":
                crossing, whites = ev, 0
            elif ev[0] == "c":
                whites += 1
            elif ev[0] == "x" and crossing is not None:
                return ev[1], crossing, whites
    return None


def _move_dot(words, stack, hx, crossing, whites):
    _, h, role, leg, col = crossing
    layer = stack[h]
    sign = -1 if whites % 2 else 1
    rest = list(stack)
    del rest[hx]
    hh = h if hx > h else h - 1
    if leg == "bottom":
        moved = Layer(words[h][:col], "x", words[h][col + 1:])
        main = rest[:hh] + [moved] + rest[hh:]
    else:
        moved = Layer(words[h + 1][:col], "xd", words[h + 1][col + 1:])
        main = rest[:hh + 1] + [moved] + rest[hh + 1:]
    alpha, beta = _DOT_PAST[(layer.gen, role)]
    smooth, smooth_cc = _smoothings(layer)
    return [
        (tuple(main), sign),
        (tuple(rest[:hh] + smooth + rest[hh + 1:]), sign * alpha),
        (tuple(rest[:hh] + smooth_cc + rest[hh + 1:]), sign * beta),
    ]


def _readout(src, dst, paths):
    sign = 1
    strands = []
    groups = []
    for path in paths:
        blacks = sum(1 for ev in path.events if ev[0] == "x")
        seen, whites = 0, []
        for ev in path.events:
            if ev[0] == "x":
                seen += 1
            elif ev[0] == "c":
                whites.append(ev[1])
                if (blacks - seen) % 2:
                    sign = -sign
        m = len(whites)
        if path.end[0] == BOTTOM:
            # stacked on a downward segment: c_d^2 = -1
            whites.reverse()
            if (m // 2) % 2:
                sign = -sign
        groups.append((path.end, whites))
        strands.append((path.start, path.end, m % 2, check_dots(blacks)))
    order = [h for _, group in sorted(groups) for h in group]
    inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    if inversions % 2:
        sign = -sign
    return NormalKey(src, dst, tuple(sorted(strands))), sign


def _cut_loop(src, words, stack, events):
    _, i, q = min((ev for ev in events if ev[0] == "cup"), key=lambda ev: (ev[1], ev[2]))
    eps = GENS[stack[i].gen].dst[0]
    padded = list(pad_stack(stack, left=eps))
    w = eps + words[i + 1]
    swaps = []
    for t in list(range(q, -1, -1)) + list(range(1, q + 1)):
        swaps.append(Layer(w[:t], cross_for(w[t], w[t + 1]), w[t + 2:]))
        w = w[:t] + w[t + 1] + w[t] + w[t + 2:]
    opened = tuple(padded[:i + 1] + swaps + padded[i + 1:])
    out: dict = {}
    for key, poly in _normalize_stack(eps + src, opened):
        _acc(out, _trace_key(key, eps), poly)
    return out


def eval_loop(orientation: str, whites: int, blacks: int, sign: int = 1) -> BubblePoly:
    if orientation not in ("ccw", "cw"):
        raise ValueError(f"orientation must be 'ccw' or 'cw', got {orientation!r}")
    if whites % 2 or blacks % 2 == 0:
        return BubblePoly()
    value = BubblePoly.delta(blacks) if orientation == "ccw" else delta_prime(blacks)
    return value * sign


def _trace_key(key: NormalKey, eps: str):
    """Partial trace of realize(key) over its leftmost strand."""
    src, dst = key.src[1:], key.dst[1:]
    closing = ((BOTTOM, 0), (TOP, 0)) if eps == "u" else ((TOP, 0), (BOTTOM, 0))
    for st in key.strands:
        if (st[0], st[1]) != closing:
            continue
        bubble = eval_loop("ccw" if eps == "u" else "cw", st[2], st[3])
        if not bubble:
            return ()
        rest = tuple(
            Layer(l.left[1:], l.gen, l.right)
            for l in realize(key)
            if not (l.left == "" and GENS[l.gen].dot)
        )
        return _compose_items(src, _normalize_stack(src, rest), _slide(bubble, src))
    if eps == "u":
        stack = (Layer("", "rcup", src),) + pad_stack(realize(key), left="d") + (Layer("", "cap", dst),)
    else:
        stack = (Layer("", "cup", src),) + pad_stack(realize(key), left="u") + (Layer("", "rcap", dst),)
    return _normalize_stack(src, stack)


def _normalize_stack(src: str, stack: tuple):
    """Basis expansion of one stack as a tuple of (key, BubblePoly)."""
    memo = (src, stack)
    if _caching:
        hit = _CACHE.get(memo)
        if hit is not None:
            STATS["cache_hits"] += 1
            return hit
    STATS["stacks"] += 1
    words = stack_words(src, stack)
    paths, loops = _trace(words, stack)
    if loops:
        if not any(l.gen in ("x", "xd") for l in stack):
            out = {}
        else:
            STATS["loop_cuts"] += 1
            out = _cut_loop(src, words, stack, loops[0])
    else:
        hit = _misplaced_dot(paths)
        if hit is not None:
            STATS["dot_moves"] += 1
            out = {}
            for new_stack, coeff in _move_dot(words, stack, *hit):
                _acc(out, _normalize_stack(src, new_stack), coeff)
        else:
            key, sign = _readout(src, words[-1], paths)
            out = {key: BubblePoly.const(sign)}
    result = tuple(out.items())
    if _caching:
        _CACHE[memo] = result
    return result


# -- bubbles past strands ------------------------------------------------------------

def _slide_delta(k: int, letter: str):
    """D_k (x) 1_letter rewritten with the bubble on the right."""
    memo = (k, letter)
    if _caching and memo in _SLIDE_CACHE:
        return _SLIDE_CACHE[memo]
    out = _acc({}, [(identity_key(letter), BubblePoly.delta(k))])
    lower = cross_for("u", letter)
    upper = cross_for(letter, "u")
    alpha, beta = _DOT_PAST[(lower, "P")]
    smooth, smooth_cc = _smoothings(Layer("d", lower, ""))
    for j in range(k):
        below = [Layer("", "rcup", letter)] + [Layer("d", "x", letter)] * j
        above = [Layer("d" + letter, "x", "")] * (k - 1 - j) + [Layer("d", upper, ""), Layer("", "cap", letter)]
        _acc(out, _normalize_stack(letter, tuple(below + smooth + above)), -alpha)
        _acc(out, _normalize_stack(letter, tuple(below + smooth_cc + above)), -beta)
    result = tuple(out.items())
    if _caching:
        _SLIDE_CACHE[memo] = result
    return result


def _slide_monomial(mono: tuple, letter: str):
    items = ((identity_key(letter), BubblePoly.const(1)),)
    for k in BubblePoly.indices(mono):
        items = _compose_items(letter, _slide_delta(k, letter), items)
    return items


def _slide(poly: BubblePoly, word: str):
    if not word:
        return ((identity_key(""), poly),) if poly else ()
    head, rest = word[0], word[1:]
    out: dict = {}
    for mono, coeff in poly.terms.items():
        for key, q in _slide_monomial(mono, head):
            tail = _slide(q, rest)
            _acc(out, _key_tensor_items(key, tail), coeff)
    return tuple(out.items())


def slide_bubbles(poly: BubblePoly, word: str) -> NormalMorphism:
    """poly (x) 1_word with the bubbles moved to the right of the strands."""
    return NormalMorphism.from_items(word, word, _slide(poly, word))


# -- composition and tensor ---------------------------------------------------------

def _compose_items(src: str, f_items, g_items):
    out: dict = {}
    for kg, pg in g_items:
        for kf, pf in f_items:
            _acc(out, _normalize_stack(src, realize(kg) + realize(kf)), pf * pg)
    return tuple(out.items())


def _key_tensor_items(key: NormalKey, items):
    out: dict = {}
    for other, poly in items:
        stack = pad_stack(realize(other), left=key.src) + pad_stack(realize(key), right=other.dst)
        _acc(out, _normalize_stack(key.src + other.src, stack), poly)
    return tuple(out.items())


def nm_compose(f: NormalMorphism, g: NormalMorphism) -> NormalMorphism:
    """f after g."""
    if f.src != g.dst:
        raise TypeMismatch(f"cannot compose: {f.src or '1'!r} differs from {g.dst or '1'!r}")
    return NormalMorphism.from_items(g.src, f.dst, _compose_items(g.src, f.items(), g.items()))


def nm_tensor(f: NormalMorphism, g: NormalMorphism) -> NormalMorphism:
    out: dict = {}
    for kf, pf in f.terms.items():
        # pf (x) g = g o (pf (x) 1)
        inner = _compose_items(g.src, g.items(), _slide(pf, g.src))
        _acc(out, _key_tensor_items(kf, inner))
    return NormalMorphism(f.src + g.src, f.dst + g.dst, out)


# -- public normalization -------------------------------------------------------------

def normalize(e: Expr, strategy: str = "global") -> NormalMorphism:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    before = STATS["stacks"]
    out: dict = {}
    for stack, coeff in e.terms.items():
        if strategy == "global":
            items = _normalize_stack(e.src, stack)
        elif strategy == "fold":
            items = ((identity_key(e.src), BubblePoly.const(1)),)
            for layer in stack:
                step: dict = {}
                for key, poly in items:
                    _acc(step, _normalize_stack(e.src, realize(key) + (layer,)), poly)
                items = tuple(step.items())
        else:
            items = ((identity_key(e.dst), BubblePoly.const(1)),)
            words = stack_words(e.src, stack)
            for h in range(len(stack) - 1, -1, -1):
                step = {}
                for key, poly in items:
                    _acc(step, _normalize_stack(words[h], (stack[h],) + realize(key)), poly)
                items = tuple(step.items())
        _acc(out, items, coeff)
    logger.debug("normalized %d stack(s) with %s: %d new rewrite step(s), %d key(s)",
                 len(e.terms), strategy, STATS["stacks"] - before, len(out))
    return NormalMorphism(e.src, e.dst, out)


def trace_closure(m: NormalMorphism) -> NormalMorphism:
    """Partial trace over the leftmost strand, for morphisms ea -> eb."""
    if not m.src or not m.dst or m.src[0] != m.dst[0]:
        raise TypeMismatch(f"cannot close {m.src!r}->{m.dst!r} over its first strand")
    out: dict = {}
    for key, poly in m.terms.items():
        _acc(out, _trace_key(key, m.src[0]), poly)
    return NormalMorphism(m.src[1:], m.dst[1:], out)


# -- bases -------------------------------------------------------------------------

def strand_ends(a: str, b: str):
    starts = [(BOTTOM, p) for p, ch in enumerate(a) if ch == "u"] + [(TOP, p) for p, ch in enumerate(b) if ch == "d"]
    ends = [(TOP, p) for p, ch in enumerate(b) if ch == "u"] + [(BOTTOM, p) for p, ch in enumerate(a) if ch == "d"]
    return starts, ends


def _dot_vectors(n: int, max_total, per_strand):
    if per_strand is not None:
        bound = per_strand if max_total is None else min(per_strand, max_total + 1)
        for vec in product(range(bound), repeat=n):
            if max_total is None or sum(vec) <= max_total:
                yield vec
        return

    def rec(i, left):
        if i == n:
            yield ()
            return
        for d in range(left + 1):
            for tail in rec(i + 1, left - d):
                yield (d,) + tail

    yield from rec(0, max_total)


def enumerate_keys(a: str, b: str, max_dots: int | None = None, per_strand: int | None = None):
    """All keys a -> b with total dots <= max_dots and fewer than per_strand dots on each strand."""
    starts, ends = strand_ends(a, b)
    if len(starts) != len(ends):
        return
    n = len(starts)
    if n and max_dots is None and per_strand is None:
        raise ValueError("dotted keys are infinite without a bound on the dots")
    for perm in permutations(range(n)):
        for cliffs in product((0, 1), repeat=n):
            for dots in _dot_vectors(n, max_dots, per_strand):
                strands = tuple(sorted(
                    (starts[i], ends[perm[i]], cliffs[i], dots[i]) for i in range(n)
                ))
                yield NormalKey(a, b, strands)


def dim_filtered(a: str, b: str, k: int) -> int:
    total = 0
    for key in enumerate_keys(a, b, max_dots=k):
        total += len(bubble_monomials(k - key.dots))
    return total
