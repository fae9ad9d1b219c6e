"""
Matrices of the queer Lie superalgebra q(n) on tensor powers of its natural
module V = C^{n|n}, and the functors that send diagrams to them.

Basis of V: v_1..v_n (even) are indices 0..n-1, v_{-1}..v_{-n} (odd) are
n..2n-1. V* carries the dual basis with the same parities. A word such as
'udu' names V (x) V* (x) V, basis indexed big-endian.

  phi_eval   oriented Brauer-Clifford diagrams -> Hom_q(V^a, V^b)
  psi_eval   affine diagrams -> Hom_q(V^a (x) M, V^b (x) M), M = V^word
"""
from __future__ import annotations

import itertools
import json
import logging
from functools import lru_cache

import pandas as pd
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from .diagrams import Expr, Layer, expand_derived, stack_words
from .normalform import NormalMorphism, enumerate_keys, key_expr, nm_to_expr
from .scalars import GRat
from .utils import check_dim, normalize_word

logger = logging.getLogger("Qrep")

_ZERO = QQ_I.zero
_ONE = QQ_I.one
_I = QQ_I(0, 1)


def _dm(entries: dict, nrows: int, ncols: int) -> DomainMatrix:
    rows = {}
    for (i, j), v in entries.items():
        if v:
            rows.setdefault(i, {})[j] = v
    return DomainMatrix(rows, (nrows, ncols), QQ_I)


class SuperMatrix:
    """A DomainMatrix over Q(i) with a parity attached to every row and column."""

    __slots__ = ("mat", "rpar", "cpar")

    def __init__(self, mat: DomainMatrix, rpar: tuple, cpar: tuple):
        if mat.shape != (len(rpar), len(cpar)):
            raise ValueError(f"shape {mat.shape} does not match parities {len(rpar)}x{len(cpar)}")
        self.mat = mat
        self.rpar = tuple(rpar)
        self.cpar = tuple(cpar)

    @classmethod
    def from_entries(cls, entries: dict, rpar, cpar) -> "SuperMatrix":
        conv = {}
        for ij, v in entries.items():
            if isinstance(v, GRat):
                v = v.to_domain()
            elif isinstance(v, int):
                v = QQ_I(v)
            conv[ij] = v
        return cls(_dm(conv, len(rpar), len(cpar)), rpar, cpar)

    @classmethod
    def identity(cls, par) -> "SuperMatrix":
        return cls.from_entries({(i, i): _ONE for i in range(len(par))}, par, par)

    @classmethod
    def zeros(cls, rpar, cpar) -> "SuperMatrix":
        return cls.from_entries({}, rpar, cpar)

    @property
    def shape(self):
        return self.mat.shape

    def raw(self):
        """Nonzero entries as (i, j, QQ_I element)."""
        for i, row in self.mat.to_sdm().items():
            for j, v in row.items():
                if v:
                    yield i, j, v

    def entries(self) -> dict:
        return {(i, j): GRat.from_domain(v) for i, j, v in self.raw()}

    def entry(self, i: int, j: int) -> GRat:
        return GRat.from_domain(self.mat.to_sdm().get(i, {}).get(j, _ZERO))

    def _check(self, other: "SuperMatrix", same_shape: bool = True):
        if same_shape and (self.rpar, self.cpar) != (other.rpar, other.cpar):
            raise ValueError(f"supermatrix shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "SuperMatrix") -> "SuperMatrix":
        self._check(other)
        return SuperMatrix(self.mat.add(other.mat), self.rpar, self.cpar)

    def __sub__(self, other: "SuperMatrix") -> "SuperMatrix":
        self._check(other)
        return SuperMatrix(self.mat.sub(other.mat), self.rpar, self.cpar)

    def __neg__(self) -> "SuperMatrix":
        return SuperMatrix(self.mat.neg(), self.rpar, self.cpar)

    def scale(self, c) -> "SuperMatrix":
        c = GRat.coerce(c).to_domain() if not isinstance(c, type(_ONE)) else c
        return SuperMatrix(self.mat.mul(c), self.rpar, self.cpar)

    def __matmul__(self, other: "SuperMatrix") -> "SuperMatrix":
        if self.cpar != other.rpar:
            raise ValueError(f"cannot compose {self.shape} after {other.shape}")
        return SuperMatrix(self.mat.matmul(other.mat), self.rpar, other.cpar)

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return (self.rpar, self.cpar) == (other.rpar, other.cpar) and dict(
            ((i, j), v) for i, j, v in self.raw()) == dict(((i, j), v) for i, j, v in other.raw())

    __hash__ = None

    def is_zero(self) -> bool:
        return next(self.raw(), None) is None

    def parity(self):
        """0 or 1 for homogeneous matrices (zero counts as even), None otherwise."""
        seen = {(self.rpar[i] + self.cpar[j]) % 2 for i, j, _ in self.raw()}
        if len(seen) > 1:
            return None
        return seen.pop() if seen else 0

    def inv(self) -> "SuperMatrix":
        return SuperMatrix(self.mat.inv(), self.cpar, self.rpar)

    def rank(self) -> int:
        return self.mat.rank()

    # export
    def to_frame(self) -> pd.DataFrame:
        rows = [{"row": i, "col": j, "re": str(GRat.from_domain(v).re), "im": str(GRat.from_domain(v).im)}
                for i, j, v in sorted(self.raw(), key=lambda t: (t[0], t[1]))]
        return pd.DataFrame(rows, columns=["row", "col", "re", "im"])

    def to_coordinate_text(self) -> str:
        lines = [f"# {self.shape[0]} x {self.shape[1]}"]
        for i, j, v in sorted(self.raw(), key=lambda t: (t[0], t[1])):
            g = GRat.from_domain(v)
            lines.append(f"{i} {j} {g.re} {g.im}")
        return "\n".join(lines)

    def to_json(self) -> str:
        entries = []
        for i, j, v in sorted(self.raw(), key=lambda t: (t[0], t[1])):
            g = GRat.from_domain(v)
            entries.append([i, j, str(g.re), str(g.im)])
        return json.dumps({
            "rows": self.shape[0],
            "cols": self.shape[1],
            "row_parity": list(self.rpar),
            "col_parity": list(self.cpar),
            "entries": entries,
        })

    def __repr__(self):
        return f"SuperMatrix({self.shape[0]}x{self.shape[1]}, nnz={sum(1 for _ in self.raw())})"


def super_kron(a: SuperMatrix, b: SuperMatrix) -> SuperMatrix:
    """a (x) b with the Koszul sign: (a (x) b)(v (x) w) = (-1)^{|b||v|} av (x) bw."""
    rb, cb = len(b.rpar), len(b.cpar)
    out = {}
    b_entries = list(b.raw())
    for i, j, va in a.raw():
        flip = a.cpar[j]
        for k, l, vb in b_entries:
            v = va * vb
            if flip and (b.rpar[k] + b.cpar[l]) % 2:
                v = -v
            out[(i * rb + k, j * cb + l)] = v
    rpar = tuple((p + q) % 2 for p in a.rpar for q in b.rpar)
    cpar = tuple((p + q) % 2 for p in a.cpar for q in b.cpar)
    return SuperMatrix(_dm(out, len(rpar), len(cpar)), rpar, cpar)


def supercommutator(a: SuperMatrix, b: SuperMatrix) -> SuperMatrix:
    pa, pb = a.parity(), b.parity()
    if pa is None or pb is None:
        raise ValueError("supercommutator needs homogeneous matrices")
    ba = b @ a
    return a @ b - (ba if pa * pb == 0 else ba.scale(-1))


class QnContext:
    """Everything that depends only on n: parities, generator matrices, caches."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        self.n = n
        self.vpar = tuple([0] * n + [1] * n)
        self._local = {}
        self._module = {}
        self._omega = {}
        self._layer = {}

    # -- words -----------------------------------------------------------------
    def parities(self, word: str) -> tuple:
        par = (0,)
        for _ in word:
            par = tuple((p + q) % 2 for p in par for q in self.vpar)
        return par

    def dim(self, word: str) -> int:
        return (2 * self.n) ** len(word)

    def weights(self, word: str) -> list:
        """Weight of every basis vector of V^word as an n-tuple."""
        out = [(0,) * self.n]
        for letter in word:
            sign = 1 if letter == "u" else -1
            nxt = []
            for w in out:
                for t in range(2 * self.n):
                    w2 = list(w)
                    w2[t % self.n] += sign
                    nxt.append(tuple(w2))
            out = nxt
        return out

    def identity(self, word: str) -> SuperMatrix:
        return SuperMatrix.identity(self.parities(word))

    # -- q(n) ------------------------------------------------------------------
    def gen_matrix(self, i: int, j: int, eps: int, tilde: bool = False) -> SuperMatrix:
        """e^eps_ij (or its partner with the odd block negated) on V, 1 <= i, j <= n."""
        n = self.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"index out of range: ({i}, {j}) for n={n}")
        if eps not in (0, 1):
            raise ValueError(f"eps must be 0 or 1, got {eps}")
        a, b = i - 1, j - 1
        sign = -1 if tilde else 1
        if eps == 0:
            entries = {(a, b): 1, (a + n, b + n): sign}
        else:
            entries = {(a + n, b): 1, (a, b + n): sign}
        return SuperMatrix.from_entries(entries, self.vpar, self.vpar)

    def clifford(self) -> SuperMatrix:
        n = self.n
        entries = {}
        for i in range(n):
            entries[(i + n, i)] = _I
            entries[(i, i + n)] = -_I
        return SuperMatrix.from_entries(entries, self.vpar, self.vpar)

    def dual(self, x: SuperMatrix) -> SuperMatrix:
        px = x.parity()
        if px is None:
            raise ValueError("dual action needs a homogeneous element")
        out = {}
        for j, i, v in x.raw():
            out[(i, j)] = v if px and self.vpar[j] else -v
        return SuperMatrix.from_entries(out, self.vpar, self.vpar)

    def _element(self, x) -> SuperMatrix:
        if isinstance(x, SuperMatrix):
            return x
        eps, i, j = x
        return self.gen_matrix(i, j, eps)

    def module_matrix(self, x, word: str) -> SuperMatrix:
        """Action of x (a (eps, i, j) triple or a matrix on V) on V^word."""
        if isinstance(x, tuple):
            key = (x, word)
            hit = self._module.get(key)
            if hit is None:
                hit = self._module_matrix(self._element(x), word)
                self._module[key] = hit
            return hit
        return self._module_matrix(x, word)

    def _module_matrix(self, x: SuperMatrix, word: str) -> SuperMatrix:
        if not word:
            return SuperMatrix.zeros((0,), (0,))
        check_dim(self.dim(word), f"V^{word}")
        first = x if word[0] == "u" else self.dual(x)
        if len(word) == 1:
            return first
        rest = word[1:]
        return super_kron(first, self.identity(rest)) + super_kron(self.identity(word[0]), self._module_matrix(x, rest))

    def omega(self, word: str) -> SuperMatrix:
        """Casimir tensor sum_ij e~^0_ij (x) e^0_ji + e~^1_ij (x) e^1_ji on V (x) V^word."""
        hit = self._omega.get(word)
        if hit is not None:
            return hit
        out = SuperMatrix.zeros(self.parities("u" + word), self.parities("u" + word))
        if word:
            for i, j in itertools.product(range(1, self.n + 1), repeat=2):
                for eps in (0, 1):
                    out = out + super_kron(self.gen_matrix(i, j, eps, tilde=True), self.module_matrix((eps, j, i), word))
        self._omega[word] = out
        return out

    # -- diagrams --------------------------------------------------------------
    def local(self, gen: str) -> SuperMatrix:
        """Matrix of a dot-free generator on its own source."""
        hit = self._local.get(gen)
        if hit is not None:
            return hit
        n2 = 2 * self.n
        if gen == "cup":
            m = SuperMatrix.from_entries({(i * n2 + i, 0): 1 for i in range(n2)}, self.parities("ud"), (0,))
        elif gen == "cap":
            m = SuperMatrix.from_entries({(0, i * n2 + i): 1 for i in range(n2)}, (0,), self.parities("du"))
        elif gen == "s":
            entries = {}
            for a, b in itertools.product(range(n2), repeat=2):
                entries[(b * n2 + a, a * n2 + b)] = -1 if self.vpar[a] and self.vpar[b] else 1
            par = self.parities("uu")
            m = SuperMatrix.from_entries(entries, par, par)
        elif gen == "c":
            m = self.clifford()
        elif gen == "ls":
            m = self.local("rs").inv()
        elif gen in ("x", "xd"):
            raise ValueError(f"{gen} has no matrix without a module")
        else:
            m = self.eval_expr(expand_derived(gen), "")
        self._local[gen] = m
        return m

    def layer_matrix(self, layer: Layer, module: str = "") -> SuperMatrix:
        key = (layer, module)
        hit = self._layer.get(key)
        if hit is not None:
            return hit
        if layer.gen == "x":
            m = super_kron(self.identity(layer.left), self.omega(layer.right + module))
        elif layer.gen == "xd":
            stack = tuple(Layer(layer.left + l.left, l.gen, l.right + layer.right)
                          for l in next(iter(expand_derived("xd").terms)))
            m = self.eval_stack(layer.src, stack, module)
        else:
            inner = super_kron(self.local(layer.gen), self.identity(layer.right + module))
            m = super_kron(self.identity(layer.left), inner)
        self._layer[key] = m
        return m

    def eval_stack(self, src: str, stack, module: str = "") -> SuperMatrix:
        words = stack_words(src, stack)
        check_dim(max(self.dim(w + module) for w in words), "evaluation")
        out = self.identity(src + module)
        for layer in stack:
            out = self.layer_matrix(layer, module) @ out
        return out

    def eval_expr(self, e: Expr, module: str = "") -> SuperMatrix:
        out = SuperMatrix.zeros(self.parities(e.dst + module), self.parities(e.src + module))
        for stack, coeff in e.terms.items():
            out = out + self.eval_stack(e.src, stack, module).scale(coeff)
        return out


@lru_cache(maxsize=8)
def context(n: int) -> QnContext:
    return QnContext(n)


def _as_expr(e) -> Expr:
    if isinstance(e, NormalMorphism):
        return nm_to_expr(e)
    if isinstance(e, Expr):
        return e
    raise TypeError(f"expected Expr or NormalMorphism, got {type(e).__name__}")


def psi_eval(n: int, e, module: str = "") -> SuperMatrix:
    """Image of an affine diagram acting on V^a (x) M with M = V^module."""
    module = normalize_word(module)
    ctx = context(n)
    m = ctx.eval_expr(_as_expr(e), module)
    logger.debug("psi n=%d module=%r -> %r", n, module, m)
    return m


def phi_eval(n: int, e) -> SuperMatrix:
    """Image of a dot-free diagram in Hom_q(V^a, V^b)."""
    if isinstance(e, NormalMorphism):
        for key, poly in e.terms.items():
            if key.dots or not poly.is_constant():
                raise ValueError("phi is defined on dot-free diagrams with scalar coefficients")
    elif isinstance(e, Expr):
        if any(l.gen in ("x", "xd") for stack in e.terms for l in stack):
            raise ValueError("phi is defined on dot-free diagrams; use psi for dots")
    return psi_eval(n, e, "")


# -- central elements ----------------------------------------------------------

def sgn(eps: tuple) -> int:
    """Sign attached to (eps_k, ..., eps_1)."""
    if len(eps) <= 1:
        return 1
    head, tail = eps[0], eps[1:]
    return (-1) ** ((head + 1) * sum(tail)) * sgn(tail)


def sgn_closed(eps: tuple) -> int:
    k = len(eps)

    def at(m):
        return eps[k - m]

    p = 1 if k % 2 == 0 else 2
    total = sum(at(m) for m in range(p, k, 2))
    total += sum(at(r) * at(s) for r in range(1, k + 1) for s in range(r + 1, k + 1))
    return (-1) ** total


def central_element_matrix(n: int, k: int, word: str, allow_even: bool = False) -> SuperMatrix:
    """z_k acting on V^word. z_k vanishes for even k."""
    word = normalize_word(word)
    ctx = context(n)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    par = ctx.parities(word)
    if k % 2 == 0:
        if not allow_even:
            raise ValueError(f"z_{k}: even k gives zero; pass allow_even to accept")
        return SuperMatrix.zeros(par, par)
    out = SuperMatrix.zeros(par, par)
    for eps in itertools.product((0, 1), repeat=k):
        if sum(eps) % 2:
            continue
        sign = sgn(eps)
        # eps = (eps_k, ..., eps_1); factor m is e^{eps_m}_{i_{m-1}, i_m} with i_0 = i_k
        for idx in itertools.product(range(1, n + 1), repeat=k):
            # idx = (i_1, ..., i_k)
            prod = ctx.identity(word)
            for m in range(1, k + 1):
                left = idx[m - 2] if m > 1 else idx[k - 1]
                prod = ctx.module_matrix((eps[k - m], left, idx[m - 1]), word) @ prod
            out = out + (prod if sign > 0 else -prod)
    return out.scale(2)


# -- Schur-Weyl ----------------------------------------------------------------

def _generators(n: int) -> list:
    gens = [(0, i, i + 1) for i in range(1, n)] + [(0, i + 1, i) for i in range(1, n)]
    gens.append((1, 1, 1))
    return gens


def commutant_dim(n: int, word: str) -> int:
    """dim End_q(V^word), both parities."""
    word = normalize_word(word)
    ctx = context(n)
    check_dim(ctx.dim(word), f"V^{word}")
    weights = ctx.weights(word)
    par = ctx.parities(word)
    blocks = {}
    for idx, w in enumerate(weights):
        blocks.setdefault(w, []).append(idx)
    mats = []
    for g in _generators(n):
        x = ctx.module_matrix(g, word)
        rows, cols = {}, {}
        for i, j, v in x.raw():
            rows.setdefault(i, []).append((j, v))
            cols.setdefault(j, []).append((i, v))
        mats.append((g[0], rows, cols))

    total = 0
    for p in (0, 1):
        unknowns = [(r, c) for members in blocks.values() for r in members for c in members
                    if (par[r] + par[c]) % 2 == p]
        if not unknowns:
            continue
        col_of = {u: t for t, u in enumerate(unknowns)}
        eq_rows = {}
        for gi, (px, rows, cols) in enumerate(mats):
            s = -1 if p and px else 1
            for (r, k), t in col_of.items():
                # M X term: M[r,k] X[k,c]
                for c, v in rows.get(k, ()):
                    row = eq_rows.setdefault((gi, r, c), {})
                    row[t] = row.get(t, _ZERO) + v
                # X M term: X[r',r] M[r,k] with (r, k) playing (k, c')
                for r2, v in cols.get(r, ()):
                    row = eq_rows.setdefault((gi, r2, k), {})
                    row[t] = row.get(t, _ZERO) - (v if s > 0 else -v)
        dense = {}
        for e, (key, row) in enumerate(eq_rows.items()):
            clean = {t: v for t, v in row.items() if v}
            if clean:
                dense[e] = clean
        rank = DomainMatrix(dense, (max(len(eq_rows), 1), len(unknowns)), QQ_I).rank() if dense else 0
        logger.debug("commutant n=%d word=%r parity=%d unknowns=%d rank=%d", n, word, p, len(unknowns), rank)
        total += len(unknowns) - rank
    return total


def phi_rank(n: int, word: str) -> int:
    """Rank of phi on the dot-free basis of End(word)."""
    word = normalize_word(word)
    rows = {}
    width = context(n).dim(word) ** 2
    keys = list(enumerate_keys(word, word, max_dots=0))
    for t, key in enumerate(keys):
        m = phi_eval(n, key_expr(key))
        dim = m.shape[1]
        row = {i * dim + j: v for i, j, v in m.raw()}
        if row:
            rows[t] = row
    if not rows:
        return 0
    return DomainMatrix(rows, (len(keys), width), QQ_I).rank()


# -- module-level entry points -------------------------------------------------

def gen_matrix(n: int, kind: str, i: int, j: int, eps: int) -> SuperMatrix:
    """kind 'e' or 'et' (the tilde partner)."""
    if kind not in ("e", "et"):
        raise ValueError(f"kind must be 'e' or 'et', got {kind!r}")
    return context(n).gen_matrix(i, j, eps, tilde=kind == "et")


def module_matrix(n: int, x, word: str) -> SuperMatrix:
    return context(n).module_matrix(x, normalize_word(word))


def casimir_matrix(n: int, rest: str) -> SuperMatrix:
    return context(n).omega(normalize_word(rest))
