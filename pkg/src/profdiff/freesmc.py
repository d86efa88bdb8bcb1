"""The free symmetric strict monoidal category !A as a virtual category.

Objects are tuples of objects of the base category.  A morphism
``(sigma, arrows): alpha -> beta`` sends position ``i`` of ``alpha`` to
position ``sigma[i]`` of ``beta`` with ``arrows[i]: alpha[i] -> beta[sigma[i]]``.
This is the only permutation convention used anywhere in the package.

Hom-sets are exact; the arity bound only restricts which objects
``objects()`` enumerates.
"""

import threading
from itertools import product as _cartesian
from typing import NamedTuple

from .fincat import CategoryError, Functor, Opposite, Product, Sum


class _PermMor(NamedTuple):
    dom: tuple
    cod: tuple
    sigma: tuple
    arrows: tuple


class PermMor(_PermMor):
    """A morphism of !A: position i of dom goes to position sigma[i] of cod
    along arrows[i].  The hash is cached since nested morphisms are deep."""

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = self.__dict__["_h"] = tuple.__hash__(self)
        return h


class ArityBound(int):
    """Non-negative truncation level for sequence lengths."""

    def __new__(cls, n_max):
        n_max = int(n_max)
        if n_max < 0:
            raise ValueError("arity bound must be non-negative")
        return super().__new__(cls, n_max)


def depth(C):
    if isinstance(C, Bang):
        return C.depth
    if isinstance(C, Product):
        return max(depth(C.left), depth(C.right))
    if isinstance(C, Sum):
        return max(depth(p) for p in C.parts)
    if isinstance(C, Opposite):
        return depth(C.base)
    return 0


_COMPOSE_CACHE = 1_000_000


class Bang:
    """!base restricted to sequences whose size levels fit under ``limits``.

    ``levels(x)`` of a sequence is ``(len(x),) + sum of levels of entries``;
    for !!A that is ``(|phi|, |concat(phi)|)``.  ``limits`` defaults to
    ``n_max`` at every level.
    """

    def __init__(self, base, n_max, limits=None):
        self.base = base
        self.n_max = int(ArityBound(n_max))
        self.depth = 1 + depth(base)
        if limits is None:
            limits = (self.n_max,) * self.depth
        limits = tuple(int(v) for v in limits)
        if len(limits) != self.depth:
            raise ValueError(f"expected {self.depth} level limits, got {len(limits)}")
        self.limits = limits
        self._objects = None
        self._by_key = None
        self._homs = {}
        self._gens = {}
        self._comp = {}
        self._lock = threading.Lock()

    def __eq__(self, other):
        return (isinstance(other, Bang) and self.base == other.base
                and self.limits == other.limits)

    def __hash__(self):
        return hash(("Bang", self.base, self.limits))

    def __repr__(self):
        return f"Bang({self.base!r}, limits={self.limits})"

    # -- objects ---------------------------------------------------------------
    def objects(self):
        if self._objects is None:
            self._objects = self._enumerate()
        return self._objects

    def _enumerate(self):
        entries = [(e, _pad(self.base.levels(e), self.depth - 1)) for e in self.base.objects()]
        rest = self.limits[1:]
        entries = [(e, lv) for e, lv in entries if all(a <= b for a, b in zip(lv, rest))]
        by_length = [[] for _ in range(self.limits[0] + 1)]

        def extend(prefix, used):
            by_length[len(prefix)].append(tuple(prefix))
            if len(prefix) == self.limits[0]:
                return
            for e, lv in entries:
                total = tuple(a + b for a, b in zip(used, lv))
                if all(a <= b for a, b in zip(total, rest)):
                    prefix.append(e)
                    extend(prefix, total)
                    prefix.pop()

        extend([], (0,) * (self.depth - 1))
        return [x for group in by_length for x in group]

    def contains(self, x):
        if not isinstance(x, tuple) or not all(self.base.contains(e) for e in x):
            return False
        return all(a <= b for a, b in zip(self.levels(x), self.limits))

    def levels(self, x):
        out = (len(x),) + (0,) * (self.depth - 1)
        for e in x:
            lv = _pad(self.base.levels(e), self.depth - 1)
            out = (out[0],) + tuple(a + b for a, b in zip(out[1:], lv))
        return out

    def key(self, x):
        return (len(x), tuple(sorted(self.base.key(e) for e in x)))

    # -- morphisms -------------------------------------------------------------
    def hom(self, x, y):
        k = (x, y)
        found = self._homs.get(k)
        if found is None:
            found = _enumerate_hom(self.base, x, y)
            with self._lock:
                found = self._homs.setdefault(k, found)
        return found

    def identity(self, x):
        return PermMor(x, x, tuple(range(len(x))), tuple(self.base.identity(e) for e in x))

    def is_identity(self, f):
        return f == self.identity(f.dom)

    def compose(self, g, f):
        key = (g, f)
        hit = self._comp.get(key)
        if hit is not None:
            return hit
        if f.cod != g.dom:
            raise CategoryError("endpoint mismatch in !A composition")
        sigma = tuple(g.sigma[s] for s in f.sigma)
        arrows = tuple(self.base.compose(g.arrows[s], a) for s, a in zip(f.sigma, f.arrows))
        out = PermMor(f.dom, g.cod, sigma, arrows)
        if len(self._comp) > _COMPOSE_CACHE:
            self._comp.clear()
        self._comp[key] = out
        return out

    def src(self, f):
        return f.dom

    def tgt(self, f):
        return f.cod

    def generators(self, x, y):
        return tuple(f for f in self.generators_into(y) if f.dom == x)

    def generators_into(self, y):
        """Adjacent transpositions and single base generators; they generate
        every morphism, and each factorization stays among sequences with the
        same entries up to arrows, hence inside the window."""
        found = self._gens.get(y)
        if found is not None:
            return found
        n = len(y)
        base = self.base
        out = []
        for i in range(n - 1):
            x = y[:i] + (y[i + 1], y[i]) + y[i + 2:]
            sigma = tuple(range(i)) + (i + 1, i) + tuple(range(i + 2, n))
            out.append(PermMor(x, y, sigma, tuple(base.identity(e) for e in x)))
        ident = tuple(range(n))
        for i in range(n):
            for g in base.generators_into(y[i]):
                x = y[:i] + (base.src(g),) + y[i + 1:]
                if not self.contains(x):
                    continue
                arrows = tuple(g if j == i else base.identity(x[j]) for j in range(n))
                out.append(PermMor(x, y, ident, arrows))
        found = tuple(out)
        with self._lock:
            self._gens[y] = found
        return found

    def all_into(self, y):
        """Every morphism into y from an object of the window."""
        if self._by_key is None:
            by_key = {}
            for x in self.objects():
                by_key.setdefault(self.key(x), []).append(x)
            self._by_key = by_key
        out = []
        for x in self._by_key.get(self.key(y), ()):
            out.extend(self.hom(x, y))
        return tuple(out)

    def encode_object(self, x):
        return [self.base.encode_object(e) for e in x]

    def decode_object(self, v):
        return tuple(self.base.decode_object(e) for e in v)

    def encode_morphism(self, f):
        return {"dom": self.encode_object(f.dom), "cod": self.encode_object(f.cod),
                "sigma": list(f.sigma),
                "arrows": [self.base.encode_morphism(a) for a in f.arrows]}

    def decode_morphism(self, v):
        return PermMor(self.decode_object(v["dom"]), self.decode_object(v["cod"]),
                       tuple(int(s) for s in v["sigma"]),
                       tuple(self.base.decode_morphism(a) for a in v["arrows"]))


def _pad(levels, n):
    levels = tuple(levels)
    return levels + (0,) * (n - len(levels))


def _enumerate_hom(base, x, y):
    n = len(x)
    if n != len(y):
        return ()
    options = [[j for j in range(n) if base.hom(x[i], y[j])] for i in range(n)]
    out = []
    sigma = [0] * n
    used = [False] * n

    def choose(i):
        if i == n:
            arrow_sets = [base.hom(x[k], y[sigma[k]]) for k in range(n)]
            s = tuple(sigma)
            for arrows in _cartesian(*arrow_sets):
                out.append(PermMor(x, y, s, tuple(arrows)))
            return
        for j in options[i]:
            if not used[j]:
                used[j] = True
                sigma[i] = j
                choose(i + 1)
                used[j] = False

    choose(0)
    return tuple(out)


# -- operations on objects and morphisms --------------------------------------------------

def bang_objects(A, bound):
    """All sequences over A of length <= bound, in length-lexicographic order."""
    return Bang(A, bound).objects()


def bang_hom(A, alpha, beta):
    return _enumerate_hom(A, tuple(alpha), tuple(beta))


def bang_identity(A, alpha):
    return PermMor(alpha, alpha, tuple(range(len(alpha))), tuple(A.identity(e) for e in alpha))


def bang_compose(A, g, f):
    if f.cod != g.dom:
        raise CategoryError(f"endpoint mismatch: {f.cod} is not {g.dom}")
    sigma = tuple(g.sigma[s] for s in f.sigma)
    arrows = tuple(A.compose(g.arrows[s], a) for s, a in zip(f.sigma, f.arrows))
    return PermMor(f.dom, g.cod, sigma, arrows)


def concat(alpha, beta):
    return tuple(alpha) + tuple(beta)


def flatten(phi):
    out = ()
    for alpha in phi:
        out += tuple(alpha)
    return out


def concat_mor(f, g):
    """f ⊔ g, acting blockwise."""
    n = len(f.cod)
    sigma = tuple(f.sigma) + tuple(n + s for s in g.sigma)
    return PermMor(f.dom + g.dom, f.cod + g.cod, sigma, f.arrows + g.arrows)


def concat_mors(mors, empty=()):
    out = PermMor(empty, empty, (), ())
    for f in mors:
        out = concat_mor(out, f)
    return out


_FLAT = {}


def flatten_mor(F):
    """Multiplication of the 2-monad on a morphism of !!A: ⊔F : ⊔dom -> ⊔cod."""
    hit = _FLAT.get(F)
    if hit is None:
        if len(_FLAT) > _COMPOSE_CACHE:
            _FLAT.clear()
        hit = _FLAT[F] = _flatten_mor(F)
    return hit


def _flatten_mor(F):
    offsets, pos = [], 0
    for alpha in F.cod:
        offsets.append(pos)
        pos += len(alpha)
    sigma, arrows = [], []
    for i, inner in enumerate(F.arrows):
        base = offsets[F.sigma[i]]
        sigma.extend(base + s for s in inner.sigma)
        arrows.extend(inner.arrows)
    return PermMor(flatten(F.dom), flatten(F.cod), tuple(sigma), tuple(arrows))


def singleton_mor(f, src, tgt):
    return PermMor((src,), (tgt,), (0,), (f,))


def reorder(A, blocks, order):
    """Identity-arrow morphism from concat(blocks) to concat of blocks[order[k]]."""
    blocks = [tuple(b) for b in blocks]
    new_offset, pos = {}, 0
    for k in order:
        new_offset[k] = pos
        pos += len(blocks[k])
    sigma, arrows = [], []
    for i, b in enumerate(blocks):
        sigma.extend(new_offset[i] + j for j in range(len(b)))
        arrows.extend(A.identity(e) for e in b)
    return PermMor(flatten(blocks), flatten([blocks[k] for k in order]),
                   tuple(sigma), tuple(arrows))


def split_mor(A, f, sizes_dom, sizes_cod):
    """Split f: a1⊔a2⊔.. -> b1⊔b2⊔.. into blockwise parts when f respects blocks.

    Returns the list of per-block morphisms, or None when some position of
    dom block i lands outside cod block i.
    """
    def bounds(sizes):
        out, pos = [], 0
        for s in sizes:
            out.append((pos, pos + s))
            pos += s
        return out

    db, cb = bounds(sizes_dom), bounds(sizes_cod)
    parts = []
    for (d0, d1), (c0, c1) in zip(db, cb):
        sig = []
        for i in range(d0, d1):
            if not c0 <= f.sigma[i] < c1:
                return None
            sig.append(f.sigma[i] - c0)
        parts.append(PermMor(f.dom[d0:d1], f.cod[c0:c1], tuple(sig), f.arrows[d0:d1]))
    return parts


def bang_functor(F, bound=None, limits=None, dom=None, cod=None):
    """!F acting pointwise; sigma is unchanged."""
    if dom is None:
        dom = Bang(F.dom, bound if bound is not None else 0, limits)
    if cod is None:
        cod = Bang(F.cod, dom.n_max, limits)

    def ob(alpha):
        return tuple(F.ob(a) for a in alpha)

    def mor(f):
        return PermMor(ob(f.dom), ob(f.cod), f.sigma, tuple(F.mor(a) for a in f.arrows))

    return Functor(dom, cod, ob, mor)


def unit_functor(A, bound):
    """a |-> <a>, the unit A -> !A."""
    B = Bang(A, bound)
    return Functor(A, B, lambda a: (a,), lambda f: PermMor((A.src(f),), (A.tgt(f),), (0,), (f,)))


def flatten_functor(BB, B):
    """⊔ : !!A -> !A."""
    return Functor(BB, B, flatten, flatten_mor)
