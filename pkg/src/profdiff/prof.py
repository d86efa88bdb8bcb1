"""Finite-carrier profunctors and their coend calculus.

A profunctor ``F: A -> B`` stores cells ``F(b, a)`` with ``b`` an object of
``B`` (contravariant) and ``a`` an object of ``A`` (covariant), matching
``Prof[A, B] = CAT[B^op x A, Set]``.  Only nonempty cells are stored.

Actions are plain functions on elements:

    left(g, a, x)   g: b' -> b in B,  x in F(b, a)  ->  F(b', a)
    right(f, b, x)  f: a -> a' in A,  x in F(b, a)  ->  F(b, a')
"""

import builtins
from bisect import bisect_right
from collections import defaultdict
from itertools import product as _cartesian
from typing import NamedTuple

from .fincat import FinCat, Functor, Opposite, Product, Sum, identity_functor, opposite


class ProfunctorError(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    """iso_check ran out of search nodes before deciding."""


class Counterexample(NamedTuple):
    kind: str
    cell: tuple
    morphism: object
    element: object
    detail: str = ""


_INDEX_CACHE = {}


def object_index(C):
    key = id(C)
    hit = _INDEX_CACHE.get(key)
    if hit is None or hit[0] is not C:
        hit = (C, {x: i for i, x in enumerate(C.objects())})
        _INDEX_CACHE[key] = hit
    return hit[1]


def objects_by_key(C):
    cache = getattr(C, "_objects_by_key", None)
    if cache is None:
        cache = defaultdict(list)
        for x in C.objects():
            cache[C.key(x)].append(x)
        cache = dict(cache)
        try:
            C._objects_by_key = cache
        except AttributeError:
            pass
    return cache


def out_generators(C):
    """Map each object to the non-identity generators leaving it."""
    cache = getattr(C, "_out_generators", None)
    if cache is None:
        cache = defaultdict(list)
        for y in C.objects():
            for g in C.generators_into(y):
                cache[C.src(g)].append(g)
        cache = dict(cache)
        try:
            C._out_generators = cache
        except AttributeError:
            pass
    return cache


def same_category(C, D):
    return C is D or C == D


class Profunctor:
    def __init__(self, dom, cod, cells, left, right, name=None):
        self.dom, self.cod = dom, cod
        self.cells = {k: tuple(v) for k, v in cells.items() if len(v)}
        self._left, self._right = left, right
        self.name = name
        self._rows = None
        self._cols = None
        self._index = {}

    def __repr__(self):
        return f"<Profunctor {self.name or ''}: {len(self.cells)} nonempty cells>"

    def cell(self, b, a):
        return self.cells.get((b, a), ())

    def left(self, g, a, x):
        return self._left(g, a, x)

    def right(self, f, b, x):
        return self._right(f, b, x)

    def index(self, b, a, x):
        key = (b, a)
        idx = self._index.get(key)
        if idx is None:
            idx = {e: i for i, e in enumerate(self.cell(b, a))}
            self._index[key] = idx
        return idx[x]

    def row(self, b):
        """Nonempty cells F(b, -) as a dict a -> elements."""
        if self._rows is None:
            rows = defaultdict(dict)
            for (bb, a), v in self.cells.items():
                rows[bb][a] = v
            self._rows = dict(rows)
        return self._rows.get(b, {})

    def col(self, a):
        if self._cols is None:
            cols = defaultdict(dict)
            for (b, aa), v in self.cells.items():
                cols[aa][b] = v
            self._cols = dict(cols)
        return self._cols.get(a, {})

    def cardinalities(self):
        return {k: len(v) for k, v in self.cells.items()}

    def size(self):
        return builtins.sum(len(v) for v in self.cells.values())

    @classmethod
    def from_formula(cls, dom, cod, cell, left, right, pairs=None, name=None):
        """Build from a cell function; ``pairs`` limits the (b, a) candidates."""
        if pairs is None:
            pairs = ((b, a) for b in cod.objects() for a in dom.objects())
        cells = {}
        for b, a in pairs:
            elems = tuple(cell(b, a))
            if elems:
                cells[(b, a)] = elems
        return cls(dom, cod, cells, left, right, name=name)


def matching_pairs(cod, dom, cod_key, dom_key):
    """(b, a) pairs of window objects with cod_key(b) == dom_key(a)."""
    groups = defaultdict(list)
    for a in dom.objects():
        groups[dom_key(a)].append(a)
    for b in cod.objects():
        for a in groups.get(cod_key(b), ()):
            yield b, a


# -- identity, companions, conjoints ---------------------------------------------------

def companion(K, name=None):
    """K_*: X -> Y with K_*(y, x) = Y[y, Kx]."""
    X, Y = K.dom, K.cod
    pairs = matching_pairs(Y, X, Y.key, lambda x: Y.key(K.ob(x)))
    return Profunctor.from_formula(
        X, Y,
        lambda y, x: Y.hom(y, K.ob(x)),
        lambda g, x, h: Y.compose(h, g),
        lambda f, y, h: Y.compose(K.mor(f), h),
        pairs=pairs, name=name or "companion")


def conjoint(K, name=None):
    """K^*: Y -> X with K^*(x, y) = Y[Kx, y]."""
    X, Y = K.dom, K.cod
    pairs = matching_pairs(X, Y, lambda x: Y.key(K.ob(x)), Y.key)
    return Profunctor.from_formula(
        Y, X,
        lambda x, y: Y.hom(K.ob(x), y),
        lambda f, y, h: Y.compose(h, K.mor(f)),
        lambda g, x, h: Y.compose(g, h),
        pairs=pairs, name=name or "conjoint")


def hom_prof(C):
    """The identity profunctor 1_C(c', c) = C[c', c]."""
    return companion(identity_functor(C), name="1")


# -- sums, zero, tensor ----------------------------------------------------------------

def zero(A, B):
    return Profunctor(A, B, {}, _no_action, _no_action, name="0")


def _no_action(*args):
    raise ProfunctorError("the zero profunctor has no elements to act on")


def sum(F, G):  # noqa: A001 - mirrors the mathematical name
    if not (same_category(F.dom, G.dom) and same_category(F.cod, G.cod)):
        raise ProfunctorError("sum of non-parallel profunctors")
    cells = defaultdict(list)
    for k, v in F.cells.items():
        cells[k].extend((0, x) for x in v)
    for k, v in G.cells.items():
        cells[k].extend((1, x) for x in v)
    parts = (F, G)
    return Profunctor(
        F.dom, F.cod, cells,
        lambda g, a, x: (x[0], parts[x[0]].left(g, a, x[1])),
        lambda f, b, x: (x[0], parts[x[0]].right(f, b, x[1])),
        name=f"({F.name}+{G.name})")


def tensor(F, G, keep=None):
    """F ⊗ G: A x A' -> B x B' with cells F(b, a) x G(b', a').

    ``keep(b, a)`` optionally drops cells outside a window of interest.
    """
    cells = {}
    for (b, a), xs in F.cells.items():
        for (b2, a2), ys in G.cells.items():
            k = ((b, b2), (a, a2))
            if keep is None or keep(*k):
                cells[k] = tuple(_cartesian(xs, ys))
    return Profunctor(
        Product(F.dom, G.dom), Product(F.cod, G.cod), cells,
        lambda g, a, x: (F.left(g[0], a[0], x[0]), G.left(g[1], a[1], x[1])),
        lambda f, b, x: (F.right(f[0], b[0], x[0]), G.right(f[1], b[1], x[1])),
        name=f"({F.name}⊗{G.name})")


def direct_sum(F, G):
    """F ⊕ G: A + A' -> B + B'."""
    cells = {}
    for (b, a), xs in F.cells.items():
        cells[((0, b), (0, a))] = xs
    for (b, a), xs in G.cells.items():
        cells[((1, b), (1, a))] = xs
    parts = (F, G)
    return Profunctor(
        Sum(F.dom, G.dom), Sum(F.cod, G.cod), cells,
        lambda g, a, x: parts[g[0]].left(g[1], a[1], x),
        lambda f, b, x: parts[f[0]].right(f[1], b[1], x),
        name=f"({F.name}⊕{G.name})")


def op(C):
    if isinstance(C, FinCat):
        return opposite(C)
    if isinstance(C, Opposite):
        return C.base
    return Opposite(C)


def dual(F):
    """F^⊥: B^op -> A^op with F^⊥(a, b) = F(b, a)."""
    cells = {(a, b): v for (b, a), v in F.cells.items()}
    return Profunctor(op(F.cod), op(F.dom), cells,
                      lambda f, b, x: F.right(f, b, x),
                      lambda g, a, x: F.left(g, a, x),
                      name=f"{F.name}^⊥")


def unit_u(A):
    """u_A: 1 -> A ⊗ A^⊥ with u((x, y), *) = A[x, y]."""
    from .fincat import one
    I, P = one(), Product(A, op(A))
    return Profunctor.from_formula(
        I, P,
        lambda p, s: A.hom(p[0], p[1]),
        lambda g, s, m: A.compose(g[1], A.compose(m, g[0])),
        lambda f, p, m: m,
        pairs=((p, 0) for p in P.objects()), name="u")


def counit_v(A):
    """v_A: A^⊥ ⊗ A -> 1 with v(*, (y, x)) = A[y, x]."""
    from .fincat import one
    I, P = one(), Product(op(A), A)
    return Profunctor.from_formula(
        P, I,
        lambda s, p: A.hom(p[0], p[1]),
        lambda g, p, m: m,
        lambda f, s, m: A.compose(f[1], A.compose(m, f[0])),
        pairs=((0, p) for p in P.objects()), name="v")


def restrict(F, dom_functor, cod_functor, name=None):
    """F(K b', H a') along H: A' -> A and K: B' -> B."""
    H, K = dom_functor, cod_functor
    pairs = ((b, a) for b in K.dom.objects() for a in H.dom.objects())
    return Profunctor.from_formula(
        H.dom, K.dom,
        lambda b, a: F.cell(K.ob(b), H.ob(a)),
        lambda g, a, x: F.left(K.mor(g), H.ob(a), x),
        lambda f, b, x: F.right(H.mor(f), K.ob(b), x),
        pairs=pairs, name=name or f"restrict({F.name})")


# -- coend composition -----------------------------------------------------------------

class _Quotient:
    """Coend classes of one output cell, stored on integer positions."""

    __slots__ = ("blocks", "offsets", "root", "reps", "rep_root")

    def __init__(self, blocks, offsets, root):
        self.blocks = blocks      # [(b, ys, xs)]
        self.offsets = offsets    # {b: (start, len(xs), block number)}
        self.root = root          # position -> least position of its class
        self.reps = {}
        self.rep_root = {}
        for i, r in enumerate(root):
            if r == i:
                e = self.element(i)
                self.reps[i] = e
                self.rep_root[e] = i

    def element(self, i):
        starts = [self.offsets[b][0] for b, _, _ in self.blocks]
        k = bisect_right(starts, i) - 1
        b, ys, xs = self.blocks[k]
        iy, ix = divmod(i - starts[k], len(xs))
        return (b, ys[iy], xs[ix])


class Composite(Profunctor):
    """N ∘ M with cells the coend quotient; elements are least representatives
    ``(b, y, x)`` of their classes."""

    def __init__(self, N, M, quotients, name=None):
        self.outer, self.inner = N, M
        self._quotients = quotients
        cells = {k: tuple(q.reps.values()) for k, q in quotients.items()}
        super().__init__(M.dom, N.cod, cells, self._act_left, self._act_right, name=name)

    def class_of(self, c, a, b, y, x):
        q = self._quotients.get((c, a))
        hit = q.offsets.get(b) if q is not None else None
        if hit is None:
            raise ProfunctorError(
                f"pair at middle object {b!r} lies outside the composite window")
        start, nx, _ = hit
        i = start + self.outer.index(c, b, y) * nx + self.inner.index(b, a, x)
        return q.reps[q.root[i]]

    def members(self, c, a, rep):
        q = self._quotients[(c, a)]
        r = q.rep_root[rep]
        return [q.element(i) for i, ri in enumerate(q.root) if ri == r]

    def _act_left(self, g, a, rep):
        b, y, x = rep
        c2 = self.outer.cod.src(g)
        return self.class_of(c2, a, b, self.outer.left(g, b, y), x)

    def _act_right(self, f, c, rep):
        b, y, x = rep
        a2 = self.inner.dom.tgt(f)
        return self.class_of(c, a2, b, y, self.inner.right(f, b, x))


def compose(N, M, name=None):
    """N ∘ M, the coend of N(c, b) x M(b, a) over the shared middle category.

    Relations are generated by single generator morphisms of the middle
    category; union-find closes them up and the least pair (in middle-object,
    then element order) represents each class.
    """
    if not same_category(N.dom, M.cod):
        raise ProfunctorError(f"middle categories differ (bound mismatch?): {N.dom!r} vs {M.cod!r}")
    mid = M.cod
    idx = object_index(mid)
    middles = defaultdict(set)
    for (c, b) in N.cells:
        for a in M.row(b):
            middles[(c, a)].add(b)
    outs = out_generators(mid)
    quotients = {}
    # index tables of single actions, shared between output cells
    right_idx, left_idx = {}, {}
    for (c, a), S in middles.items():
        try:
            S = sorted(S, key=idx.__getitem__)
        except KeyError as exc:
            raise ProfunctorError(f"middle object {exc.args[0]!r} outside the window") from None
        blocks, offsets, total = [], {}, 0
        for k, b in enumerate(S):
            ys, xs = N.cells[(c, b)], M.cells[(b, a)]
            blocks.append((b, ys, xs))
            offsets[b] = (total, len(xs), k)
            total += len(ys) * len(xs)
        parent = list(range(total))

        def find(i):
            root = i
            while parent[root] != root:
                root = parent[root]
            while parent[i] != root:
                parent[i], i = root, parent[i]
            return root

        for b, ys, _ in blocks:
            start_b, nx_b, _ = offsets[b]
            for g in outs.get(b, ()):
                b2 = mid.tgt(g)
                hit = offsets.get(b2)
                if hit is None:
                    continue
                start2, nx2, _ = hit
                try:
                    ry = right_idx.get((c, b, g))
                    if ry is None:
                        ry = right_idx[(c, b, g)] = [N.index(c, b2, N.right(g, c, y)) for y in ys]
                    lx = left_idx.get((b, a, g))
                    if lx is None:
                        lx = left_idx[(b, a, g)] = [M.index(b, a, M.left(g, a, x2))
                                                    for x2 in M.cells[(b2, a)]]
                except KeyError:
                    raise ProfunctorError(
                        f"action of {g!r} leaves its cell while composing "
                        f"{N.name} after {M.name}") from None
                for iy, jy in enumerate(ry):
                    base_left = start2 + jy * nx2
                    base_right = start_b + iy * nx_b
                    for ix2, jx in enumerate(lx):
                        ri, rj = find(base_left + ix2), find(base_right + jx)
                        if ri != rj:
                            if ri < rj:
                                parent[rj] = ri
                            else:
                                parent[ri] = rj
        root = [find(i) for i in range(total)]
        quotients[(c, a)] = _Quotient(blocks, offsets, root)
    return Composite(N, M, quotients, name=name or f"({N.name}∘{M.name})")


def compose_all(*profs):
    """compose_all(P, Q, R) = P ∘ (Q ∘ R)."""
    out = profs[-1]
    for P in reversed(profs[:-1]):
        out = compose(P, out)
    return out


# -- natural transformations ---------------------------------------------------------------

class NatTrans:
    def __init__(self, source, target, components, name=None):
        self.source, self.target = source, target
        self.components = components  # {(b, a): {x: y}}
        self.name = name

    def __call__(self, b, a, x):
        return self.components[(b, a)][x]

    def __repr__(self):
        return f"<NatTrans {self.name or ''}: {self.source.name} => {self.target.name}>"


def natural_map(source, target, fn, window=None, name=None):
    """Components fn(b, a, x) on every source cell in ``window``."""
    comps = {}
    for (b, a), xs in source.cells.items():
        if window is None or window(b, a):
            comps[(b, a)] = {x: fn(b, a, x) for x in xs}
    return NatTrans(source, target, comps, name=name)


def identity_nat(F):
    return NatTrans(F, F, {k: {x: x for x in v} for k, v in F.cells.items()}, name="id")


def vcompose(t2, t1):
    comps = {k: {x: t2.components[k][y] for x, y in m.items()} for k, m in t1.components.items()}
    return NatTrans(t1.source, t2.target, comps, name=f"{t2.name}·{t1.name}")


def inverse(t):
    comps = {k: {y: x for x, y in m.items()} for k, m in t.components.items()}
    return NatTrans(t.target, t.source, comps, name=f"{t.name}^-1")


def whisker_left(N, t, NM=None, NM2=None):
    """N t : N∘M => N∘M'."""
    NM = NM or compose(N, t.source)
    NM2 = NM2 or compose(N, t.target)
    return natural_map(NM, NM2, lambda c, a, r: NM2.class_of(c, a, r[0], r[1], t(r[0], a, r[2])),
                       name=f"{N.name}{t.name}")


def whisker_right(t, M, NM=None, N2M=None):
    """t M : N∘M => N'∘M."""
    NM = NM or compose(t.source, M)
    N2M = N2M or compose(t.target, M)
    return natural_map(NM, N2M, lambda c, a, r: N2M.class_of(c, a, r[0], t(c, r[0], r[1]), r[2]),
                       name=f"{t.name}{M.name}")


def associator(PQ_R, P_QR):
    """(P∘Q)∘R => P∘(Q∘R) on the realized composites."""
    QR = P_QR.inner

    def fn(d, a, r):
        b, u, x = r
        c, z, y = u
        return P_QR.class_of(d, a, c, z, QR.class_of(c, a, b, y, x))

    return natural_map(PQ_R, P_QR, fn, name="assoc")


def left_unitor(IM):
    """1∘M => M."""
    M = IM.inner
    return natural_map(IM, M, lambda c, a, r: M.left(r[1], a, r[2]), name="λ")


def right_unitor(NI):
    """N∘1 => N."""
    N = NI.outer
    return natural_map(NI, N, lambda c, a, r: N.right(r[2], c, r[1]), name="ρ")


# -- checks ------------------------------------------------------------------------------

def check_naturality(t, window=None):
    """Return None if t is natural (on ``window``), else a Counterexample."""
    F, G = t.source, t.target
    inside = (lambda b, a: True) if window is None else window
    comps = t.components
    for (b, a), m in comps.items():
        cell = set(G.cell(b, a))
        for x, y in m.items():
            if y not in cell:
                return Counterexample("component", (b, a), None, x,
                                      "component lands outside the target cell")
    cod, dom = F.cod, F.dom
    for (b, a), m in comps.items():
        for g in cod.generators_into(b):
            b2 = cod.src(g)
            if (b2, a) not in comps or not inside(b2, a):
                continue
            m2 = comps[(b2, a)]
            for x, y in m.items():
                if m2[F.left(g, a, x)] != G.left(g, a, y):
                    return Counterexample("left", (b, a), g, x, "square fails for left action")
        for f in dom.generators_into(a):
            a0 = dom.src(f)
            m0 = comps.get((b, a0))
            if m0 is None:
                continue
            for x, y in m0.items():
                if m[F.right(f, b, x)] != G.right(f, b, y):
                    return Counterexample("right", (b, a0), f, x, "square fails for right action")
    return None


def check_bijective(t, window=None):
    """Every component in window is a bijection onto the target cell."""
    keys = set(t.source.cells) | set(t.target.cells)
    for k in keys:
        if window is not None and not window(*k):
            continue
        src, tgt = t.source.cell(*k), t.target.cell(*k)
        m = t.components.get(k, {})
        if len(src) != len(tgt) or len(m) != len(src):
            return Counterexample("cardinality", k, None, None,
                                  f"|source|={len(src)} |target|={len(tgt)}")
        if len(set(m.values())) != len(m):
            return Counterexample("injectivity", k, None, None, "component not injective")
    return None


def check_well_defined(source, fn, window=None):
    """fn(c, a, (b, y, x)) must be constant on every coend class of ``source``."""
    if not isinstance(source, Composite):
        return None
    for (c, a), reps in source.cells.items():
        if window is not None and not window(c, a):
            continue
        for rep in reps:
            want = fn(c, a, rep)
            for m in source.members(c, a, rep):
                if fn(c, a, m) != want:
                    return Counterexample("well-defined", (c, a), None, m,
                                          "value depends on the representative")
    return None


def audit(F, deep=True):
    """Functoriality audit on stored cells; returns None or a Counterexample.

    Every morphism into a cell's index is paired with every generator one step
    further, so by induction on word length all composites are covered.
    """
    cod, dom = F.cod, F.dom
    cells = F.cells
    for (b, a), xs in cells.items():
        if len(set(xs)) != len(xs):
            return Counterexample("duplicate", (b, a), None, None, "repeated element")
        ib, ia = cod.identity(b), dom.identity(a)
        for x in xs:
            if F.left(ib, a, x) != x:
                return Counterexample("identity", (b, a), ib, x, "left identity action moves x")
            if F.right(ia, b, x) != x:
                return Counterexample("identity", (b, a), ia, x, "right identity action moves x")
    for (b, a), xs in cells.items():
        for k in (cod.all_into(b) if deep else cod.generators_into(b)):
            b2 = cod.src(k)
            tset = set(cells.get((b2, a), ()))
            images = {}
            for x in xs:
                y = F.left(k, a, x)
                if y not in tset:
                    return Counterexample("left", (b, a), k, x, "left action leaves its cell")
                images[x] = y
            if not deep:
                continue
            for h in cod.generators_into(b2):
                kh = cod.compose(k, h)
                for x in xs:
                    if F.left(kh, a, x) != F.left(h, a, images[x]):
                        return Counterexample("left-composition", (b, a), (k, h), x,
                                              "left action not functorial")
        for k in (dom.all_into(a) if deep else dom.generators_into(a)):
            a0 = dom.src(k)
            src_elems = cells.get((b, a0), ())
            tset = set(xs)
            for x in src_elems:
                if F.right(k, b, x) not in tset:
                    return Counterexample("right", (b, a0), k, x, "right action leaves its cell")
            if not deep:
                continue
            for h in dom.generators_into(a0):
                for x in cells.get((b, dom.src(h)), ()):
                    if F.right(dom.compose(k, h), b, x) != F.right(k, b, F.right(h, b, x)):
                        return Counterexample("right-composition", (b, a), (k, h), x,
                                              "right action not functorial")
        for f in dom.generators_into(a):
            a0 = dom.src(f)
            src_elems = cells.get((b, a0), ())
            for g in cod.generators_into(b):
                b2 = cod.src(g)
                for x in src_elems:
                    one_way = F.left(g, a, F.right(f, b, x))
                    other = F.right(f, b2, F.left(g, a0, x))
                    if one_way != other:
                        return Counterexample("interchange", (b, a0), (g, f), x,
                                              "left and right actions do not commute")
    return None


def check_representative_independence(P, samples=None):
    """For a composite, acting on any member of a class lands in one class."""
    if not isinstance(P, Composite):
        return None
    N, M = P.outer, P.inner
    for (c, a), reps in P.cells.items():
        for rep in reps:
            mem = P.members(c, a, rep)
            for g in P.cod.generators_into(c):
                c2 = P.cod.src(g)
                images = {P.class_of(c2, a, b, N.left(g, b, y), x) for b, y, x in mem}
                if len(images) != 1:
                    return Counterexample("representative", (c, a), g, rep,
                                          "left action depends on the representative")
            for f in out_generators(P.dom).get(a, ()):
                a2 = P.dom.tgt(f)
                images = {P.class_of(c, a2, b, y, M.right(f, b, x)) for b, y, x in mem}
                if len(images) != 1:
                    return Counterexample("representative", (c, a), f, rep,
                                          "right action depends on the representative")
    return None


def iso_check(F, G, witness=None, node_limit=200_000):
    """Return a natural isomorphism F => G, or None if none exists.

    Elements become integer nodes of an action graph.  Colour refinement
    prunes candidates (and can prove non-isomorphism outright), then a
    backtracking search maps one element per strongly connected component
    and propagates along the actions.  Raises SearchBudgetExceeded when the
    search exhausts ``node_limit`` before deciding.
    """
    if not (same_category(F.dom, G.dom) and same_category(F.cod, G.cod)):
        raise ProfunctorError("iso_check needs parallel profunctors")
    if F.cardinalities() != G.cardinalities():
        return None
    if witness is not None:
        if check_naturality(witness) is None and check_bijective(witness) is None:
            return witness
    cells = sorted(F.cells, key=repr)
    gF, gG = _ElementGraph(F, cells), _ElementGraph(G, cells)
    colour_F, colour_G = _refine(gF, gG)
    if colour_F is None:
        return None
    comp_F, comps_F = gF.sccs()
    comp_G, comps_G = gG.sccs()

    # F's nodes, source components first, so propagation fills each component;
    # G's components grouped by the colours they hold, as candidate pools
    order = [v for comp in comps_F for v in comp]
    pools = defaultdict(list)
    for cid, comp in enumerate(comps_G):
        seen = {}
        for w in comp:
            seen.setdefault(colour_G[w], []).append(w)
        for c, ws in seen.items():
            pools[c].append((cid, ws))
    n = len(order)
    image = [-1] * n          # F node -> G node
    taken = [False] * n       # G node used
    filled = [0] * len(comps_G)
    succ_F, succ_G = gF.succ, gG.succ
    nodes = 0

    def propagate(v0, w0):
        trail = []
        stack = [(v0, w0)]
        while stack:
            v, w = stack.pop()
            cur = image[v]
            if cur >= 0:
                if cur != w:
                    return False, trail
                continue
            if taken[w] or colour_F[v] != colour_G[w]:
                return False, trail
            image[v] = w
            taken[w] = True
            filled[comp_G[w]] += 1
            trail.append((v, w))
            stack.extend(zip(succ_F[v], succ_G[w]))
        return True, trail

    def undo(trail):
        for v, w in trail:
            image[v] = -1
            taken[w] = False
            filled[comp_G[w]] -= 1

    def next_open(i):
        while i < n and image[order[i]] >= 0:
            i += 1
        return i

    def candidates(i):
        for cid, ws in pools.get(colour_F[order[i]], ()):
            if filled[cid]:
                continue  # components are filled whole, so this one is taken
            for w in ws:
                if not taken[w]:
                    yield w

    # depth-first search with an explicit stack: frames are [position, candidates, trail]
    i = next_open(0)
    stack = [[i, candidates(i), None]] if i < n else []
    found = not stack
    while stack and not found:
        frame = stack[-1]
        i, cands, trail = frame
        if trail is not None:
            undo(trail)
            frame[2] = None
        pushed = False
        for w in cands:
            nodes += 1
            if nodes > node_limit:
                raise SearchBudgetExceeded(f"iso_check exceeded {node_limit} nodes")
            ok, trail = propagate(order[i], w)
            if not ok:
                undo(trail)
                continue
            frame[2] = trail
            j = next_open(i + 1)
            if j == n:
                found = True
            else:
                stack.append([j, candidates(j), None])
            pushed = True
            break
        if not pushed:
            stack.pop()
    if not found:
        return None
    comps = defaultdict(dict)
    for v in range(n):
        k, x = gF.elements[v]
        comps[k][x] = gG.elements[image[v]][1]
    return NatTrans(F, G, dict(comps), name="iso")


class _ElementGraph:
    """Elements of a profunctor as integer nodes; ``succ[v]`` lists the images
    of v under the generating actions, in an order fixed by v's cell, so two
    parallel profunctors have matching edge labels position by position."""

    def __init__(self, P, cells):
        edges = _cell_edges(P)
        self.elements, ids, self.cell_of = [], {}, []
        for ci, k in enumerate(cells):
            for x in P.cell(*k):
                ids[(k, x)] = len(self.elements)
                self.elements.append((k, x))
                self.cell_of.append(ci)
        self.labels = {k: [lab for lab, _, _, _ in edges.get(k, ())] for k in cells}
        self.succ = []
        for k, x in self.elements:
            b, a = k
            out = []
            for _, kind, mor, k2 in edges.get(k, ()):
                x2 = P.left(mor, a, x) if kind == "L" else P.right(mor, b, x)
                out.append(ids[(k2, x2)])
            self.succ.append(out)

    def sccs(self):
        """Strongly connected components (iterative Tarjan): returns
        (component id per node, components listed sources first)."""
        succ = self.succ
        n = len(succ)
        index, low = [-1] * n, [0] * n
        on_stack, stack, comps = [False] * n, [], []
        counter = 0
        for root in range(n):
            if index[root] >= 0:
                continue
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack[root] = True
            work = [(root, 0)]
            while work:
                v, pos = work[-1]
                out = succ[v]
                if pos < len(out):
                    work[-1] = (v, pos + 1)
                    w = out[pos]
                    if index[w] < 0:
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack[w] = True
                        work.append((w, 0))
                    elif on_stack[w] and index[w] < low[v]:
                        low[v] = index[w]
                    continue
                work.pop()
                if work:
                    u = work[-1][0]
                    if low[v] < low[u]:
                        low[u] = low[v]
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(comp)
        comps.reverse()  # Tarjan emits sinks first
        comp_of = [0] * n
        for cid, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = cid
        return comp_of, comps


def _refine(gF, gG, rounds=64):
    """Colour refinement on the action graphs of F and G together.

    Colours start as (cell, size of strongly connected component) and are
    refined by the colours reached along each action edge, which edges fix
    the node, and the colours arriving from other nodes.  A natural
    isomorphism preserves colours, so differing colour counts prove that
    none exists; that case returns (None, None).
    """
    graphs = []
    for g in (gF, gG):
        comp_of, comps = g.sccs()
        into = [[] for _ in g.succ]
        for v, out in enumerate(g.succ):
            labs = g.labels[g.elements[v][0]]
            for lab, w in zip(labs, out):
                into[w].append((lab, v))
        graphs.append((g, into, [len(comps[comp_of[v]]) for v in range(len(g.succ))]))
    start = {}
    colours = [[start.setdefault((g.cell_of[v], size[v]), len(start)) for v in range(len(g.succ))]
               for g, _, size in graphs]
    count = len(start)
    for _ in range(rounds):
        table, new = {}, []
        for (g, into, _), col in zip(graphs, colours):
            nc = []
            for v, out in enumerate(g.succ):
                sig = (col[v], tuple(col[w] for w in out), tuple(w == v for w in out),
                       tuple(sorted((lab, col[u]) for lab, u in into[v])))
                nc.append(table.setdefault(sig, len(table)))
            new.append(nc)
        colours = new
        if len(table) == count:
            break
        count = len(table)
    if sorted(colours[0]) != sorted(colours[1]):
        return None, None
    return colours[0], colours[1]


def _cell_edges(P):
    """Per cell, the generating actions leaving it as (label, kind, morphism, target cell)."""
    out = {}
    cod, dom = P.cod, P.dom
    outs = out_generators(dom)
    for (b, a) in P.cells:
        found = [(("L", g), "L", g, (cod.src(g), a)) for g in cod.generators_into(b)]
        found += [(("R", f), "R", f, (b, dom.tgt(f))) for f in outs.get(a, ())]
        out[(b, a)] = found
    return out


def _edges(F):
    edges = defaultdict(list)
    cod, dom = F.cod, F.dom
    outs = out_generators(dom)
    for (b, a), xs in F.cells.items():
        for g in cod.generators_into(b):
            k2 = (cod.src(g), a)
            for x in xs:
                edges[((b, a), x)].append(("L", g, k2))
        for f in outs.get(a, ()):
            k2 = (b, dom.tgt(f))
            for x in xs:
                edges[((b, a), x)].append(("R", f, k2))
    return edges


def bang_prof(F, dom, cod, name=None):
    """!F: !A -> !B with !F(beta, alpha) = ∐_σ ∏_i F(beta_i, alpha_σ(i)).

    Elements are pairs (sigma, xs) with xs[i] in F(beta[i], alpha[sigma[i]]).
    """
    def cell(beta, alpha):
        n = len(beta)
        out = []
        sigma = [0] * n
        used = [False] * n

        def choose(i):
            if i == n:
                s = tuple(sigma)
                for xs in _cartesian(*[F.cell(beta[k], alpha[s[k]]) for k in range(n)]):
                    out.append((s, xs))
                return
            for j in range(n):
                if not used[j] and F.cell(beta[i], alpha[j]):
                    used[j] = True
                    sigma[i] = j
                    choose(i + 1)
                    used[j] = False

        choose(0)
        return out

    def left(g, alpha, e):
        sigma, xs = e
        tau = g.sigma
        new_sigma = tuple(sigma[tau[i]] for i in range(len(tau)))
        new_xs = tuple(F.left(g.arrows[i], alpha[new_sigma[i]], xs[tau[i]])
                       for i in range(len(tau)))
        return (new_sigma, new_xs)

    def right(f, beta, e):
        sigma, xs = e
        new_sigma = tuple(f.sigma[s] for s in sigma)
        new_xs = tuple(F.right(f.arrows[sigma[i]], beta[i], xs[i]) for i in range(len(sigma)))
        return (new_sigma, new_xs)

    pairs = matching_pairs(cod, dom, len, len)
    return Profunctor.from_formula(dom, cod, cell, left, right, pairs=pairs,
                                   name=name or f"!{F.name}")
