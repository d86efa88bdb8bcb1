"""Finite categories given by explicit tables, functors between them, and the
small virtual categories (products, opposites, sums) built on top of any
category-like object.

Every category-like object in this package answers the same questions:

    objects()            objects inside the current window, in a fixed order
    hom(x, y)            tuple of morphisms x -> y
    identity(x), compose(g, f), src(f), tgt(f)
    generators(x, y)     non-identity morphisms used for coend relations
    generators_into(y)   non-identity generators with target y
    key(x)               invariant with: hom(x, y) nonempty => key(x) == key(y)
    levels(x)            sizes used by arity windows (empty for plain objects)

FinCat objects and morphisms are dense integers; labels are cosmetic.
"""

from itertools import product as _cartesian


class CategoryError(ValueError):
    """A category or functor table failed validation."""


class FinCat:
    def __init__(self, objects, morphisms, identities, table, name=None):
        # objects: labels; morphisms: (label, src, tgt); table: {(g, f): g∘f}
        self.object_labels = tuple(objects)
        self.morphism_labels = tuple(m[0] for m in morphisms)
        self._src = tuple(m[1] for m in morphisms)
        self._tgt = tuple(m[2] for m in morphisms)
        self._id = tuple(identities)
        self._table = dict(table)
        self.name = name
        self._homs = {}
        for f in range(len(self._src)):
            self._homs.setdefault((self._src[f], self._tgt[f]), []).append(f)
        self._homs = {k: tuple(v) for k, v in self._homs.items()}
        self._into = {}
        id_set = set(self._id)
        for f in range(len(self._src)):
            if f not in id_set:
                self._into.setdefault(self._tgt[f], []).append(f)
        self._component = _components(len(self.object_labels), self._src, self._tgt)

    # -- category protocol -------------------------------------------------
    def objects(self):
        return list(range(len(self.object_labels)))

    def morphisms(self):
        return list(range(len(self._src)))

    def contains(self, x):
        return isinstance(x, int) and 0 <= x < len(self.object_labels)

    def hom(self, x, y):
        return self._homs.get((x, y), ())

    def identity(self, x):
        return self._id[x]

    def is_identity(self, f):
        return self._id[self._src[f]] == f

    def src(self, f):
        return self._src[f]

    def tgt(self, f):
        return self._tgt[f]

    def compose(self, g, f):
        if self._tgt[f] != self._src[g]:
            raise CategoryError(f"cannot compose {self.morphism_labels[g]} after "
                                f"{self.morphism_labels[f]}: endpoints differ")
        if self.is_identity(g):
            return f
        if self.is_identity(f):
            return g
        return self._table[(g, f)]

    def generators(self, x, y):
        return tuple(f for f in self.hom(x, y) if not self.is_identity(f))

    def generators_into(self, y):
        return tuple(self._into.get(y, ()))

    def all_into(self, y):
        return tuple(f for f in range(len(self._tgt)) if self._tgt[f] == y)

    def key(self, x):
        return self._component[x]

    def levels(self, x):
        return ()

    # -- serialization helpers used by formats -----------------------------
    def encode_object(self, x):
        return x

    def decode_object(self, v):
        return int(v)

    def encode_morphism(self, f):
        return f

    def decode_morphism(self, v):
        return int(v)

    # -- structural equality -------------------------------------------------
    def _data(self):
        return (self.object_labels, self.morphism_labels, self._src, self._tgt,
                self._id, tuple(sorted(self._table.items())))

    def __eq__(self, other):
        return isinstance(other, FinCat) and self._data() == other._data()

    def __hash__(self):
        return hash(self._data())

    def __repr__(self):
        label = self.name or "FinCat"
        return f"<{label}: {len(self.object_labels)} objects, {len(self._src)} morphisms>"

    def describe(self):
        """Raw description accepted by :func:`build_fincat`."""
        return {
            "objects": list(self.object_labels),
            "morphisms": [[self.morphism_labels[f], self._src[f], self._tgt[f]]
                          for f in range(len(self._src))],
            "identities": list(self._id),
            "compose": [[g, f, h] for (g, f), h in sorted(self._table.items())],
        }


def _components(n, src, tgt):
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s, t in zip(src, tgt):
        a, b = find(s), find(t)
        if a != b:
            parent[max(a, b)] = min(a, b)
    return tuple(find(i) for i in range(n))


def build_fincat(spec, name=None):
    """Validate a raw description and return a FinCat.

    ``spec`` is a mapping with ``objects`` (labels), ``morphisms`` (triples
    ``[label, src, tgt]``), optional ``identities`` (one morphism index per
    object; by default morphism ``i`` is the identity of object ``i``) and
    ``compose`` (triples ``[g, f, h]`` meaning ``g∘f = h``).  Composites with
    an identity are implied and may be omitted.
    """
    objects = list(spec.get("objects", []))
    morphisms = [tuple(m) for m in spec.get("morphisms", [])]
    n_obj, n_mor = len(objects), len(morphisms)
    for label, s, t in morphisms:
        if not (0 <= s < n_obj and 0 <= t < n_obj):
            raise CategoryError(f"morphism {label!r} has endpoints outside the object list")
    identities = spec.get("identities")
    if identities is None:
        if n_mor < n_obj:
            raise CategoryError("missing identity: fewer morphisms than objects")
        identities = list(range(n_obj))
    identities = list(identities)
    if len(identities) != n_obj:
        raise CategoryError("missing identity: identities must list one morphism per object")
    for x, i in enumerate(identities):
        if not 0 <= i < n_mor:
            raise CategoryError(f"missing identity for object {objects[x]!r}")
        if morphisms[i][1] != x or morphisms[i][2] != x:
            raise CategoryError(f"identity of {objects[x]!r} is not an endomorphism of it")
    id_set = set(identities)
    label = lambda f: morphisms[f][0]

    table = {}
    for g, f, h in spec.get("compose", []):
        g, f, h = int(g), int(f), int(h)
        if morphisms[f][2] != morphisms[g][1]:
            raise CategoryError(f"compose entry ({label(g)},{label(f)}) is not a composable pair")
        if morphisms[h][1] != morphisms[f][1] or morphisms[h][2] != morphisms[g][2]:
            raise CategoryError(f"composite endpoints mismatch at ({label(g)},{label(f)})")
        if g in id_set and h != f or f in id_set and h != g:
            raise CategoryError(f"identity law violated at ({label(g)},{label(f)})")
        if (g, f) in table and table[(g, f)] != h:
            raise CategoryError(f"conflicting compose entries at ({label(g)},{label(f)})")
        if g in id_set or f in id_set:
            continue
        table[(g, f)] = h
    for g in range(n_mor):
        for f in range(n_mor):
            if g in id_set or f in id_set or morphisms[f][2] != morphisms[g][1]:
                continue
            if (g, f) not in table:
                raise CategoryError(f"compose table missing composable pair ({label(g)},{label(f)})")
    C = FinCat(objects, morphisms, identities, table, name=name)
    audit_fincat(C)
    return C


def audit_fincat(C):
    """Exhaustive associativity check; raises CategoryError on the first bad triple."""
    mors = C.morphisms()
    for f in mors:
        for g in mors:
            if C.tgt(f) != C.src(g):
                continue
            gf = C.compose(g, f)
            for h in mors:
                if C.tgt(g) != C.src(h):
                    continue
                if C.compose(h, gf) != C.compose(C.compose(h, g), f):
                    labels = C.morphism_labels
                    raise CategoryError(
                        f"associativity violated at ({labels[h]},{labels[g]},{labels[f]})")
    for f in mors:
        if C.compose(C.identity(C.tgt(f)), f) != f or C.compose(f, C.identity(C.src(f))) != f:
            raise CategoryError(f"identity law violated at {C.morphism_labels[f]}")
    return True


# -- built-in test family ---------------------------------------------------------

def zero():
    return FinCat([], [], [], {}, name="0")


def one():
    return FinCat(["*"], [("id", 0, 0)], [0], {}, name="1")


def discrete(n):
    labels = [chr(ord("x") + i) if n <= 3 else f"x{i}" for i in range(n)]
    return FinCat(labels, [(f"id_{l}", i, i) for i, l in enumerate(labels)],
                  list(range(n)), {}, name=f"discrete({n})")


def walking_arrow():
    return FinCat(["0", "1"], [("id_0", 0, 0), ("id_1", 1, 1), ("u", 0, 1)],
                  [0, 1], {}, name="arrow")


def bz2():
    return FinCat(["x"], [("id", 0, 0), ("g", 0, 0)], [0], {(1, 1): 0}, name="BZ2")


BUILTINS = {
    "0": zero,
    "1": one,
    "discrete2": lambda: discrete(2),
    "arrow": walking_arrow,
    "BZ2": bz2,
}


def builtin(name):
    if name.startswith("discrete") and name[8:].isdigit():
        return discrete(int(name[8:]))
    try:
        return BUILTINS[name]()
    except KeyError:
        raise CategoryError(f"unknown built-in category {name!r}") from None


def test_family():
    return [zero(), one(), discrete(2), walking_arrow(), bz2()]


# -- constructions on FinCat ---------------------------------------------------------

def opposite(C):
    if not isinstance(C, FinCat):
        return Opposite(C)
    table = {(f, g): h for (g, f), h in C._table.items()}
    morphisms = [(C.morphism_labels[f], C.tgt(f), C.src(f)) for f in C.morphisms()]
    name = None
    if C.name:
        name = C.name[:-3] if C.name.endswith("^op") else C.name + "^op"
    return FinCat(C.object_labels, morphisms, C._id, table, name=name)


def product(C, D):
    """Cartesian product; object (x, y) gets index x*|D| + y."""
    if not (isinstance(C, FinCat) and isinstance(D, FinCat)):
        return Product(C, D)
    nD, mD = len(D.object_labels), len(D.morphism_labels)
    objects = [f"({a},{b})" for a in C.object_labels for b in D.object_labels]
    morphisms = [(f"({C.morphism_labels[f]},{D.morphism_labels[g]})",
                  C.src(f) * nD + D.src(g), C.tgt(f) * nD + D.tgt(g))
                 for f in C.morphisms() for g in D.morphisms()]
    ids = [C.identity(x) * mD + D.identity(y) for x in C.objects() for y in D.objects()]
    table = {}
    for f1, g1 in _cartesian(C.morphisms(), D.morphisms()):
        for f2, g2 in _cartesian(C.morphisms(), D.morphisms()):
            if C.tgt(f1) == C.src(f2) and D.tgt(g1) == D.src(g2):
                a, b = f2 * mD + g2, f1 * mD + g1
                if a in ids or b in ids:
                    continue
                table[(a, b)] = C.compose(f2, f1) * mD + D.compose(g2, g1)
    name = f"{C.name}x{D.name}" if C.name and D.name else None
    return FinCat(objects, morphisms, ids, table, name=name)


def projections(C, D):
    P = product(C, D)
    nD, mD = len(D.object_labels), len(D.morphism_labels)
    p1 = FinFunctor(P, C, [i // nD for i in P.objects()], [f // mD for f in P.morphisms()])
    p2 = FinFunctor(P, D, [i % nD for i in P.objects()], [f % mD for f in P.morphisms()])
    return p1, p2


def coproduct(C, D):
    """Disjoint union; objects and morphisms of D are shifted after those of C."""
    if not (isinstance(C, FinCat) and isinstance(D, FinCat)):
        return Sum(C, D)
    nC, mC = len(C.object_labels), len(C.morphism_labels)
    objects = list(C.object_labels) + list(D.object_labels)
    morphisms = ([(C.morphism_labels[f], C.src(f), C.tgt(f)) for f in C.morphisms()]
                 + [(D.morphism_labels[f], D.src(f) + nC, D.tgt(f) + nC) for f in D.morphisms()])
    ids = list(C._id) + [i + mC for i in D._id]
    table = dict(C._table)
    table.update({(g + mC, f + mC): h + mC for (g, f), h in D._table.items()})
    name = f"{C.name}+{D.name}" if C.name and D.name else None
    return FinCat(objects, morphisms, ids, table, name=name)


def injections(C, D):
    S = coproduct(C, D)
    nC, mC = len(C.object_labels), len(C.morphism_labels)
    i1 = FinFunctor(C, S, list(C.objects()), list(C.morphisms()))
    i2 = FinFunctor(D, S, [x + nC for x in D.objects()], [f + mC for f in D.morphisms()])
    return i1, i2


def codiagonal(C):
    """The folding functor C + C -> C."""
    S = coproduct(C, C)
    nC, mC = len(C.object_labels), len(C.morphism_labels)
    return FinFunctor(S, C, [x % nC if nC else x for x in S.objects()],
                      [f % mC if mC else f for f in S.morphisms()])


def terminal_functor(C):
    T = one()
    return FinFunctor(C, T, [0] * len(C.object_labels), [0] * len(C.morphism_labels))


def identity_functor(C):
    if isinstance(C, FinCat):
        return FinFunctor(C, C, C.objects(), C.morphisms())
    return Functor(C, C, lambda x: x, lambda f: f)


# -- functors -------------------------------------------------------------------------

class Functor:
    """A functor given by two Python callables; used for virtual categories."""

    def __init__(self, dom, cod, ob, mor, name=None):
        self.dom, self.cod = dom, cod
        self._ob, self._mor = ob, mor
        self.name = name

    def ob(self, x):
        return self._ob(x)

    def mor(self, f):
        return self._mor(f)


class FinFunctor(Functor):
    def __init__(self, dom, cod, object_map, morphism_map, name=None, check=True):
        self.object_map = tuple(object_map)
        self.morphism_map = tuple(morphism_map)
        super().__init__(dom, cod, self.object_map.__getitem__,
                         self.morphism_map.__getitem__, name=name)
        if check:
            validate_functor(self)


def validate_functor(F):
    C, D = F.dom, F.cod
    if len(F.object_map) != len(C.object_labels) or len(F.morphism_map) != len(C.morphism_labels):
        raise CategoryError("functor maps do not cover the domain")
    for f in C.morphisms():
        Ff = F.mor(f)
        if D.src(Ff) != F.ob(C.src(f)) or D.tgt(Ff) != F.ob(C.tgt(f)):
            raise CategoryError(f"functor does not preserve endpoints of {C.morphism_labels[f]}")
    for x in C.objects():
        if F.mor(C.identity(x)) != D.identity(F.ob(x)):
            raise CategoryError(f"functor does not preserve the identity of {C.object_labels[x]}")
    for f in C.morphisms():
        for g in C.morphisms():
            if C.tgt(f) == C.src(g) and F.mor(C.compose(g, f)) != D.compose(F.mor(g), F.mor(f)):
                raise CategoryError(
                    f"functor does not preserve composition at "
                    f"({C.morphism_labels[g]},{C.morphism_labels[f]})")
    return True


# -- virtual categories ---------------------------------------------------------------

def _add_levels(u, v):
    n = max(len(u), len(v))
    u = tuple(u) + (0,) * (n - len(u))
    v = tuple(v) + (0,) * (n - len(v))
    return tuple(a + b for a, b in zip(u, v))


class Product:
    """C x D without materializing its tables; morphisms are pairs."""

    def __init__(self, C, D):
        self.left, self.right = C, D
        self._objects = None

    def __eq__(self, other):
        return isinstance(other, Product) and (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash(("Product", self.left, self.right))

    def __repr__(self):
        return f"Product({self.left!r}, {self.right!r})"

    def objects(self):
        if self._objects is None:
            self._objects = [(x, y) for x in self.left.objects() for y in self.right.objects()]
        return self._objects

    def contains(self, x):
        return (isinstance(x, tuple) and len(x) == 2
                and self.left.contains(x[0]) and self.right.contains(x[1]))

    def hom(self, x, y):
        return tuple(_cartesian(self.left.hom(x[0], y[0]), self.right.hom(x[1], y[1])))

    def identity(self, x):
        return (self.left.identity(x[0]), self.right.identity(x[1]))

    def compose(self, g, f):
        return (self.left.compose(g[0], f[0]), self.right.compose(g[1], f[1]))

    def src(self, f):
        return (self.left.src(f[0]), self.right.src(f[1]))

    def tgt(self, f):
        return (self.left.tgt(f[0]), self.right.tgt(f[1]))

    def generators(self, x, y):
        out = []
        if x[1] == y[1]:
            i = self.right.identity(x[1])
            out.extend((g, i) for g in self.left.generators(x[0], y[0]))
        if x[0] == y[0]:
            i = self.left.identity(x[0])
            out.extend((i, g) for g in self.right.generators(x[1], y[1]))
        return tuple(out)

    def generators_into(self, y):
        i1, i2 = self.left.identity(y[0]), self.right.identity(y[1])
        return (tuple((g, i2) for g in self.left.generators_into(y[0]))
                + tuple((i1, g) for g in self.right.generators_into(y[1])))

    def all_into(self, y):
        return tuple(_cartesian(self.left.all_into(y[0]), self.right.all_into(y[1])))

    def key(self, x):
        return (self.left.key(x[0]), self.right.key(x[1]))

    def levels(self, x):
        return _add_levels(self.left.levels(x[0]), self.right.levels(x[1]))

    def encode_object(self, x):
        return [self.left.encode_object(x[0]), self.right.encode_object(x[1])]

    def decode_object(self, v):
        return (self.left.decode_object(v[0]), self.right.decode_object(v[1]))

    def encode_morphism(self, f):
        return [self.left.encode_morphism(f[0]), self.right.encode_morphism(f[1])]

    def decode_morphism(self, v):
        return (self.left.decode_morphism(v[0]), self.right.decode_morphism(v[1]))


class Opposite:
    def __init__(self, C):
        self.base = C
        self._out = None

    def __eq__(self, other):
        return isinstance(other, Opposite) and self.base == other.base

    def __hash__(self):
        return hash(("Opposite", self.base))

    def __repr__(self):
        return f"Opposite({self.base!r})"

    def objects(self):
        return self.base.objects()

    def contains(self, x):
        return self.base.contains(x)

    def hom(self, x, y):
        return self.base.hom(y, x)

    def identity(self, x):
        return self.base.identity(x)

    def compose(self, g, f):
        return self.base.compose(f, g)

    def src(self, f):
        return self.base.tgt(f)

    def tgt(self, f):
        return self.base.src(f)

    def generators(self, x, y):
        return self.base.generators(y, x)

    def generators_into(self, y):
        if self._out is None:
            out = {}
            for x in self.base.objects():
                for g in self.base.generators_into(x):
                    out.setdefault(self.base.src(g), []).append(g)
            self._out = {k: tuple(v) for k, v in out.items()}
        return self._out.get(y, ())

    def all_into(self, y):
        return tuple(f for x in self.base.objects() for f in self.base.hom(y, x))

    def key(self, x):
        return self.base.key(x)

    def levels(self, x):
        return self.base.levels(x)

    def encode_object(self, x):
        return self.base.encode_object(x)

    def decode_object(self, v):
        return self.base.decode_object(v)

    def encode_morphism(self, f):
        return self.base.encode_morphism(f)

    def decode_morphism(self, v):
        return self.base.decode_morphism(v)


class Sum:
    """C + D; objects and morphisms are tagged pairs (0, x) / (1, y)."""

    def __init__(self, C, D):
        self.parts = (C, D)

    def __eq__(self, other):
        return isinstance(other, Sum) and self.parts == other.parts

    def __hash__(self):
        return hash(("Sum",) + self.parts)

    def __repr__(self):
        return f"Sum{self.parts!r}"

    def objects(self):
        return [(i, x) for i, C in enumerate(self.parts) for x in C.objects()]

    def contains(self, x):
        return isinstance(x, tuple) and len(x) == 2 and x[0] in (0, 1) and self.parts[x[0]].contains(x[1])

    def hom(self, x, y):
        if x[0] != y[0]:
            return ()
        return tuple((x[0], f) for f in self.parts[x[0]].hom(x[1], y[1]))

    def identity(self, x):
        return (x[0], self.parts[x[0]].identity(x[1]))

    def compose(self, g, f):
        if g[0] != f[0]:
            raise CategoryError("cannot compose across summands")
        return (g[0], self.parts[g[0]].compose(g[1], f[1]))

    def src(self, f):
        return (f[0], self.parts[f[0]].src(f[1]))

    def tgt(self, f):
        return (f[0], self.parts[f[0]].tgt(f[1]))

    def generators(self, x, y):
        if x[0] != y[0]:
            return ()
        return tuple((x[0], f) for f in self.parts[x[0]].generators(x[1], y[1]))

    def generators_into(self, y):
        return tuple((y[0], f) for f in self.parts[y[0]].generators_into(y[1]))

    def all_into(self, y):
        return tuple((y[0], f) for f in self.parts[y[0]].all_into(y[1]))

    def key(self, x):
        return (x[0], self.parts[x[0]].key(x[1]))

    def levels(self, x):
        return self.parts[x[0]].levels(x[1])

    def encode_object(self, x):
        return [x[0], self.parts[x[0]].encode_object(x[1])]

    def decode_object(self, v):
        return (int(v[0]), self.parts[int(v[0])].decode_object(v[1]))

    def encode_morphism(self, f):
        return [f[0], self.parts[f[0]].encode_morphism(f[1])]

    def decode_morphism(self, v):
        return (int(v[0]), self.parts[int(v[0])].decode_morphism(v[1]))


def pair_functor(F, G):
    """F x G between (virtual) products."""
    return Functor(Product(F.dom, G.dom), Product(F.cod, G.cod),
                   lambda x: (F.ob(x[0]), G.ob(x[1])),
                   lambda f: (F.mor(f[0]), G.mor(f[1])))
