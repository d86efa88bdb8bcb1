"""Analytic functors on finite presheaves, and species (A = B = 1).

Species are stored arity by arity: ``F[n]`` is ``range(size)`` and
``table[n][sigma]`` lists the image of each element under sigma, where a
permutation tuple sends position i to position sigma[i] (the !A convention).
"""

from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial

from .catsym import SymSeq, derivative, kleisli_compose
from .fincat import one
from .freesmc import PermMor
from .prof import Profunctor, ProfunctorError, compose, tensor
from .structmaps import bang, contraction, unitor_right


class Presheaf:
    """X: A^op -> Set; ``act(f, x)`` sends x in X(tgt f) to X(src f)."""

    def __init__(self, base, cells, act):
        self.base = base
        self.cells = {a: tuple(v) for a, v in cells.items()}
        self._act = act

    def __call__(self, a):
        return self.cells.get(a, ())

    def act(self, f, x):
        return self._act(f, x)

    def cardinalities(self):
        return {a: len(v) for a, v in self.cells.items()}

    def audit(self):
        """Contravariant functoriality; returns None or a description."""
        A = self.base
        for a in A.objects():
            for x in self(a):
                if self.act(A.identity(a), x) != x:
                    return f"identity moves {x!r} at {a!r}"
        for f in _morphisms(A):
            src = set(self(A.src(f)))
            for x in self(A.tgt(f)):
                if self.act(f, x) not in src:
                    return f"action of {f!r} leaves its set"
            for g in _morphisms(A):
                if A.tgt(g) == A.src(f):
                    for x in self(A.tgt(f)):
                        if self.act(A.compose(f, g), x) != self.act(g, self.act(f, x)):
                            return f"composition fails at ({f!r}, {g!r})"
        return None


def _morphisms(A):
    return [f for y in A.objects() for f in A.all_into(y)]


def constant_presheaf(A, n):
    """n elements at every object with identity actions (only sensible on groupoid-free A
    such as 1 or discrete categories)."""
    return Presheaf(A, {a: tuple(range(n)) for a in A.objects()}, lambda f, x: x)


def power_prof(X, BA):
    """1 -> !A with cell (alpha, *) = X^alpha."""
    A = X.base

    def cell(alpha, s):
        out = [()]
        for a in alpha:
            out = [t + (x,) for t in out for x in X(a)]
        return out

    def left(g, s, xs):
        # g: alpha' -> alpha; entry i of alpha' maps to entry sigma[i] of alpha
        return tuple(X.act(g.arrows[i], xs[g.sigma[i]]) for i in range(len(g.sigma)))

    return Profunctor.from_formula(one(), BA, cell, left, lambda f, alpha, xs: xs,
                                   pairs=((alpha, 0) for alpha in BA.objects()), name="X^-")


def eval_analytic(F, X):
    """FX(b) = ∫^alpha F(b, alpha) x X^alpha as a presheaf on the codomain."""
    if X.base != F.dom:
        raise ProfunctorError("presheaf lives on the wrong category")
    FX = compose(F.body, power_prof(X, F.body.dom))
    B = F.cod
    cells = {b: FX.cell(b, 0) for b in B.objects()}
    return Presheaf(B, cells, lambda g, x: FX.left(g, 0, x))


# -- species -----------------------------------------------------------------------------

def perms(n):
    return list(permutations(range(n)))


def compose_perm(tau, sigma):
    return tuple(tau[s] for s in sigma)


class Species:
    def __init__(self, sizes, tables=None, name=None):
        self.sizes = {n: int(k) for n, k in sizes.items() if k}
        if tables is None:
            tables = {n: {s: tuple(range(k)) for s in perms(n)} for n, k in self.sizes.items()}
        self.tables = {n: dict(tables[n]) for n in self.sizes}
        self.name = name

    @property
    def arity(self):
        return max(self.sizes, default=0)

    def size(self, n):
        return self.sizes.get(n, 0)

    def act(self, n, sigma, x):
        return self.tables[n][tuple(sigma)][x]

    def audit(self):
        """Tables are group actions; returns None or a description."""
        for n, k in self.sizes.items():
            table = self.tables[n]
            ps = perms(n)
            if set(table) != set(ps):
                return f"arity {n}: table does not cover S_{n}"
            for s in ps:
                if sorted(table[s]) != list(range(k)):
                    return f"arity {n}: {s} does not act by a bijection"
            if table[tuple(range(n))] != tuple(range(k)):
                return f"arity {n}: identity acts nontrivially"
            # adjacent transpositions generate S_n, so checking s∘t for them suffices
            gens = [tuple(range(i)) + (i + 1, i) + tuple(range(i + 2, n)) for i in range(n - 1)]
            for s in ps:
                for t in gens:
                    st = compose_perm(s, t)
                    for x in range(k):
                        if table[st][x] != table[s][table[t][x]]:
                            return f"arity {n}: composition fails at ({s}, {t})"
        return None

    def __eq__(self, other):
        return isinstance(other, Species) and (self.sizes, self.tables) == (other.sizes, other.tables)

    def __repr__(self):
        return f"<Species {self.name or ''} sizes={dict(sorted(self.sizes.items()))}>"


def species_from_action(n_max, orbit_fn, name=None):
    """Build from ``orbit_fn(n)`` returning (elements, act(sigma, e))."""
    sizes, tables = {}, {}
    for n in range(n_max + 1):
        found = orbit_fn(n)
        if found is None:
            continue
        elems, act = found
        if not elems:
            continue
        index = {e: i for i, e in enumerate(elems)}
        sizes[n] = len(elems)
        tables[n] = {s: tuple(index[act(s, e)] for e in elems) for s in perms(n)}
    return Species(sizes, tables, name=name)


def E(n_max):
    """Sets: one element at every arity."""
    return Species({n: 1 for n in range(n_max + 1)}, name="E")


def E_n(n):
    return Species({n: 1}, name=f"E{n}")


def X_species():
    return Species({1: 1}, name="X")


def zero_species():
    return Species({}, name="0")


def subsets(n, k):
    return species_from_action(n, lambda m: (list(combinations(range(m), k)),
                                             lambda s, e: tuple(sorted(s[i] for i in e)))
                               if m == n else None)


def _orbit(m, kind, k):
    if kind == "trivial":
        return [()], lambda s, e: e
    if kind == "regular":
        return perms(m), lambda s, e: compose_perm(s, e)
    if kind == "subsets":
        return list(combinations(range(m), k)), lambda s, e: tuple(sorted(s[i] for i in e))
    if kind == "arrangements":
        return list(permutations(range(m), k)), lambda s, e: tuple(s[i] for i in e)
    raise ValueError(kind)


def random_species(rng, max_arity=3, max_orbits=2):
    """A disjoint union of transitive S_n-sets drawn from a few families."""
    sizes, tables = {}, {}
    for m in range(max_arity + 1):
        elems, acts = [], []
        for _ in range(rng.randint(0, max_orbits)):
            kind = rng.choice(["trivial", "regular", "subsets", "arrangements"])
            k = rng.randint(0, m)
            es, act = _orbit(m, kind, k)
            tag = len(acts)
            elems.extend((tag, e) for e in es)
            acts.append(act)
        if not elems:
            continue
        index = {e: i for i, e in enumerate(elems)}
        sizes[m] = len(elems)
        tables[m] = {s: tuple(index[(t, acts[t](s, e))] for t, e in elems) for s in perms(m)}
    return Species(sizes, tables, name="random")


# -- conversion ---------------------------------------------------------------------------

def species_to_symseq(F, bound=None):
    bound = F.arity if bound is None else bound
    if F.arity > bound:
        raise ProfunctorError(f"species has arity {F.arity} above bound {bound}")
    I = one()
    BI = bang(I, bound)
    cells = {(0, (0,) * n): tuple(range(k)) for n, k in F.sizes.items()}
    body = Profunctor(BI, I, cells, lambda g, alpha, x: x,
                      lambda f, b, x: F.tables[len(f.sigma)][tuple(f.sigma)][x],
                      name=F.name)
    return SymSeq(I, I, body)


def symseq_to_species(S, name=None):
    """Read a Kleisli map !1 -> C with C a one-object category as a species."""
    body = S.body
    (b,) = body.cod.objects()
    sizes, tables = {}, {}
    for n in range(body.dom.n_max + 1):
        alpha = (0,) * n
        elems = body.cell(b, alpha)
        if not elems:
            continue
        index = {e: i for i, e in enumerate(elems)}
        sizes[n] = len(elems)
        ids = tuple(body.dom.base.identity(0) for _ in range(n))
        tables[n] = {s: tuple(index[body.right(PermMor(alpha, alpha, s, ids), b, e)]
                              for e in elems) for s in perms(n)}
    return Species(sizes, tables, name=name)


# -- operations ---------------------------------------------------------------------------

def sp_sum(F, G):
    sizes, tables = {}, {}
    for n in set(F.sizes) | set(G.sizes):
        kf, kg = F.size(n), G.size(n)
        sizes[n] = kf + kg
        tables[n] = {s: (F.tables[n][s] if kf else ()) +
                     tuple(kf + y for y in (G.tables[n][s] if kg else ()))
                     for s in perms(n)}
    return Species(sizes, tables, name=f"({F.name}+{G.name})")


def sp_product(F, G, bound=None):
    """(F ⊗ G) ∘ c, read back through 1 x 1 ≅ 1."""
    bound = F.arity + G.arity if bound is None else bound
    I = one()
    sf, sg = species_to_symseq(F, bound), species_to_symseq(G, bound)
    body = compose(unitor_right(I), compose(tensor(sf.body, sg.body), contraction(I, bound)))
    return symseq_to_species(SymSeq(I, I, body), name=f"({F.name}·{G.name})")


def sp_substitute(F, G, bound=None):
    """F ∘ G, Kleisli composition at A = B = 1."""
    sf = species_to_symseq(F)
    sg = species_to_symseq(G)
    return symseq_to_species(kleisli_compose(sf, sg, bound), name=f"{F.name}∘{G.name}")


def sp_derivative(F):
    if not F.sizes:
        return zero_species()
    dF = derivative(species_to_symseq(F))
    return symseq_to_species(dF, name=f"d{F.name}")


def egf_coeffs(F, n_max):
    return [Fraction(F.size(n), factorial(n)) for n in range(n_max + 1)]


def binomial_convolution(F, G, n):
    return sum(comb(n, k) * F.size(k) * G.size(n - k) for k in range(n + 1))


def cycle_count(sigma):
    seen, cycles = set(), 0
    for i in range(len(sigma)):
        if i not in seen:
            cycles += 1
            while i not in seen:
                seen.add(i)
                i = sigma[i]
    return cycles


def burnside_count(F, x):
    """Σ_n (1/n!) Σ_σ |Fix(σ)| x^cyc(σ), an integer by Burnside's lemma."""
    total = Fraction(0)
    for n in F.sizes:
        acc = 0
        for s, img in F.tables[n].items():
            fixed = sum(1 for e, y in enumerate(img) if e == y)
            acc += fixed * x ** cycle_count(s)
        total += Fraction(acc, factorial(n))
    if total.denominator != 1:
        raise ArithmeticError("Burnside sum is not an integer; the action tables are broken")
    return int(total)


def eval_species(F, x):
    """|F(X)| for a set X of size x, by the coend quotient."""
    S = species_to_symseq(F)
    X = constant_presheaf(one(), x)
    return len(eval_analytic(S, X)(0))
