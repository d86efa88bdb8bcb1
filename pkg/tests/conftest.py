"""Shared helpers: small categories, brute-force functors, random profunctors."""

import itertools
import random

import pytest

from profdiff.fincat import FinFunctor, build_fincat, builtin, validate_functor
from profdiff.prof import Profunctor, companion, compose, conjoint, sum as psum

FAMILY = ("0", "1", "discrete2", "arrow", "BZ2")


def family():
    return [builtin(n) for n in FAMILY]


def poset_spec(n, rel):
    """Raw spec of the preorder generated by ``rel`` on n points (a poset if acyclic)."""
    le = {(i, i) for i in range(n)} | {(i, j) for i, j in rel}
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(le), list(le)):
            if b == c and (a, d) not in le:
                le.add((a, d))
                changed = True
    morphisms = [[f"id{i}", i, i] for i in range(n)]
    index = {(i, i): i for i in range(n)}
    for a, b in sorted(le):
        if a != b:
            index[(a, b)] = len(morphisms)
            morphisms.append([f"{a}<{b}", a, b])
    compose_table = [[index[(b, c)], index[(a, b)], index[(a, c)]]
                     for (a, b) in le for (b2, c) in le if b == b2]
    return {"objects": [f"p{i}" for i in range(n)], "morphisms": morphisms,
            "compose": compose_table}


def cyclic_spec(n):
    """The group Z_n as a one-object category."""
    return {"objects": ["*"], "morphisms": [[f"g{k}", 0, 0] for k in range(n)],
            "compose": [[g, f, (g + f) % n] for g in range(n) for f in range(n)]}


def all_functors(C, D):
    """Every functor between two small FinCats, by brute force."""
    out = []
    for om in itertools.product(D.objects(), repeat=len(C.objects())):
        choices = [D.hom(om[C.src(f)], om[C.tgt(f)]) for f in C.morphisms()]
        for mm in itertools.product(*choices):
            F = FinFunctor(C, D, om, mm, check=False)
            try:
                validate_functor(F)
            except ValueError:
                continue
            out.append(F)
    return out


def random_prof(rng, A, B, terms=2):
    """A sum of companions and conjoints of functors between A and B."""
    parts = []
    for _ in range(rng.randint(1, terms)):
        if rng.random() < 0.5:
            fs = all_functors(A, B)
            if fs:
                parts.append(companion(rng.choice(fs)))
        else:
            fs = all_functors(B, A)
            if fs:
                parts.append(conjoint(rng.choice(fs)))
    if not parts:
        return Profunctor(A, B, {}, None, None, name="0")
    P = parts[0]
    for Q in parts[1:]:
        P = psum(P, Q)
    return P


def random_composite(rng):
    A, M, B = (builtin(rng.choice(FAMILY[1:])) for _ in range(3))
    return compose(random_prof(rng, M, B), random_prof(rng, A, M))


def hom_oracle(A, x, y):
    """Σ over bijections σ of Π |A[x_i, y_σ(i)]|."""
    if len(x) != len(y):
        return 0
    total = 0
    for s in itertools.permutations(range(len(x))):
        k = 1
        for i, j in enumerate(s):
            k *= len(A.hom(x[i], y[j]))
        total += k
    return total


def random_symseq(rng, A, B, bound, max_arity=2):
    """A Kleisli map A -> B: a sum of terms K∘w (arity 0), K∘d (arity 1) and
    K∘π₁∘(d⊗d)∘c (arity 2), with K a random profunctor."""
    from profdiff.catsym import SymSeq
    from profdiff.fincat import Functor, Product, one
    from profdiff.prof import tensor
    from profdiff import structmaps as sm
    terms = []
    for _ in range(rng.randint(1, 2)):
        k = rng.randint(0, max_arity)
        if k == 0:
            body = compose(random_prof(rng, one(), B), sm.weakening(A, bound))
        elif k == 1:
            body = compose(random_prof(rng, A, B), sm.dereliction(A, bound))
        else:
            d = sm.dereliction(A, bound)
            first = companion(Functor(Product(A, A), A, lambda p: p[0], lambda f: f[0]))
            body = compose(random_prof(rng, A, B),
                           compose(first, compose(tensor(d, d), sm.contraction(A, bound))))
        terms.append(body)
    body = terms[0]
    for t in terms[1:]:
        body = psum(body, t)
    return SymSeq(A, B, body)


def nested_bound(H, G, F):
    """A bound large enough for both bracketings of H ∘ G ∘ F."""
    from profdiff.catsym import required_bound
    gf = G.arity * max(1, F.arity)
    hg = H.arity * max(1, G.arity)
    return max(2, required_bound(G, F), required_bound(H, G), required_bound(H, gf),
               required_bound(hg, F))


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
