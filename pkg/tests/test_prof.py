import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from profdiff.fincat import builtin, one
from profdiff.freesmc import Bang
from profdiff.prof import (Profunctor, ProfunctorError, SearchBudgetExceeded, associator, audit,
                           bang_prof, check_bijective, check_naturality,
                           check_representative_independence, companion, compose, conjoint,
                           dual, hom_prof, identity_nat, iso_check, left_unitor, right_unitor,
                           sum as psum, tensor, zero)
from conftest import FAMILY, all_functors, random_composite, random_prof

seeds = st.integers(0, 10 ** 6)
names = st.sampled_from(FAMILY[1:])


def coend_oracle(N, M, c, a):
    """Number of classes of ⊔_b N(c,b) x M(b,a), relating along every middle morphism."""
    B = M.cod
    elems = [(b, y, x) for b in B.objects() for y in N.cell(c, b) for x in M.cell(b, a)]
    parent = {e: e for e in elems}

    def find(e):
        while parent[e] != e:
            e = parent[e]
        return e

    for f in (f for y in B.objects() for f in B.all_into(y)):
        b, b2 = B.src(f), B.tgt(f)
        for y in N.cell(c, b):
            for x in M.cell(b2, a):
                u = find((b2, N.right(f, c, y), x))
                v = find((b, y, M.left(f, a, x)))
                parent[u] = v
    return len({find(e) for e in elems})


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_compose_matches_naive_coend(seed):
    rng = random.Random(seed)
    A, Mid, C = (builtin(rng.choice(FAMILY[1:])) for _ in range(3))
    M, N = random_prof(rng, A, Mid), random_prof(rng, Mid, C)
    P = compose(N, M)
    for c in C.objects():
        for a in A.objects():
            assert len(P.cell(c, a)) == coend_oracle(N, M, c, a)
    assert audit(P) is None
    assert check_representative_independence(P) is None


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_identity_profunctor_is_a_unit(seed):
    rng = random.Random(seed)
    A, B = builtin(rng.choice(FAMILY)), builtin(rng.choice(FAMILY))
    M = random_prof(rng, A, B)
    IM, MI = compose(hom_prof(B), M), compose(M, hom_prof(A))
    for t in (left_unitor(IM), right_unitor(MI)):
        assert check_naturality(t) is None
        assert check_bijective(t) is None


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_associator_is_a_natural_iso(seed):
    rng = random.Random(seed)
    A, B, C, D = (builtin(rng.choice(FAMILY[1:])) for _ in range(4))
    R, Q, P = random_prof(rng, A, B), random_prof(rng, B, C), random_prof(rng, C, D)
    t = associator(compose(compose(P, Q), R), compose(P, compose(Q, R)))
    assert check_naturality(t) is None
    assert check_bijective(t) is None


@pytest.mark.parametrize("a", FAMILY[1:])
@pytest.mark.parametrize("b", FAMILY[1:])
@pytest.mark.parametrize("c", FAMILY[1:])
def test_companions_compose_like_functors(a, b, c):
    A, B, C = builtin(a), builtin(b), builtin(c)
    for H in all_functors(A, B)[:2]:
        for K in all_functors(B, C)[:2]:
            KH = type(H)(A, C, [K.ob(H.ob(x)) for x in A.objects()],
                         [K.mor(H.mor(f)) for f in A.morphisms()])
            assert iso_check(compose(companion(K), companion(H)), companion(KH)) is not None
            assert iso_check(compose(conjoint(H), conjoint(K)), conjoint(KH)) is not None


def test_iso_check_distinguishes_actions():
    Z = builtin("BZ2")
    regular = hom_prof(Z)
    trivial = Profunctor(Z, Z, {(0, 0): (0, 1)}, lambda g, a, x: x, lambda f, b, x: x)
    assert audit(trivial) is None
    assert regular.cardinalities() == trivial.cardinalities()
    assert iso_check(regular, trivial) is None
    t = iso_check(regular, regular)
    assert check_naturality(t) is None and check_bijective(t) is None


def test_iso_check_budget():
    B = Bang(one(), 4)
    P = bang_prof(hom_prof(one()), B, B)
    with pytest.raises(SearchBudgetExceeded):
        iso_check(P, P, node_limit=3)


def test_iso_check_rejects_non_parallel():
    with pytest.raises(ProfunctorError):
        iso_check(hom_prof(one()), hom_prof(builtin("BZ2")))


def test_audit_catches_broken_action():
    A = builtin("arrow")
    bad = Profunctor(A, A, {(0, 0): ("x",), (0, 1): ("y",)},
                     lambda g, a, x: x, lambda f, b, x: "x")
    found = audit(bad)
    assert found is not None and found.kind in ("right", "identity")


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_sum_tensor_dual_cardinalities(seed):
    rng = random.Random(seed)
    A, B = builtin(rng.choice(FAMILY)), builtin(rng.choice(FAMILY))
    F, G = random_prof(rng, A, B), random_prof(rng, A, B)
    S = psum(F, G)
    for k in set(F.cells) | set(G.cells):
        assert len(S.cell(*k)) == len(F.cell(*k)) + len(G.cell(*k))
    assert iso_check(S, psum(G, F)) is not None
    assert iso_check(psum(F, zero(A, B)), F) is not None
    T = tensor(F, G)
    assert T.size() == F.size() * G.size()
    D = dual(F)
    assert {(a, b): n for (b, a), n in F.cardinalities().items()} == D.cardinalities()
    for P in (S, T, D):
        assert audit(P) is None


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_bang_prof_cardinality(seed):
    """|!F(β, α)| is the permanent of the matrix |F(β_i, α_j)|."""
    rng = random.Random(seed)
    A, B = builtin(rng.choice(FAMILY[1:])), builtin(rng.choice(FAMILY[1:]))
    F = random_prof(rng, A, B)
    BA, BB = Bang(A, 2), Bang(B, 2)
    P = bang_prof(F, BA, BB)
    assert audit(P) is None
    for beta in BB.objects():
        for alpha in BA.objects():
            if len(alpha) != len(beta):
                assert not P.cell(beta, alpha)
                continue
            perm = sum(
                math.prod(len(F.cell(beta[i], alpha[s[i]])) for i in range(len(beta)))
                for s in itertools.permutations(range(len(beta))))
            assert len(P.cell(beta, alpha)) == perm


def test_representative_independence_on_fifty_composites():
    rng = random.Random(50)
    for _ in range(50):
        P = random_composite(rng)
        assert check_representative_independence(P) is None


def test_identity_nat_passes():
    P = hom_prof(builtin("arrow"))
    t = identity_nat(P)
    assert check_naturality(t) is None and check_bijective(t) is None
