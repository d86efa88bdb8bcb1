import pytest
from hypothesis import given, settings, strategies as st

from profdiff.fincat import (CategoryError, audit_fincat, build_fincat, builtin, coproduct,
                             injections, opposite, product, projections)
from profdiff.fincat import test_family as builtin_family
from conftest import FAMILY, all_functors, cyclic_spec, poset_spec

edges = st.integers(2, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1),
                                                       st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]),
                                             max_size=5)))


def hom_sizes(C):
    return {(x, y): len(C.hom(x, y)) for x in C.objects() for y in C.objects()}


def test_builtin_family_shapes():
    sizes = {C.name: (len(C.objects()), len(C.morphisms())) for C in builtin_family()}
    assert sizes == {"0": (0, 0), "1": (1, 1), "discrete(2)": (2, 2), "arrow": (2, 3), "BZ2": (1, 2)}
    for name in FAMILY:
        assert audit_fincat(builtin(name))


def test_bz2_is_a_group_of_order_two():
    C = builtin("BZ2")
    g = 1
    assert C.compose(g, g) == C.identity(0)
    assert len(C.hom(0, 0)) == 2


@given(edges)
def test_posets_validate_and_are_thin(data):
    n, rel = data
    C = build_fincat(poset_spec(n, rel))
    assert all(k <= 1 for k in hom_sizes(C).values())
    for x in C.objects():
        assert C.hom(x, x) == (C.identity(x),)


@given(st.integers(1, 5))
def test_cyclic_groups(n):
    C = build_fincat(cyclic_spec(n))
    assert len(C.hom(0, 0)) == n
    for f in C.morphisms():
        assert any(C.compose(g, f) == C.identity(0) for g in C.morphisms())


def test_rejects_missing_identity():
    with pytest.raises(CategoryError, match="identity"):
        build_fincat({"objects": ["a", "b"], "morphisms": [["id", 0, 0]]})


def test_rejects_missing_composite():
    spec = poset_spec(3, [(0, 1), (1, 2)])
    spec["compose"] = [e for e in spec["compose"] if not (e[0] == 5 and e[1] == 3)]
    with pytest.raises(CategoryError, match="missing"):
        build_fincat(spec)


def test_rejects_non_associative_table():
    # a monoid {1, a, b} with a∘a = b, a∘b = a, b∘a = b, b∘b = b fails associativity
    spec = {"objects": ["*"], "morphisms": [["1", 0, 0], ["a", 0, 0], ["b", 0, 0]],
            "compose": [[1, 1, 2], [1, 2, 1], [2, 1, 2], [2, 2, 2]]}
    with pytest.raises(CategoryError, match="associativity"):
        build_fincat(spec)


def test_rejects_endpoint_mismatch():
    spec = poset_spec(2, [(0, 1)])
    spec["compose"].append([2, 2, 2])
    with pytest.raises(CategoryError):
        build_fincat(spec)


@pytest.mark.parametrize("a", FAMILY)
@pytest.mark.parametrize("b", FAMILY)
def test_product_and_coproduct_hom_sizes(a, b):
    C, D = builtin(a), builtin(b)
    P, S = product(C, D), coproduct(C, D)
    audit_fincat(P)
    audit_fincat(S)
    nD = len(D.objects())
    for (x, y), k in hom_sizes(P).items():
        assert k == len(C.hom(x // nD, y // nD)) * len(D.hom(x % nD, y % nD))
    assert len(S.morphisms()) == len(C.morphisms()) + len(D.morphisms())
    p1, p2 = projections(C, D)
    i1, i2 = injections(C, D)
    assert all(p1.ob(x) * nD + p2.ob(x) == x for x in P.objects())
    assert set(i1.object_map) | set(i2.object_map) == set(S.objects())


@pytest.mark.parametrize("name", FAMILY)
def test_opposite_is_involutive(name):
    C = builtin(name)
    Cop = opposite(C)
    for x in C.objects():
        for y in C.objects():
            assert C.hom(x, y) == Cop.hom(y, x)
    assert opposite(Cop).name == C.name


def test_functor_counts():
    A, Z = builtin("arrow"), builtin("BZ2")
    assert len(all_functors(A, A)) == 3
    assert len(all_functors(Z, Z)) == 2
    assert len(all_functors(Z, A)) == 2  # g must go to an identity
    assert len(all_functors(builtin("0"), A)) == 1
