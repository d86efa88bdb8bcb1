import random
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from profdiff.analytic import (E, E_n, Presheaf, X_species, binomial_convolution, burnside_count,
                               constant_presheaf, egf_coeffs, eval_analytic, eval_species,
                               random_species, sp_derivative, sp_product, sp_substitute, sp_sum,
                               species_to_symseq, subsets, symseq_to_species, zero_species)
from profdiff.catsym import kleisli_id
from profdiff.fincat import builtin, one
from profdiff.prof import ProfunctorError, audit, iso_check

seeds = st.integers(0, 10 ** 6)


def species_iso(F, G, bound=4):
    if F.sizes != G.sizes:
        return False
    return iso_check(species_to_symseq(F, bound).body, species_to_symseq(G, bound).body) is not None


def test_egf_of_sets():
    assert egf_coeffs(E(4), 4) == [Fraction(1, factorial(n)) for n in range(5)]


def test_pairs_of_three():
    assert eval_species(E_n(2), 3) == 6


@pytest.mark.parametrize("n", range(1, 5))
def test_derivative_of_En(n):
    assert species_iso(sp_derivative(E_n(n)), E_n(n - 1))


def test_derivative_of_E():
    dE = sp_derivative(E(4))
    assert dE.sizes == {n: 1 for n in range(4)}
    assert species_iso(dE, E(3))
    assert sp_derivative(E_n(0)).sizes == {}


def test_derivative_of_subsets_counts():
    # d(subsets of size k on n points) at arity n-1 is the n-set's k-subsets
    for n in range(1, 5):
        for k in range(n + 1):
            dS = sp_derivative(subsets(n, k))
            assert dS.size(n - 1) == comb(n, k)


@pytest.mark.parametrize("seed", range(20))
def test_product_is_binomial_convolution(seed):
    rng = random.Random(seed)
    F, G = random_species(rng, 3), random_species(rng, 3)
    P = sp_product(F, G)
    assert P.audit() is None
    for n in range(F.arity + G.arity + 1):
        assert P.size(n) == binomial_convolution(F, G, n)


@pytest.mark.parametrize("seed", range(20))
def test_burnside_matches_coend(seed):
    rng = random.Random(1000 + seed)
    F = random_species(rng, 3)
    x = rng.randint(0, 4)
    assert burnside_count(F, x) == eval_species(F, x)


def test_product_of_singletons():
    X = X_species()
    P = sp_product(X, X)
    assert P.sizes == {2: 2}
    assert sorted(P.tables[2][(1, 0)]) == [0, 1] and P.tables[2][(1, 0)] != (0, 1)
    assert eval_species(P, 3) == 9


def test_substitution_units():
    rng = random.Random(4)
    G = random_species(rng, 2)
    assert species_iso(sp_substitute(E(3), X_species()), E(3))
    assert species_iso(sp_substitute(X_species(), G), G)


def test_sum_and_zero():
    rng = random.Random(8)
    F = random_species(rng, 3)
    S = sp_sum(F, zero_species())
    assert S == sp_sum(F, zero_species()) and species_iso(S, F)
    assert sp_derivative(zero_species()).sizes == {}


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_random_species_roundtrip_through_symseq(seed):
    F = random_species(random.Random(seed), 3)
    assert F.audit() is None
    S = species_to_symseq(F)
    assert audit(S.body) is None
    assert symseq_to_species(S) == F


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(0, 3))
def test_egf_of_derivative_is_shifted(seed, n):
    """The n-th egf coefficient of dF is (n+1) times the (n+1)-th of F."""
    F = random_species(random.Random(seed), 3)
    dF = sp_derivative(F)
    assert egf_coeffs(dF, 3)[n] == (n + 1) * egf_coeffs(F, 4)[n + 1]


def test_audit_detects_broken_table():
    F = subsets(3, 1)
    assert F.audit() is None
    F.tables[3][(1, 0, 2)] = (0, 1, 2)
    assert F.audit() is not None


@pytest.mark.parametrize("name", ["1", "discrete2"])
def test_identity_kleisli_map_fixes_presheaves(name):
    A = builtin(name)
    X = constant_presheaf(A, 3)
    FX = eval_analytic(kleisli_id(A, 2), X)
    assert FX.cardinalities() == X.cardinalities()
    assert FX.audit() is None


def test_identity_kleisli_map_on_a_group_action():
    Z = builtin("BZ2")
    X = Presheaf(Z, {0: ("a", "b")}, lambda f, x: x if f == 0 else {"a": "b", "b": "a"}[x])
    assert X.audit() is None
    FX = eval_analytic(kleisli_id(Z, 2), X)
    assert FX.cardinalities() == {0: 2}
    # the action survives: the generator moves every element
    assert all(FX.act(1, e) != e for e in FX(0))


def test_eval_rejects_wrong_base():
    with pytest.raises(ProfunctorError):
        eval_analytic(kleisli_id(one(), 2), constant_presheaf(builtin("discrete2"), 1))


def test_zero_species_evaluates_to_empty():
    assert eval_species(zero_species(), 3) == 0
    assert burnside_count(zero_species(), 3) == 0
