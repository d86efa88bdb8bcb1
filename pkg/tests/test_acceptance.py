"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary.
Run directly with ``python tests/test_acceptance.py`` for the lines alone.
"""

import random
import time

import pytest

from profdiff import laws
from profdiff import structmaps as sm
from profdiff.analytic import (E, E_n, binomial_convolution, burnside_count, eval_species,
                               random_species, sp_derivative, sp_product, species_to_symseq)
from profdiff.catsym import kleisli_compose, kleisli_id
from profdiff.fincat import builtin
from profdiff.freesmc import depth
from profdiff.prof import (audit, check_naturality, check_representative_independence, compose,
                           hom_prof, iso_check)

FAMILY = laws.FAMILY
RESULTS = {}


def record(n, title, fn):
    start = time.perf_counter()
    try:
        detail = fn()
        ok, why = True, detail or ""
    except AssertionError as exc:
        ok, why = False, str(exc) or "assertion failed"
    secs = time.perf_counter() - start
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title} ({secs:.1f}s){'  ' + why if why else ''}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def cases_pass(config):
    report = laws.run_suite(config, suite="acceptance")
    bad = [(c.law, c.categories, c.bound, [k.as_dict() for k in c.checks if k.verdict == "fail"])
           for c in report.failures()]
    assert not bad, f"failed cases: {bad}"
    return report


def test_criterion_01_first_constraint():
    def body():
        cases_pass([("first_constraint", (c,), 3) for c in FAMILY])
        for c in FAMILY:
            A = builtin(c)
            dd = compose(sm.dereliction(A, 3), sm.codereliction(A, 3))
            assert dd.cardinalities() == hom_prof(A).cardinalities(), f"|d∘d̄| differs on {c}"
        assert compose(sm.dereliction(builtin("BZ2"), 3),
                       sm.codereliction(builtin("BZ2"), 3)).cardinalities() == {(0, 0): 2}
    record(1, "first constraint on the test family, |d∘d̄(a',a)| = |A[a',a]|", body)


def test_criterion_02_second_constraint():
    record(2, "second constraint at bound 3 for 1 and discrete(2)",
           lambda: cases_pass([("second_constraint", (c,), 3) for c in ("1", "discrete2")]) and None)


def test_criterion_03_strength():
    trio = ("1", "discrete2", "arrow")
    cfg = [("strength", (a, b), 2) for a in trio for b in trio] + [("strength", ("1", "1"), 3)]
    record(3, "strength on pairs from {1, discrete(2), arrow} at 2 and (1,1) at 3",
           lambda: cases_pass(cfg) and None)


def test_criterion_04_comonad():
    record(4, "coassociativity and both counit laws at bound 3 on the test family",
           lambda: cases_pass([("comonad", (c,), 3) for c in FAMILY]) and None)


def test_criterion_05_seely():
    def body():
        report = cases_pass([("seely", pair, 3) for pair in (("1", "1"), ("1", "discrete2"))])
        names = {k.name for c in report.cases for k in c.checks}
        assert any("s0" in n or "s⁰" in n for n in names), f"no s0 roundtrip check in {names}"
    record(5, "Seely roundtrips for (1,1) and (1,discrete(2)), s0 exact", body)


def test_criterion_06_derivative_rules():
    record(6, "constant, product, chain and monoidal rules (1 at 3, discrete(2) at 2)",
           lambda: cases_pass([("derivative_rules", ("1",), 3),
                               ("derivative_rules", ("discrete2",), 2)]) and None)


def test_criterion_07_bialgebra():
    record(7, "bialgebra checks and w∘w̄ at bound 2 on the test family, convolution exact",
           lambda: cases_pass([("bialgebra", (c,), 2) for c in FAMILY]) and None)


def test_criterion_08_species():
    def body():
        assert eval_species(E_n(2), 3) == 6, "|E2(X)| at |X| = 3"
        for pair in ((sp_derivative(E(4)), E(3)),) + tuple(
                (sp_derivative(E_n(n)), E_n(n - 1)) for n in range(1, 5)):
            dF, want = pair
            assert dF.sizes == want.sizes
            assert iso_check(species_to_symseq(dF, 4).body, species_to_symseq(want, 4).body)
        rng = random.Random(2024)
        for _ in range(20):
            F, G = random_species(rng, 3), random_species(rng, 3)
            P = sp_product(F, G)
            for n in range(F.arity + G.arity + 1):
                assert P.size(n) == binomial_convolution(F, G, n), "binomial convolution"
        for _ in range(20):
            F, x = random_species(rng, 3), rng.randint(0, 4)
            assert burnside_count(F, x) == eval_species(F, x), "Burnside oracle"
    record(8, "species: E2 at 3 = 6, dE = E, dEn = E(n-1), convolution x20, Burnside x20", body)


def test_criterion_09_engine_audits():
    def body():
        # every structural map over the family passes the audit; exhaustive where
        # the window is small, generator level for !!A-sided maps at bound 3
        for c in FAMILY:
            A = builtin(c)
            for name in ("promotion", "dereliction", "codereliction", "contraction",
                         "cocontraction", "weakening", "coweakening"):
                for n in (2, 3):
                    P = sm.build(name, [A], n)
                    deep = n == 2 or depth(P.cod) <= 1
                    assert audit(P, deep=deep) is None, f"{name} over {c} at {n}"
            assert audit(sm.promotion(sm.bang(A, 2), 2)) is None
        for pair in (("1", "1"), ("1", "arrow"), ("discrete2", "BZ2")):
            for name in ("mon2", "seely2", "seely2_inv"):
                assert audit(sm.build(name, [builtin(x) for x in pair], 3)) is None
        # every returned transformation re-passes naturality
        report = laws.run_suite(laws.default_config(2), suite="audit")
        assert report.ok
        witnesses = [k.witness for c in report.cases for k in c.checks if k.witness is not None]
        for t in witnesses:
            assert check_naturality(t) is None, f"witness {t.name} not natural"
        # representative independence on 50 random composites
        import sys, os
        sys.path.insert(0, os.path.dirname(__file__))
        from conftest import nested_bound, random_composite, random_symseq
        rng = random.Random(50)
        for _ in range(50):
            P = random_composite(rng)
            assert check_representative_independence(P) is None
            assert audit(P) is None
        # Kleisli unit and associativity on random triples of arity <= 2
        tested = 0
        while tested < 10:
            A, B, C, D = (builtin(rng.choice(FAMILY)) for _ in range(4))
            F, G, H = (random_symseq(rng, A, B, 2), random_symseq(rng, B, C, 2),
                       random_symseq(rng, C, D, 2))
            for S, X, Y in ((F, A, B), (G, B, C)):
                t = iso_check(kleisli_compose(kleisli_id(Y, 2), S).body, S.body)
                assert t is not None and check_naturality(t) is None
                assert iso_check(kleisli_compose(S, kleisli_id(X, 2), 2).body, S.body)
            need = nested_bound(H, G, F)
            if need > 4:
                continue
            L = kleisli_compose(H, kleisli_compose(G, F, need), need)
            R = kleisli_compose(kleisli_compose(H, G, need), F, need)
            t = iso_check(L.body, R.body)
            assert t is not None and check_naturality(t) is None, "Kleisli associativity"
            tested += 1
        return f"{len(witnesses)} witnesses re-checked"
    record(9, "engine audits, naturality of witnesses, coend classes, Kleisli laws", body)


def test_criterion_10_mutations():
    def body():
        caught = []
        for seed in range(10):
            name, report = laws.mutation_trial(seed, 3)
            assert not report.ok, f"seed {seed}: corrupting {name} went unnoticed"
            caught.append(name)
        return "corrupted: " + ", ".join(caught)
    record(10, "each of 10 seeded single-entry corruptions fails the default suite", body)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
