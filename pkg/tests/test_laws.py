import pytest

from profdiff import laws
from profdiff import structmaps as sm
from profdiff.fincat import builtin, one
from profdiff.prof import compose, hom_prof


def verdicts(case):
    return {c.name: c.verdict for c in case.checks}


@pytest.mark.parametrize("cat", ["0", "1", "discrete2", "arrow", "BZ2"])
@pytest.mark.parametrize("law", ["first_constraint", "second_constraint", "comonad",
                                 "derivative_rules", "bialgebra"])
def test_single_category_laws_at_bound_two(law, cat):
    case = laws.run_case(law, (cat,), 2)
    assert case.verdict != "fail", [c.as_dict() for c in case.checks if c.verdict == "fail"]


@pytest.mark.parametrize("pair", [("1", "1"), ("1", "arrow"), ("discrete2", "BZ2"), ("0", "1")])
@pytest.mark.parametrize("law", ["strength", "seely"])
def test_pair_laws_at_bound_two(law, pair):
    case = laws.run_case(law, pair, 2)
    assert case.verdict != "fail", [c.as_dict() for c in case.checks if c.verdict == "fail"]


@pytest.mark.parametrize("cat", ["0", "1", "discrete2", "arrow", "BZ2"])
def test_dereliction_after_codereliction_has_hom_sizes(cat):
    A = builtin(cat)
    dd = compose(sm.dereliction(A, 3), sm.codereliction(A, 3))
    assert dd.cardinalities() == hom_prof(A).cardinalities()
    if cat == "BZ2":
        assert dd.cardinalities() == {(0, 0): 2}


def test_empty_category_laws_are_vacuous_or_pass():
    case = laws.run_case("comonad", ("0",), 3)
    assert case.verdict in ("pass", "vacuous")


def test_faults_are_caught_by_the_law_that_uses_the_map():
    with sm.inject_fault("codereliction", 11):
        case = laws.run_case("first_constraint", ("BZ2",), 2)
    assert case.verdict == "fail"
    with sm.inject_fault("contraction", 2):
        case = laws.run_case("bialgebra", ("BZ2",), 2)
    assert case.verdict == "fail"


def test_construction_errors_become_failed_checks(monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("no")

    monkeypatch.setitem(laws.RUNNERS, "comonad", boom)
    case = laws.run_case("comonad", ("1",), 2)
    assert case.verdict == "fail"
    assert case.checks[0].name == "construction"
    assert "RuntimeError" in case.checks[0].counterexample


def test_verdict_rules():
    case = laws.LawCase("x", ("1",), 1)
    assert case.verdict == "fail"  # no checks at all
    case.checks.append(laws.Check("a", "vacuous"))
    assert case.verdict == "vacuous"
    case.checks.append(laws.Check("b", "pass"))
    assert case.verdict == "pass"
    case.checks.append(laws.Check("c", "fail", counterexample="here"))
    assert case.verdict == "fail"


def test_report_is_deterministic_and_timing_free():
    cfg = [("first_constraint", ("1",), 2), ("comonad", ("BZ2",), 2)]
    r1 = laws.run_suite(cfg, suite="t")
    r2 = laws.run_suite(list(reversed(cfg)), suite="t")
    assert r1.as_dict() == r2.as_dict()
    assert "seconds" not in repr(r1.as_dict())
    assert r1.ok and r1.as_dict()["summary"]["fail"] == 0
    assert "secs" in r1.table()


def test_safe_windows():
    w = laws.safe_window("seely", 3, "s2inv_s2")
    assert w(None, ((0,), (0, 0))) and not w(None, ((0, 0), (0, 0)))
    assert laws.safe_window("comonad", 3) is laws.FULL


def test_run_suite_filters_by_map_and_rejects_unknown_laws():
    cfg = laws.default_config(2)
    r = laws.run_suite(cfg, only_uses="mon2", stop_on_fail=True)
    assert {c.law for c in r.cases} <= {law for law, uses in laws.USES.items() if "mon2" in uses}
    with pytest.raises(ValueError):
        laws.run_suite([("nonsense", ("1",), 2)])


def test_default_config_covers_family_and_laws():
    cfg = laws.default_config(3)
    assert {law for law, _, _ in cfg} == set(laws.LAWS)
    for law in ("first_constraint", "comonad", "bialgebra"):
        assert {cats[0] for l, cats, _ in cfg if l == law} == set(laws.FAMILY)
    assert laws.run_suite(laws.SUITES["empty"](3)).ok


@pytest.mark.parametrize("seed", [0, 5])
def test_mutation_trials_fail(seed):
    name, report = laws.mutation_trial(seed, 2)
    assert name in laws.MUTABLE
    assert not report.ok
