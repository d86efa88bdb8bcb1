import random

import pytest
from hypothesis import given, settings, strategies as st

from profdiff import formats as fm
from profdiff import structmaps as sm
from profdiff.analytic import E_n, Presheaf, constant_presheaf, random_species
from profdiff.fincat import build_fincat, builtin
from profdiff.prof import compose, iso_check
from conftest import FAMILY, cyclic_spec, poset_spec, random_prof


def roundtrip(obj):
    text = fm.serialize(obj)
    back = fm.parse(text)
    assert fm.serialize(back) == text
    return back


def test_one_is_a_five_line_document():
    text = fm.serialize(builtin("1"))
    assert len(text.strip().splitlines()) == 5
    assert fm.parse(text) == builtin("1")


@pytest.mark.parametrize("name", FAMILY)
def test_builtin_categories_roundtrip(name):
    assert roundtrip(builtin(name)) == builtin(name)


@given(st.integers(1, 4), st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=4))
def test_posets_roundtrip(n, rel):
    rel = [(a, b) for a, b in rel if a < b < n]
    C = build_fincat(poset_spec(n, rel))
    assert roundtrip(C) == C


def test_nontrivial_identities_roundtrip():
    spec = cyclic_spec(3)
    spec["morphisms"] = spec["morphisms"][1:] + spec["morphisms"][:1]
    spec["identities"] = [2]
    spec["compose"] = [[(g - 1) % 3, (f - 1) % 3, (h - 1) % 3] for g, f, h in cyclic_spec(3)["compose"]]
    C = build_fincat(spec)
    back = roundtrip(C)
    assert back.identity(0) == 2


def test_malformed_table_names_the_entry():
    doc = dict(poset_spec(3, [(0, 1), (1, 2)]), format_version=1, kind="category")
    doc["compose"] = [e for e in doc["compose"] if not (e[0] == 5 and e[1] == 3)]
    with pytest.raises(fm.FormatError, match=r"\(1<2,0<1\)"):
        fm.parse_category(doc)


@pytest.mark.parametrize("text,field", [
    ("format_version: 2\nkind: category\n", "format_version"),
    ("format_version: 1\nkind: widget\n", "kind"),
    ("format_version: 1\nkind: category\nobjects: [a]\n", None),
])
def test_schema_errors(text, field):
    with pytest.raises(fm.FormatError) as err:
        fm.parse(text)
    if field:
        assert err.value.field == field


def test_yaml_errors_report_a_line():
    with pytest.raises(fm.FormatError) as err:
        fm.load_document("format_version: 1\nkind: [category\n")
    assert err.value.line is not None


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_profunctors_roundtrip(seed):
    rng = random.Random(seed)
    A, B = builtin(rng.choice(FAMILY)), builtin(rng.choice(FAMILY))
    P = random_prof(rng, A, B)
    Q = roundtrip(P)
    assert Q.cardinalities() == P.cardinalities()


@pytest.mark.parametrize("name", ["promotion", "contraction", "dereliction"])
def test_structural_maps_roundtrip_up_to_iso(name):
    P = sm.build(name, [builtin("BZ2")], 2)
    Q = roundtrip(P)
    assert iso_check(P, Q) is not None


def test_profunctor_load_is_audited():
    doc = fm.load_document(fm.serialize(sm.dereliction(builtin("BZ2"), 1)))
    assert fm.parse_profunctor(doc).cardinalities() == {(0, (0,)): 2}
    doc["left"][0][2] = [0, 0]  # g no longer acts invertibly, so g∘g != id
    with pytest.raises(fm.FormatError, match="audit"):
        fm.parse_profunctor(doc)
    doc["left"] = []
    with pytest.raises(fm.FormatError, match="incomplete"):
        fm.parse_profunctor(doc)


def test_species_file_loads_with_one_element():
    F = fm.parse(fm.serialize(E_n(2)))
    assert F.size(2) == 1 and F.audit() is None


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_species_roundtrip_exactly(seed):
    F = random_species(random.Random(seed), 3)
    assert roundtrip(F) == F


def test_presheaf_roundtrip():
    Z = builtin("BZ2")
    X = Presheaf(Z, {0: (0, 1)}, lambda f, x: x if f == 0 else 1 - x)
    Y = roundtrip(X)
    assert Y.cardinalities() == X.cardinalities() and Y.audit() is None
    assert Y.act(1, Y(0)[0]) != Y(0)[0]


def test_composite_serializes_and_reloads():
    A = builtin("arrow")
    P = compose(sm.dereliction(A, 2), sm.codereliction(A, 2))
    Q = roundtrip(P)
    assert Q.cardinalities() == P.cardinalities()
