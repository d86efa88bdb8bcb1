"""Text format for categories, profunctors, species, presheaves and reports.

Every document is YAML with ``format_version: 1`` and a ``kind`` field.
Categories referenced from other documents may be written inline, as the
name of a built-in (``"1"``, ``"arrow"``, ...), or as a constructor:
``{bang: C, limits: [3]}``, ``{product: [C, D]}``, ``{sum: [C, D]}``,
``{op: C}``.  Objects and morphisms of constructed categories are written
with the category's own encoding (indices for finite categories, lists for
sequences and pairs).  Profunctor elements are numbered within their cell.
"""

import yaml

from .analytic import Presheaf, Species, compose_perm, perms
from .fincat import (BUILTINS, CategoryError, FinCat, Opposite, Product, Sum, build_fincat,
                     builtin)
from .freesmc import Bang
from .prof import Profunctor, ProfunctorError, audit, op

FORMAT_VERSION = 1
KINDS = ("category", "profunctor", "species", "presheaf", "report")


class FormatError(ValueError):
    """A document does not follow the schema; ``field`` names where."""

    def __init__(self, msg, field=None, line=None):
        where = ""
        if field is not None:
            where += f" [{field}]"
        if line is not None:
            where += f" (line {line})"
        super().__init__(msg + where)
        self.field = field
        self.line = line


# -- documents ----------------------------------------------------------------------

def load_document(text):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise FormatError(f"not valid YAML: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from None
    if not isinstance(doc, dict):
        raise FormatError("document must be a mapping")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version!r}", field="format_version")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}", field="kind")
    return doc


class _Dumper(yaml.SafeDumper):
    """Lists holding no mappings are written inline."""


def _list_repr(dumper, data):
    flow = not any(isinstance(x, dict) for x in data)
    return dumper.represent_sequence("tag:yaml.org,2002:seq", data, flow_style=flow)


_Dumper.add_representer(list, _list_repr)


def dump_document(doc):
    return yaml.dump(doc, Dumper=_Dumper, sort_keys=False, allow_unicode=True, width=100)


def parse(text):
    """Parse any artifact document into its object."""
    doc = load_document(text)
    return PARSERS[doc["kind"]](doc)


def serialize(obj):
    if isinstance(obj, FinCat):
        return dump_document(category_doc(obj))
    if isinstance(obj, Profunctor):
        return dump_document(profunctor_doc(obj))
    if isinstance(obj, Species):
        return dump_document(species_doc(obj))
    if isinstance(obj, Presheaf):
        return dump_document(presheaf_doc(obj))
    if hasattr(obj, "as_dict"):
        return dump_document(obj.as_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def read_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def write_text(text, path=None):
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def _header(kind, name=None):
    doc = {"format_version": FORMAT_VERSION, "kind": kind}
    if name is not None:
        doc["name"] = name
    return doc


def _need(doc, key, where):
    if key not in doc:
        raise FormatError(f"missing field {key!r}", field=f"{where}.{key}")
    return doc[key]


# -- categories -------------------------------------------------------------------------

def category_doc(C):
    doc = _header("category", C.name)
    raw = C.describe()
    doc["objects"] = raw["objects"]
    doc["morphisms"] = raw["morphisms"]
    if raw["identities"] != list(range(len(raw["objects"]))):
        doc["identities"] = raw["identities"]
    if raw["compose"]:
        doc["compose"] = raw["compose"]
    return doc


def parse_category(doc):
    for key in ("objects", "morphisms"):
        _need(doc, key, "category")
    try:
        return build_fincat(doc, name=doc.get("name"))
    except CategoryError as exc:
        raise FormatError(f"invalid category: {exc}", field="category") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed category: {exc}", field="category") from None


def category_ref(C):
    """Reference used inside other documents."""
    if isinstance(C, FinCat):
        for name, make in BUILTINS.items():
            if make() == C:
                return name
        return {k: v for k, v in category_doc(C).items() if k not in ("format_version", "kind")}
    if isinstance(C, Bang):
        return {"bang": category_ref(C.base), "limits": list(C.limits)}
    if isinstance(C, Product):
        return {"product": [category_ref(C.left), category_ref(C.right)]}
    if isinstance(C, Sum):
        return {"sum": [category_ref(p) for p in C.parts]}
    if isinstance(C, Opposite):
        return {"op": category_ref(C.base)}
    raise TypeError(f"no text form for category {C!r}")


def resolve_category(ref, field="category"):
    if isinstance(ref, str):
        try:
            return builtin(ref)
        except CategoryError as exc:
            raise FormatError(str(exc), field=field) from None
    if not isinstance(ref, dict):
        raise FormatError("category must be a name or a mapping", field=field)
    if "bang" in ref:
        base = resolve_category(ref["bang"], field + ".bang")
        limits = ref.get("limits")
        if not limits:
            raise FormatError("bang needs limits", field=field + ".limits")
        return Bang(base, limits[0], limits)
    if "product" in ref:
        a, b = ref["product"]
        return Product(resolve_category(a, field + ".product"), resolve_category(b, field + ".product"))
    if "sum" in ref:
        a, b = ref["sum"]
        return Sum(resolve_category(a, field + ".sum"), resolve_category(b, field + ".sum"))
    if "op" in ref:
        return op(resolve_category(ref["op"], field + ".op"))
    return parse_category(ref)


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(x)) for k, x in v.items()))
    return v


# -- profunctors ---------------------------------------------------------------------------

def _morphisms_into(C, y):
    return [f for f in C.all_into(y) if not _is_identity(C, f)]


def _is_identity(C, f):
    return f == C.identity(C.tgt(f))


def profunctor_doc(P):
    """Cells with sizes, then the action of every non-identity morphism."""
    doc = _header("profunctor", P.name)
    A, B = P.dom, P.cod
    doc["dom"] = category_ref(A)
    doc["cod"] = category_ref(B)
    keys = sorted(P.cells, key=lambda k: (repr(B.encode_object(k[0])), repr(A.encode_object(k[1]))))
    number = {k: i for i, k in enumerate(keys)}
    doc["cells"] = [[B.encode_object(b), A.encode_object(a), len(P.cells[(b, a)])]
                    for b, a in keys]
    left, right = [], []
    for b, a in keys:
        xs = P.cells[(b, a)]
        for g in _morphisms_into(B, b):
            k2 = (B.src(g), a)
            if k2 in number:
                left.append([number[(b, a)], B.encode_morphism(g),
                             [P.index(*k2, P.left(g, a, x)) for x in xs]])
        for f in _morphisms_into(A, a):
            k0 = (b, A.src(f))
            if k0 in number:
                right.append([number[k0], A.encode_morphism(f),
                              [P.index(b, a, P.right(f, b, x)) for x in P.cells[k0]]])
    doc["left"] = left
    doc["right"] = right
    return doc


def parse_profunctor(doc):
    A = resolve_category(_need(doc, "dom", "profunctor"), "dom")
    B = resolve_category(_need(doc, "cod", "profunctor"), "cod")
    cells, keys = {}, []
    for i, entry in enumerate(doc.get("cells") or []):
        try:
            b, a, n = entry
            b, a = B.decode_object(b), A.decode_object(a)
        except (TypeError, ValueError, IndexError, KeyError):
            raise FormatError("cell entries are [cod object, dom object, size]",
                              field=f"cells[{i}]") from None
        if not (B.contains(b) and A.contains(a)):
            raise FormatError("cell index outside its category", field=f"cells[{i}]")
        cells[(b, a)] = tuple(range(int(n)))
        keys.append((b, a))
    tables = {"left": {}, "right": {}}
    for side, C in (("left", B), ("right", A)):
        for i, entry in enumerate(doc.get(side) or []):
            try:
                c, m, images = entry
                b, a = keys[c]
                m = C.decode_morphism(m)
            except (TypeError, ValueError, IndexError, KeyError):
                raise FormatError(f"{side} entries are [cell number, morphism, images]",
                                  field=f"{side}[{i}]") from None
            if side == "left":
                tables[side][(_freeze(B.encode_morphism(m)), a)] = tuple(images)
            else:
                tables[side][(_freeze(A.encode_morphism(m)), b)] = tuple(images)

    def left(g, a, x):
        if _is_identity(B, g):
            return x
        try:
            return tables["left"][(_freeze(B.encode_morphism(g)), a)][x]
        except (KeyError, IndexError):
            raise ProfunctorError(f"left action of {B.encode_morphism(g)!r} missing") from None

    def right(f, b, x):
        if _is_identity(A, f):
            return x
        try:
            return tables["right"][(_freeze(A.encode_morphism(f)), b)][x]
        except (KeyError, IndexError):
            raise ProfunctorError(f"right action of {A.encode_morphism(f)!r} missing") from None

    P = Profunctor(A, B, cells, left, right, name=doc.get("name"))
    try:
        ce = audit(P)
    except ProfunctorError as exc:
        raise FormatError(f"incomplete action table: {exc}", field="profunctor") from None
    if ce is not None:
        raise FormatError(f"profunctor fails its audit: {ce.kind} at {ce.cell!r} ({ce.detail})",
                          field="profunctor")
    return P


# -- species ------------------------------------------------------------------------------

def _transposition(n, i):
    s = list(range(n))
    s[i], s[i + 1] = s[i + 1], s[i]
    return tuple(s)


def species_doc(F):
    """Per arity the size and the action of the adjacent transpositions."""
    doc = _header("species", F.name)
    arities = []
    for n in sorted(F.sizes):
        entry = {"n": n, "size": F.size(n)}
        gens = [list(F.tables[n][_transposition(n, i)]) for i in range(n - 1)]
        if any(g != list(range(F.size(n))) for g in gens):
            entry["transpositions"] = gens
        arities.append(entry)
    doc["arities"] = arities
    return doc


def parse_species(doc):
    sizes, tables = {}, {}
    for i, entry in enumerate(_need(doc, "arities", "species") or []):
        try:
            n, k = int(entry["n"]), int(entry["size"])
        except (KeyError, TypeError, ValueError):
            raise FormatError("arity entries need integer n and size", field=f"arities[{i}]") from None
        gens = entry.get("transpositions") or [list(range(k))] * max(n - 1, 0)
        if len(gens) != max(n - 1, 0) or any(sorted(g) != list(range(k)) for g in gens):
            raise FormatError("transpositions must be n-1 permutations of the elements",
                              field=f"arities[{i}].transpositions")
        sizes[n] = k
        tables[n] = _generate(n, k, [tuple(g) for g in gens])
    F = Species(sizes, tables, name=doc.get("name"))
    problem = F.audit()
    if problem is not None:
        raise FormatError(f"species action is not a group action: {problem}", field="species")
    return F


def _generate(n, k, gens):
    """Extend the transposition action to all of S_n along a breadth-first word."""
    ident = tuple(range(n))
    table = {ident: tuple(range(k))}
    frontier = [ident]
    while frontier:
        nxt = []
        for s in frontier:
            for i, g in enumerate(gens):
                t = compose_perm(_transposition(n, i), s)
                if t not in table:
                    table[t] = tuple(g[y] for y in table[s])
                    nxt.append(t)
        frontier = nxt
    if len(table) != len(perms(n)):
        raise FormatError(f"transpositions do not generate S_{n}")
    return table


# -- presheaves ---------------------------------------------------------------------------

def presheaf_doc(X):
    A = X.base
    doc = _header("presheaf")
    doc["base"] = category_ref(A)
    doc["cells"] = [[A.encode_object(a), len(X(a))] for a in A.objects() if X(a)]
    acts = []
    for a in A.objects():
        for f in _morphisms_into(A, a):
            if X(a):
                src = list(X(A.src(f)))
                acts.append([A.encode_morphism(f), [src.index(X.act(f, x)) for x in X(a)]])
    if acts:
        doc["action"] = acts
    return doc


def parse_presheaf(doc):
    A = resolve_category(_need(doc, "base", "presheaf"), "base")
    cells = {}
    for i, entry in enumerate(doc.get("cells") or []):
        try:
            a, n = entry
            cells[A.decode_object(a)] = tuple(range(int(n)))
        except (TypeError, ValueError, KeyError):
            raise FormatError("cell entries are [object, size]", field=f"cells[{i}]") from None
    table = {}
    for i, entry in enumerate(doc.get("action") or []):
        try:
            f, images = entry
            table[_freeze(A.encode_morphism(A.decode_morphism(f)))] = tuple(images)
        except (TypeError, ValueError, KeyError):
            raise FormatError("action entries are [morphism, images]", field=f"action[{i}]") from None

    def act(f, x):
        if _is_identity(A, f):
            return x
        return table[_freeze(A.encode_morphism(f))][x]

    X = Presheaf(A, cells, act)
    try:
        problem = X.audit()
    except (KeyError, IndexError):
        problem = "action table incomplete"
    if problem is not None:
        raise FormatError(f"presheaf fails its audit: {problem}", field="presheaf")
    return X


def parse_report(doc):
    return doc


PARSERS = {
    "category": parse_category,
    "profunctor": parse_profunctor,
    "species": parse_species,
    "presheaf": parse_presheaf,
    "report": parse_report,
}
